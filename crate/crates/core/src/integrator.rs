//! The approximate Taylor stepper.
//!
//! One step of order `R` from state `v`:
//!
//! 1. `v(0) = v`, `v(1) = f(v)`;
//! 2. for `k = 1, ..., R-1`, approximate the next derivative by applying the
//!    `(k, ceil((R-k)/2))` stencil to samples of `f` along the degree-`k`
//!    Taylor polynomial built so far:
//!    `v(k+1) = stencil(f(T_k(i*h)), i = -m..m) / h^k`;
//! 3. advance with the degree-`R` polynomial: `v + h * sum_l w(l)` where
//!    `w(l) = v(l) * h^(l-1) / l!`.
//!
//! The center sample `f(T_k(0))` equals `f(v)` for every `k` and is computed
//! once per step, so the number of distinct `f` evaluations matches the
//! stage count of the scheme's Runge-Kutta form.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::linalg::Matrix;
use crate::scalar::{inv_factorial, vec_axpy, Scalar};
use crate::stencil::StencilCoefficients;

type RhsFn<T> = dyn Fn(&[T]) -> Vec<T> + Send + Sync;
type ExactFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// An autonomous initial value problem `u' = f(u)`, `u(0) = u0`.
///
/// The right-hand side must be deterministic: the stepper and its
/// Runge-Kutta form evaluate `f` at the same points and are compared for
/// equality in tests.
#[derive(Clone)]
pub struct OdeProblem<T: Scalar> {
    dim: usize,
    rhs: Arc<RhsFn<T>>,
    initial: Vec<T>,
    exact: Option<Arc<ExactFn>>,
}

impl<T: Scalar> OdeProblem<T> {
    pub fn new(
        dim: usize,
        initial: Vec<T>,
        rhs: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Result<Self, Error> {
        if initial.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: initial.len(),
            });
        }
        Ok(Self {
            dim,
            rhs: Arc::new(rhs),
            initial,
            exact: None,
        })
    }

    /// Attach a closed-form solution used only for error reporting.
    pub fn with_exact(mut self, exact: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    pub fn rhs(&self, state: &[T]) -> Vec<T> {
        (self.rhs)(state)
    }

    pub fn exact_at(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|f| f(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl<T: Scalar> fmt::Debug for OdeProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("dim", &self.dim)
            .field("initial", &self.initial)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Rewrite `u' = g(t, u)` as an autonomous system by appending the time as
/// an extra state component with `t' = 1`.
pub fn autonomize<T: Scalar>(
    rhs_t: impl Fn(&T, &[T]) -> Vec<T> + Send + Sync + 'static,
    dim: usize,
    initial: Vec<T>,
    t0: T,
) -> Result<OdeProblem<T>, Error> {
    if initial.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: initial.len(),
        });
    }
    let mut state0 = initial;
    state0.push(t0);
    OdeProblem::new(dim + 1, state0, move |state: &[T]| {
        let (u, tail) = state.split_at(dim);
        let mut out = rhs_t(&tail[0], u);
        out.push(T::one());
        out
    })
}

/// Per-step derivative approximations `v(0), ..., v(R)` and the scaled
/// increments `w(l) = v(l) * h^(l-1) / l!`.
#[derive(Debug, Clone)]
pub struct DerivativeStack<T: Scalar> {
    order: u32,
    step_size: T,
    derivs: Vec<Vec<T>>,
    increments: Vec<Vec<T>>,
    rhs_evaluations: usize,
}

impl<T: Scalar> DerivativeStack<T> {
    /// Run the derivative recursion from state `v` with step `h`.
    pub fn compute(problem: &OdeProblem<T>, v: &[T], h: &T, order: u32) -> Result<Self, Error> {
        if order < 1 {
            return Err(Error::InvalidOrder(order));
        }
        if !h.is_positive() {
            return Err(Error::NonPositiveStep);
        }
        if v.len() != problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.dim(),
                got: v.len(),
            });
        }

        let inv_fact: Vec<T> = (0..=order)
            .map(|l| T::from_rational(&inv_factorial(l)))
            .collect();

        let mut evals = 0usize;
        let center = problem.rhs(v);
        evals += 1;
        check_sample(&center, problem.dim(), 0, 0)?;

        let mut derivs: Vec<Vec<T>> = Vec::with_capacity(order as usize + 1);
        derivs.push(v.to_vec());
        derivs.push(center.clone());

        for level in 1..order {
            let stencil = StencilCoefficients::cached(level, (order - level).div_ceil(2))?;
            let m = stencil.half_width() as i64;
            let mut samples = Vec::with_capacity(2 * m as usize + 1);
            for i in -m..=m {
                if i == 0 {
                    samples.push(center.clone());
                    continue;
                }
                let rho = h.clone() * T::from_i64(i);
                let point = horner(&derivs, &inv_fact, &rho);
                let value = problem.rhs(&point);
                evals += 1;
                check_sample(&value, problem.dim(), level, i)?;
                samples.push(value);
            }
            derivs.push(stencil.apply(&samples, h)?);
        }

        // w(l) = v(l) * h^(l-1) / l!
        let mut increments = Vec::with_capacity(order as usize);
        let mut h_pow = T::one();
        for l in 1..=order {
            let factor = h_pow.clone() * inv_fact[l as usize].clone();
            increments.push(
                derivs[l as usize]
                    .iter()
                    .map(|x| x.clone() * factor.clone())
                    .collect(),
            );
            h_pow = h_pow * h.clone();
        }

        Ok(Self {
            order,
            step_size: h.clone(),
            derivs,
            increments,
            rhs_evaluations: evals,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn step_size(&self) -> &T {
        &self.step_size
    }

    /// Approximation of the `l`-th solution derivative, `l = 0, ..., R`.
    pub fn derivative(&self, l: u32) -> &[T] {
        &self.derivs[l as usize]
    }

    pub fn derivatives(&self) -> &[Vec<T>] {
        &self.derivs
    }

    /// Scaled increment `w(l)`, `l = 1, ..., R`.
    pub fn increment(&self, l: u32) -> &[T] {
        &self.increments[l as usize - 1]
    }

    pub fn rhs_evaluations(&self) -> usize {
        self.rhs_evaluations
    }

    /// Evaluate the degree-`k` Taylor polynomial at displacement `rho` by
    /// Horner's rule: `sum_{l=0}^{k} v(l) * rho^l / l!`.
    pub fn taylor_polynomial(&self, k: u32, rho: &T) -> Result<Vec<T>, Error> {
        if k > self.order {
            return Err(Error::LevelOutOfRange {
                level: k,
                order: self.order,
            });
        }
        let inv_fact: Vec<T> = (0..=k)
            .map(|l| T::from_rational(&inv_factorial(l)))
            .collect();
        Ok(horner(&self.derivs[..=k as usize], &inv_fact, rho))
    }
}

fn check_sample<T: Scalar>(value: &[T], dim: usize, level: u32, offset: i64) -> Result<(), Error> {
    if value.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: value.len(),
        });
    }
    if value.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample { level, offset });
    }
    Ok(())
}

/// Horner evaluation of `sum_l derivs[l] * rho^l / l!` over the vector
/// components; `inv_fact[l]` must hold `1/l!`.
fn horner<T: Scalar>(derivs: &[Vec<T>], inv_fact: &[T], rho: &T) -> Vec<T> {
    let k = derivs.len() - 1;
    let mut acc: Vec<T> = derivs[k]
        .iter()
        .map(|x| x.clone() * inv_fact[k].clone())
        .collect();
    for l in (0..k).rev() {
        for (a, x) in acc.iter_mut().zip(&derivs[l]) {
            *a = a.clone() * rho.clone() + x.clone() * inv_fact[l].clone();
        }
    }
    acc
}

/// One step of the order-`order` approximate Taylor scheme:
/// `v + h * (w(1) + ... + w(R))`, summed in ascending `l`.
pub fn step<T: Scalar>(
    problem: &OdeProblem<T>,
    v: &[T],
    h: &T,
    order: u32,
) -> Result<Vec<T>, Error> {
    let stack = DerivativeStack::compute(problem, v, h, order)?;
    Ok(advance(&stack, v))
}

fn advance<T: Scalar>(stack: &DerivativeStack<T>, v: &[T]) -> Vec<T> {
    let dim = v.len();
    let mut sum = vec![T::zero(); dim];
    for l in 1..=stack.order {
        for (s, w) in sum.iter_mut().zip(stack.increment(l)) {
            *s = s.clone() + w.clone();
        }
    }
    vec_axpy(v, stack.step_size(), &sum)
}

/// A computed trajectory: `(t_n, v_n)` pairs plus the total number of
/// right-hand-side evaluations.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Scalar> {
    pub points: Vec<(T, Vec<T>)>,
    pub rhs_evaluations: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_time(&self) -> &T {
        &self.points.last().expect("trajectory is never empty").0
    }

    pub fn final_state(&self) -> &[T] {
        &self.points.last().expect("trajectory is never empty").1
    }
}

/// Integration failure carrying the partial trajectory computed before the
/// failing step.
#[derive(Debug)]
pub struct IntegrationAbort<T: Scalar> {
    /// Index of the step that failed (0-based; `partial` holds that many
    /// accepted steps plus the initial state).
    pub failed_step: usize,
    pub partial: Trajectory<T>,
    pub source: Error,
}

impl<T: Scalar> fmt::Display for IntegrationAbort<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "integration aborted at step {}: {}", self.failed_step, self.source)
    }
}

impl<T: Scalar> std::error::Error for IntegrationAbort<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Integrate `n_steps` uniform steps of size `h` from the problem's initial
/// state. The trajectory starts at `(0, u0)` and has `n_steps + 1` points.
pub fn integrate<T: Scalar>(
    problem: &OdeProblem<T>,
    h: &T,
    n_steps: usize,
    order: u32,
) -> Result<Trajectory<T>, IntegrationAbort<T>> {
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push((T::zero(), problem.initial().to_vec()));
    let mut evals = 0usize;

    for n in 0..n_steps {
        let (t, state) = points.last().cloned().expect("trajectory is never empty");
        match DerivativeStack::compute(problem, &state, h, order) {
            Ok(stack) => {
                evals += stack.rhs_evaluations();
                let next = advance(&stack, &state);
                points.push((t + h.clone(), next));
            }
            Err(source) => {
                return Err(IntegrationAbort {
                    failed_step: n,
                    partial: Trajectory {
                        points,
                        rhs_evaluations: evals,
                    },
                    source,
                });
            }
        }
    }

    Ok(Trajectory {
        points,
        rhs_evaluations: evals,
    })
}

/// One step of the exact Taylor method on the linear system `u' = Au`:
/// `Q(hA) v` with `Q` the degree-`order` truncation of `exp`, accumulated
/// term by term through matrix-vector products (the matrix polynomial is
/// never formed).
pub fn exact_taylor_linear_step<T: Scalar>(
    a: &Matrix<T>,
    v: &[T],
    h: &T,
    order: u32,
) -> Result<Vec<T>, Error> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if v.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: v.len(),
        });
    }
    let mut term = v.to_vec();
    let mut acc = v.to_vec();
    for k in 1..=order {
        let scale = h.clone() / T::from_i64(i64::from(k));
        term = a
            .mat_vec(&term)?
            .into_iter()
            .map(|x| x * scale.clone())
            .collect();
        for (a_i, t_i) in acc.iter_mut().zip(&term) {
            *a_i = a_i.clone() + t_i.clone();
        }
    }
    Ok(acc)
}
