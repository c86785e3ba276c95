//! Centered finite-difference operators in exact rational arithmetic.
//!
//! A stencil with derivative order `p` and half accuracy order `q`
//! approximates the `p`-th derivative to order `2q` on a uniform grid. The
//! weights are the unique solution of the moment system
//!
//! ```text
//!   sum_{i=-s}^{s} c_i * i^m = p! * [m == p],   m = 0, ..., 2s,
//! ```
//!
//! with half-width `s = floor((p-1)/2) + q`. Solving the square system by
//! exact elimination keeps every downstream structural result (nilpotency,
//! rank, integer abscissae of the Runge-Kutta form) free of coefficient
//! round-off.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::linalg::{solve_exact, Matrix};
use crate::scalar::{factorial, Scalar};

/// Largest supported derivative / half accuracy order.
pub const MAX_ORDER: u32 = 32;

/// Weights of one centered finite-difference operator.
///
/// `coeffs` is indexed by offset: entry `i + s` holds the weight of the
/// sample at `base + i*h`, for `i` in `-s..=s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilCoefficients {
    p: u32,
    q: u32,
    half_width: usize,
    coeffs: Vec<BigRational>,
}

impl StencilCoefficients {
    /// Derive the weights for the `p`-th derivative at accuracy order `2q`.
    pub fn derive(p: u32, q: u32) -> Result<Self, Error> {
        if p < 1 || q < 1 || p > MAX_ORDER || q > MAX_ORDER {
            return Err(Error::InvalidStencil {
                p,
                q,
                max: MAX_ORDER,
            });
        }
        let s = half_width(p, q);
        let n = 2 * s + 1;

        let mut rows = Vec::with_capacity(n);
        for m in 0..n {
            let row: Vec<BigRational> = (0..n)
                .map(|j| {
                    let offset = BigInt::from(j as i64 - s as i64);
                    BigRational::from_integer(offset.pow(m as u32))
                })
                .collect();
            rows.push(row);
        }
        let system = Matrix::from_rows(rows).expect("moment rows share a length");

        let mut rhs = vec![BigRational::zero(); n];
        rhs[p as usize] = BigRational::from_integer(factorial(p));

        let coeffs = solve_exact(&system, &rhs)
            .expect("moment system is a transposed Vandermonde with distinct nodes");

        Ok(Self {
            p,
            q,
            half_width: s,
            coeffs,
        })
    }

    /// Memoised variant of [`derive`](Self::derive); safe for concurrent use.
    pub fn cached(p: u32, q: u32) -> Result<Arc<Self>, Error> {
        static CACHE: OnceLock<RwLock<HashMap<(u32, u32), Arc<StencilCoefficients>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(hit) = cache.read().unwrap().get(&(p, q)) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(Self::derive(p, q)?);
        let mut guard = cache.write().unwrap();
        Ok(Arc::clone(guard.entry((p, q)).or_insert(fresh)))
    }

    pub fn derivative_order(&self) -> u32 {
        self.p
    }

    pub fn accuracy_order(&self) -> u32 {
        2 * self.q
    }

    /// Half-width `s`; the operator spans `2s + 1` samples.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Weight of the sample at offset `i`, for `i` in `-s..=s`.
    pub fn weight(&self, offset: i64) -> &BigRational {
        let idx = offset + self.half_width as i64;
        &self.coeffs[idx as usize]
    }

    /// Offsets in ascending order, `-s..=s`.
    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let s = self.half_width as i64;
        -s..=s
    }

    /// Weights in offset order, as exact rationals.
    pub fn weights(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Apply the operator to vector samples spaced `h` apart:
    /// `(1/h^p) * sum_i c_i * samples[i]`, componentwise.
    ///
    /// `samples[i + s]` must hold the value at `base + i*h`.
    pub fn apply<T: Scalar>(&self, samples: &[Vec<T>], h: &T) -> Result<Vec<T>, Error> {
        let expected = 2 * self.half_width + 1;
        if samples.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                got: samples.len(),
            });
        }
        if !h.is_positive() {
            return Err(Error::NonPositiveStep);
        }
        let dim = samples[0].len();
        for s in samples {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
        }

        let mut acc = vec![T::zero(); dim];
        for (sample, weight) in samples.iter().zip(&self.coeffs) {
            if weight.is_zero() {
                continue;
            }
            let w = T::from_rational(weight);
            for (a, x) in acc.iter_mut().zip(sample) {
                *a = a.clone() + w.clone() * x.clone();
            }
        }
        let mut scale = T::one();
        for _ in 0..self.p {
            scale = scale * h.clone();
        }
        Ok(acc.into_iter().map(|a| a / scale.clone()).collect())
    }

    /// Residuals of the moment conditions for `m = 0, ..., p + 2q - 1`;
    /// all must be exactly zero.
    pub fn moment_residuals(&self) -> Vec<BigRational> {
        (0..self.p + 2 * self.q)
            .map(|m| {
                let target = if m == self.p {
                    BigRational::from_integer(factorial(self.p))
                } else {
                    BigRational::zero()
                };
                let sum: BigRational = self
                    .offsets()
                    .map(|i| self.weight(i) * BigRational::from_integer(BigInt::from(i).pow(m)))
                    .sum();
                sum - target
            })
            .collect()
    }
}

fn half_width(p: u32, q: u32) -> usize {
    ((p - 1) / 2 + q) as usize
}

/// Half-width of the stencil the order-`order` scheme uses to approximate
/// the `(level + 1)`-th derivative: derivative order `level`, half accuracy
/// order `ceil((order - level) / 2)`. Level 0 has width 0 by convention.
pub fn level_half_width(level: u32, order: u32) -> Result<usize, Error> {
    if level >= order {
        return Err(Error::LevelOutOfRange { level, order });
    }
    if level == 0 {
        return Ok(0);
    }
    Ok(half_width(level, (order - level).div_ceil(2)))
}

/// Full weight vector of the level-`level` operator inside the order-`order`
/// scheme, keyed by offset.
///
/// Level 0 is the identity sample `{0 -> 1}`. For `level >= 1` these are the
/// weights of the `(level, ceil((order - level)/2))` stencil, center weight
/// included (it is nonzero for even levels and folds into the first column
/// of the Runge-Kutta form).
pub fn gamma_coefficients(level: u32, order: u32) -> Result<BTreeMap<i64, BigRational>, Error> {
    if level >= order {
        return Err(Error::LevelOutOfRange { level, order });
    }
    if level == 0 {
        let mut map = BTreeMap::new();
        map.insert(0, BigRational::one());
        return Ok(map);
    }
    let stencil = StencilCoefficients::cached(level, (order - level).div_ceil(2))?;
    Ok(stencil
        .offsets()
        .map(|i| (i, stencil.weight(i).clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn first_derivative_second_order() {
        let st = StencilCoefficients::derive(1, 1).unwrap();
        assert_eq!(st.half_width(), 1);
        assert_eq!(st.weights(), &[rat(-1, 2), int(0), rat(1, 2)]);
    }

    #[test]
    fn second_derivative_second_order() {
        let st = StencilCoefficients::derive(2, 1).unwrap();
        assert_eq!(st.weights(), &[int(1), int(-2), int(1)]);
    }

    #[test]
    fn first_derivative_fourth_order() {
        let st = StencilCoefficients::derive(1, 2).unwrap();
        assert_eq!(
            st.weights(),
            &[rat(1, 12), rat(-2, 3), int(0), rat(2, 3), rat(-1, 12)]
        );
    }

    #[test]
    fn second_derivative_fourth_order() {
        let st = StencilCoefficients::derive(2, 2).unwrap();
        assert_eq!(
            st.weights(),
            &[rat(-1, 12), rat(4, 3), rat(-5, 2), rat(4, 3), rat(-1, 12)]
        );
    }

    #[test]
    fn rejects_out_of_domain_orders() {
        assert!(matches!(
            StencilCoefficients::derive(0, 1),
            Err(Error::InvalidStencil { .. })
        ));
        assert!(matches!(
            StencilCoefficients::derive(1, 0),
            Err(Error::InvalidStencil { .. })
        ));
        assert!(matches!(
            StencilCoefficients::derive(MAX_ORDER + 1, 1),
            Err(Error::InvalidStencil { .. })
        ));
    }

    #[test]
    fn moment_conditions_exact_up_to_order_eight() {
        for p in 1..=8 {
            for q in 1..=8 {
                let st = StencilCoefficients::derive(p, q).unwrap();
                for (m, r) in st.moment_residuals().iter().enumerate() {
                    assert!(r.is_zero(), "moment {m} fails for p={p}, q={q}");
                }
            }
        }
    }

    #[test]
    fn parity_symmetry() {
        for p in 1..=8u32 {
            for q in 1..=8u32 {
                let st = StencilCoefficients::derive(p, q).unwrap();
                let sign = if p % 2 == 0 { int(1) } else { int(-1) };
                for i in st.offsets() {
                    assert_eq!(st.weight(-i), &(&sign * st.weight(i)));
                }
                if p % 2 == 1 {
                    assert!(st.weight(0).is_zero());
                }
            }
        }
    }

    #[test]
    fn polynomial_exactness_on_monomials() {
        // Exact-rational grid, h = 1, arbitrary base point a = 3/7: the
        // operator must reproduce d^p(x^m)/dx^p exactly for m <= p + 2q - 1.
        let base = rat(3, 7);
        for (p, q) in [(1u32, 1u32), (2, 1), (1, 2), (3, 2), (4, 1), (2, 3)] {
            let st = StencilCoefficients::derive(p, q).unwrap();
            let h = int(1);
            for m in 0..(p + 2 * q) {
                let samples: Vec<Vec<BigRational>> = st
                    .offsets()
                    .map(|i| vec![(base.clone() + int(i)).pow(m as i32)])
                    .collect();
                let got = st.apply(&samples, &h).unwrap();
                // d^p x^m / dx^p = m!/(m-p)! * x^(m-p), zero when m < p.
                let expected = if m < p {
                    int(0)
                } else {
                    BigRational::from_integer(factorial(m) / factorial(m - p))
                        * base.pow((m - p) as i32)
                };
                assert_eq!(got[0], expected, "p={p}, q={q}, m={m}");
            }
        }
    }

    #[test]
    fn empirical_order_on_exp() {
        // log2(err(h)/err(h/2)) must approach 2q; h chosen per pair so the
        // truncation term dominates cancellation noise.
        let cases = [(1u32, 1u32, 1e-2), (2, 1, 1e-2), (1, 2, 1e-2)];
        for (p, q, h) in cases {
            let st = StencilCoefficients::derive(p, q).unwrap();
            let err = |h: f64| {
                let samples: Vec<Vec<f64>> = st
                    .offsets()
                    .map(|i| vec![(i as f64 * h).exp()])
                    .collect();
                // every derivative of exp at 0 is 1
                (st.apply(&samples, &h).unwrap()[0] - 1.0).abs()
            };
            let observed = (err(h) / err(h / 2.0)).log2();
            let target = 2.0 * q as f64;
            assert!(
                (observed - target).abs() <= 0.3,
                "p={p}, q={q}: observed order {observed}, want {target}"
            );
        }
    }

    #[test]
    fn error_ratio_near_four_for_first_derivative() {
        let st = StencilCoefficients::derive(1, 1).unwrap();
        let err = |h: f64| {
            let samples: Vec<Vec<f64>> =
                st.offsets().map(|i| vec![(i as f64 * h).exp()]).collect();
            (st.apply(&samples, &h).unwrap()[0] - 1.0).abs()
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() / 4.0 <= 0.05, "ratio {ratio}");
    }

    #[test]
    fn apply_is_exact_on_low_degree_samples() {
        // u(x) = x sampled around 2 with any h: derivative 1 exactly.
        let st = StencilCoefficients::derive(1, 1).unwrap();
        let h = 0.37;
        let samples: Vec<Vec<f64>> = st.offsets().map(|i| vec![2.0 + i as f64 * h]).collect();
        assert_eq!(st.apply(&samples, &h).unwrap(), vec![1.0]);

        // u(x) = x^2 sampled around 0: second derivative 2 exactly.
        let st = StencilCoefficients::derive(2, 1).unwrap();
        let samples: Vec<Vec<f64>> = st
            .offsets()
            .map(|i| vec![(i as f64 * h) * (i as f64 * h)])
            .collect();
        assert_eq!(st.apply(&samples, &h).unwrap(), vec![2.0]);
    }

    #[test]
    fn apply_rejects_bad_shapes() {
        let st = StencilCoefficients::derive(1, 1).unwrap();
        assert!(matches!(
            st.apply(&[vec![1.0], vec![2.0]], &0.1),
            Err(Error::SampleCountMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            st.apply(&[vec![1.0], vec![2.0], vec![3.0]], &0.0),
            Err(Error::NonPositiveStep)
        ));
    }

    #[test]
    fn gamma_level_zero_is_identity() {
        let g = gamma_coefficients(0, 4).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[&0], int(1));
    }

    #[test]
    fn gamma_matches_stencils() {
        let g = gamma_coefficients(1, 3).unwrap();
        assert_eq!(
            g.into_iter().collect::<Vec<_>>(),
            vec![(-1, rat(-1, 2)), (0, int(0)), (1, rat(1, 2))]
        );

        let g = gamma_coefficients(2, 4).unwrap();
        assert_eq!(
            g.into_iter().collect::<Vec<_>>(),
            vec![(-1, int(1)), (0, int(-2)), (1, int(1))]
        );
    }

    #[test]
    fn gamma_rejects_level_at_or_above_order() {
        assert!(matches!(
            gamma_coefficients(3, 3),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn level_half_width_matches_closed_form() {
        // floor((l-1)/2) + ceil((R-l)/2) agrees with the per-parity form
        // checked in the tableau module.
        for order in 2..=12u32 {
            for level in 1..order {
                let got = level_half_width(level, order).unwrap();
                let expected = if order % 2 == 1 {
                    (order as usize - 1) / 2
                } else if level % 2 == 0 {
                    order as usize / 2 - 1
                } else {
                    order as usize / 2
                };
                assert_eq!(got, expected, "level={level}, order={order}");
            }
        }
    }

    #[test]
    fn cached_returns_same_coefficients() {
        let a = StencilCoefficients::cached(3, 2).unwrap();
        let b = StencilCoefficients::cached(3, 2).unwrap();
        assert_eq!(*a, *b);
        assert_eq!(*a, StencilCoefficients::derive(3, 2).unwrap());
    }

    #[test]
    fn cached_is_safe_across_threads() {
        let handles: Vec<_> = (0..8)
            .map(|k| {
                std::thread::spawn(move || {
                    let p = 1 + (k % 4) as u32;
                    let st = StencilCoefficients::cached(p, 2).unwrap();
                    st.weights().iter().map(|w| w.to_f64().unwrap()).sum::<f64>()
                })
            })
            .collect();
        for h in handles {
            let sum = h.join().unwrap();
            assert!(sum.abs() < 1e-12);
        }
    }
}
