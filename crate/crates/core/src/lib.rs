//! High-order ODE integration by Taylor expansion with finite-difference
//! derivative estimation.
//!
//! The integrator advances an autonomous system `u' = f(u)` with the degree-R
//! Taylor polynomial of the solution, but instead of differentiating `f`
//! symbolically it estimates each time derivative by applying a centered
//! finite-difference stencil to samples of `f` taken along the partial Taylor
//! polynomial built so far. Only evaluations of `f` are ever required.
//!
//! The crate also provides:
//!
//! * exact-rational generation of the centered difference stencils
//!   ([`stencil`]),
//! * the explicit Runge-Kutta form of the scheme as an exact-rational Butcher
//!   tableau, with structural verification (nilpotency, rank, block shape) in
//!   exact arithmetic ([`tableau`]),
//! * absolute stability region evaluation for the truncated-exponential
//!   stability polynomial ([`stability`]),
//! * polynomial right-hand sides with rational coefficients, usable to run
//!   entire steps in exact rational arithmetic ([`poly`]).
//!
//! Floating-point and exact-rational execution share one code path: all
//! stepping routines are generic over [`scalar::Scalar`], implemented for
//! `f64` and for `BigRational`.

pub mod error;
pub mod integrator;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod stability;
pub mod stencil;
pub mod tableau;

pub use error::Error;
pub use integrator::{DerivativeStack, OdeProblem, Trajectory};
pub use scalar::Scalar;
pub use stencil::StencilCoefficients;
pub use tableau::ButcherTableau;

/// Alias used throughout for exact rational values.
pub type Rational = num_rational::BigRational;
