//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Stencil parameters outside the supported domain.
    #[error("invalid stencil parameters p={p}, q={q} (require 1 <= p,q <= {max})")]
    InvalidStencil { p: u32, q: u32, max: u32 },

    /// A sample array does not match the stencil width.
    #[error("stencil expects {expected} samples, got {got}")]
    SampleCountMismatch { expected: usize, got: usize },

    /// Derivative level outside `0..order`.
    #[error("derivative level {level} out of range for order {order}")]
    LevelOutOfRange { level: u32, order: u32 },

    /// Scheme order must be at least one.
    #[error("scheme order must be >= 1, got {0}")]
    InvalidOrder(u32),

    /// A step size that is not strictly positive.
    #[error("step size must be strictly positive")]
    NonPositiveStep,

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The right-hand side produced a non-finite value while building the
    /// derivative approximation for `level + 1` at stencil offset `offset`.
    #[error("right-hand side returned a non-finite value at level {level}, offset {offset}")]
    NonFiniteSample { level: u32, offset: i64 },

    /// A Runge-Kutta stage evaluated to a non-finite value.
    #[error("non-finite value in Runge-Kutta stage {stage}")]
    NonFiniteStage { stage: usize },

    /// A stage pair `(l, i)` that is not a member of the stage set.
    #[error("({l}, {i}) is not a stage of the order-{order} scheme")]
    InvalidStage { l: u32, i: i64, order: u32 },

    /// Zero-area scan window.
    #[error("stability scan window has zero area")]
    DegenerateWindow,

    /// Raster resolution below the two-samples-per-axis minimum.
    #[error("raster resolution must be at least 2 per axis, got {nx}x{ny}")]
    InvalidResolution { nx: usize, ny: usize },

    /// Polynomial term with the wrong number of exponents.
    #[error("polynomial term has {got} exponents, expected {expected}")]
    BadPolynomialTerm { expected: usize, got: usize },
}
