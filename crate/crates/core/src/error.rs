//! Error taxonomy for the geometry engine.
//!
//! Errors are split roughly by which stage of a computation can raise them:
//! input validation, chart evaluation, finite differencing, frame
//! construction, and grid-level aggregation.

use thiserror::Error;

/// Unified error type for all engine operations.
#[derive(Debug, Error)]
pub enum GeomError {
    /// A vector or matrix had the wrong dimension for the requested operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation that only makes sense for c != 0 was called on a flat ambient.
    #[error("operation requires a curved ambient (c != 0)")]
    FlatAmbient,

    /// A point that must lie on the model quadric does not, within tolerance.
    #[error("point lies off the model surface: residual {residual:.3e} exceeds {tol:.3e}")]
    OffModel { residual: f64, tol: f64 },

    /// A parameter point (or its finite-difference stencil) leaves the chart domain.
    #[error("finite-difference stencil leaves the chart domain on axis {axis}")]
    StencilOutOfDomain { axis: usize },

    /// The chart produced a NaN or infinite coordinate.
    #[error("chart evaluation produced a non-finite value")]
    NonFiniteEval,

    /// The induced metric is singular or too badly conditioned to invert.
    #[error("induced metric is singular or badly conditioned (cond {cond:.3e}); the chart is not an immersion here")]
    DegenerateMetric { cond: f64 },

    /// Gram-Schmidt ran out of usable seed vectors before spanning the normal space.
    #[error("seed basis does not span the normal space; reseed with vectors transverse to the tangent plane")]
    SeedSpanDeficient,

    /// The normal frame flipped orientation across a finite-difference stencil.
    #[error("normal frame is discontinuous across the stencil; shrink the step or reseed the frame")]
    GaugeDiscontinuity,

    /// A grid-level operation received too few sample points.
    #[error("not enough sample points: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    /// Requested catalog id does not exist.
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    /// A catalog parameter was given a value outside its documented range.
    #[error("parameter `{name}` out of range: {value}")]
    ParamOutOfRange { name: String, value: f64 },

    /// Malformed run configuration (bad grid, bad tolerance name, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
