use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by kernels, grid operators and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel evaluated at the origin (|x| = {radius:e})")]
    OriginSingularity { radius: f64 },

    #[error("wavenumber {alpha} has negative imaginary part; kernels require Im(alpha) >= 0")]
    InadmissibleAlpha { alpha: Complex64 },

    #[error("chiral resonance: |1 {sign} alpha*beta| = {magnitude:e} vanishes")]
    ChiralResonance { sign: char, magnitude: f64 },

    #[error("grid too small: {what}")]
    GridTooSmall { what: String },

    #[error("grids are defined on different lattices")]
    LatticeMismatch,

    #[error("particular solution vanishes on the grid (min |f| = {min:e})")]
    VanishingF { min: f64 },

    #[error("base node {index:?} is outside the valid region of the grid")]
    BaseOutOfGrid { index: [usize; 3] },

    #[error("surface parametrization degenerates at nu = {nu}")]
    DegenerateSample { nu: f64 },

    #[error("source point at distance {distance:e} from a boundary point")]
    SourceOnBoundary { distance: f64 },

    #[error("field evaluated at distance {distance:e} from an MFS source")]
    SourceSingularity { distance: f64 },

    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("Bessel series argument z = {z} outside the supported range [0, 40]")]
    ArgumentOutOfRange { z: f64 },

    #[error("the closed-form Green function requires beta != 0")]
    AchiralUnsupported,

    #[error("medium coefficient is not positive at node {index:?}")]
    NonPositiveMedium { index: [usize; 3] },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
