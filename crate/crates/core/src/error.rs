use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty zero set")]
    EmptyZeroSet,

    #[error("zero imaginary part violates class (tau must be nonzero)")]
    ZeroImaginaryPart,

    #[error("symmetry center xi must be a nonzero finite real")]
    InvalidCenter,

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("insufficient zeros: requested {requested}, available {available}")]
    InsufficientZeros { requested: usize, available: usize },

    #[error("shift point is a zero (alpha = {alpha})")]
    ShiftPointIsZero { alpha: String },

    #[error("shift point must be nonzero")]
    ZeroShift,

    #[error("pole of logarithmic derivative at s = {s}")]
    PoleOfLogDerivative { s: String },

    #[error("Taylor center is a zero")]
    TaylorCenterIsZero,

    #[error("symmetry hypothesis violated: tau list is not sign-symmetric")]
    SymmetryViolated,

    #[error("odd residual too large: |c_{index}| = {magnitude:e} exceeds {limit:e}")]
    OddResidual {
        index: usize,
        magnitude: f64,
        limit: f64,
    },

    #[error("critical-line restriction requires a symmetric-class spec")]
    WrongClass,

    #[error("profile not real; zero scan undefined (imag_max = {imag_max:e})")]
    NonRealProfile { imag_max: f64 },

    #[error("insufficient growth range: {usable} usable radii")]
    InsufficientGrowth { usable: usize },

    #[error("insufficient zeros in range: {found} found, at least {needed} required")]
    InsufficientZerosInRange { found: usize, needed: usize },

    #[error("contour through zero: retained zero at distance {distance:e} from the circle")]
    ContourThroughZero { distance: f64 },

    #[error("quadrature unresolved: raw winding {raw} is {offset:.3} from the nearest integer")]
    QuadratureUnresolved { raw: String, offset: f64 },

    #[error("series domain: |s| = {modulus} must be < 1")]
    SeriesDomain { modulus: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}
