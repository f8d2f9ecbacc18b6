use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge on [{lower}, {upper}] (error estimate {error:e}, tolerance {tolerance:e})")]
    QuadratureNonConvergence {
        lower: f64,
        upper: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("non-degeneracy violated: Re psi vanishes at |xi| = {radius} on ray {ray}")]
    Degenerate { ray: usize, radius: f64 },

    #[error("asymptotic envelope `{what}` is not declared and quadrature could not decide finiteness")]
    UndeclaredEnvelope { what: &'static str },

    #[error("no triplet representation is available for `{0}`")]
    TripletUnavailable(String),

    #[error("no exact sampler is available for `{0}`")]
    SamplerUnavailable(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("frequency cutoff insufficient: {0}")]
    CutoffInsufficient(String),

    #[error("lattice too coarse: {0}")]
    GridTooCoarse(String),

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("bound violation: {0}")]
    BoundViolation(String),

    #[error("insufficient replicas: {0}")]
    InsufficientReplicas(String),

    #[error("regression quality too low: R^2 = {r_squared:.4} < {threshold}")]
    PoorFit { r_squared: f64, threshold: f64 },

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no admissible range: {0}")]
    NoRange(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
