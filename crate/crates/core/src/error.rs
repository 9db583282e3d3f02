use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} is not supported, n >= 2 is required")]
    InvalidDimension(usize),

    #[error("gamma must be finite, got {0}")]
    NonFiniteGamma(f64),

    /// The weight exponent sits on the value where the constant blows up.
    #[error("gamma = {gamma} is excluded for n = {n} (the constant blows up at {rule} = {excluded})")]
    ForbiddenGamma {
        n: usize,
        gamma: f64,
        excluded: f64,
        rule: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("pole singularity: {0}")]
    PoleSingularity(String),

    /// lambda = 0 together with gamma = n/2 leaves the radial component undetermined.
    #[error("zero-frequency resonance: gamma = n/2 and the mean mode of the source is {mean:e}")]
    ZeroFrequencyResonance { mean: f64 },

    #[error("grid too narrow: field decays only to {decay:e} of its maximum at the t-boundary")]
    GridTooNarrow { decay: f64 },

    #[error("field is identically zero")]
    ZeroField,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
