use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{stage}: needs ~{required} bytes but the memory budget is {budget} bytes")]
    ResourceBudget {
        stage: String,
        required: u64,
        budget: u64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty sample")]
    EmptySample,

    #[error("Poincare series not summable: t = {t} does not exceed the critical exponent {delta}")]
    Divergent { t: f64, delta: f64 },

    #[error(
        "no convergence: Cauchy gap {gap:e} exceeds tolerance {tolerance:e} (stage gaps {gaps:?})"
    )]
    Convergence {
        gap: f64,
        tolerance: f64,
        gaps: Vec<f64>,
    },

    #[error("depth {depth} is too shallow: {reason}")]
    Depth { depth: usize, reason: String },

    #[error("geometric tail diverges (level ratio {ratio})")]
    DivergentTail { ratio: f64 },

    #[error("{0} is not hyperbolic")]
    NotHyperbolic(String),

    #[error("not supported by the {backend} backend: {what}")]
    Unsupported { backend: String, what: String },

    #[error("counting overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn invalid_word(word: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidWord {
            word: word.into(),
            reason: reason.into(),
        }
    }

    pub fn unsupported(backend: &str, what: impl Into<String>) -> Self {
        Error::Unsupported {
            backend: backend.to_string(),
            what: what.into(),
        }
    }
}
