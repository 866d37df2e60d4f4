use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("coarsest level {j0} must be below the finest level {j}")]
    InvalidLevels { j0: usize, j: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input")]
    EmptyInput,

    #[error("level {0} is not covered by the shrinkage policy")]
    UncoveredLevel(usize),

    #[error("decomposition shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("signal is constant and cannot be rescaled")]
    ConstantSignal,

    #[error("quadrature on [{lo}, {hi}] did not converge: estimated error {achieved:e}, requested {requested:e}")]
    Quadrature {
        lo: f64,
        hi: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("least-favorability bracket ({lo}, {hi}] does not enclose m* for eps = {eps}")]
    Bracket { eps: f64, lo: f64, hi: f64 },

    #[error("ambiguous risk shape for eps = {eps}, m = {m}: {detail}")]
    AmbiguousShape { eps: f64, m: f64, detail: String },

    #[error("config: {0}")]
    Config(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Bracket { .. } | Error::AmbiguousShape { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
