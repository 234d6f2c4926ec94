use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} index {index} out of range for size {size}")]
    Index {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    /// The observation sequence has probability zero under the model.
    #[error("impossible evidence: every label has zero weight at position {position}")]
    ImpossibleEvidence { position: usize },

    /// A prior marginal p(x_n) that appears as a divisor is zero.
    #[error("degenerate prior: p(x = {label}) is zero at position {position}")]
    DegeneratePrior { position: usize, label: usize },

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("enumeration of {size} configurations exceeds the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown symbol {symbol:?}")]
    Vocabulary { line: usize, symbol: String },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("model format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
