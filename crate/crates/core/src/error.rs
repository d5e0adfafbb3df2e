use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("entry {index} is {value}, expected a finite value >= 0")]
    InvalidEntry { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("row {row} of the channel sums to {sum}, expected 1")]
    RowNotNormalized { row: usize, sum: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(&'static str),

    #[error("symbol {symbol} is outside an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("decoding metric is zero everywhere")]
    ZeroMetric,

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },

    #[error("parameter out of range: {0}")]
    ParameterRange(&'static str),

    #[error("sample size exceeds the 64-bit range")]
    SampleSizeOverflow,
}

pub type Result<T> = core::result::Result<T, Error>;
