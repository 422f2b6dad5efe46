//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SistError>;

#[derive(Debug, Error)]
pub enum SistError {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("ragged lengths: row {row} has {got} values, expected {expected}")]
    RaggedLengths { row: usize, got: usize, expected: usize },
    #[error("non-numeric value '{token}' at row {row}")]
    NonNumericValue { row: usize, token: String },
    #[error("non-finite value at row {row}, position {pos}")]
    NonFiniteValue { row: usize, pos: usize },
    #[error("dataset has {0} distinct classes, expected exactly 2")]
    NotBinary(usize),
    #[error("class '{label}' has {count} members, fewer than the {k} folds requested")]
    TooFewPerClass { label: String, count: usize, k: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("shapelet of length {shapelet} is longer than the series of length {series}")]
    ShapeletLongerThanSeries { shapelet: usize, series: usize },
    #[error("placement [{start}, {end}] is out of range for a series of length {series}")]
    PlacementOutOfRange { start: usize, end: usize, series: usize },
    #[error("candidate length {len} exceeds the series length {series}")]
    LengthTooLarge { len: usize, series: usize },
    #[error("a class has no distance values")]
    EmptyClass,
    #[error("labels contain a single class; two are required")]
    SingleClass,
    #[error("dimension mismatch: {got} features, model expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("cut points {0:?} are not strictly increasing interior positions")]
    InvalidCutPoints(Vec<usize>),
    #[error(
        "shapelet placed at [{start}, {end}] does not fit series of length {series} under a \
         position-dependent metric"
    )]
    MetricPlacementMismatch { start: usize, end: usize, series: usize },
    #[error("no shapelet candidates survived selection")]
    CandidateStarvation,
    #[error("class '{0}' was not present in the training set")]
    UnknownClass(String),
    #[error("candidate budget exceeded: {candidates} candidates, budget {budget}")]
    CandidateBudgetExceeded { candidates: u64, budget: u64 },
    #[error("model schema '{got}' is not supported by this reader (expects '{expected}')")]
    SchemaVersionMismatch { got: String, expected: String },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
