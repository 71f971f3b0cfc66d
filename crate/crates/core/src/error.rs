use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot build a core transformation from a zero pair")]
    ZeroPair,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix or pencil is not proper")]
    NotProper,
    #[error("reference eigensolver failed: {0}")]
    ConvergenceFailure(String),
    #[error("breakdown at step {step}: {reason}")]
    Breakdown { step: usize, reason: String },
    #[error("pole {pole} coincides with a node")]
    PoleEqualsNode { pole: String },
    #[error("node {node} duplicates an existing node")]
    DuplicateNode { node: String },
    #[error("deflation failed: coupling {residual:e} exceeds threshold {threshold:e}")]
    DeflationFailed { residual: f64, threshold: f64 },
    #[error("recurrence breaks down at index {index}")]
    RecurrenceBreakdown { index: usize },
    #[error("singular solve in iterative refinement")]
    SingularSolve,
    #[error("trailing accuracy condition not met: {achieved:e} > {bound:e}")]
    TrailingAccuracyFailed { achieved: f64, bound: f64 },
    #[error("pole swap is ill conditioned")]
    SwapIllConditioned,
    #[error("requested pole is an eigenvalue of the pencil")]
    ShiftIsEigenvalue,
    #[error("degree {n} exceeds the number of nodes {m}")]
    DegreeTooLarge { n: usize, m: usize },
    #[error("evaluation point coincides with a pole")]
    EvaluationAtPole,
    #[error("step {step}: {source}")]
    AtStep { step: usize, source: Box<Error> },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}
