use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("network is not simple: {0}")]
    NotSimple(String),
    #[error("network is not connected")]
    NotConnected,
    #[error("edge weight must be positive: {0}")]
    NonPositiveWeight(String),
    #[error("weight `{0}` has more than six fractional digits")]
    WeightPrecisionExceeded(String),
    #[error("arithmetic overflow: total weight exceeds the supported range")]
    Overflow,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("network is not two-terminal series-parallel")]
    NotSeriesParallel,
    #[error("network is not a parallel-path network: {0}")]
    NotParallelPath(String),
    #[error("invalid bead-chain: {0}")]
    InvalidBeadChain(String),
    #[error("invalid abacus: {0}")]
    InvalidAbacus(String),
    #[error("two overlong arcs found")]
    TwoOverlongArcs,
    #[error("an overlong arc was passed to the envelope construction")]
    OverlongArcPresent,
    #[error("high or low plateaus overlap or are out of order")]
    PlateauOverlap,
    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),
    #[error("second level needs at least two functions")]
    FewerThanTwoFunctions,
    #[error("cascade input list {0} is not sorted")]
    UnsortedInput(usize),
    #[error("outward query needs at least two chains")]
    SingleChain,
    #[error("generator budget exceeded: {0}")]
    BudgetExceeded(String),
}
