use num_rational::Ratio;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by an element that is zero at precision {0}")]
    DivisionByZeroAtPrecision(Ratio<i64>),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("exponential tail not certified at order {order}: {reason}")]
    TailNotConvergent { order: usize, reason: String },
    #[error("Newton polygon has no segment giving root valuation {0}")]
    NoSuchSlope(Ratio<i64>),
    #[error("root iteration stalled: {0}")]
    ContractionFailure(String),
    #[error("argument outside the logarithm domain: v = {valuation}, need v > {bound}")]
    OutsideLogDomain {
        valuation: Ratio<i64>,
        bound: Ratio<i64>,
    },
    #[error("argument outside the certified neighborhood: v = {valuation}, need v > {bound}")]
    OutsideNeighborhood {
        valuation: Ratio<i64>,
        bound: Ratio<i64>,
    },
    #[error("singular head block in Siegel computation")]
    SingularHead,
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(&'static str),
    #[error("not a q-th power at precision: {0}")]
    NotAPower(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
