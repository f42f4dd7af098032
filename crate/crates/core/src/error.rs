use thiserror::Error;

/// Errors raised by the geometry, measure-algebra and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors must have at least one coordinate")]
    EmptyVector,

    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("interval ({lo}, {hi}) is not a subinterval of [0, 1]")]
    IntervalOutOfRange { lo: f64, hi: f64 },

    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("finite subsets must be nonempty")]
    EmptySubset,

    #[error("subset has {len} distinct points, capacity is {capacity}")]
    TooManyPoints { len: usize, capacity: usize },

    #[error("point map is not defined at {0}")]
    NotInDomain(String),

    #[error("{0} is not a co-mixer")]
    NotComixer(&'static str),

    #[error("{0} is only defined on one-dimensional vectors")]
    NotOneDimensional(&'static str),

    #[error("finite difference at {0} straddles a singular point")]
    NearSingularPoint(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate sampler: min_separation {min_separation} >= box diameter {diameter}")]
    DegenerateSampler { min_separation: f64, diameter: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
