use thiserror::Error;

/// Unified error type. Constructors reject malformed data; witness
/// builders reject inputs whose stated preconditions fail, naming the
/// first equation that broke.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QbrError {
    #[error("ring order {0} exceeds the construction cap {1}")]
    OrderCapExceeded(usize, usize),
    #[error("malformed ring spec: {0}")]
    MalformedSpec(String),
    #[error("element index {0} out of range for ring of order {1}")]
    ForeignElement(u32, usize),
    #[error("operation requires a unital ring")]
    NonUnitalRing,
    #[error("arguments belong to different rings")]
    DifferentRings,
    #[error("map is not a ring homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("element {0} is not idempotent")]
    NotIdempotent(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no extension relation holds between the given elements")]
    NotAnExtension,
    #[error("invalid quasi-inverse witness: {0}")]
    InvalidWitness(String),
    #[error("element is not a partial inverse of the target")]
    NotAPartialInverse,
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("element {0} does not lie in the designated corner")]
    NotInCorner(u32),
    #[error("bad equivalence data: {0}")]
    BadEquivalenceData(String),
    #[error("no reducer found: {0}")]
    NoReducer(String),
    #[error("element {0} is not a unit")]
    NotAUnit(u32),
    #[error("row reduction stage `{0}` found no witness")]
    StageWitnessNotFound(&'static str),
    #[error("row reduction stage `{0}` invariant failed: {1}")]
    StageInvariantFailed(&'static str, String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("not an exchange ring")]
    NotExchange,
    #[error("problem size exceeds the declared cap: {0}")]
    ScaleCapExceeded(String),
    #[error("ideal enumeration exceeded the cap of {0} ideals")]
    IdealCapExceeded(usize),
    #[error("element {0} does not lie in the given ideal")]
    NotInIdeal(u32),
    #[error("ideal fails the stable-rank-one check: {0}")]
    NotABIdeal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QbrError>;
