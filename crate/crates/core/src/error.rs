use alloc::string::String;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid function descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid function family: {0}")]
    InvalidFamily(String),
    #[error("incompatible spaces: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {value} at index {index} lies outside [{lo}, {hi}]")]
    OutOfInterval {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty image grid: step {step} exceeds 2 * r_image = {span}")]
    EmptyGrid { step: f64, span: f64 },
    #[error("coordinate index {index} out of range for a family of size {len}")]
    CoordinateOutOfRange { index: usize, len: usize },
    #[error("the family has no cos(x) coordinate")]
    NoCosCoordinate,
    #[error("the model has an empty remainder")]
    EmptyRemainder,
    #[error("remainder cluster {cluster} has no witnesses at any radius; use a denser tail grid")]
    NoWitnesses { cluster: usize },
    #[error("bond {level} is not a valid comparison map: {reason}")]
    BrokenBond { level: usize, reason: String },
    #[error("inverse system has no levels")]
    EmptySystem,
    #[error("level {level} out of range for a system of depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("no preimage candidate within {tolerance} at level {level} (nearest {nearest}); sample more densely")]
    LiftFailed {
        level: usize,
        nearest: f64,
        tolerance: f64,
    },
    #[error("enlargement is not comparable with the original model: {0}")]
    EnlargementNotComparable(String),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
