use thiserror::Error;

/// Errors produced by the chronobell library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {0} is not a power of two in 2..=16")]
    InvalidDimension(usize),
    #[error("tensor product dimension {0} exceeds the 16x16 limit")]
    DimensionOverflow(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("party slot {slot} out of range for {parties} parties (max 4)")]
    SlotOutOfRange { slot: usize, parties: usize },
    #[error("vector has zero norm")]
    ZeroNorm,
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("wavefunction density {density:e} at ({x1}, {x2}) is below the nodal guard")]
    Node { x1: f64, x2: f64, density: f64 },
    #[error("beam splitter coefficients violate T + R = 1: {0}")]
    BeamSplitter(String),
    #[error("enumeration too large: {0} combinations")]
    StateSpaceTooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
