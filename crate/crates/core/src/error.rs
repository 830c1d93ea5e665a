use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("branching factor {0} must be a power of two in 2..=64")]
    InvalidBranching(usize),

    #[error("max repetition bound {given} is below the required {required}")]
    InvalidMaxRep { given: usize, required: usize },

    #[error("key {key} does not fit in a tree of height {height} (capacity {capacity})")]
    KeyOutOfRange { key: u64, height: usize, capacity: u128 },

    #[error("key {0} exceeds the largest storable key")]
    KeyTooLarge(u64),

    #[error("capacity of height {height} overflows")]
    CapacityOverflow { height: usize },

    #[error("height must be at least 1")]
    ZeroHeight,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
