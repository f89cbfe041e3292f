use thiserror::Error;

/// Errors raised by tree, horocycle and transform operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("branching parameter q = {0} is not allowed, q must be at least 2")]
    InvalidBranching(u32),

    #[error("word {word:?} is not a reduced word over the alphabet 0..={q}")]
    InvalidWord { word: Vec<u32>, q: u32 },

    #[error("cylinder depth {have} is below the required depth {need}")]
    InsufficientCylinderDepth { need: usize, have: usize },

    #[error("invalid rooted permutation: {0}")]
    InvalidPermutation(String),

    #[error("grid size {0} must be a power of two and at least 4")]
    InvalidGrid(usize),

    #[error("input function is identically zero")]
    ZeroInput,

    #[error("frequency data carries no {0}")]
    MissingRepresentation(&'static str),

    #[error("grid size mismatch: expected {expected} samples, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("branching parameter mismatch: data has q = {found}, expected q = {expected}")]
    BranchingMismatch { expected: u32, found: u32 },

    #[error("support radius {radius} exceeds the configured radius {limit}")]
    RadiusOverflow { radius: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_depth(have: usize, need: usize) -> Result<()> {
    if have < need {
        Err(Error::InsufficientCylinderDepth { need, have })
    } else {
        Ok(())
    }
}
