use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphonError {
    #[error("values are not symmetric at ({i}, {j})")]
    NonSymmetric { i: usize, j: usize },
    #[error("value at ({i}, {j}) is outside [0, 1]")]
    OutOfRange { i: usize, j: usize },
    #[error("bad boundaries at index {index}: {reason}")]
    BadBoundaries { index: usize, reason: &'static str },
    #[error("value matrix has shape mismatch at row {row}")]
    BadShape { row: usize },
    #[error("block index {index} out of range for {blocks} blocks")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("active set covers {got} blocks but graphon has {expected}")]
    MismatchedBlockCount { expected: usize, got: usize },
    #[error("block permutations need equal block masses (block {index} differs)")]
    UnequalBlockMasses { index: usize },
    #[error("not a permutation of 0..{blocks}")]
    BadPermutation { blocks: usize },
    #[error("{blocks} blocks exceeds the enumeration limit of {limit}")]
    TooManyBlocks { blocks: usize, limit: usize },
    #[error("point {0} is outside [0, 1]")]
    PointOutOfRange(f64),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("appendix depth {0} is below the minimum of 4")]
    BadDepth(usize),
    #[error("bad edge: {0}")]
    BadEdge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GraphonError>;
