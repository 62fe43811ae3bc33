use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dissipator kernel has dimension {0}, expected 1")]
    DegenerateKernel(usize),
    #[error("operator is not diagonalizable within tolerance: {0}")]
    NonDiagonalizable(String),
    #[error("rank-deficient family: smallest singular value {0:e}")]
    RankDeficient(f64),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("kernel dimension {0}, expected 1")]
    KernelDimension(usize),
    #[error("envelope exceeded: {0}")]
    Envelope(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("fit needs at least 3 usable points, got {0}")]
    TooFewFitPoints(usize),
    #[error("grid too coarse near gamma = {gamma}: step displacement {jump:.3e}")]
    GridTooCoarse { gamma: f64, jump: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
