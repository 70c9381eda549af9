use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("prune level {0} out of range 1..=8")]
    PruneRange(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("unknown transform `{0}`")]
    UnknownTransform(String),

    #[error("transform `{0}` is not implemented: matrix not specified")]
    NotImplemented(String),

    #[error("transform `{0}` must be unpruned for this operation")]
    AlreadyPruned(String),

    #[error("quality {0} out of range 1..=100")]
    Quality(u32),

    #[error("empty image")]
    EmptyImage,

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    ImageMismatch(usize, usize, usize, usize),

    #[error("image too small for SSIM: {0}x{1}, need at least 11x11")]
    ImageTooSmall(usize, usize),

    #[error("unsupported bit depth: maxval {0}")]
    BitDepth(u32),

    #[error("malformed image: {0}")]
    Format(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
