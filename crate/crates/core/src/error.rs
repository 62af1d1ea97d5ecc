use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the pixel, contour and detection stages.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("image and kernel dimensions must be positive")]
    ZeroDimension,
    #[error("buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("binary image value {0} is not 0 or 1")]
    NotBinary(u8),
    #[error("kernel anchor lies outside the kernel")]
    AnchorOutOfRange,
    #[error("structuring element must contain only 0 and 1 weights")]
    NonBinaryKernel,
    #[error("image dimensions do not match")]
    DimensionMismatch,
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("canny thresholds must satisfy 0 <= low <= high <= 255 (low={low}, high={high})")]
    InvalidThresholds { low: f64, high: f64 },
    #[error("invalid detector parameters: {0}")]
    InvalidParams(String),
    #[error("module 1 box derivation requires at least one contour")]
    EmptyContourSet,
}
