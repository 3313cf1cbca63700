use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("index {index} out of range for group of size {size}")]
    IndexOutOfRange { index: u64, size: u64 },

    /// The entropy (or return-probability) target can never be reached on `Z_gamma^k`.
    #[error("target {target:.6} unreachable for gamma = {gamma} (supremum {supremum:.6})")]
    Saturated { gamma: u64, target: f64, supremum: f64 },

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap { what: &'static str, size: u64, cap: u64 },

    #[error("operation requires an Abelian group")]
    NonAbelian,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no samples passed typicality ({trials} trials)")]
    ZeroAccepted { trials: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
