//! Error type shared by the transform, convolution, and cost-model layers.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the exact-arithmetic pipelines.
///
/// All failures are loud: no routine in this crate silently truncates,
/// rounds, or skips inconsistent data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A matrix was built from a buffer whose length does not match
    /// `rows * cols`.
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    /// A stored value falls outside the range declared by the bit width.
    ValueOutOfRange { row: usize, col: usize, bits: u32 },
    /// A declared bit width is zero or too wide for the backing integer.
    InvalidBitWidth(u32),
    /// Attempted to zero-pad a block into a smaller target.
    PadTooSmall { rows: usize, cols: usize, target: usize },
    /// The transform size must be a prime; this one is not.
    NonPrimeSize(usize),
    /// The transform input must be square.
    NotSquare { rows: usize, cols: usize },
    /// A required transform size exceeds the largest supported prime.
    SizeUnsupported { needed: usize, max: usize },
    /// Transform rows disagree on their total sum, so the array cannot be
    /// the transform of any image.
    InconsistentDirectionSums { direction: usize },
    /// An inverse-transform numerator was not divisible by the transform
    /// size; the input array is corrupted.
    NotDivisible { row: usize, col: usize, numerator: i128 },
    /// Two sequences that must have equal length do not.
    LengthMismatch { left: usize, right: usize },
    /// An input that must be non-empty is empty.
    EmptyInput,
    /// An architecture configuration violates one of its constraints.
    /// The string names the violated constraint.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { rows, cols, len } => {
                write!(f, "{rows}x{cols} matrix cannot be built from {len} values")
            }
            Error::ValueOutOfRange { row, col, bits } => {
                write!(f, "value at ({row}, {col}) does not fit in {bits} bits")
            }
            Error::InvalidBitWidth(bits) => write!(f, "invalid bit width {bits}"),
            Error::PadTooSmall { rows, cols, target } => {
                write!(f, "cannot pad {rows}x{cols} block into {target}x{target}")
            }
            Error::NonPrimeSize(n) => write!(f, "transform size {n} is not prime"),
            Error::NotSquare { rows, cols } => {
                write!(f, "transform input must be square, got {rows}x{cols}")
            }
            Error::SizeUnsupported { needed, max } => {
                write!(f, "transform size {needed} exceeds supported maximum {max}")
            }
            Error::InconsistentDirectionSums { direction } => {
                write!(f, "direction {direction} sums differ from direction 0")
            }
            Error::NotDivisible { row, col, numerator } => write!(
                f,
                "inverse numerator {numerator} at ({row}, {col}) is not divisible by the transform size"
            ),
            Error::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            Error::EmptyInput => write!(f, "input must be non-empty"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
