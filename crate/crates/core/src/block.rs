//! Integer matrices with declared bit widths.
//!
//! Images are unsigned with width `B`; kernels are signed with width `C`
//! (sign bit included). Both store their samples as `i128` row-major so that
//! every downstream accumulation — transform entries at `B + n` bits,
//! transform-domain convolutions at `B + C + 3n`, pre-normalization inverse
//! sums at `B + C + 4n` — stays exact without overflow at all supported
//! transform sizes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Widest representable sample or accumulator width, in bits.
///
/// `i128` accumulators leave slack above the worst-case pre-normalization
/// width of `B + C + 4n`; constructors reject declared widths beyond this
/// bound rather than risk silent wraparound.
pub const MAX_BITS: u32 = 120;

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 || rows.checked_mul(cols) != Some(len) {
        return Err(Error::ShapeMismatch { rows, cols, len });
    }
    Ok(())
}

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidBitWidth(bits));
    }
    Ok(())
}

/// A rectangular block of integer samples with a declared bit width.
///
/// Freshly loaded images are unsigned — every value satisfies
/// `0 <= v < 2^bits` — and are built with [`ImageBlock::new`]. Intermediate
/// and output blocks (convolutions with signed kernels, padded kernels) may
/// be signed, carrying `-2^(bits-1) <= v < 2^(bits-1)`; those come from
/// [`ImageBlock::new_signed`]. The flag only records which range was
/// enforced; arithmetic treats both identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBlock {
    rows: usize,
    cols: usize,
    bits: u32,
    signed: bool,
    data: Vec<i128>,
}

impl ImageBlock {
    /// Builds an unsigned block, enforcing `0 <= v < 2^bits` on every value.
    pub fn new(rows: usize, cols: usize, bits: u32, data: Vec<i128>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        check_bits(bits)?;
        let limit = 1i128 << bits;
        for (idx, &v) in data.iter().enumerate() {
            if v < 0 || v >= limit {
                return Err(Error::ValueOutOfRange { row: idx / cols, col: idx % cols, bits });
            }
        }
        Ok(ImageBlock { rows, cols, bits, signed: false, data })
    }

    /// Builds a signed block, enforcing `-2^(bits-1) <= v < 2^(bits-1)`.
    pub fn new_signed(rows: usize, cols: usize, bits: u32, data: Vec<i128>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        check_bits(bits)?;
        let half = 1i128 << (bits - 1);
        for (idx, &v) in data.iter().enumerate() {
            if v < -half || v >= half {
                return Err(Error::ValueOutOfRange { row: idx / cols, col: idx % cols, bits });
            }
        }
        Ok(ImageBlock { rows, cols, bits, signed: true, data })
    }

    /// All-zero unsigned block.
    pub fn zeros(rows: usize, cols: usize, bits: u32) -> Result<Self> {
        check_bits(bits)?;
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch { rows, cols, len: 0 });
        }
        Ok(ImageBlock { rows, cols, bits, signed: false, data: vec![0; rows * cols] })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Declared width of the stored samples.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Whether the signed range was enforced at construction.
    pub fn is_signed(&self) -> bool {
        self.signed
    }

    #[inline(always)]
    pub fn get(&self, row: usize, col: usize) -> i128 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    /// Row-major view of all samples.
    pub fn as_slice(&self) -> &[i128] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[i128] {
        debug_assert!(row < self.rows);
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Sum of all samples (exact).
    pub fn total(&self) -> i128 {
        self.data.iter().sum()
    }

    /// The sub-block `[row0, row0+rows) x [col0, col0+cols)`.
    pub fn crop(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Result<Self> {
        if row0 + rows > self.rows || col0 + cols > self.cols {
            return Err(Error::ShapeMismatch { rows, cols, len: self.data.len() });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let start = (row0 + r) * self.cols + col0;
            data.extend_from_slice(&self.data[start..start + cols]);
        }
        Ok(ImageBlock { rows, cols, bits: self.bits, signed: self.signed, data })
    }

    /// Rebuilds the block from already-validated parts; used by the
    /// transform layers for intermediates whose width was derived, not
    /// declared by the caller.
    pub(crate) fn from_parts(
        rows: usize,
        cols: usize,
        bits: u32,
        signed: bool,
        data: Vec<i128>,
    ) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        ImageBlock { rows, cols, bits, signed, data }
    }
}

/// A signed convolution kernel of width `C` (sign bit included).
///
/// Every coefficient satisfies `-2^(C-1) <= v < 2^(C-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    rows: usize,
    cols: usize,
    bits: u32,
    data: Vec<i128>,
}

impl Kernel {
    pub fn new(rows: usize, cols: usize, bits: u32, data: Vec<i128>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        check_bits(bits)?;
        let half = 1i128 << (bits - 1);
        for (idx, &v) in data.iter().enumerate() {
            if v < -half || v >= half {
                return Err(Error::ValueOutOfRange { row: idx / cols, col: idx % cols, bits });
            }
        }
        Ok(Kernel { rows, cols, bits, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline(always)]
    pub fn get(&self, row: usize, col: usize) -> i128 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[i128] {
        &self.data
    }

    /// The kernel reversed along both axes: `flip(h)[i][j] = h[Q1-1-i][Q2-1-j]`.
    ///
    /// Convolving with `flip(h)` is exactly cross-correlating with `h`.
    pub fn flipped(&self) -> Kernel {
        let mut data = Vec::with_capacity(self.data.len());
        for r in (0..self.rows).rev() {
            for c in (0..self.cols).rev() {
                data.push(self.get(r, c));
            }
        }
        Kernel { rows: self.rows, cols: self.cols, bits: self.bits, data }
    }

    /// The kernel as a signed block, ready for zero-padding into the
    /// transform pipeline.
    pub fn to_block(&self) -> ImageBlock {
        ImageBlock::from_parts(self.rows, self.cols, self.bits, true, self.data.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsigned_range_is_enforced() {
        assert!(ImageBlock::new(1, 2, 8, vec![0, 255]).is_ok());
        let err = ImageBlock::new(1, 2, 8, vec![0, 256]).unwrap_err();
        assert_eq!(err, Error::ValueOutOfRange { row: 0, col: 1, bits: 8 });
        let err = ImageBlock::new(1, 1, 8, vec![-1]).unwrap_err();
        assert_eq!(err, Error::ValueOutOfRange { row: 0, col: 0, bits: 8 });
    }

    #[test]
    fn signed_range_is_enforced() {
        assert!(Kernel::new(1, 2, 8, vec![-128, 127]).is_ok());
        assert!(Kernel::new(1, 1, 8, vec![128]).is_err());
        assert!(Kernel::new(1, 1, 8, vec![-129]).is_err());
        assert!(ImageBlock::new_signed(1, 1, 4, vec![-8]).is_ok());
        assert!(ImageBlock::new_signed(1, 1, 4, vec![8]).is_err());
    }

    #[test]
    fn shape_and_width_are_checked() {
        assert!(matches!(
            ImageBlock::new(2, 2, 8, vec![0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(ImageBlock::new(0, 2, 8, vec![]), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(ImageBlock::new(1, 1, 0, vec![0]), Err(Error::InvalidBitWidth(0))));
        assert!(matches!(
            ImageBlock::new(1, 1, MAX_BITS + 1, vec![0]),
            Err(Error::InvalidBitWidth(_))
        ));
    }

    #[test]
    fn flip_reverses_both_axes() {
        let h = Kernel::new(2, 3, 8, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let f = h.flipped();
        assert_eq!(f.as_slice(), &[6, 5, 4, 3, 2, 1]);
        // Flipping twice is the identity.
        assert_eq!(f.flipped(), h);
    }

    #[test]
    fn crop_extracts_the_requested_window() {
        let b = ImageBlock::new(3, 3, 8, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        let c = b.crop(1, 1, 2, 2).unwrap();
        assert_eq!(c.as_slice(), &[5, 6, 8, 9]);
        assert!(b.crop(2, 2, 2, 2).is_err());
    }

    #[test]
    fn totals_are_exact() {
        let b = ImageBlock::new(2, 2, 8, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(b.total(), 10);
    }
}
