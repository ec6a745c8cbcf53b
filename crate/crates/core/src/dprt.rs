//! The discrete periodic Radon transform (DPRT) and its exact inverse.
//!
//! For a prime `N` and an `N x N` image `f`, the transform collects `N + 1`
//! directional projections into an `(N + 1) x N` array `F`:
//!
//! ```text
//! F(m, d) = sum_i f(i, <d + m*i>_N)    for 0 <= m < N   (wrapped rays)
//! F(N, d) = sum_j f(d, j)              (plain row sums)
//! ```
//!
//! Primality makes the rays partition the grid, which gives the transform
//! two structural properties this crate leans on everywhere:
//!
//! * every direction carries the same total mass, `sum_d F(m, d) = S` for
//!   all `m`, and
//! * the inverse is exact in integer arithmetic:
//!   `f(i, j) = (sum_m F(m, <j - m*i>_N) - S + F(N, i)) / N`, where the
//!   numerator is always divisible by `N`.
//!
//! Both properties are verified at runtime: arrays whose directions
//! disagree, or whose inverse numerators fail the divisibility test, are
//! rejected loudly instead of being rounded into a plausible-looking image.

use alloc::vec;
use alloc::vec::Vec;

use crate::block::ImageBlock;
use crate::error::{Error, Result};
use crate::modular::{ceil_log2, is_prime};

/// Largest supported transform size: the biggest prime whose worst-case
/// pipeline widths the `i128` accumulators were budgeted for.
pub const MAX_TRANSFORM_SIZE: usize = 1021;

/// Embeds a block into the top-left corner of an `n x n` zero field.
pub fn zero_pad(g: &ImageBlock, n: usize) -> Result<ImageBlock> {
    if g.rows() > n || g.cols() > n {
        return Err(Error::PadTooSmall { rows: g.rows(), cols: g.cols(), target: n });
    }
    let mut data = vec![0i128; n * n];
    for r in 0..g.rows() {
        let dst = r * n;
        data[dst..dst + g.cols()].copy_from_slice(g.row(r));
    }
    Ok(ImageBlock::from_parts(n, n, g.bits(), g.is_signed(), data))
}

/// The `(N + 1) x N` array of directional projections of an `N x N` image.
///
/// Row `m < N` holds the wrapped-ray projection with slope `m`; row `N`
/// holds the plain row sums. `bits` bounds the entry widths (input width
/// plus `ceil(log2 N)` for the `N`-term sums).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DprtArray {
    n: usize,
    bits: u32,
    signed: bool,
    data: Vec<i128>,
}

impl DprtArray {
    /// Wraps raw projection data, validating the shape, the primality of
    /// `n`, and the equal-mass invariant across all `N + 1` directions.
    pub fn from_raw(n: usize, bits: u32, data: Vec<i128>) -> Result<Self> {
        if !is_prime(n as u64) {
            return Err(Error::NonPrimeSize(n));
        }
        if n > MAX_TRANSFORM_SIZE {
            return Err(Error::SizeUnsupported { needed: n, max: MAX_TRANSFORM_SIZE });
        }
        if data.len() != (n + 1) * n {
            return Err(Error::ShapeMismatch { rows: n + 1, cols: n, len: data.len() });
        }
        let arr = DprtArray { n, bits, signed: true, data };
        arr.check_direction_sums()?;
        Ok(arr)
    }

    pub(crate) fn from_parts(n: usize, bits: u32, signed: bool, data: Vec<i128>) -> Self {
        debug_assert_eq!(data.len(), (n + 1) * n);
        DprtArray { n, bits, signed, data }
    }

    /// Transform size `N`. The array has `N + 1` directions of `N` bins.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Bound on the entry widths.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    #[inline(always)]
    pub fn get(&self, direction: usize, d: usize) -> i128 {
        debug_assert!(direction <= self.n && d < self.n);
        self.data[direction * self.n + d]
    }

    /// One projection: all `N` bins of the given direction.
    pub fn direction(&self, direction: usize) -> &[i128] {
        debug_assert!(direction <= self.n);
        &self.data[direction * self.n..(direction + 1) * self.n]
    }

    /// Total mass `S = sum_d F(0, d)`, shared by every direction.
    pub fn total(&self) -> i128 {
        self.direction(0).iter().sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> i128 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    fn check_direction_sums(&self) -> Result<()> {
        let s = self.total();
        for m in 1..=self.n {
            let sum: i128 = self.direction(m).iter().sum();
            if sum != s {
                return Err(Error::InconsistentDirectionSums { direction: m });
            }
        }
        Ok(())
    }
}

/// Forward transform of a square, prime-sized image.
pub fn forward(f: &ImageBlock) -> Result<DprtArray> {
    let n = f.rows();
    if f.cols() != n {
        return Err(Error::NotSquare { rows: f.rows(), cols: f.cols() });
    }
    if !is_prime(n as u64) {
        return Err(Error::NonPrimeSize(n));
    }
    if n > MAX_TRANSFORM_SIZE {
        return Err(Error::SizeUnsupported { needed: n, max: MAX_TRANSFORM_SIZE });
    }

    let mut data = vec![0i128; (n + 1) * n];
    for m in 0..n {
        let out = &mut data[m * n..(m + 1) * n];
        // F(m, d) = sum_i f(i, <d + m*i>_N): row i contributes itself
        // rotated left by <m*i>_N bins. Tracking the shift incrementally
        // and splitting the rotation into two copies keeps the inner loop
        // free of modular reductions.
        let mut shift = 0usize;
        for i in 0..n {
            let row = f.row(i);
            let head = n - shift;
            for d in 0..head {
                out[d] += row[d + shift];
            }
            for d in head..n {
                out[d] += row[d + shift - n];
            }
            shift += m;
            if shift >= n {
                shift -= n;
            }
        }
    }
    let rowsum = &mut data[n * n..(n + 1) * n];
    for (d, slot) in rowsum.iter_mut().enumerate() {
        *slot = f.row(d).iter().sum();
    }

    let bits = f.bits() + ceil_log2(n as u64);
    Ok(DprtArray::from_parts(n, bits, f.is_signed(), data))
}

/// Exact inverse transform.
///
/// Validates the equal-mass invariant and the divisibility of every
/// pre-normalization numerator by `N`; either failure means the array is
/// not the transform of any image and aborts the inversion.
pub fn inverse(arr: &DprtArray) -> Result<ImageBlock> {
    arr.check_direction_sums()?;
    let n = arr.n;
    let s = arr.total();
    let n_i128 = n as i128;

    let mut out = vec![0i128; n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        // sum_m F(m, <j - m*i>_N): direction m contributes itself rotated
        // left by <-m*i>_N = <(n - <i>)*m>_N bins; track it incrementally.
        let step = (n - i % n) % n;
        let mut shift = 0usize;
        for m in 0..n {
            let dir = arr.direction(m);
            let head = n - shift;
            for j in 0..head {
                row[j] += dir[j + shift];
            }
            for j in head..n {
                row[j] += dir[j + shift - n];
            }
            shift += step;
            if shift >= n {
                shift -= n;
            }
        }
        let corr = arr.get(n, i) - s;
        for (j, slot) in row.iter_mut().enumerate() {
            let numerator = *slot + corr;
            if numerator % n_i128 != 0 {
                return Err(Error::NotDivisible { row: i, col: j, numerator });
            }
            *slot = numerator / n_i128;
        }
    }

    let bits = width_for(&out);
    let signed = out.iter().any(|&v| v < 0);
    Ok(ImageBlock::from_parts(n, n, bits, signed, out))
}

/// Peak accumulator magnitude observed while inverting, across every pixel
/// and every partial sum (the `N` ray terms, the row-sum correction, and
/// the subtraction of the total mass).
///
/// This is the pre-normalization width the hardware accumulator must hold;
/// tests check it against the documented `B + C + 4n` budget.
pub fn inverse_prenorm_max(arr: &DprtArray) -> i128 {
    let n = arr.n;
    let s = arr.total();
    let mut peak = 0i128;
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0i128;
            for m in 0..n {
                let d = (j + (n - (m * i) % n) % n) % n;
                acc += arr.get(m, d);
                peak = peak.max(acc.abs());
            }
            acc += arr.get(n, i);
            peak = peak.max(acc.abs());
            acc -= s;
            peak = peak.max(acc.abs());
        }
    }
    peak
}

/// Minimal signed width that holds every value in `vals`.
pub(crate) fn width_for(vals: &[i128]) -> u32 {
    let mut bits = 1;
    for &v in vals {
        let mag = if v < 0 { -(v + 1) } else { v };
        let needed = (128 - mag.leading_zeros()) + 1;
        bits = bits.max(needed);
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::next_prime;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn block(rows: usize, cols: usize, bits: u32, data: &[i128]) -> ImageBlock {
        ImageBlock::new(rows, cols, bits, data.to_vec()).unwrap()
    }

    #[test]
    fn zero_pad_places_block_at_origin() {
        let g = block(1, 1, 4, &[5]);
        let p = zero_pad(&g, 2).unwrap();
        assert_eq!(p.as_slice(), &[5, 0, 0, 0]);
        let g = block(2, 2, 4, &[1, 2, 3, 4]);
        let p = zero_pad(&g, 3).unwrap();
        assert_eq!(p.as_slice(), &[1, 2, 0, 3, 4, 0, 0, 0, 0]);
        assert!(matches!(zero_pad(&g, 1), Err(Error::PadTooSmall { .. })));
    }

    #[test]
    fn forward_matches_the_worked_three_by_three() {
        let f = block(3, 3, 4, &[1, 2, 0, 3, 4, 0, 0, 0, 0]);
        let arr = forward(&f).unwrap();
        assert_eq!(arr.direction(0), &[4, 6, 0]);
        assert_eq!(arr.direction(1), &[5, 2, 3]);
        assert_eq!(arr.direction(2), &[1, 5, 4]);
        assert_eq!(arr.direction(3), &[3, 7, 0]);
        assert_eq!(arr.total(), 10);

        let back = inverse(&arr).unwrap();
        assert_eq!(back.as_slice(), f.as_slice());
    }

    #[test]
    fn forward_of_a_corner_delta_is_flat_ones() {
        let mut data = vec![0i128; 25];
        data[0] = 1;
        let f = block(5, 5, 4, &data);
        let arr = forward(&f).unwrap();
        for m in 0..=5 {
            let mut expect = vec![0i128; 5];
            expect[0] = 1;
            assert_eq!(arr.direction(m), &expect[..], "direction {m}");
        }
    }

    #[test]
    fn forward_requires_square_prime_input() {
        let f = block(2, 3, 4, &[0; 6]);
        assert!(matches!(forward(&f), Err(Error::NotSquare { .. })));
        let f = block(4, 4, 4, &[0; 16]);
        assert!(matches!(forward(&f), Err(Error::NonPrimeSize(4))));
    }

    #[test]
    fn forward_matches_naive_definition() {
        // Independent oracle: the double-loop definition, evaluated
        // directly, against the shift-based implementation.
        let n = 7usize;
        let data: Vec<i128> = (0..n * n).map(|k| ((k * 31 + 7) % 61) as i128).collect();
        let f = block(n, n, 6, &data);
        let arr = forward(&f).unwrap();
        for m in 0..n {
            for d in 0..n {
                let mut acc = 0i128;
                for i in 0..n {
                    acc += f.get(i, (d + m * i) % n);
                }
                assert_eq!(arr.get(m, d), acc, "m={m} d={d}");
            }
        }
        for d in 0..n {
            let acc: i128 = (0..n).map(|j| f.get(d, j)).sum();
            assert_eq!(arr.get(n, d), acc);
        }
    }

    #[test]
    fn direction_sums_are_validated_on_raw_input() {
        let f = block(3, 3, 4, &[1, 2, 0, 3, 4, 0, 0, 0, 0]);
        let arr = forward(&f).unwrap();
        let mut raw: Vec<i128> = (0..=3).flat_map(|m| arr.direction(m).to_vec()).collect();
        raw[3] += 1; // direction 1, bin 0: breaks the equal-mass invariant
        assert_eq!(
            DprtArray::from_raw(3, arr.bits(), raw).unwrap_err(),
            Error::InconsistentDirectionSums { direction: 1 }
        );
    }

    #[test]
    fn sum_preserving_corruption_fails_the_divisibility_check() {
        let f = block(3, 3, 4, &[1, 2, 0, 3, 4, 0, 0, 0, 0]);
        let arr = forward(&f).unwrap();
        let mut raw: Vec<i128> = (0..=3).flat_map(|m| arr.direction(m).to_vec()).collect();
        raw[3] += 1;
        raw[4] -= 1; // keeps direction 1's mass, so only divisibility can catch it
        let corrupted = DprtArray::from_raw(3, arr.bits(), raw).unwrap();
        assert!(matches!(inverse(&corrupted), Err(Error::NotDivisible { .. })));
    }

    #[test]
    fn entry_widths_respect_the_budget() {
        // Maximal 8-bit image at N = 37: every entry must stay below
        // 2^(B + n) = 2^14.
        let n = 37usize;
        let f = block(n, n, 8, &vec![255i128; n * n]);
        let arr = forward(&f).unwrap();
        assert_eq!(arr.bits(), 8 + 6);
        assert!(arr.max_abs() < 1i128 << 14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn roundtrip_is_exact(
            seed in any::<u64>(),
            np in 0usize..8,
            bits in 1u32..9,
        ) {
            let primes = [2usize, 3, 5, 7, 11, 13, 17, 19];
            let n = primes[np];
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i128) & ((1i128 << bits) - 1)
            };
            let data: Vec<i128> = (0..n * n).map(|_| next()).collect();
            let f = ImageBlock::new(n, n, bits, data).unwrap();
            let arr = forward(&f).unwrap();
            let back = inverse(&arr).unwrap();
            prop_assert_eq!(back.as_slice(), f.as_slice());
            // Width bound holds for every entry.
            prop_assert!(arr.max_abs() < 1i128 << (bits + ceil_log2(n as u64)));
        }

        #[test]
        fn transform_is_linear(seed in any::<u64>(), a in -5i128..6, b in -5i128..6) {
            let n = 7usize;
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 40) as i128) % 64
            };
            let fa: Vec<i128> = (0..n * n).map(|_| next()).collect();
            let fb: Vec<i128> = (0..n * n).map(|_| next()).collect();
            let combo: Vec<i128> =
                fa.iter().zip(&fb).map(|(&x, &y)| a * x + b * y).collect();
            let ta = forward(&ImageBlock::new_signed(n, n, 8, fa).unwrap()).unwrap();
            let tb = forward(&ImageBlock::new_signed(n, n, 8, fb).unwrap()).unwrap();
            let tc = forward(&ImageBlock::new_signed(n, n, 16, combo).unwrap()).unwrap();
            for m in 0..=n {
                for d in 0..n {
                    prop_assert_eq!(tc.get(m, d), a * ta.get(m, d) + b * tb.get(m, d));
                }
            }
        }
    }

    #[test]
    fn supported_sizes_are_capped() {
        let p = next_prime(MAX_TRANSFORM_SIZE as u64 + 1) as usize;
        let f = ImageBlock::zeros(p, p, 1).unwrap();
        assert!(matches!(forward(&f), Err(Error::SizeUnsupported { .. })));
    }
}
