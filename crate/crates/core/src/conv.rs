//! Exact 2D convolution and cross-correlation, computed in the transform
//! domain.
//!
//! The pipeline rests on the projection-convolution property: if `F`, `G`,
//! `H` are the transforms of `f = g ⊛ h` (circular), `g`, and `h`, then for
//! every direction `m`
//!
//! ```text
//! F_m(d) = sum_k G_m(k) * H_m(<d - k>_N)
//! ```
//!
//! i.e. each of the `N + 1` directions convolves independently as a 1D
//! circular sequence. A full 2D circular convolution therefore costs two
//! forward transforms, `N + 1` one-dimensional convolutions, and one exact
//! inverse — all in integer arithmetic, bit-identical to the spatial
//! definition.
//!
//! Linear convolution and cross-correlation ride on top: both operands are
//! zero-padded into an `N x N` field with `N` the smallest prime that
//! prevents wraparound, the circular result is computed, and the
//! `(P1 + Q1 - 1) x (P2 + Q2 - 1)` valid region is cropped out.
//! Cross-correlation reverses the kernel along both axes before padding.
//! Images too large for one transform go through [`overlap_add`], which
//! tiles the image, convolves each tile at a small prime size, and adds the
//! overlapping tile results — exactly, since integer addition commutes.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitBudget;
use crate::block::{ImageBlock, Kernel};
use crate::dprt::{self, DprtArray, MAX_TRANSFORM_SIZE};
use crate::error::{Error, Result};
use crate::modular::{ceil_log2, next_prime};

/// What the output samples mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `out(k, l) = sum_{i,j} g(i, j) * h(k - i, l - j)`
    Convolution,
    /// `out` indexed by lag plus `(Q1 - 1, Q2 - 1)`:
    /// `out(a + Q1 - 1, b + Q2 - 1) = sum_{i,j} g(i, j) * h(i - a, j - b)`.
    /// Identical to convolving with the doubly-reversed kernel.
    CrossCorrelation,
}

/// Which exact engine computes a linear convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactBackend {
    /// Transform-domain pipeline; the production path.
    Dprt,
    /// Literal spatial sums; the reference oracle. Exposed (not test-only)
    /// because the self-validation suites compare the two at runtime.
    Direct,
}

/// Smallest legal transform size for a `P1 x P2` image against a
/// `Q1 x Q2` kernel: the next prime at or above both linear output extents.
pub fn required_transform_size(p1: usize, p2: usize, q1: usize, q2: usize) -> usize {
    let extent = (p1 + q1).max(p2 + q2) - 1;
    next_prime(extent as u64) as usize
}

/// 1D circular convolution, `out(d) = sum_k g(k) * h(<d - k>_N)`.
///
/// Evaluated the way the hardware does: as dot products of `g` against the
/// doubly-reversed `h` under successive circular shifts. The result is
/// identical to the definition above; [`circconv1d_direct`] is the naive
/// reference.
pub fn circconv1d(g: &[i128], h: &[i128]) -> Result<Vec<i128>> {
    let n = g.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if h.len() != n {
        return Err(Error::LengthMismatch { left: n, right: h.len() });
    }
    // hb(k) = h(N - 1 - k); shifting hb left by N - 1 - d aligns it so that
    // the plain dot product with g yields out(d).
    let hb: Vec<i128> = h.iter().rev().copied().collect();
    let mut out = Vec::with_capacity(n);
    for d in 0..n {
        let s = n - 1 - d;
        let mut acc = 0i128;
        for k in 0..n - s {
            acc += g[k] * hb[k + s];
        }
        for k in n - s..n {
            acc += g[k] * hb[k + s - n];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Naive 1D circular convolution straight from the definition.
pub fn circconv1d_direct(g: &[i128], h: &[i128]) -> Result<Vec<i128>> {
    let n = g.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if h.len() != n {
        return Err(Error::LengthMismatch { left: n, right: h.len() });
    }
    let mut out = vec![0i128; n];
    for (d, slot) in out.iter_mut().enumerate() {
        for k in 0..n {
            *slot += g[k] * h[(n + d - k) % n];
        }
    }
    Ok(out)
}

/// Convolves two transforms direction by direction.
///
/// The output is the transform of the circular convolution of the two
/// underlying images; its directions all share the mass `S_g * S_h`.
pub fn transform_conv(ga: &DprtArray, ha: &DprtArray) -> Result<DprtArray> {
    let n = ga.n();
    if ha.n() != n {
        return Err(Error::LengthMismatch { left: n, right: ha.n() });
    }
    let mut data = Vec::with_capacity((n + 1) * n);
    for m in 0..=n {
        data.extend(circconv1d(ga.direction(m), ha.direction(m))?);
    }
    let bits = ga.bits() + ha.bits() + ceil_log2(n as u64);
    Ok(DprtArray::from_parts(n, bits, ga.is_signed() || ha.is_signed(), data))
}

/// 2D circular convolution of two same-size square blocks via the
/// transform pipeline. Both sides must already be `N x N` with `N` prime.
pub fn circconv2d(g: &ImageBlock, h: &ImageBlock) -> Result<ImageBlock> {
    let ga = dprt::forward(g)?;
    let ha = dprt::forward(h)?;
    dprt::inverse(&transform_conv(&ga, &ha)?)
}

/// 2D circular convolution straight from the definition; the oracle for
/// [`circconv2d`].
pub fn circconv2d_direct(g: &ImageBlock, h: &ImageBlock) -> Result<ImageBlock> {
    let n = g.rows();
    if g.cols() != n {
        return Err(Error::NotSquare { rows: g.rows(), cols: g.cols() });
    }
    if h.rows() != n || h.cols() != n {
        return Err(Error::LengthMismatch { left: n, right: h.rows() });
    }
    let mut out = vec![0i128; n * n];
    for k in 0..n {
        for l in 0..n {
            let mut acc = 0i128;
            for i in 0..n {
                for j in 0..n {
                    acc += g.get(i, j) * h.get((n + k - i) % n, (n + l - j) % n);
                }
            }
            out[k * n + l] = acc;
        }
    }
    let bits = dprt::width_for(&out);
    let signed = out.iter().any(|&v| v < 0);
    Ok(ImageBlock::from_parts(n, n, bits, signed, out))
}

/// A kernel fixed to one `(mode, N)` pair: reversed if cross-correlating,
/// zero-padded, and transformed once. Reuse it to convolve many image
/// blocks against the same kernel (the overlap-add loop does exactly that).
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    n: usize,
    q1: usize,
    q2: usize,
    kernel_bits: u32,
    transform: DprtArray,
}

impl PreparedKernel {
    pub fn new(h: &Kernel, mode: Mode, n: usize) -> Result<PreparedKernel> {
        if n > MAX_TRANSFORM_SIZE {
            return Err(Error::SizeUnsupported { needed: n, max: MAX_TRANSFORM_SIZE });
        }
        let oriented = match mode {
            Mode::Convolution => h.clone(),
            Mode::CrossCorrelation => h.flipped(),
        };
        let padded = dprt::zero_pad(&oriented.to_block(), n)?;
        Ok(PreparedKernel {
            n,
            q1: h.rows(),
            q2: h.cols(),
            kernel_bits: h.bits(),
            transform: dprt::forward(&padded)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transform(&self) -> &DprtArray {
        &self.transform
    }
}

/// A linear convolution result together with its pipeline context.
#[derive(Debug, Clone)]
pub struct ConvOutput {
    /// The `(P1 + Q1 - 1) x (P2 + Q2 - 1)` linear result.
    pub result: ImageBlock,
    /// The full `N x N` circular result the linear one was cropped from.
    pub raw: ImageBlock,
    /// Transform size used.
    pub n: usize,
    /// Worst-case stage widths for this operand pairing.
    pub budget: BitBudget,
}

/// Linear convolution of one image block against a prepared kernel.
pub fn linconv2d_prepared(g: &ImageBlock, prepared: &PreparedKernel) -> Result<ConvOutput> {
    let n = prepared.n;
    let needed = required_transform_size(g.rows(), g.cols(), prepared.q1, prepared.q2);
    if needed > n {
        return Err(Error::PadTooSmall { rows: g.rows(), cols: g.cols(), target: n });
    }
    let padded = dprt::zero_pad(g, n)?;
    let ga = dprt::forward(&padded)?;
    let raw = dprt::inverse(&transform_conv(&ga, &prepared.transform)?)?;
    let result = raw.crop(0, 0, g.rows() + prepared.q1 - 1, g.cols() + prepared.q2 - 1)?;
    Ok(ConvOutput {
        result,
        raw,
        n,
        budget: BitBudget::new(g.bits(), prepared.kernel_bits, n, 0),
    })
}

/// Linear convolution or cross-correlation via the transform pipeline.
///
/// Picks `N = next_prime(max(P1 + Q1, P2 + Q2) - 1)`, zero-pads both
/// operands, convolves circularly, and crops the linear region. Fails with
/// [`Error::SizeUnsupported`] when that prime exceeds the supported
/// maximum; use [`overlap_add`] for such images.
pub fn linconv2d(g: &ImageBlock, h: &Kernel, mode: Mode) -> Result<ConvOutput> {
    let n = required_transform_size(g.rows(), g.cols(), h.rows(), h.cols());
    let prepared = PreparedKernel::new(h, mode, n)?;
    linconv2d_prepared(g, &prepared)
}

/// Linear convolution or cross-correlation straight from the spatial
/// definition. The two modes are written out independently — the
/// cross-correlation branch sums over lags rather than reversing the
/// kernel — so this doubles as the oracle for the reversal identity.
pub fn linconv2d_direct(g: &ImageBlock, h: &Kernel, mode: Mode) -> Result<ImageBlock> {
    let (p1, p2) = (g.rows(), g.cols());
    let (q1, q2) = (h.rows(), h.cols());
    let (out_r, out_c) = (p1 + q1 - 1, p2 + q2 - 1);
    let mut out = vec![0i128; out_r * out_c];
    match mode {
        Mode::Convolution => {
            for i in 0..p1 {
                for j in 0..p2 {
                    let gij = g.get(i, j);
                    if gij == 0 {
                        continue;
                    }
                    for u in 0..q1 {
                        for v in 0..q2 {
                            out[(i + u) * out_c + (j + v)] += gij * h.get(u, v);
                        }
                    }
                }
            }
        }
        Mode::CrossCorrelation => {
            // out(k, l) covers lag (a, b) = (k - Q1 + 1, l - Q2 + 1):
            // sum over image positions of g(i, j) * h(i - a, j - b).
            for k in 0..out_r {
                let a = k as isize - (q1 as isize - 1);
                for l in 0..out_c {
                    let b = l as isize - (q2 as isize - 1);
                    let mut acc = 0i128;
                    for i in 0..p1 {
                        let u = i as isize - a;
                        if u < 0 || u >= q1 as isize {
                            continue;
                        }
                        for j in 0..p2 {
                            let v = j as isize - b;
                            if v < 0 || v >= q2 as isize {
                                continue;
                            }
                            acc += g.get(i, j) * h.get(u as usize, v as usize);
                        }
                    }
                    out[k * out_c + l] = acc;
                }
            }
        }
    }
    let bits = dprt::width_for(&out);
    let signed = out.iter().any(|&v| v < 0);
    Ok(ImageBlock::from_parts(out_r, out_c, bits, signed, out))
}

/// Linear convolution with an explicit backend choice.
pub fn convolve(g: &ImageBlock, h: &Kernel, mode: Mode, backend: ExactBackend) -> Result<ImageBlock> {
    match backend {
        ExactBackend::Dprt => Ok(linconv2d(g, h, mode)?.result),
        ExactBackend::Direct => linconv2d_direct(g, h, mode),
    }
}

/// Overlap-add linear convolution for images of any size.
///
/// The image is tiled into non-overlapping `block x block` pieces (edge
/// pieces are smaller); each piece is convolved at a small prime transform
/// size against a kernel prepared once, and its `(rows + Q1 - 1) x
/// (cols + Q2 - 1)` result is added into the output at the piece's origin.
/// Integer addition makes the result independent of `block` and
/// bit-identical to the single-shot pipeline. `block` defaults to
/// `max(Q1, Q2)`.
pub fn overlap_add(
    g: &ImageBlock,
    h: &Kernel,
    mode: Mode,
    backend: ExactBackend,
    block: Option<usize>,
) -> Result<ImageBlock> {
    let (q1, q2) = (h.rows(), h.cols());
    let bp = block.unwrap_or_else(|| q1.max(q2));
    if bp == 0 {
        return Err(Error::EmptyInput);
    }
    let (out_r, out_c) = (g.rows() + q1 - 1, g.cols() + q2 - 1);
    let mut out = vec![0i128; out_r * out_c];

    let prepared = match backend {
        ExactBackend::Dprt => {
            Some(PreparedKernel::new(h, mode, required_transform_size(bp, bp, q1, q2))?)
        }
        ExactBackend::Direct => None,
    };
    let block_rows = g.rows().div_ceil(bp);
    let block_cols = g.cols().div_ceil(bp);
    for bi in 0..block_rows {
        for bj in 0..block_cols {
            let r0 = bi * bp;
            let c0 = bj * bp;
            let sub = g.crop(r0, c0, bp.min(g.rows() - r0), bp.min(g.cols() - c0))?;
            let piece = match &prepared {
                Some(p) => linconv2d_prepared(&sub, p)?.result,
                None => linconv2d_direct(&sub, h, mode)?,
            };
            for r in 0..piece.rows() {
                let dst = (r0 + r) * out_c + c0;
                for (slot, &v) in out[dst..dst + piece.cols()].iter_mut().zip(piece.row(r)) {
                    *slot += v;
                }
            }
        }
    }
    let bits = dprt::width_for(&out);
    let signed = out.iter().any(|&v| v < 0);
    Ok(ImageBlock::from_parts(out_r, out_c, bits, signed, out))
}
