//! Low-rank separable filtering: a 2D kernel is truncated to its `r`
//! largest singular values and factored into `r` (column filter, row
//! filter) pairs, so 2D linear convolution becomes `r` passes of 1D row
//! convolutions followed by 1D column convolutions.
//!
//! The factoring path is LU with partial pivoting on the truncated
//! kernel — the row permutation is folded into the column filters, so the
//! outer-product form survives pivoting — with a pure-SVD term form
//! (`u_k * sqrt(sigma_k)`, `sqrt(sigma_k) * v_k^T`) available as a
//! numerically robust alternative. Everything here is floating point;
//! the approximation error is always computed and returned, never
//! dropped.

use nalgebra::DMatrix;

use crate::{AppError, AppResult};
use periconv_core::Mode;

/// Singular values at or below `RANK_TOL * sigma_1` count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// How the truncated kernel is split into separable terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparationMethod {
    /// LU of the rank-truncated kernel (pivoted; the default).
    #[default]
    LuOfTruncatedSvd,
    /// Terms straight from the SVD factors.
    PureSvd,
}

/// A kernel as a sum of `rank` outer products, with the truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    /// Terms actually kept (may be below the requested rank when the
    /// kernel's numerical rank is smaller).
    pub rank: usize,
    pub kernel_rows: usize,
    pub kernel_cols: usize,
    /// `(column filter, row filter)` pairs; lengths `kernel_rows` and
    /// `kernel_cols`.
    pub terms: Vec<(Vec<f64>, Vec<f64>)>,
    /// Singular values not represented by the terms, largest first.
    pub dropped_sigma: Vec<f64>,
    /// `||H - H_r||_F = sqrt(sum of dropped_sigma^2)`.
    pub frob_error: f64,
}

impl SeparableDecomposition {
    /// The rank-`r` kernel the terms represent: `sum_k col_k * row_k^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.kernel_rows, self.kernel_cols);
        for (col, row) in &self.terms {
            for i in 0..self.kernel_rows {
                for j in 0..self.kernel_cols {
                    out[(i, j)] += col[i] * row[j];
                }
            }
        }
        out
    }
}

/// Singular values sorted descending, with `u` columns and `v^T` rows
/// permuted to match.
fn sorted_svd(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let svd = h.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors were requested");
    let vt = svd.v_t.expect("right singular vectors were requested");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).expect("singular values are finite"));
    let su = DMatrix::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]);
    let svt = DMatrix::from_fn(order.len(), vt.ncols(), |k, j| vt[(order[k], j)]);
    (order.iter().map(|&k| s[k]).collect(), su, svt)
}

/// Number of singular values above `RANK_TOL * sigma_1`.
pub fn numeric_rank(h: &DMatrix<f64>) -> usize {
    let s: Vec<f64> = h.clone().svd(false, false).singular_values.iter().copied().collect();
    let top = s.iter().copied().fold(0.0f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > RANK_TOL * top).count()
}

/// Best rank-`r` approximation (largest `r` singular values kept) and the
/// discarded singular values.
pub fn svd_truncate(h: &DMatrix<f64>, r: usize) -> AppResult<(DMatrix<f64>, Vec<f64>)> {
    let min_dim = h.nrows().min(h.ncols());
    if r == 0 || r > min_dim {
        return Err(AppError::Rank { rank: r, max: min_dim });
    }
    let (s, u, vt) = sorted_svd(h);
    let mut h_r = DMatrix::zeros(h.nrows(), h.ncols());
    for (k, &sigma) in s.iter().take(r).enumerate() {
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                h_r[(i, j)] += sigma * u[(i, k)] * vt[(k, j)];
            }
        }
    }
    Ok((h_r, s[r..].to_vec()))
}

/// Row-echelon elimination with partial pivoting, returning `r`
/// `(column, row)` terms whose outer products sum to `a` exactly (up to
/// roundoff). Dependent leading columns are skipped rather than treated
/// as failures, so any matrix of rank exactly `r` factors.
fn lu_terms(a: &DMatrix<f64>, r: usize) -> AppResult<Vec<(Vec<f64>, Vec<f64>)>> {
    let (m, n) = a.shape();
    let mut work: Vec<f64> = (0..m).flat_map(|i| (0..n).map(move |j| a[(i, j)])).collect();
    let mut lower = vec![0.0f64; m * r];
    let mut perm: Vec<usize> = (0..m).collect();
    let scale = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let pivot_tol = scale * RANK_TOL;

    let mut pivots = 0usize;
    for col in 0..n {
        if pivots == r || pivots == m {
            break;
        }
        let imax = (pivots..m)
            .max_by(|&x, &y| work[x * n + col].abs().partial_cmp(&work[y * n + col].abs()).unwrap())
            .unwrap();
        if work[imax * n + col].abs() <= pivot_tol {
            continue; // column depends on the pivots found so far
        }
        if imax != pivots {
            for j in 0..n {
                work.swap(pivots * n + j, imax * n + j);
            }
            for k in 0..pivots {
                lower.swap(pivots * r + k, imax * r + k);
            }
            perm.swap(pivots, imax);
        }
        lower[pivots * r + pivots] = 1.0;
        let pivot = work[pivots * n + col];
        for i in pivots + 1..m {
            let f = work[i * n + col] / pivot;
            lower[i * r + pivots] = f;
            for j in 0..n {
                work[i * n + j] -= f * work[pivots * n + j];
            }
        }
        pivots += 1;
    }

    if pivots < r {
        return Err(AppError::Factorization(format!(
            "matrix rank {pivots} is below the requested {r} terms",
        )));
    }
    // Rows past the pivots must have been annihilated, or the matrix's
    // rank exceeds r and the r terms cannot reconstruct it.
    let residual = (r..m).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0f64, |acc, (i, j)| {
        acc.max(work[i * n + j].abs())
    });
    if residual > scale * 1e-9 {
        return Err(AppError::Factorization(format!(
            "matrix rank exceeds the requested {r} terms (residual {residual:.3e})",
        )));
    }

    let terms = (0..r)
        .map(|k| {
            let mut col = vec![0.0f64; m];
            for i in 0..m {
                col[perm[i]] = lower[i * r + k];
            }
            (col, work[k * n..(k + 1) * n].to_vec())
        })
        .collect();
    Ok(terms)
}

/// Factors a matrix of numerical rank `r` into `r` separable terms via
/// pivoted LU: column filters from the (permuted) unit-lower-triangular
/// factor, row filters from the upper factor.
pub fn lu_separate(h_r: &DMatrix<f64>, r: usize) -> AppResult<SeparableDecomposition> {
    let min_dim = h_r.nrows().min(h_r.ncols());
    if r == 0 || r > min_dim {
        return Err(AppError::Rank { rank: r, max: min_dim });
    }
    Ok(SeparableDecomposition {
        rank: r,
        kernel_rows: h_r.nrows(),
        kernel_cols: h_r.ncols(),
        terms: lu_terms(h_r, r)?,
        dropped_sigma: Vec::new(),
        frob_error: 0.0,
    })
}

/// Truncates `h` to (at most) rank `r` and factors it into separable
/// terms. When the kernel's numerical rank is below `r`, only that many
/// terms are produced; the rest of the spectrum lands in `dropped_sigma`.
pub fn separate(h: &DMatrix<f64>, r: usize, method: SeparationMethod) -> AppResult<SeparableDecomposition> {
    let min_dim = h.nrows().min(h.ncols());
    if r == 0 || r > min_dim {
        return Err(AppError::Rank { rank: r, max: min_dim });
    }
    let (s, u, vt) = sorted_svd(h);
    let top = s.first().copied().unwrap_or(0.0);
    let numeric = if top == 0.0 { 0 } else { s.iter().filter(|&&v| v > RANK_TOL * top).count() };
    let keep = r.min(numeric);
    let dropped: Vec<f64> = s[keep..].to_vec();
    let frob_error = dropped.iter().map(|v| v * v).sum::<f64>().sqrt();

    let terms = match method {
        SeparationMethod::PureSvd => (0..keep)
            .map(|k| {
                let root = s[k].sqrt();
                let col = (0..h.nrows()).map(|i| u[(i, k)] * root).collect();
                let row = (0..h.ncols()).map(|j| root * vt[(k, j)]).collect();
                (col, row)
            })
            .collect(),
        SeparationMethod::LuOfTruncatedSvd => {
            if keep == 0 {
                Vec::new()
            } else {
                let mut h_keep = DMatrix::zeros(h.nrows(), h.ncols());
                for k in 0..keep {
                    for i in 0..h.nrows() {
                        for j in 0..h.ncols() {
                            h_keep[(i, j)] += s[k] * u[(i, k)] * vt[(k, j)];
                        }
                    }
                }
                lu_terms(&h_keep, keep)?
            }
        }
    };
    Ok(SeparableDecomposition {
        rank: keep,
        kernel_rows: h.nrows(),
        kernel_cols: h.ncols(),
        terms,
        dropped_sigma: dropped,
        frob_error,
    })
}

/// 1D linear convolution, output length `d.len() + h.len() - 1`.
pub fn linconv1d(d: &[f64], h: &[f64]) -> AppResult<Vec<f64>> {
    if d.is_empty() || h.is_empty() {
        return Err(AppError::Parse { context: "linconv1d".into(), msg: "empty sequence".into() });
    }
    let mut out = vec![0.0f64; d.len() + h.len() - 1];
    for (i, &a) in d.iter().enumerate() {
        for (j, &b) in h.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Ok(out)
}

/// Separable 2D linear convolution (or cross-correlation): per term,
/// every image row is convolved with the row filter, then every resulting
/// column with the column filter, and terms accumulate in order. Output
/// is `(P1 + Q1 - 1) x (P2 + Q2 - 1)`.
pub fn rankconv2d(image: &DMatrix<f64>, dec: &SeparableDecomposition, mode: Mode) -> DMatrix<f64> {
    let (p1, p2) = image.shape();
    let (q1, q2) = (dec.kernel_rows, dec.kernel_cols);
    let (out_r, out_c) = (p1 + q1 - 1, p2 + q2 - 1);
    let mut out = DMatrix::zeros(out_r, out_c);
    for (col_f, row_f) in &dec.terms {
        // Cross-correlation flips the kernel, i.e. both filters.
        let (col_f, row_f) = match mode {
            Mode::Convolution => (col_f.clone(), row_f.clone()),
            Mode::CrossCorrelation => (
                col_f.iter().rev().copied().collect::<Vec<_>>(),
                row_f.iter().rev().copied().collect::<Vec<_>>(),
            ),
        };
        let mut tmp = DMatrix::zeros(p1, out_c);
        for i in 0..p1 {
            let row: Vec<f64> = image.row(i).iter().copied().collect();
            for (j, v) in linconv1d(&row, &row_f).expect("nonempty row").into_iter().enumerate() {
                tmp[(i, j)] = v;
            }
        }
        for j in 0..out_c {
            let column: Vec<f64> = (0..p1).map(|i| tmp[(i, j)]).collect();
            for (i, v) in linconv1d(&column, &col_f).expect("nonempty column").into_iter().enumerate() {
                out[(i, j)] += v;
            }
        }
    }
    out
}

/// Overlap-add version of [`rankconv2d`]: the image is tiled into
/// `block x block` pieces, each convolved separably, and the piece
/// results are added at their block offsets (row-major block order, so
/// the floating-point accumulation is reproducible).
pub fn rankconv2d_blocked(
    image: &DMatrix<f64>,
    dec: &SeparableDecomposition,
    mode: Mode,
    block: usize,
) -> AppResult<DMatrix<f64>> {
    if block == 0 {
        return Err(AppError::Usage(String::from("block size must be positive")));
    }
    let (p1, p2) = image.shape();
    let (q1, q2) = (dec.kernel_rows, dec.kernel_cols);
    let mut out = DMatrix::zeros(p1 + q1 - 1, p2 + q2 - 1);
    for r0 in (0..p1).step_by(block) {
        for c0 in (0..p2).step_by(block) {
            let rows = block.min(p1 - r0);
            let cols = block.min(p2 - c0);
            let sub = image.view((r0, c0), (rows, cols)).into_owned();
            let piece = rankconv2d(&sub, dec, mode);
            for i in 0..piece.nrows() {
                for j in 0..piece.ncols() {
                    out[(r0 + i, c0 + j)] += piece[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// One filter rounded to `bits`-bit signed integers at a power-of-two
/// scale: `value ~ stored * 2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedFilter {
    pub stored: Vec<i64>,
    pub exponent: i32,
}

impl QuantizedFilter {
    pub fn dequantize(&self) -> Vec<f64> {
        let scale = 2f64.powi(self.exponent);
        self.stored.iter().map(|&v| v as f64 * scale).collect()
    }
}

/// A decomposition with every filter quantized, plus the Frobenius-norm
/// error the quantization introduced against the unquantized terms.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedDecomposition {
    pub bits: u32,
    pub rank: usize,
    pub kernel_rows: usize,
    pub kernel_cols: usize,
    pub terms: Vec<(QuantizedFilter, QuantizedFilter)>,
    /// `||reconstruct(original) - reconstruct(dequantized)||_F`.
    pub reconstruction_error: f64,
}

impl QuantizedDecomposition {
    /// The quantized terms as a real decomposition (truncation metadata
    /// does not survive quantization; `frob_error` here is the
    /// quantization error).
    pub fn dequantize(&self) -> SeparableDecomposition {
        SeparableDecomposition {
            rank: self.rank,
            kernel_rows: self.kernel_rows,
            kernel_cols: self.kernel_cols,
            terms: self
                .terms
                .iter()
                .map(|(c, r)| (c.dequantize(), r.dequantize()))
                .collect(),
            dropped_sigma: Vec::new(),
            frob_error: self.reconstruction_error,
        }
    }
}

/// Largest power-of-two scale at which the filter's peak magnitude still
/// rounds into `bits`-bit signed range; all-zero filters scale by 2^0.
fn quantize_vector(values: &[f64], bits: u32) -> QuantizedFilter {
    let limit = ((1i64 << (bits - 1)) - 1) as f64;
    let maxabs = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if maxabs == 0.0 {
        return QuantizedFilter { stored: vec![0; values.len()], exponent: 0 };
    }
    let mut k = (limit / maxabs).log2().floor() as i32;
    while (maxabs * 2f64.powi(k + 1)).round() <= limit {
        k += 1;
    }
    while (maxabs * 2f64.powi(k)).round() > limit {
        k -= 1;
    }
    let scale = 2f64.powi(k);
    QuantizedFilter {
        stored: values.iter().map(|&v| (v * scale).round() as i64).collect(),
        exponent: -k,
    }
}

/// Rounds every filter to `bits`-bit signed fixed point (2 <= bits <= 63)
/// at per-filter power-of-two scales, reporting the reconstruction error.
pub fn quantize_filters(dec: &SeparableDecomposition, bits: u32) -> QuantizedDecomposition {
    assert!((2..=63).contains(&bits), "quantization width must be in 2..=63");
    let terms: Vec<(QuantizedFilter, QuantizedFilter)> = dec
        .terms
        .iter()
        .map(|(c, r)| (quantize_vector(c, bits), quantize_vector(r, bits)))
        .collect();
    let mut quantized = QuantizedDecomposition {
        bits,
        rank: dec.rank,
        kernel_rows: dec.kernel_rows,
        kernel_cols: dec.kernel_cols,
        terms,
        reconstruction_error: 0.0,
    };
    let diff = dec.reconstruct() - quantized.dequantize().reconstruct();
    quantized.reconstruction_error = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    quantized
}
