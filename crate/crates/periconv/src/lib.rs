//! File formats, low-rank separable filtering, and self-checks around the
//! exact convolution core, plus the request type the CLI drives.

pub mod lowrank;
pub mod pgm;
pub mod textio;
pub mod validate;

use periconv_core::{
    convolve, linconv2d, overlap_add, BitBudget, ImageBlock, Kernel, Mode,
};

/// Everything that can go wrong in the IO and orchestration layers.
#[derive(Debug)]
pub enum AppError {
    /// Domain error from the exact pipeline.
    Core(periconv_core::Error),
    Io { path: String, err: std::io::Error },
    Parse { context: String, msg: String },
    /// Caller asked for something contradictory (maps to a usage exit).
    Usage(String),
    Rank { rank: usize, max: usize },
    Factorization(String),
    /// A self-check suite failed.
    Validation(String),
}

impl AppError {
    /// Process exit code: 2 usage, 3 data, 4 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Validation(_) => 4,
            _ => 3,
        }
    }
}

impl core::fmt::Display for AppError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io { path, err } => write!(f, "{path}: {err}"),
            AppError::Parse { context, msg } => write!(f, "{context}: {msg}"),
            AppError::Usage(msg) => write!(f, "{msg}"),
            AppError::Rank { rank, max } => {
                write!(f, "rank {rank} out of range (kernel supports at most {max})")
            }
            AppError::Factorization(msg) => write!(f, "factorization failed: {msg}"),
            AppError::Validation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<periconv_core::Error> for AppError {
    fn from(e: periconv_core::Error) -> Self {
        AppError::Core(e)
    }
}

pub type AppResult<T> = Result<T, AppError>;

/// How a convolution request is to be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Exact transform pipeline.
    Dprt,
    /// Exact spatial-domain oracle.
    Direct,
    /// Floating-point separable approximation of the given rank
    /// (`None` = the kernel's numerical rank).
    LowRank { rank: Option<usize> },
}

/// Kernel payload: exact integers when the source file held integers,
/// real otherwise (real kernels are only usable by the low-rank backend).
#[derive(Debug, Clone)]
pub enum KernelData {
    Exact(Kernel),
    Real { rows: usize, cols: usize, data: Vec<f64> },
}

impl KernelData {
    pub fn rows(&self) -> usize {
        match self {
            KernelData::Exact(k) => k.rows(),
            KernelData::Real { rows, .. } => *rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            KernelData::Exact(k) => k.cols(),
            KernelData::Real { cols, .. } => *cols,
        }
    }

    fn to_real(&self) -> (usize, usize, Vec<f64>) {
        match self {
            KernelData::Exact(k) => {
                (k.rows(), k.cols(), k.as_slice().iter().map(|&v| v as f64).collect())
            }
            KernelData::Real { rows, cols, data } => (*rows, *cols, data.clone()),
        }
    }
}

/// One fully-specified convolution job.
#[derive(Debug, Clone)]
pub struct ConvRequest {
    pub image: ImageBlock,
    pub kernel: KernelData,
    pub mode: Mode,
    pub backend: Backend,
    /// Overlap-add block size; `None` = single-shot (exact backends) or
    /// whole-image separable pass (low-rank).
    pub block: Option<usize>,
}

/// What a convolution job produced, with the context a caller needs to
/// report: transform size and bit budget for the exact path, the
/// decomposition summary for the approximate one.
#[derive(Debug, Clone)]
pub enum ConvResult {
    Exact {
        result: ImageBlock,
        /// Transform size of the (per-block) pipeline.
        n: usize,
        budget: BitBudget,
    },
    Approximate {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
        rank: usize,
        frob_error: f64,
        dropped_sigma: Vec<f64>,
    },
}

impl ConvRequest {
    /// Runs the request on the chosen backend.
    pub fn run(&self) -> AppResult<ConvResult> {
        let g = &self.image;
        match self.backend {
            Backend::Dprt | Backend::Direct => {
                let kernel = match &self.kernel {
                    KernelData::Exact(k) => k,
                    KernelData::Real { .. } => {
                        return Err(AppError::Usage(String::from(
                            "kernel has non-integer entries; the exact backends need integers (use the rank backend)",
                        )))
                    }
                };
                let exact = match self.backend {
                    Backend::Dprt => periconv_core::ExactBackend::Dprt,
                    _ => periconv_core::ExactBackend::Direct,
                };
                let (result, n) = match self.block {
                    None => {
                        // Single shot when the padded prime fits, otherwise
                        // fall back to kernel-sized blocks.
                        match exact {
                            periconv_core::ExactBackend::Dprt => match linconv2d(g, kernel, self.mode) {
                                Ok(out) => (out.result, out.n),
                                Err(periconv_core::Error::SizeUnsupported { .. }) => {
                                    let out = overlap_add(g, kernel, self.mode, exact, None)?;
                                    (out, block_transform_size(kernel, None))
                                }
                                Err(e) => return Err(e.into()),
                            },
                            periconv_core::ExactBackend::Direct => (
                                convolve(g, kernel, self.mode, exact)?,
                                periconv_core::required_transform_size(
                                    g.rows(),
                                    g.cols(),
                                    kernel.rows(),
                                    kernel.cols(),
                                ),
                            ),
                        }
                    }
                    Some(bp) => (
                        overlap_add(g, kernel, self.mode, exact, Some(bp))?,
                        block_transform_size(kernel, Some(bp)),
                    ),
                };
                let budget = BitBudget::new(g.bits(), kernel.bits(), n, 0);
                Ok(ConvResult::Exact { result, n, budget })
            }
            Backend::LowRank { rank } => {
                let (q1, q2, kdata) = self.kernel.to_real();
                let h = nalgebra::DMatrix::from_row_slice(q1, q2, &kdata);
                let want = match rank {
                    Some(0) => return Err(AppError::Rank { rank: 0, max: q1.min(q2) }),
                    Some(r) if r > q1.min(q2) => {
                        return Err(AppError::Rank { rank: r, max: q1.min(q2) })
                    }
                    Some(r) => r,
                    None => lowrank::numeric_rank(&h).max(1),
                };
                let dec = lowrank::separate(&h, want, lowrank::SeparationMethod::LuOfTruncatedSvd)?;
                let img: Vec<f64> = g.as_slice().iter().map(|&v| v as f64).collect();
                let gm = nalgebra::DMatrix::from_row_slice(g.rows(), g.cols(), &img);
                let out = match self.block {
                    None => lowrank::rankconv2d(&gm, &dec, self.mode),
                    Some(bp) => lowrank::rankconv2d_blocked(&gm, &dec, self.mode, bp)?,
                };
                let (rows, cols) = (out.nrows(), out.ncols());
                let data: Vec<f64> =
                    (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| out[(r, c)]).collect();
                Ok(ConvResult::Approximate {
                    rows,
                    cols,
                    data,
                    rank: dec.rank,
                    frob_error: dec.frob_error,
                    dropped_sigma: dec.dropped_sigma.clone(),
                })
            }
        }
    }
}

/// Transform size used per block by the overlap-add pipeline.
fn block_transform_size(kernel: &Kernel, block: Option<usize>) -> usize {
    let bp = block.unwrap_or_else(|| kernel.rows().max(kernel.cols()));
    periconv_core::required_transform_size(bp, bp, kernel.rows(), kernel.cols())
}

/// Minimal unsigned width covering every value, at least 1 bit.
pub fn unsigned_bits_for(values: &[i128]) -> u32 {
    let max = values.iter().copied().max().unwrap_or(0).max(0) as u128;
    (128 - max.leading_zeros()).max(1)
}

/// Minimal signed width covering every value (sign bit included).
pub fn signed_bits_for(values: &[i128]) -> u32 {
    let mut bits = 1u32;
    for &v in values {
        let need = if v >= 0 {
            128 - (v as u128).leading_zeros() + 1
        } else {
            // -2^(c-1) <= v  =>  c >= bits of (-v - 1) + 1, with -2^k
            // itself fitting in k + 1 bits.
            128 - (((-(v + 1)) as u128).leading_zeros()) + 1
        };
        bits = bits.max(need);
    }
    bits
}
