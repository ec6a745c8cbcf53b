//! Worst-case bit-width budget for the exact transform pipeline.
//!
//! Let `B` be the unsigned image width, `C` the signed kernel width, and
//! `n = ceil(log2 N)` for transform size `N`. Summing `N` terms grows a
//! width by at most `n` bits, which gives the stage budget:
//!
//! * transform of the image: `B + n`,
//! * transform of the kernel: `C + n`,
//! * transform-domain convolution (one extra factor of `N` from the dot
//!   product of two transform rows): `B + C + 3n`,
//! * pre-normalization inverse accumulation (one more `N`-term sum):
//!   `B + C + 4n`.
//!
//! The budget is what justifies the fixed `i128` accumulator: at the largest
//! supported size (`N = 1021`, `n = 10`) even 16-bit images against 16-bit
//! kernels stay below 73 bits.

use crate::modular::ceil_log2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BitBudget {
    /// Unsigned image width `B`.
    pub image_bits: u32,
    /// Signed kernel width `C` (sign bit included).
    pub kernel_bits: u32,
    /// `n = ceil(log2 N)` for the transform size the budget was drawn for.
    pub n_log2: u32,
    /// Width of image-transform entries: `B + n`.
    pub dprt_image_bits: u32,
    /// Width of kernel-transform entries: `C + n`.
    pub dprt_kernel_bits: u32,
    /// Width of transform-domain convolution values: `B + C + 3n`.
    pub conv_bits: u32,
    /// Width of the pre-normalization inverse accumulator: `B + C + 4n`.
    pub prenorm_bits: u32,
    /// Extra fraction bits `x` kept after dividing by `N` (0 = integer
    /// output).
    pub out_fraction_bits: u32,
}

impl BitBudget {
    /// Budget for a `B`-bit image against a `C`-bit kernel at transform
    /// size `n` (prime), keeping `x` fraction bits after normalization.
    pub fn new(image_bits: u32, kernel_bits: u32, n: usize, out_fraction_bits: u32) -> BitBudget {
        debug_assert!(image_bits >= 1 && kernel_bits >= 1 && n >= 2);
        let n_log2 = ceil_log2(n as u64);
        BitBudget {
            image_bits,
            kernel_bits,
            n_log2,
            dprt_image_bits: image_bits + n_log2,
            dprt_kernel_bits: kernel_bits + n_log2,
            conv_bits: image_bits + kernel_bits + 3 * n_log2,
            prenorm_bits: image_bits + kernel_bits + 4 * n_log2,
            out_fraction_bits,
        }
    }

    /// Width of the stored result after dividing by `N` and keeping `x`
    /// fraction bits: `B + C + n + x`.
    pub fn result_bits(&self) -> u32 {
        self.image_bits + self.kernel_bits + self.n_log2 + self.out_fraction_bits
    }
}
