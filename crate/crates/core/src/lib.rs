//! Exact 2D convolution and cross-correlation over the discrete periodic
//! Radon transform (DPRT), together with a cycle/resource cost model for the
//! hardware architectures that compute them.
//!
//! The library is organized around three layers:
//!
//! * integer matrices with declared bit widths ([`ImageBlock`], [`Kernel`])
//!   and the modular index helpers they rely on ([`modular`]),
//! * the transform itself ([`dprt`]) and the convolution pipelines built on
//!   top of it ([`conv`]), all in exact integer arithmetic — results are
//!   bit-identical to the direct spatial definitions, never approximate,
//! * a performance/resource model ([`cost`]) that estimates cycle counts,
//!   flip-flops, one-bit adder cells, multipliers and memory for several
//!   convolution architectures, with Pareto-front enumeration over their
//!   scalability parameters.
//!
//! Everything here is `no_std`-compatible (with `alloc`); file formats, the
//! CLI, and the floating-point low-rank path live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bits;
pub mod block;
pub mod conv;
pub mod cost;
pub mod dprt;
pub mod error;
pub mod modular;

pub use bits::BitBudget;
pub use block::{ImageBlock, Kernel};
pub use conv::{
    circconv2d, circconv2d_direct, convolve, linconv2d, linconv2d_direct, overlap_add,
    required_transform_size, ConvOutput, ExactBackend, Mode, PreparedKernel,
};
pub use cost::{ArchConfig, CostReport, Method, ResourceAxis};
pub use dprt::DprtArray;
pub use error::{Error, Result};
