//! Resource counts for pipelined adder trees.
//!
//! Every architecture in the cost model reduces its sums through binary
//! adder trees. For a tree that adds `a` operands of `b` bits each, the
//! model counts, level by level (operand widths grow one bit per level):
//!
//! * the equivalent number of 1-bit full adders, and
//! * the flip-flops of the pipeline registers between levels, optionally
//!   including one rank of input buffers ahead of the first level.
//!
//! When an odd operand is left over at some level it is carried forward
//! unadded, which is why the counts are computed by the loop below rather
//! than a closed form. Both counts grow linearly in `a`.

use crate::modular::ceil_log2;

/// Adder-tree cost: equivalent 1-bit full adders and pipeline flip-flops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeResources {
    pub full_adders: u64,
    pub flipflops: u64,
}

/// Resources of a pipelined tree summing `operands` inputs of `bits` bits.
///
/// With `with_input_buffers`, one register per input operand is added ahead
/// of the tree (`operands * bits` extra flip-flops).
pub fn tree_resources(operands: u64, bits: u32, with_input_buffers: bool) -> TreeResources {
    debug_assert!(operands >= 1 && bits >= 1);
    let levels = ceil_log2(operands);
    let mut full_adders = 0u64;
    let mut flipflops = 0u64;
    let mut a = operands;
    for z in 1..=levels as u64 {
        let odd = a & 1;
        a /= 2;
        full_adders += a * (bits as u64 + z - 1);
        a += odd;
        flipflops += a * (bits as u64 + z);
    }
    if with_input_buffers {
        flipflops += operands * bits as u64;
    }
    TreeResources { full_adders, flipflops }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fa(operands: u64, bits: u32) -> u64 {
        tree_resources(operands, bits, false).full_adders
    }

    #[test]
    fn single_operand_needs_no_tree() {
        let t = tree_resources(1, 12, false);
        assert_eq!((t.full_adders, t.flipflops), (0, 0));
        // Buffered variant still registers the lone input.
        assert_eq!(tree_resources(1, 12, true).flipflops, 12);
    }

    #[test]
    fn two_operand_tree() {
        let t = tree_resources(2, 8, true);
        assert_eq!(t.full_adders, 8);
        assert_eq!(t.flipflops, 25);
        assert_eq!(tree_resources(2, 8, false).flipflops, 9);
    }

    #[test]
    fn frozen_counts_for_the_model_configurations() {
        // (operands, bits) -> (full adders, flip-flops, buffered flip-flops)
        let cases: &[(u64, u32, u64, u64, u64)] = &[
            (4, 8, 25, 28, 60),
            (4, 12, 37, 40, 88),
            (64, 12, 813, 876, 1644),
            (127, 8, 1128, 1263, 2279),
            (127, 12, 1632, 1771, 3295),
            (1024, 12, 13289, 14312, 26600),
            (4096, 12, 53223, 57318, 106470),
        ];
        for &(a, b, want_fa, want_ff, want_ffb) in cases {
            let bare = tree_resources(a, b, false);
            let buffered = tree_resources(a, b, true);
            assert_eq!(bare.full_adders, want_fa, "A_FA({a}, {b})");
            assert_eq!(bare.flipflops, want_ff, "A_ff({a}, {b})");
            assert_eq!(buffered.full_adders, want_fa, "buffering must not change adders");
            assert_eq!(buffered.flipflops, want_ffb, "A_ffb({a}, {b})");
        }
    }

    #[test]
    fn counts_grow_linearly_in_the_operand_count() {
        for operands in [64u64, 128, 256, 512] {
            let ratio = fa(2 * operands, 12) as f64 / fa(operands, 12) as f64;
            assert!(
                (1.9..=2.1).contains(&ratio),
                "A_FA({}, 12) / A_FA({operands}, 12) = {ratio}",
                2 * operands
            );
        }
    }

    #[test]
    fn buffered_count_dominates_bare_count() {
        for a in 1..200u64 {
            for b in [8u32, 12, 16] {
                let bare = tree_resources(a, b, false);
                let buffered = tree_resources(a, b, true);
                assert_eq!(buffered.flipflops, bare.flipflops + a * b as u64);
            }
        }
    }
}
