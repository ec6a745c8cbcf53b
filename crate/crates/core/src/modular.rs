//! Modular index arithmetic and primality helpers.
//!
//! The transform works on `N x N` images with `N` prime; every row/column
//! access goes through the canonical residue `⟨a⟩_N ∈ [0, N)`. Rust's `%`
//! yields negative remainders for negative operands, so the transform layers
//! use [`mod_pos`] exclusively.

/// Canonical non-negative residue of `a` modulo `n`.
///
/// Always lands in `[0, n)`, including for negative `a`:
/// `mod_pos(-1, 127) == 126`. `n` must be positive.
#[inline(always)]
pub fn mod_pos(a: i64, n: i64) -> i64 {
    debug_assert!(n > 0, "modulus must be positive");
    let r = a % n;
    if r < 0 {
        r + n
    } else {
        r
    }
}

/// Deterministic primality test by trial division.
///
/// Intended for transform sizes (at most a few thousand), where trial
/// division is instant; it is nonetheless correct for any `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime `>= v`.
///
/// Primes are idempotent fixed points: `next_prime(127) == 127`. Values
/// below 2 map to 2.
pub fn next_prime(v: u64) -> u64 {
    let mut candidate = v.max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// `ceil(log2(n))` for `n >= 1`; the bit growth of an `n`-operand sum.
#[inline]
pub fn ceil_log2(n: u64) -> u32 {
    debug_assert!(n >= 1, "ceil_log2 is defined for n >= 1");
    u64::BITS - (n - 1).leading_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod_pos_examples() {
        assert_eq!(mod_pos(-1, 127), 126);
        assert_eq!(mod_pos(128, 127), 1);
        assert_eq!(mod_pos(0, 2), 0);
        assert_eq!(mod_pos(-254, 127), 0);
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(127), 127);
        assert_eq!(next_prime(128), 131);
        assert_eq!(next_prime(129), 131);
        assert_eq!(next_prime(2), 2);
        assert_eq!(next_prime(0), 2);
        assert_eq!(next_prime(24), 29);
        assert_eq!(next_prime(37), 37);
    }

    #[test]
    fn next_prime_fixes_primes_up_to_ten_thousand() {
        for p in 2..=10_000u64 {
            if is_prime(p) {
                assert_eq!(next_prime(p), p, "prime {p} must map to itself");
            }
        }
    }

    #[test]
    fn ceil_log2_examples() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(7), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(ceil_log2(127), 7);
        assert_eq!(ceil_log2(1021), 10);
    }

    proptest! {
        #[test]
        fn mod_pos_is_canonical(a in -1_000_000i64..1_000_000, n in 1i64..5000) {
            let r = mod_pos(a, n);
            prop_assert!((0..n).contains(&r));
            // r is congruent to a.
            prop_assert_eq!((a - r) % n, 0);
        }

        #[test]
        fn mod_pos_is_shift_invariant(a in -100_000i64..100_000, k in -50i64..50, n in 1i64..2000) {
            prop_assert_eq!(mod_pos(a + k * n, n), mod_pos(a, n));
        }
    }
}
