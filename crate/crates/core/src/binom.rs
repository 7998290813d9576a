//! Exact integer helpers for the closed-form counts.
//!
//! Everything is evaluated in `u128` with checked arithmetic. The values the
//! toolkit cares about stay far below the `u128` range for every parameter
//! triple that fits in a bit vector, so an overflow is treated as a bug and
//! panics rather than silently wrapping.

/// Binomial coefficient `C(n, k)` over the integers.
///
/// Negative or out-of-range arguments give `0`, which is the convention the
/// counting formulas rely on (for example `C(n - r - 1, r - j - 1)` when the
/// upper index goes negative).
pub fn binom(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point.
        acc = acc.checked_mul(n - i).expect("binomial overflow") / (i + 1);
    }
    acc
}

/// `base^exp` with overflow checking. `0^0 = 1`.
pub fn pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).expect("power overflow")
}

/// `base^exp` for a possibly negative exponent: negative exponents give `0`.
///
/// Used where a term such as `(k-1)^(r-ℓ)` only exists when `r ≥ ℓ`.
pub fn pow_signed(base: u128, exp: i64) -> u128 {
    if exp < 0 {
        0
    } else {
        pow(base, exp as u32)
    }
}

pub(crate) fn mul(a: u128, b: u128) -> u128 {
    a.checked_mul(b).expect("product overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize) -> Vec<Vec<u128>> {
        let mut rows = vec![vec![1u128]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1u128; i + 1];
            for j in 1..i {
                row[j] = prev[j - 1] + prev[j];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn matches_pascal_triangle() {
        let rows = pascal(60);
        for n in 0..=60i64 {
            for k in -2..=62i64 {
                let want = if k < 0 || k > n { 0 } else { rows[n as usize][k as usize] };
                assert_eq!(binom(n, k), want, "C({n},{k})");
            }
        }
    }

    #[test]
    fn negative_upper_index_is_zero() {
        assert_eq!(binom(-1, 0), 0);
        assert_eq!(binom(-3, 2), 0);
    }

    #[test]
    fn signed_powers() {
        assert_eq!(pow_signed(3, -1), 0);
        assert_eq!(pow_signed(0, 0), 1);
        assert_eq!(pow_signed(2, 10), 1024);
    }
}
