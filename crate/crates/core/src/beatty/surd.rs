//! Exact arithmetic on expressions `(a + b·√d)/c` with integer parts.
//!
//! Floors and sign decisions reduce to comparing `b·√d` against integers,
//! which is settled by squaring with sign tracking and an exact integer
//! square root. i128 fast paths fall back to big integers on overflow, so
//! no input silently wraps.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::numeric::isqrt_u128;

/// `⌊b·√d⌋` for i128 `b` (exact; `None` on potential overflow).
/// `d` must not be a perfect square when `b != 0`.
fn sqrt_term_floor_i128(b: i128, d: u128) -> Option<i128> {
    if b == 0 {
        return Some(0);
    }
    let sq = (b.unsigned_abs()).checked_mul(b.unsigned_abs())?.checked_mul(d)?;
    let r = isqrt_u128(sq);
    let r = i128::try_from(r).ok()?;
    // b√d is irrational, so the floor for negative b is -(⌊|b|√d⌋ + 1).
    Some(if b > 0 { r } else { -r - 1 })
}

fn sqrt_term_floor_big(b: &BigInt, d: u128) -> BigInt {
    if b.is_zero() {
        return BigInt::zero();
    }
    let sq = (b * b) * BigInt::from(d);
    let r = sq.sqrt();
    if b.is_positive() {
        r
    } else {
        -r - 1
    }
}

/// Exact `⌊(a + b·√d)/c⌋` for i128 parts; `None` on potential overflow.
pub(crate) fn surd_floor_i128(a: i128, b: i128, c: i128, d: u128) -> Option<i128> {
    debug_assert!(c != 0);
    let (a, b, c) = if c < 0 {
        (a.checked_neg()?, b.checked_neg()?, c.checked_neg()?)
    } else {
        (a, b, c)
    };
    let s = sqrt_term_floor_i128(b, d)?;
    let num = a.checked_add(s)?;
    Some(num.div_euclid(c))
}

/// Exact `⌊(a + b·√d)/c⌋` with big integers (always succeeds).
pub(crate) fn surd_floor_big(a: &BigInt, b: &BigInt, c: &BigInt, d: u128) -> BigInt {
    debug_assert!(!c.is_zero());
    let (a, b, c) = if c.is_negative() {
        (-a, -b, -c)
    } else {
        (a.clone(), b.clone(), c.clone())
    };
    let num = a + sqrt_term_floor_big(&b, d);
    let (q, r) = num.div_rem(&c);
    if r.is_negative() {
        q - 1
    } else {
        q
    }
}

/// Exact `⌊(a + b·√d)/c⌋`, i128 fast path with big-integer fallback.
/// Panics if the result does not fit i128 (callers operate at desk scale).
pub(crate) fn surd_floor(a: i128, b: i128, c: i128, d: u128) -> i128 {
    surd_floor_i128(a, b, c, d).unwrap_or_else(|| {
        surd_floor_big(&BigInt::from(a), &BigInt::from(b), &BigInt::from(c), d)
            .to_i128()
            .expect("surd floor exceeds i128")
    })
}

/// Exact comparison of `x·√d` against `y`.
pub(crate) fn cmp_sqrt_term(x: i128, y: i128, d: u128) -> Ordering {
    match (x.signum(), y.signum()) {
        (0, _) => 0.cmp(&y),
        (1, s) if s <= 0 => Ordering::Greater,
        (-1, s) if s >= 0 => Ordering::Less,
        (sx, _) => {
            // both strictly same sign: compare squares, flipping for negatives
            let lhs = x
                .unsigned_abs()
                .checked_mul(x.unsigned_abs())
                .and_then(|s| s.checked_mul(d));
            let rhs = y.unsigned_abs().checked_mul(y.unsigned_abs());
            let ord = match (lhs, rhs) {
                (Some(l), Some(r)) => l.cmp(&r),
                _ => {
                    let l = BigInt::from(x) * BigInt::from(x) * BigInt::from(d);
                    let r = BigInt::from(y) * BigInt::from(y);
                    l.cmp(&r)
                }
            };
            if sx > 0 {
                ord
            } else {
                ord.reverse()
            }
        }
    }
}

/// Exact sign of `a + b·√d`.
pub(crate) fn surd_num_sign(a: i128, b: i128, d: u128) -> Ordering {
    // a + b√d >< 0  <=>  b√d >< -a
    cmp_sqrt_term(b, a.checked_neg().expect("sign overflow"), d)
}

/// Exact `⌊(a + b·√d)/c · 2^bits⌋` as a big integer.
pub(crate) fn surd_fixed_point(a: i128, b: i128, c: i128, d: u128, bits: u32) -> BigInt {
    let sa = BigInt::from(a) << bits;
    let sb = BigInt::from(b) << bits;
    surd_floor_big(&sa, &sb, &BigInt::from(c), d)
}

pub(crate) fn is_perfect_square(d: u64) -> bool {
    let r = isqrt_u128(d as u128) as u64;
    r * r == d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_matches_f64_small() {
        // (a + b√d)/c over a small grid, cross-checked against careful f64
        for d in [2u128, 3, 5, 7, 10] {
            let fd = (d as f64).sqrt();
            for a in -20i128..=20 {
                for b in -8i128..=8 {
                    if b == 0 {
                        continue;
                    }
                    for c in [1i128, 2, 3, -2] {
                        let v = (a as f64 + b as f64 * fd) / c as f64;
                        // stay away from integers so f64 is trustworthy
                        if (v - v.round()).abs() < 1e-9 {
                            continue;
                        }
                        assert_eq!(
                            surd_floor(a, b, c, d),
                            v.floor() as i128,
                            "({a}+{b}sqrt{d})/{c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn floor_rational_case() {
        assert_eq!(surd_floor(7, 0, 2, 2), 3);
        assert_eq!(surd_floor(-7, 0, 2, 2), -4);
        assert_eq!(surd_floor(8, 0, 2, 2), 4);
    }

    #[test]
    fn negative_b_floor() {
        // (10 - sqrt2)/1 = 8.5857...
        assert_eq!(surd_floor(10, -1, 1, 2), 8);
        // -sqrt2 = -1.414... -> -2
        assert_eq!(surd_floor(0, -1, 1, 2), -2);
    }

    #[test]
    fn big_fallback_agrees() {
        let (a, b, c, d) = (123_456_789_012_345_678i128, 987_654_321_012i128, 97i128, 2u128);
        let big = surd_floor_big(&BigInt::from(a), &BigInt::from(b), &BigInt::from(c), d);
        assert_eq!(BigInt::from(surd_floor(a, b, c, d)), big);
    }

    #[test]
    fn sign_and_cmp() {
        assert_eq!(surd_num_sign(-1, 1, 2), Ordering::Greater); // sqrt2 - 1 > 0
        assert_eq!(surd_num_sign(-2, 1, 2), Ordering::Less); // sqrt2 - 2 < 0
        assert_eq!(surd_num_sign(0, 0, 2), Ordering::Equal);
        assert_eq!(cmp_sqrt_term(1, 1, 2), Ordering::Greater); // sqrt2 > 1
        assert_eq!(cmp_sqrt_term(-3, -4, 2), Ordering::Less); // -3sqrt2 < -4
        assert_eq!(cmp_sqrt_term(-3, -5, 2), Ordering::Greater); // -4.24 > -5
    }

    #[test]
    fn fixed_point_sqrt2() {
        // sqrt2 * 2^32
        let fp = surd_fixed_point(0, 1, 1, 2, 32);
        let v = fp.to_f64().unwrap() / (1u64 << 32) as f64;
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-9);
    }
}
