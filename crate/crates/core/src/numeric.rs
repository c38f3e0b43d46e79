//! Low-level integer helpers: exact square roots, floor division, modular
//! arithmetic and prime sieves used across the crate.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact `⌊sqrt(v)⌋` for `u128`.
pub fn isqrt_u128(v: u128) -> u128 {
    if v == 0 {
        return 0;
    }
    let mut x = (v as f64).sqrt() as u128;
    if x == 0 {
        x = 1;
    }
    // A couple of Newton steps pull the f64 estimate within a few units,
    // the fixup loops make it exact.
    for _ in 0..4 {
        let y = (x + v / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x.checked_mul(x).is_none_or(|s| s > v) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= v) {
        x += 1;
    }
    x
}

/// Exact `⌊sqrt(v)⌋` for `u64`.
pub fn isqrt_u64(v: u64) -> u64 {
    isqrt_u128(v as u128) as u64
}

/// `(a * b) mod m` without overflow.
#[inline]
pub fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by binary exponentiation.
pub fn modpow64(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod64(acc, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    acc
}

/// All primes `<= limit`, by a bit-packed sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let words = n / 64 + 1;
    // bit i set <=> i composite
    let mut composite = vec![0u64; words];
    let mut p = 2usize;
    while p * p <= n {
        if composite[p / 64] >> (p % 64) & 1 == 0 {
            let mut m = p * p;
            while m <= n {
                composite[m / 64] |= 1 << (m % 64);
                m += p;
            }
        }
        p += 1;
    }
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            out.push(i as u64);
        }
    }
    out
}

/// `⌊r · 2^bits⌋` for a positive big rational given as `num/den`.
pub fn scaled_floor(num: &BigInt, den: &BigInt, bits: u32) -> BigInt {
    let mut n = num.clone() << bits;
    let mut d = den.clone();
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    // floor division toward -inf
    let (q, r) = num_integer::Integer::div_rem(&n, &d);
    if r.is_negative() {
        q - 1
    } else {
        q
    }
}

/// Convert a big rational `num/den` to `f64` through a 128-bit scaled
/// intermediate, avoiding overflow of the separate parts.
pub fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let scaled = scaled_floor(num, den, 128);
    scaled.to_f64().unwrap_or(f64::NAN) * (0.5f64).powi(128)
}
