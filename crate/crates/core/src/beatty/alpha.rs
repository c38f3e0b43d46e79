//! Representations of the irrational slope α: exact quadratic surds and
//! adaptive-precision constants (e, π).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::beatty::surd::{is_perfect_square, surd_fixed_point, surd_num_sign};
use crate::error::{Error, Result};

/// Precision-escalation schedule shared by all adaptive evaluations:
/// start at 64 fractional bits, double until the decision is certain,
/// give up at 4096 bits with a precision error.
pub const PRECISION_START_BITS: u32 = 64;
pub const PRECISION_MAX_BITS: u32 = 4096;

/// Exact quadratic irrational `(a + b·√d)/c`, normalized so that
/// `c > 0` and `gcd(|a|, |b|, c) = 1`. Requires `b != 0`, `d >= 2`
/// non-square, and value > 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: i64,
    b: i64,
    c: i64,
    d: u64,
}

impl QuadSurd {
    pub fn new(a: i64, b: i64, c: i64, d: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::usage("quadratic surd: denominator must be nonzero"));
        }
        if b == 0 {
            return Err(Error::usage("quadratic surd: rational value (b = 0) is not irrational"));
        }
        if d < 2 || is_perfect_square(d) {
            return Err(Error::usage(format!(
                "quadratic surd: d = {d} must be a non-square integer >= 2"
            )));
        }
        let (mut a, mut b, mut c) = if c < 0 { (-a, -b, -c) } else { (a, b, c) };
        let g = a.unsigned_abs().gcd(&b.unsigned_abs()).gcd(&c.unsigned_abs()) as i64;
        if g > 1 {
            a /= g;
            b /= g;
            c /= g;
        }
        let s = QuadSurd { a, b, c, d };
        // value > 1 <=> a + b√d - c > 0
        if surd_num_sign((a - c) as i128, b as i128, d as u128) != std::cmp::Ordering::Greater {
            return Err(Error::usage(format!(
                "alpha must exceed 1 (got ({a} + {b}*sqrt({d}))/{c})"
            )));
        }
        Ok(s)
    }

    pub fn sqrt(d: u64) -> Result<Self> {
        Self::new(0, 1, 1, d)
    }

    pub fn parts(&self) -> (i64, i64, i64, u64) {
        (self.a, self.b, self.c, self.d)
    }

    /// Exact `⌊value · 2^bits⌋`.
    pub fn fixed_point(&self, bits: u32) -> BigInt {
        surd_fixed_point(self.a as i128, self.b as i128, self.c as i128, self.d as u128, bits)
    }

    pub fn to_f64(&self) -> f64 {
        let fp = self.fixed_point(64);
        fp.to_f64().unwrap() / 2f64.powi(64)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == 0 && self.b == 1 && self.c == 1 {
            write!(f, "sqrt:{}", self.d)
        } else {
            write!(f, "quad:{},{},{},{}", self.a, self.b, self.c, self.d)
        }
    }
}

/// Adaptive-precision irrational: a procedure yielding `m` with
/// `value ∈ [(m-1)/2^bits, (m+2)/2^bits]` for any requested `bits`.
#[derive(Clone)]
pub struct AdaptiveAlpha {
    name: String,
    approx: Arc<dyn Fn(u32) -> BigInt + Send + Sync>,
}

impl fmt::Debug for AdaptiveAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdaptiveAlpha").field("name", &self.name).finish()
    }
}

impl AdaptiveAlpha {
    pub fn new(
        name: impl Into<String>,
        approx: impl Fn(u32) -> BigInt + Send + Sync + 'static,
    ) -> Self {
        AdaptiveAlpha { name: name.into(), approx: Arc::new(approx) }
    }

    pub fn e() -> Self {
        Self::new("e", e_fixed)
    }

    pub fn pi() -> Self {
        Self::new("pi", pi_fixed)
    }

    /// Adaptive view of an exact surd (used to cross-check the two forms).
    pub fn from_surd(s: &QuadSurd) -> Self {
        let s = *s;
        Self::new(format!("{s}"), move |bits| s.fixed_point(bits))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Certified enclosure of the value at `bits` fractional bits.
    pub fn bounds(&self, bits: u32) -> (BigRational, BigRational) {
        let m = (self.approx)(bits);
        let den = BigInt::one() << bits;
        (
            BigRational::new(&m - 1, den.clone()),
            BigRational::new(&m + 2, den),
        )
    }
}

/// `⌊e · 2^bits⌋` within one unit, by the factorial series.
fn e_fixed(bits: u32) -> BigInt {
    let wb = bits + 16;
    let mut term = BigInt::one() << wb;
    let mut sum = term.clone();
    let mut k = 1u32;
    while !term.is_zero() {
        term /= k;
        sum += &term;
        k += 1;
    }
    sum >> 16
}

/// `⌊π · 2^bits⌋` within one unit, by Machin's formula
/// `π = 16·atan(1/5) - 4·atan(1/239)`.
fn pi_fixed(bits: u32) -> BigInt {
    let wb = bits + 24;
    let v = atan_inv_fixed(5, wb) * 16 - atan_inv_fixed(239, wb) * 4;
    v >> 24
}

fn atan_inv_fixed(m: u64, wb: u32) -> BigInt {
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mut term = (BigInt::one() << wb) / m;
    let mut sum = term.clone();
    let mut k = 1u64;
    loop {
        term /= &m2;
        if term.is_zero() {
            break;
        }
        let t = &term / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

/// The slope α of a Beatty sequence: an exact quadratic surd or an
/// adaptive-precision irrational. Always > 1 and irrational.
#[derive(Debug, Clone)]
pub enum AlphaValue {
    Exact(QuadSurd),
    Adaptive(AdaptiveAlpha),
}

impl AlphaValue {
    pub fn sqrt(d: u64) -> Result<Self> {
        Ok(AlphaValue::Exact(QuadSurd::sqrt(d)?))
    }

    pub fn quad(a: i64, b: i64, c: i64, d: u64) -> Result<Self> {
        Ok(AlphaValue::Exact(QuadSurd::new(a, b, c, d)?))
    }

    /// Parse the CLI grammar: `sqrt:D`, `quad:a,b,c,d`, `e`, `pi`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(AlphaValue::Adaptive(AdaptiveAlpha::e()));
        }
        if s == "pi" {
            return Ok(AlphaValue::Adaptive(AdaptiveAlpha::pi()));
        }
        if let Some(d) = s.strip_prefix("sqrt:") {
            let d: u64 = d
                .parse()
                .map_err(|_| Error::usage(format!("bad sqrt spec {s:?}")))?;
            return Self::sqrt(d);
        }
        if let Some(rest) = s.strip_prefix("quad:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::usage(format!("quad spec {s:?} needs a,b,c,d")));
            }
            let a = parts[0].trim().parse().map_err(|_| Error::usage(format!("bad quad spec {s:?}")))?;
            let b = parts[1].trim().parse().map_err(|_| Error::usage(format!("bad quad spec {s:?}")))?;
            let c = parts[2].trim().parse().map_err(|_| Error::usage(format!("bad quad spec {s:?}")))?;
            let d = parts[3].trim().parse().map_err(|_| Error::usage(format!("bad quad spec {s:?}")))?;
            return Self::quad(a, b, c, d);
        }
        Err(Error::usage(format!(
            "unrecognized alpha spec {s:?} (expected sqrt:D, quad:a,b,c,d, e, or pi)"
        )))
    }

    /// Canonical spec string (round-trips through `parse`).
    pub fn spec_string(&self) -> String {
        match self {
            AlphaValue::Exact(q) => q.to_string(),
            AlphaValue::Adaptive(a) => a.name().to_string(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AlphaValue::Exact(q) => q.to_f64(),
            AlphaValue::Adaptive(a) => {
                let (lo, hi) = a.bounds(72);
                let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
                crate::numeric::big_ratio_to_f64(mid.numer(), mid.denom())
            }
        }
    }

    /// `⌊α · 2^bits⌋`, exact for surds and within two units for adaptive forms.
    pub fn fixed_point(&self, bits: u32) -> BigInt {
        match self {
            AlphaValue::Exact(q) => q.fixed_point(bits),
            AlphaValue::Adaptive(a) => {
                let (lo, _) = a.bounds(bits + 8);
                (lo.numer() << bits) / lo.denom()
            }
        }
    }
}

impl fmt::Display for AlphaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec_string())
    }
}
