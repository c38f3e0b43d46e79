//! Exact Beatty-sequence membership and enumeration, and diophantine
//! utilities: continued fractions, distance to the nearest integer, and
//! empirical type estimation.
//!
//! For exact quadratic slopes every floor and sign decision reduces to
//! integer arithmetic (see [`surd`]); membership is bit-exact. Adaptive
//! slopes (e, π) evaluate at escalating precision and fail with a
//! precision error if a decision is still ambiguous at the cap.

pub mod alpha;
pub mod cf;
mod surd;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

pub use alpha::{AdaptiveAlpha, AlphaValue, QuadSurd, PRECISION_MAX_BITS, PRECISION_START_BITS};
pub use cf::{continued_fraction, estimate_type, ContinuedFraction, TypeEstimate};

use crate::error::{Error, Result};
use crate::numeric::big_ratio_to_f64;
use surd::{surd_fixed_point, surd_floor, surd_num_sign};

/// Exact `⌊(a + b√d)/c · 2^bits⌋` for other modules' fixed-point needs.
pub(crate) fn surd_fixed_big(a: i128, b: i128, c: i128, d: u128, bits: u32) -> BigInt {
    surd_fixed_point(a, b, c, d, bits)
}

/// The pair (α, β) defining the non-homogeneous Beatty sequence ⌊αn + β⌋.
/// β is an exact 64-bit rational.
#[derive(Debug, Clone)]
pub struct BeattyParams {
    alpha: AlphaValue,
    beta: Rational64,
}

/// Parse β as `num/den` or as a decimal literal, converted to an exact rational.
pub fn parse_beta(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::usage(format!("bad beta {s:?} (expected num/den or decimal)"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::usage("beta denominator must be nonzero"));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || frac_part.len() > 17 {
            return Err(bad());
        }
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || int_digits.is_empty()
        {
            return Err(bad());
        }
        let whole: i64 = int_digits.parse().map_err(|_| bad())?;
        let frac: i64 = frac_part.parse().map_err(|_| bad())?;
        let den = 10i64.pow(frac_part.len() as u32);
        let num = whole
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        let num = if neg { -num } else { num };
        return Ok(Rational64::new(num, den));
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational64::from_integer(n))
}

/// Run `decide` at escalating precision until it returns a value.
fn escalate<T>(what: &str, mut decide: impl FnMut(u32) -> Option<T>) -> Result<T> {
    let mut bits = PRECISION_START_BITS;
    loop {
        if let Some(v) = decide(bits) {
            return Ok(v);
        }
        if bits >= PRECISION_MAX_BITS {
            return Err(Error::precision(format!(
                "{what}: still ambiguous at {bits} fractional bits"
            )));
        }
        bits *= 2;
    }
}

fn big_rational(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `⌊t/α⌋` for a rational `t`.
pub fn floor_div_alpha(t: Rational64, alpha: &AlphaValue) -> Result<i64> {
    let v = floor_div_alpha_parts(*t.numer() as i128, *t.denom() as i128, alpha)?;
    Ok(v as i64)
}

fn floor_div_alpha_parts(tn: i128, td: i128, alpha: &AlphaValue) -> Result<i128> {
    if tn == 0 {
        return Ok(0);
    }
    match alpha {
        AlphaValue::Exact(q) => {
            let (a, b, c, d) = q.parts();
            let (a, b, c, d) = (a as i128, b as i128, c as i128, d as u128);
            // t/α = t·c·(a - b√d) / (td·(a² - b²d))
            let k = a * a - b * b * d as i128;
            Ok(surd_floor(tn * c * a, -tn * c * b, td * k, d))
        }
        AlphaValue::Adaptive(ad) => {
            let t = big_rational(tn, td);
            escalate("floor(t/alpha)", |bits| {
                let (lo, hi) = ad.bounds(bits);
                let (v1, v2) = (&t / hi, &t / lo);
                let (f1, f2) = (v1.floor(), v2.floor());
                (f1 == f2).then(|| f1.to_integer().to_i128().expect("floor fits i128"))
            })
        }
    }
}

impl BeattyParams {
    pub fn new(alpha: AlphaValue, beta: Rational64) -> Self {
        BeattyParams { alpha, beta }
    }

    pub fn alpha(&self) -> &AlphaValue {
        &self.alpha
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    /// Exact `⌊α·r + β⌋` for `r >= 1`.
    pub fn nth_term(&self, r: u64) -> Result<i64> {
        let (bn, bd) = (*self.beta.numer() as i128, *self.beta.denom() as i128);
        let r = r as i128;
        match &self.alpha {
            AlphaValue::Exact(q) => {
                let (a, b, c, d) = q.parts();
                let (a, b, c) = (a as i128, b as i128, c as i128);
                let v = surd_floor(a * r * bd + c * bn, b * r * bd, c * bd, d as u128);
                Ok(v as i64)
            }
            AlphaValue::Adaptive(ad) => {
                let beta = big_rational(bn, bd);
                let v = escalate("nth_term", |bits| {
                    let (lo, hi) = ad.bounds(bits);
                    let f1 = (lo * BigInt::from(r) + &beta).floor();
                    let f2 = (hi * BigInt::from(r) + &beta).floor();
                    (f1 == f2).then(|| f1.to_integer().to_i64().expect("term fits i64"))
                })?;
                Ok(v)
            }
        }
    }

    /// Exact guard `n > α + β - 1` (terms with r >= 1 all satisfy it).
    fn above_first_term_bound(&self, n: u64) -> Result<bool> {
        let (bn, bd) = (*self.beta.numer() as i128, *self.beta.denom() as i128);
        let n = n as i128;
        match &self.alpha {
            AlphaValue::Exact(q) => {
                let (a, b, c, d) = q.parts();
                let (a, b, c) = (a as i128, b as i128, c as i128);
                // α + β - 1 - n < 0  <=>  a·bd + c·(bn - bd·(1 + n)) + b·bd·√d < 0
                let lin = a * bd + c * (bn - bd * (1 + n));
                Ok(surd_num_sign(lin, b * bd, d as u128) == std::cmp::Ordering::Less)
            }
            AlphaValue::Adaptive(ad) => {
                let bound = big_rational(bn - bd * (1 + n), bd); // β - 1 - n
                escalate("membership guard", |bits| {
                    let (lo, hi) = ad.bounds(bits);
                    // decide sign of α + (β - 1 - n)
                    if (hi + &bound).is_negative() {
                        Some(true)
                    } else if !(lo + &bound).is_negative() {
                        Some(false)
                    } else {
                        None
                    }
                })
            }
        }
    }

    /// Exact membership: `n ∈ B_{α,β}` iff `n > α + β - 1` and
    /// `⌊(n+1-β)/α⌋ - ⌊(n-β)/α⌋ = 1`.
    pub fn contains(&self, n: u64) -> Result<bool> {
        if n < 1 {
            return Ok(false);
        }
        if !self.above_first_term_bound(n)? {
            return Ok(false);
        }
        let (bn, bd) = (*self.beta.numer() as i128, *self.beta.denom() as i128);
        let n = n as i128;
        let hi = floor_div_alpha_parts((n + 1) * bd - bn, bd, &self.alpha)?;
        let lo = floor_div_alpha_parts(n * bd - bn, bd, &self.alpha)?;
        Ok(hi - lo == 1)
    }

    /// The fractional-interval form of membership:
    /// `n > α + β - 1` and `0 < {(n+1-β)/α} <= 1/α`.
    pub fn interval_criterion(&self, n: u64) -> Result<bool> {
        if n < 1 {
            return Ok(false);
        }
        if !self.above_first_term_bound(n)? {
            return Ok(false);
        }
        let (bn, bd) = (*self.beta.numer() as i128, *self.beta.denom() as i128);
        let tn = (n as i128 + 1) * bd - bn;
        let td = bd;
        if tn == 0 {
            return Ok(false); // v = 0 exactly, {v} = 0
        }
        match &self.alpha {
            AlphaValue::Exact(q) => {
                let (a, b, c, d) = q.parts();
                let (a, b, c, du) = (a as i128, b as i128, c as i128, d as u128);
                // v = t/α = (A + B√d)/C with C normalized positive
                let k = a * a - b * b * d as i128;
                let (mut va, mut vb, mut vc) = (tn * c * a, -tn * c * b, td * k);
                if vc < 0 {
                    va = -va;
                    vb = -vb;
                    vc = -vc;
                }
                let s = surd_floor(va, vb, vc, du);
                // f = v - s = (va - s·vc + vb√d)/vc, in [0, 1)
                let fa = va - s * vc;
                if fa == 0 && vb == 0 {
                    return Ok(false); // rational v landed on an integer
                }
                // f <= 1/α  <=>  α·f - 1 <= 0, with
                // α·f = (a·fa + b·vb·d + (a·vb + b·fa)√d)/(c·vc)
                let num_lin = a * fa + b * vb * d as i128 - c * vc;
                let num_sqrt = a * vb + b * fa;
                Ok(surd_num_sign(num_lin, num_sqrt, du) != std::cmp::Ordering::Greater)
            }
            AlphaValue::Adaptive(ad) => {
                let t = big_rational(tn, td);
                escalate("interval criterion", |bits| {
                    let (alo, ahi) = ad.bounds(bits);
                    let (vlo, vhi) = (&t / &ahi, &t / &alo);
                    let (f1, f2) = (vlo.floor(), vhi.floor());
                    if f1 != f2 {
                        return None;
                    }
                    let (flo, fhi) = (vlo - &f1, vhi - f1);
                    // need certainty of (f > 0) and (f <= 1/α)
                    let positive = if flo.is_positive() {
                        true
                    } else if !fhi.is_positive() {
                        false
                    } else {
                        return None;
                    };
                    let inv_lo = ahi.recip();
                    let inv_hi = alo.recip();
                    let within = if fhi <= inv_lo {
                        true
                    } else if flo > inv_hi {
                        false
                    } else {
                        return None;
                    };
                    Some(positive && within)
                })
            }
        }
    }

    /// Iterator over the members of `B_{α,β} ∩ [1, x]`, ascending.
    pub fn iter_members(&self, x: u64) -> MemberIter<'_> {
        MemberIter { params: self, r: 1, x, done: false }
    }

    /// Collected members of `B_{α,β} ∩ [1, x]`.
    pub fn members_up_to(&self, x: u64) -> Result<Vec<u64>> {
        self.iter_members(x).collect()
    }

    /// ‖α·n + β‖, reported from a 64-fractional-bit evaluation.
    pub fn nearest_int_distance_affine(&self, n: u64) -> Result<f64> {
        let (bn, bd) = (*self.beta.numer() as i128, *self.beta.denom() as i128);
        let n = n as i128;
        match &self.alpha {
            AlphaValue::Exact(q) => {
                let (a, b, c, d) = q.parts();
                let (a, b, c) = (a as i128, b as i128, c as i128);
                Ok(dist_of_surd(a * n * bd + c * bn, b * n * bd, c * bd, d as u128))
            }
            AlphaValue::Adaptive(ad) => {
                let beta = big_rational(bn, bd);
                escalate("nearest-integer distance", |bits| {
                    let (lo, hi) = ad.bounds(bits);
                    let vlo = lo * BigInt::from(n) + &beta;
                    let vhi = hi * BigInt::from(n) + &beta;
                    let (f1, f2) = (vlo.floor(), vhi.floor());
                    if f1 != f2 || bits < 72 {
                        return None;
                    }
                    let frac = (vlo - f1).clone();
                    let f = big_ratio_to_f64(frac.numer(), frac.denom());
                    Some(f.min(1.0 - f))
                })
            }
        }
    }
}

/// ‖α·n‖: distance from α·n to the nearest integer, with exact floor
/// decisions and the value reported from >= 64 correct fractional bits.
pub fn nearest_int_distance(alpha: &AlphaValue, n: u64) -> Result<f64> {
    let params = BeattyParams::new(alpha.clone(), Rational64::zero());
    params.nearest_int_distance_affine(n)
}

/// Distance for the exact surd (A + B√d)/C.
fn dist_of_surd(a: i128, b: i128, c: i128, d: u128) -> f64 {
    let s = surd_floor(a, b, c, d);
    let frac_fp = surd_fixed_point(a - s * c, b, c, d, 64);
    let f = frac_fp.to_f64().unwrap_or(0.0) / 2f64.powi(64);
    f.min(1.0 - f)
}

/// Ascending stream of Beatty members in `[1, x]`.
pub struct MemberIter<'p> {
    params: &'p BeattyParams,
    r: u64,
    x: u64,
    done: bool,
}

impl Iterator for MemberIter<'_> {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let t = match self.params.nth_term(self.r) {
                Ok(t) => t,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            };
            self.r += 1;
            if (t as i128) > self.x as i128 {
                self.done = true;
                return None;
            }
            if t >= 1 {
                return Some(Ok(t as u64));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> AlphaValue {
        AlphaValue::parse("sqrt:2").unwrap()
    }

    fn golden() -> AlphaValue {
        AlphaValue::parse("quad:1,1,2,5").unwrap()
    }

    fn params(alpha: AlphaValue, beta: &str) -> BeattyParams {
        BeattyParams::new(alpha, parse_beta(beta).unwrap())
    }

    #[test]
    fn parse_beta_forms() {
        assert_eq!(parse_beta("0").unwrap(), Rational64::new(0, 1));
        assert_eq!(parse_beta("1/2").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_beta("-1/3").unwrap(), Rational64::new(-1, 3));
        assert_eq!(parse_beta("0.5").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_beta("-0.333").unwrap(), Rational64::new(-333, 1000));
        assert_eq!(parse_beta("2").unwrap(), Rational64::new(2, 1));
        assert!(parse_beta("1/0").is_err());
        assert!(parse_beta("abc").is_err());
    }

    #[test]
    fn floor_div_alpha_examples() {
        assert_eq!(floor_div_alpha(Rational64::new(10, 1), &sqrt2()).unwrap(), 7);
        assert_eq!(floor_div_alpha(Rational64::new(0, 1), &sqrt2()).unwrap(), 0);
        assert_eq!(floor_div_alpha(Rational64::new(3, 1), &golden()).unwrap(), 1);
        // negative t floors toward -inf: -1/sqrt2 = -0.707 -> -1
        assert_eq!(floor_div_alpha(Rational64::new(-1, 1), &sqrt2()).unwrap(), -1);
    }

    #[test]
    fn nth_term_examples() {
        assert_eq!(params(sqrt2(), "0").nth_term(5).unwrap(), 7);
        assert_eq!(params(golden(), "0").nth_term(1).unwrap(), 1);
        assert_eq!(params(sqrt2(), "1/2").nth_term(2).unwrap(), 3);
    }

    #[test]
    fn contains_examples() {
        let p = params(sqrt2(), "0");
        assert!(p.contains(4).unwrap());
        assert!(!p.contains(3).unwrap());
        let g = params(golden(), "0");
        assert!(g.contains(6).unwrap());
    }

    #[test]
    fn enumerate_examples() {
        let p = params(sqrt2(), "0");
        assert_eq!(p.members_up_to(10).unwrap(), vec![1, 2, 4, 5, 7, 8, 9]);
        assert_eq!(p.members_up_to(0).unwrap(), Vec::<u64>::new());
        let g = params(golden(), "0");
        assert_eq!(g.members_up_to(12).unwrap(), vec![1, 3, 4, 6, 8, 9, 11, 12]);
    }

    #[test]
    fn distance_examples() {
        let d1 = nearest_int_distance(&sqrt2(), 1).unwrap();
        assert!((d1 - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-12);
        let d5 = nearest_int_distance(&sqrt2(), 5).unwrap();
        assert!((d5 - 0.071_067_811_865_475).abs() < 1e-12);
    }

    #[test]
    fn membership_against_direct_search() {
        // contains(n) <=> some r >= 1 has nth_term(r) = n
        for (alpha, beta) in [
            (sqrt2(), "0"),
            (sqrt2(), "1/2"),
            (golden(), "-1/3"),
            (AlphaValue::parse("quad:5,-1,2,2").unwrap(), "1/2"),
        ] {
            let p = params(alpha, beta);
            let members: std::collections::HashSet<u64> =
                p.members_up_to(3000).unwrap().into_iter().collect();
            for n in 1..=3000u64 {
                assert_eq!(p.contains(n).unwrap(), members.contains(&n), "n={n} beta={beta}");
                assert_eq!(
                    p.interval_criterion(n).unwrap(),
                    members.contains(&n),
                    "interval n={n} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn adaptive_agrees_with_exact() {
        let exact = params(sqrt2(), "1/2");
        let q = match exact.alpha() {
            AlphaValue::Exact(q) => *q,
            _ => unreachable!(),
        };
        let adaptive = BeattyParams::new(
            AlphaValue::Adaptive(AdaptiveAlpha::from_surd(&q)),
            parse_beta("1/2").unwrap(),
        );
        for n in 1..=500u64 {
            assert_eq!(exact.nth_term(n).unwrap(), adaptive.nth_term(n).unwrap(), "r={n}");
            assert_eq!(exact.contains(n).unwrap(), adaptive.contains(n).unwrap(), "n={n}");
            assert_eq!(
                exact.interval_criterion(n).unwrap(),
                adaptive.interval_criterion(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn adaptive_e_pi_terms() {
        let pe = params(AlphaValue::parse("e").unwrap(), "0");
        // floor(e*r): 2, 5, 8, 10, 13, 16, 19, 21, 24, 27
        let want = [2i64, 5, 8, 10, 13, 16, 19, 21, 24, 27];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(pe.nth_term(i as u64 + 1).unwrap(), *w);
        }
        let pp = params(AlphaValue::parse("pi").unwrap(), "0");
        let want = [3i64, 6, 9, 12, 15, 18, 21, 25, 28, 31];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(pp.nth_term(i as u64 + 1).unwrap(), *w);
        }
    }

    #[test]
    fn precision_cap_is_an_error_not_a_wrong_answer() {
        // an adversarial "adaptive irrational" that is secretly 3/2: the
        // floor of 2·α never certifies, so escalation must hit the cap
        use num_bigint::BigInt;
        let fake = AdaptiveAlpha::new("rational-3/2", |bits| (BigInt::from(3) << bits) / 2);
        let p = BeattyParams::new(AlphaValue::Adaptive(fake), Rational64::zero());
        match p.nth_term(2) {
            Err(Error::Precision(_)) => {}
            other => panic!("expected precision error, got {other:?}"),
        }
        // unaffected queries still resolve
        assert_eq!(p.nth_term(3).unwrap(), 4); // floor(4.5)
    }

    #[test]
    fn negative_beta_skips_subunit_terms() {
        // alpha just above 1 with strongly negative beta produces terms < 1
        let p = params(AlphaValue::parse("quad:0,1,1,2").unwrap(), "-5");
        // nth_term(1) = floor(sqrt2 - 5) = -4
        assert_eq!(p.nth_term(1).unwrap(), -4);
        let members = p.members_up_to(10).unwrap();
        assert!(members.iter().all(|&m| m >= 1));
        assert!(!members.is_empty());
        for &m in &members {
            assert!(p.contains(m).unwrap());
        }
    }

    #[test]
    fn strictly_increasing_terms() {
        for (alpha, beta) in [(sqrt2(), "0"), (golden(), "1/2"), (sqrt2(), "-1/3")] {
            let p = params(alpha, beta);
            let mut prev = p.nth_term(1).unwrap();
            for r in 2..2000 {
                let t = p.nth_term(r).unwrap();
                assert!(t > prev, "r={r}");
                prev = t;
            }
        }
    }

    #[test]
    fn cardinality_near_density() {
        let p = params(sqrt2(), "0");
        for x in [10u64, 100, 1000, 10_000] {
            let k = p.members_up_to(x).unwrap().len() as f64;
            assert!((k - x as f64 / std::f64::consts::SQRT_2).abs() <= 2.0, "x={x}");
        }
    }
}
