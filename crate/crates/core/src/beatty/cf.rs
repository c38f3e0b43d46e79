//! Continued fractions, convergents, and empirical approximation-type
//! estimation.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::beatty::alpha::{AlphaValue, PRECISION_MAX_BITS, PRECISION_START_BITS};
use crate::beatty::surd::surd_floor;
use crate::beatty::nearest_int_distance;
use crate::error::{Error, Result};

/// Partial quotients `a_0, a_1, ..., a_k` and the matching convergents
/// `(p_i, q_i)` of an irrational number.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub quotients: Vec<i64>,
    pub convergents: Vec<(BigInt, BigInt)>,
}

/// First `k + 1` partial quotients of α, exact for quadratic irrationals
/// (periodic algorithm), precision-guarded in adaptive mode.
pub fn continued_fraction(alpha: &AlphaValue, k: usize) -> Result<ContinuedFraction> {
    let quotients = match alpha {
        AlphaValue::Exact(q) => {
            let (a, b, c, d) = q.parts();
            cf_quadratic(a as i128, b as i128, c as i128, d as u128, k)
        }
        AlphaValue::Adaptive(ad) => {
            let mut bits = PRECISION_START_BITS;
            loop {
                let (lo, hi) = ad.bounds(bits);
                let qa = rational_cf(lo.numer().clone(), lo.denom().clone(), k + 1);
                let qb = rational_cf(hi.numer().clone(), hi.denom().clone(), k + 1);
                let common: Vec<i64> = qa
                    .iter()
                    .zip(qb.iter())
                    .take_while(|(x, y)| x == y)
                    .map(|(x, _)| *x)
                    .collect();
                if common.len() > k {
                    break common[..k + 1].to_vec();
                }
                if bits >= PRECISION_MAX_BITS {
                    return Err(Error::precision(format!(
                        "continued fraction: {} quotients not certified at {bits} bits",
                        k + 1
                    )));
                }
                bits *= 2;
            }
        }
    };

    let mut convergents = Vec::with_capacity(quotients.len());
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::from(quotients[0]), BigInt::one());
    convergents.push((p1.clone(), q1.clone()));
    for &a in &quotients[1..] {
        let p2 = BigInt::from(a) * &p1 + &p0;
        let q2 = BigInt::from(a) * &q1 + &q0;
        convergents.push((p2.clone(), q2.clone()));
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    Ok(ContinuedFraction { quotients, convergents })
}

/// Classical PQa expansion of `(a + b√d)/c`. States are `(P + √D)/Q` with
/// the invariant `Q | D - P²`, which the sign/scale normalization arranges.
fn cf_quadratic(a: i128, b: i128, c: i128, d: u128, k: usize) -> Vec<i64> {
    // normalize to + sqrt: (a + b√d)/c = (-a + |b|√d)/(-c) when b < 0
    let (mut p, mut q, mut big_d) = if b >= 0 {
        (a, c, b * b * d as i128)
    } else {
        (-a, -c, b * b * d as i128)
    };
    if (big_d - p * p) % q != 0 {
        let s = q.abs();
        p *= s;
        big_d *= s * s;
        q *= s;
    }
    let mut out = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        let ai = surd_floor(p, 1, q, big_d as u128);
        out.push(ai as i64);
        p = ai * q - p;
        q = (big_d - p * p) / q;
    }
    out
}

/// Continued fraction of the rational num/den (canonical, Euclid).
fn rational_cf(mut num: BigInt, mut den: BigInt, max_terms: usize) -> Vec<i64> {
    let mut out = Vec::new();
    while !den.is_zero() && out.len() < max_terms {
        let (q, r) = num_integer::Integer::div_mod_floor(&num, &den);
        out.push(q.to_i64().expect("quotient fits i64"));
        num = std::mem::replace(&mut den, r);
    }
    out
}

/// Empirical estimate of the approximation type τ with its evidence list.
#[derive(Debug, Clone)]
pub struct TypeEstimate {
    pub tau_hat: f64,
    /// `(q_i, ‖α·q_i‖)` over the convergent denominators used.
    pub evidence: Vec<(u64, f64)>,
}

/// Estimate the type of α from convergent denominators `q_i < q_max`:
/// the least-squares slope of `log(1/‖α·q_i‖)` against `log(q_i)`
/// (clamped below at 1, the unconditional minimum). Convergents are the
/// minima of `‖α·n‖`, so O(log q_max) samples carry the whole story.
pub fn estimate_type(alpha: &AlphaValue, q_max: u64) -> Result<TypeEstimate> {
    if q_max < 2 {
        return Err(Error::InsufficientData(format!(
            "type estimation needs q_max >= 2, got {q_max}"
        )));
    }
    // Denominators at least Fibonacci-grow, so 96 quotients overshoot u64.
    let mut denoms: Vec<u64> = Vec::new();
    let mut k = 16usize;
    loop {
        let cf = continued_fraction(alpha, k)?;
        denoms.clear();
        let mut exceeded = false;
        for (_, q) in &cf.convergents {
            match q.to_u64() {
                Some(q) if q < q_max => {
                    if denoms.last() != Some(&q) {
                        denoms.push(q);
                    }
                }
                _ => {
                    exceeded = true;
                    break;
                }
            }
        }
        if exceeded || k >= 96 {
            break;
        }
        k *= 2;
    }
    if denoms.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "fewer than 2 convergent denominators below q_max = {q_max}"
        )));
    }

    let mut evidence = Vec::with_capacity(denoms.len());
    for &q in &denoms {
        let dist = nearest_int_distance(alpha, q)?;
        evidence.push((q, dist));
    }
    let xs: Vec<f64> = evidence.iter().map(|&(q, _)| (q as f64).ln()).collect();
    let ys: Vec<f64> = evidence.iter().map(|&(_, d)| -d.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(TypeEstimate { tau_hat: slope.max(1.0), evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beatty::alpha::AdaptiveAlpha;
    use num_rational::BigRational;

    #[test]
    fn classical_expansions() {
        let cf = continued_fraction(&AlphaValue::parse("sqrt:2").unwrap(), 4).unwrap();
        assert_eq!(cf.quotients, vec![1, 2, 2, 2, 2]);
        let cf = continued_fraction(&AlphaValue::parse("quad:1,1,2,5").unwrap(), 4).unwrap();
        assert_eq!(cf.quotients, vec![1, 1, 1, 1, 1]);
        let cf = continued_fraction(&AlphaValue::parse("quad:1,1,1,3").unwrap(), 4).unwrap();
        assert_eq!(cf.quotients, vec![2, 1, 2, 1, 2]);
        let cf = continued_fraction(&AlphaValue::parse("sqrt:3").unwrap(), 5).unwrap();
        assert_eq!(cf.quotients, vec![1, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn adaptive_expansion_of_e() {
        let cf = continued_fraction(&AlphaValue::parse("e").unwrap(), 9).unwrap();
        assert_eq!(cf.quotients, vec![2, 1, 2, 1, 1, 4, 1, 1, 6, 1]);
        let cf = continued_fraction(&AlphaValue::parse("pi").unwrap(), 4).unwrap();
        assert_eq!(cf.quotients, vec![3, 7, 15, 1, 292]);
    }

    #[test]
    fn convergents_recurrence_and_quality() {
        let alpha = AlphaValue::parse("sqrt:2").unwrap();
        let cf = continued_fraction(&alpha, 12).unwrap();
        for i in 2..cf.convergents.len() {
            let a = BigInt::from(cf.quotients[i]);
            assert_eq!(cf.convergents[i].0, &a * &cf.convergents[i - 1].0 + &cf.convergents[i - 2].0);
            assert_eq!(cf.convergents[i].1, &a * &cf.convergents[i - 1].1 + &cf.convergents[i - 2].1);
        }
        // |α - p/q| < 1/(q_i q_{i+1})
        let a64 = alpha.to_f64();
        for i in 0..cf.convergents.len() - 1 {
            let (p, q) = &cf.convergents[i];
            let (pf, qf) = (p.to_f64().unwrap(), q.to_f64().unwrap());
            let q_next = cf.convergents[i + 1].1.to_f64().unwrap();
            assert!((a64 - pf / qf).abs() < 1.0 / (qf * q_next) + 1e-15, "i={i}");
        }
    }

    #[test]
    fn adaptive_matches_exact_quotients() {
        let q = match AlphaValue::parse("sqrt:2").unwrap() {
            AlphaValue::Exact(q) => q,
            _ => unreachable!(),
        };
        let adaptive = AlphaValue::Adaptive(AdaptiveAlpha::from_surd(&q));
        let cf = continued_fraction(&adaptive, 10).unwrap();
        assert_eq!(cf.quotients, vec![1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn type_estimates_near_one() {
        for spec in ["sqrt:2", "sqrt:3", "quad:1,1,2,5", "quad:1,1,1,3"] {
            let alpha = AlphaValue::parse(spec).unwrap();
            let est = estimate_type(&alpha, 1_000_000).unwrap();
            assert!(
                (1.0..=1.01).contains(&est.tau_hat),
                "{spec}: tau_hat = {}",
                est.tau_hat
            );
            assert!(est.evidence.len() >= 5);
        }
    }

    #[test]
    fn type_insufficient_data() {
        let alpha = AlphaValue::parse("sqrt:2").unwrap();
        assert!(matches!(estimate_type(&alpha, 2), Err(Error::InsufficientData(_))));
        assert!(matches!(estimate_type(&alpha, 1), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn rational_cf_euclid() {
        let cf = rational_cf(BigInt::from(355), BigInt::from(113), 10);
        assert_eq!(cf, vec![3, 7, 16]);
        let r = BigRational::new(BigInt::from(355), BigInt::from(113));
        assert!((r.to_f64().unwrap() - 355.0 / 113.0).abs() < 1e-12);
    }
}
