//! Factorization sieve and the cyclic/abelian/nilpotent classification
//! predicates, plus a slow big-integer oracle for cross-validation.
//!
//! An integer `n` is cyclic iff `gcd(n, φ(n)) = 1`, nilpotent iff
//! `gcd(n, F(n)) = 1` where `F` is the multiplicative function with
//! `F(p^a) = (p^a - 1)(p^{a-1} - 1)···(p - 1)`, and abelian iff it is
//! nilpotent and cubefree. The fast predicates never materialize `F(n)`;
//! they test prime divisibility structurally with modular exponentiation.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numeric::{isqrt_u64, mulmod64, modpow64};

/// Entries are 4 bytes each; this caps the table at ~400 MB.
pub const MAX_SPF_LIMIT: u64 = 100_000_000;

/// Smallest-prime-factor table for `2 ..= limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `i` (requires `2 <= i <= limit`).
    pub fn spf(&self, i: u64) -> u64 {
        self.spf[i as usize] as u64
    }
}

/// Build the smallest-prime-factor table for `2 ..= limit`.
pub fn build_spf_table(limit: u64) -> Result<SpfTable> {
    if limit < 2 {
        return Err(Error::usage(format!("spf table limit must be >= 2, got {limit}")));
    }
    if limit > MAX_SPF_LIMIT {
        return Err(Error::resource(format!(
            "spf table limit {limit} exceeds cap {MAX_SPF_LIMIT}"
        )));
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            if let Some(start) = i.checked_mul(i) {
                let mut j = start;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
    }
    Ok(SpfTable { limit, spf })
}

/// Prime-power decomposition of `n`; factors are `(prime, exponent)` pairs
/// with strictly increasing primes. `n = 1` has an empty factor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == 1)
    }

    pub fn is_cubefree(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a <= 2)
    }
}

/// Factorize `1 <= n <= table.limit()` by walking the spf chain.
pub fn factorize(n: u64, table: &SpfTable) -> Result<Factorization> {
    if n < 1 || n > table.limit() {
        return Err(Error::usage(format!(
            "factorize: n={n} outside [1, {}]",
            table.limit()
        )));
    }
    let mut factors = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = table.spf(m);
        let mut a = 0;
        while m.is_multiple_of(p) {
            m /= p;
            a += 1;
        }
        factors.push((p, a));
    }
    Ok(Factorization { n, factors })
}

/// General-purpose factorization for any 64-bit `n >= 1`
/// (deterministic Miller-Rabin plus Pollard's rho).
pub fn factorize_any(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::usage("factorize: n must be >= 1".to_string()));
    }
    let mut primes = Vec::new();
    collect_prime_factors(n, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

fn collect_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if n.is_multiple_of(2) {
        out.push(2);
        collect_prime_factors(n / 2, out);
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    collect_prime_factors(d, out);
    collect_prime_factors(n / d, out);
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    for c in 1.. {
        let mut x = 2u64;
        let mut y = 2u64;
        loop {
            x = mulmod64(x, x, n).wrapping_add(c) % n;
            y = mulmod64(y, y, n).wrapping_add(c) % n;
            y = mulmod64(y, y, n).wrapping_add(c) % n;
            let diff = x.abs_diff(y);
            if diff == 0 {
                break; // cycle without factor; retry with another c
            }
            let g = diff.gcd(&n);
            if g > 1 && g < n {
                return g;
            }
            if g == n {
                break;
            }
        }
    }
    unreachable!()
}

/// Euler's totient from a factorization.
pub fn euler_phi(f: &Factorization) -> u64 {
    let mut phi = 1u64;
    for &(p, a) in f.factors() {
        phi *= p.pow(a - 1) * (p - 1);
    }
    phi
}

/// The group-theoretic totient `F(n) = Π_{p^a || n} (p^a-1)(p^{a-1}-1)···(p-1)`.
/// The value can exceed 64 bits, so it is returned as a big integer.
pub fn group_totient(f: &Factorization) -> BigUint {
    let mut acc = BigUint::one();
    for &(p, a) in f.factors() {
        let bp = BigUint::from(p);
        let mut pw = BigUint::one();
        for _ in 0..a {
            pw *= &bp;
            acc *= &pw - 1u32;
        }
    }
    acc
}

/// Classification of an integer by the group orders it admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumberClass {
    Cyclic,
    AbelianNotCyclic,
    NilpotentNotAbelian,
    NotNilpotent,
}

impl NumberClass {
    pub fn is_cyclic(self) -> bool {
        matches!(self, NumberClass::Cyclic)
    }

    pub fn is_abelian(self) -> bool {
        matches!(self, NumberClass::Cyclic | NumberClass::AbelianNotCyclic)
    }

    pub fn is_nilpotent(self) -> bool {
        !matches!(self, NumberClass::NotNilpotent)
    }

    pub fn label(self) -> &'static str {
        match self {
            NumberClass::Cyclic => "cyclic",
            NumberClass::AbelianNotCyclic => "abelian-not-cyclic",
            NumberClass::NilpotentNotAbelian => "nilpotent-not-abelian",
            NumberClass::NotNilpotent => "not-nilpotent",
        }
    }
}

/// Nilpotence test on a factor slice: for every pair of primes p != q with
/// q^b || n, p must not divide q^i - 1 for any 1 <= i <= b. Checked with
/// modular exponentiation; the big product F(n) is never formed.
fn nilpotent_from_parts(factors: &[(u64, u32)]) -> bool {
    let k = factors.len();
    #[allow(clippy::needless_range_loop)] // the i == j skip wants indices
    for i in 0..k {
        let p = factors[i].0;
        for j in 0..k {
            if i == j {
                continue;
            }
            let (q, b) = factors[j];
            let qm = q % p;
            if qm == 0 {
                continue; // distinct primes: cannot happen, defensive for p=q
            }
            let mut acc = qm;
            for _ in 0..b {
                if acc == 1 {
                    return false;
                }
                acc = mulmod64(acc, qm, p);
            }
        }
    }
    true
}

/// Classify from raw `(prime, exponent)` parts.
pub(crate) fn classify_parts(factors: &[(u64, u32)]) -> NumberClass {
    if !nilpotent_from_parts(factors) {
        return NumberClass::NotNilpotent;
    }
    if factors.iter().any(|&(_, a)| a > 2) {
        return NumberClass::NilpotentNotAbelian;
    }
    if factors.iter().any(|&(_, a)| a > 1) {
        return NumberClass::AbelianNotCyclic;
    }
    NumberClass::Cyclic
}

/// `gcd(n, φ(n)) = 1`: n squarefree and no prime p | n divides q - 1 for
/// another prime q | n.
pub fn is_cyclic(f: &Factorization) -> bool {
    f.is_squarefree() && nilpotent_from_parts(f.factors())
}

/// `gcd(n, F(n)) = 1`, tested structurally.
pub fn is_nilpotent(f: &Factorization) -> bool {
    nilpotent_from_parts(f.factors())
}

/// Cubefree and nilpotent.
pub fn is_abelian(f: &Factorization) -> bool {
    f.is_cubefree() && nilpotent_from_parts(f.factors())
}

/// Full classification; consistent with the three predicates by construction.
pub fn classify(f: &Factorization) -> NumberClass {
    classify_parts(f.factors())
}

/// Independent oracle: classification by literally computing
/// `gcd(n, φ(n))` and `gcd(n, F(n))` with big integers over a trial-division
/// factorization, plus a direct cubefree trial-division test.
/// O(sqrt n); intended for cross-validation, not bulk use.
pub fn classify_naive_oracle(n: u64) -> NumberClass {
    assert!(n >= 1, "oracle requires n >= 1");
    let factors = trial_division(n);

    let mut phi = BigUint::one();
    let mut totient = BigUint::one();
    for &(p, a) in &factors {
        let bp = BigUint::from(p);
        phi *= bp.pow(a - 1) * (&bp - 1u32);
        let mut pw = BigUint::one();
        for _ in 0..a {
            pw *= &bp;
            totient *= &pw - 1u32;
        }
    }
    let bn = BigUint::from(n);
    let cyclic = bn.gcd(&phi).is_one();
    let nilpotent = bn.gcd(&totient).is_one();

    let mut cubefree = true;
    let mut d = 2u64;
    while let Some(cube) = d.checked_mul(d).and_then(|s| s.checked_mul(d)) {
        if cube > n {
            break;
        }
        if n.is_multiple_of(cube) {
            cubefree = false;
            break;
        }
        d += 1;
    }

    if !nilpotent {
        NumberClass::NotNilpotent
    } else if !cubefree {
        NumberClass::NilpotentNotAbelian
    } else if !cyclic {
        NumberClass::AbelianNotCyclic
    } else {
        NumberClass::Cyclic
    }
}

fn trial_division(n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p <= isqrt_u64(m) {
        if m.is_multiple_of(p) {
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            factors.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: u64) -> Factorization {
        factorize_any(n).unwrap()
    }

    #[test]
    fn spf_table_small() {
        let t = build_spf_table(10).unwrap();
        let expected = [(2, 2), (3, 3), (4, 2), (5, 5), (6, 2), (7, 7), (8, 2), (9, 3), (10, 2)];
        for (i, s) in expected {
            assert_eq!(t.spf(i), s, "spf({i})");
        }
        let t2 = build_spf_table(2).unwrap();
        assert_eq!(t2.spf(2), 2);
    }

    #[test]
    fn spf_table_against_trial_division() {
        let t = build_spf_table(30).unwrap();
        assert_eq!(t.spf(25), 5);
        assert_eq!(t.spf(29), 29);
        for i in 2..=30 {
            let expected = trial_division(i)[0].0;
            assert_eq!(t.spf(i), expected, "spf({i})");
        }
    }

    #[test]
    fn spf_table_errors() {
        assert!(matches!(build_spf_table(1), Err(Error::Usage(_))));
        assert!(matches!(build_spf_table(MAX_SPF_LIMIT + 1), Err(Error::Resource(_))));
    }

    #[test]
    fn factorize_examples() {
        let t = build_spf_table(400).unwrap();
        assert_eq!(factorize(1, &t).unwrap().factors(), &[]);
        assert_eq!(factorize(12, &t).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(360, &t).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(matches!(factorize(0, &t), Err(Error::Usage(_))));
        assert!(matches!(factorize(401, &t), Err(Error::Usage(_))));
    }

    #[test]
    fn factorize_any_matches_trial() {
        for n in 1..=2000u64 {
            assert_eq!(factorize_any(n).unwrap().factors(), &trial_division(n)[..], "n={n}");
        }
        // a 64-bit semiprime
        let n = 1_000_003u64 * 1_000_033;
        let f = factorize_any(n).unwrap();
        assert_eq!(f.factors(), &[(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&fac(1)), 1);
        assert_eq!(euler_phi(&fac(15)), 8);
        assert_eq!(euler_phi(&fac(12)), 4);
    }

    #[test]
    fn group_totient_examples() {
        assert_eq!(group_totient(&fac(4)), BigUint::from(3u32));
        assert_eq!(group_totient(&fac(6)), BigUint::from(2u32));
        assert_eq!(group_totient(&fac(1)), BigUint::from(1u32));
        assert_eq!(group_totient(&fac(8)), BigUint::from(21u32));
        assert_eq!(group_totient(&fac(16)), BigUint::from(315u32));
    }

    #[test]
    fn group_totient_exceeds_machine_words() {
        // F(2^40) = Π_{i<=40} (2^i - 1) has ~800 bits
        let f = fac(1u64 << 40);
        let v = group_totient(&f);
        assert!(v.bits() > 64);
        let mut expected = BigUint::one();
        for i in 1..=40u32 {
            expected *= (BigUint::one() << i) - 1u32;
        }
        assert_eq!(v, expected);
    }

    #[test]
    fn predicate_examples() {
        assert!(is_cyclic(&fac(15)));
        assert!(!is_cyclic(&fac(4)));
        for p in [2u64, 3, 5, 97, 999983] {
            assert!(is_cyclic(&fac(p)), "prime {p}");
        }
        assert!(is_nilpotent(&fac(8)));
        assert!(!is_nilpotent(&fac(6)));
        for (p, a) in [(2u64, 6u32), (3, 4), (5, 3), (7, 2)] {
            assert!(is_nilpotent(&fac(p.pow(a))), "{p}^{a}");
        }
        assert!(is_abelian(&fac(4)));
        assert!(!is_abelian(&fac(8)));
        assert!(!is_abelian(&fac(12)));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&fac(15)), NumberClass::Cyclic);
        assert_eq!(classify(&fac(4)), NumberClass::AbelianNotCyclic);
        assert_eq!(classify(&fac(8)), NumberClass::NilpotentNotAbelian);
        assert_eq!(classify(&fac(20)), NumberClass::NotNilpotent);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(classify_naive_oracle(1), NumberClass::Cyclic);
        assert_eq!(classify_naive_oracle(16), NumberClass::NilpotentNotAbelian);
        assert_eq!(classify_naive_oracle(20), NumberClass::NotNilpotent);
    }

    #[test]
    fn counts_up_to_20() {
        let mut c = 0;
        let mut a = 0;
        let mut n = 0;
        for i in 1..=20u64 {
            let class = classify_naive_oracle(i);
            c += class.is_cyclic() as u32;
            a += class.is_abelian() as u32;
            n += class.is_nilpotent() as u32;
        }
        assert_eq!((c, a, n), (10, 12, 14));
    }

    #[test]
    fn chain_and_oracle_agreement_small() {
        let t = build_spf_table(10_000).unwrap();
        for i in 1..=10_000u64 {
            let f = factorize(i, &t).unwrap();
            let class = classify(&f);
            // cyclic => abelian => nilpotent
            assert!(!class.is_cyclic() || class.is_abelian());
            assert!(!class.is_abelian() || class.is_nilpotent());
            if class.is_cyclic() {
                assert!(f.is_squarefree(), "cyclic n={i} must be squarefree");
            }
            assert_eq!(class, classify_naive_oracle(i), "n={i}");
        }
    }

    #[test]
    fn group_totient_multiplicative() {
        // F(mn) = F(m) F(n) for gcd(m, n) = 1
        let pairs = [(4u64, 9u64), (8, 15), (25, 12), (49, 16), (121, 100), (3, 1024)];
        for (m, n) in pairs {
            assert_eq!(m.gcd(&n), 1);
            let fm = group_totient(&fac(m));
            let fn_ = group_totient(&fac(n));
            let fmn = group_totient(&fac(m * n));
            assert_eq!(fmn, fm * fn_, "m={m} n={n}");
        }
    }
}
