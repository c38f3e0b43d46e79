//! Executable forms of the exponential-sum and discrepancy estimates:
//! the Erdős–Turán inequality, multiplicative-sum decay, min-sums, the
//! Vaaler trigonometric approximation of the sawtooth, and the
//! divisor-in-Beatty error term.
//!
//! Arguments of e(t) are reduced mod 1 in fixed point before any
//! trigonometric call (j·m/α reaches 1e10, where naive f64 evaluation
//! has no fractional bits left), and long sums accumulate compensated.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::beatty::{nearest_int_distance, AlphaValue, BeattyParams};
use crate::error::{Error, Result};
use crate::numeric::primes_up_to;

/// ψ(t) = {t} - 1/2, in [-1/2, 1/2).
pub fn sawtooth(t: f64) -> f64 {
    let mut f = t - t.floor();
    if f >= 1.0 {
        f = 0.0;
    }
    f - 0.5
}

/// e(t) = exp(2πit) for t already reduced to [0, 1).
#[inline]
fn e(t: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Kahan-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    s: Complex64,
    c: Complex64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    fn value(&self) -> Complex64 {
        self.s
    }
}

/// A finite sequence taken mod 1; representatives stored in [0, 1).
#[derive(Debug, Clone)]
pub struct UnitSequence {
    values: Vec<f64>,
}

impl UnitSequence {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let values = values
            .into_iter()
            .map(|v| {
                let mut f = v - v.floor();
                if f >= 1.0 {
                    f = 0.0;
                }
                f
            })
            .collect();
        UnitSequence { values }
    }

    /// The Kronecker sequence u_m = {α·m}, m = 1..=n, reduced exactly in
    /// 80-bit fixed point.
    pub fn kronecker(alpha: &AlphaValue, n: usize) -> Result<Self> {
        const BITS: u32 = 80;
        let step = alpha
            .fixed_point(BITS)
            .to_u128()
            .ok_or_else(|| Error::resource("alpha too large for fixed-point reduction"))?;
        let mask = (1u128 << BITS) - 1;
        let scale = 2f64.powi(-(BITS as i32));
        let mut acc = 0u128;
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            acc = (acc + step) & mask;
            values.push(acc as f64 * scale);
        }
        Ok(UnitSequence { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Outcome of one Erdős–Turán evaluation. `actual_dev <= bound` is a
/// theorem; a violation is an implementation bug.
#[derive(Debug, Clone, Copy)]
pub struct ErdosTuranReport {
    pub n: usize,
    pub j: u64,
    pub count_in: u64,
    pub expected: f64,
    pub actual_dev: f64,
    pub bound: f64,
}

/// |#{m : u_m ∈ [ρ,σ] mod 1} - (σ-ρ)N| against
/// N/(J+1) + 3·Σ_{j<=J} |Σ_m e(j·u_m)|/j.
pub fn erdos_turan(seq: &UnitSequence, j_max: u64, rho: f64, sigma: f64) -> Result<ErdosTuranReport> {
    if seq.is_empty() {
        return Err(Error::usage("erdos-turan needs a nonempty sequence"));
    }
    if j_max < 1 {
        return Err(Error::usage("erdos-turan needs J >= 1"));
    }
    if !(sigma >= rho && sigma <= rho + 1.0) {
        return Err(Error::usage(format!(
            "interval must satisfy rho <= sigma <= rho + 1 (got [{rho}, {sigma}])"
        )));
    }
    let n = seq.len();
    let len = sigma - rho;
    let a = rho - rho.floor();
    let b = a + len;
    let mut count = 0u64;
    for &u in seq.values() {
        if (u >= a && u <= b) || (b > 1.0 && u <= b - 1.0) {
            count += 1;
        }
    }
    let expected = len * n as f64;
    let actual_dev = (count as f64 - expected).abs();

    let mut bound = n as f64 / (j_max as f64 + 1.0);
    for j in 1..=j_max {
        let mut sum = CompensatedSum::default();
        for &u in seq.values() {
            let t = j as f64 * u;
            sum.add(e(t - t.floor()));
        }
        bound += 3.0 / j as f64 * sum.value().norm();
    }
    Ok(ErdosTuranReport { n, j: j_max, count_in: count, expected, actual_dev, bound })
}

/// Built-in multiplicative indicator functions with |f| <= 1.
#[derive(Debug, Clone, PartialEq)]
pub enum FSpec {
    /// f ≡ 1
    One,
    /// Möbius μ
    Moebius,
    /// indicator of "no prime factor <= z"
    Rough { z: f64 },
    /// indicator of "squarefree, no prime factor <= y, and avoid ∤ m"
    SquarefreeRough { y: f64, avoid: Option<u64> },
}

impl FSpec {
    /// Parse `one | mu | rough:Z | sfrough:Y[,P]`. Anything else (in
    /// particular non-multiplicative requests) is a usage error.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one" | "1" => return Ok(FSpec::One),
            "mu" | "moebius" => return Ok(FSpec::Moebius),
            _ => {}
        }
        if let Some(z) = s.strip_prefix("rough:") {
            let z: f64 = z
                .parse()
                .map_err(|_| Error::usage(format!("bad rough spec {s:?}")))?;
            return Ok(FSpec::Rough { z });
        }
        if let Some(rest) = s.strip_prefix("sfrough:") {
            let mut it = rest.split(',');
            let y: f64 = it
                .next()
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::usage(format!("bad sfrough spec {s:?}")))?;
            let avoid = match it.next() {
                None => None,
                Some(p) => Some(
                    p.parse::<u64>()
                        .map_err(|_| Error::usage(format!("bad sfrough spec {s:?}")))?,
                ),
            };
            if it.next().is_some() {
                return Err(Error::usage(format!("bad sfrough spec {s:?}")));
            }
            return Ok(FSpec::SquarefreeRough { y, avoid });
        }
        Err(Error::usage(format!(
            "unknown f spec {s:?}: built-in multiplicative indicators are \
             one, mu, rough:Z, sfrough:Y[,P]"
        )))
    }

    pub fn label(&self) -> String {
        match self {
            FSpec::One => "one".into(),
            FSpec::Moebius => "mu".into(),
            FSpec::Rough { z } => format!("rough:{z}"),
            FSpec::SquarefreeRough { y, avoid: None } => format!("sfrough:{y}"),
            FSpec::SquarefreeRough { y, avoid: Some(p) } => format!("sfrough:{y},{p}"),
        }
    }

    /// Tabulate f(1..=n) as i8 values in {-1, 0, 1}.
    fn tabulate(&self, n: usize) -> Vec<i8> {
        let mut f = vec![1i8; n + 1];
        if n == 0 {
            return f;
        }
        match self {
            FSpec::One => {}
            FSpec::Moebius => {
                for p in primes_up_to(n as u64) {
                    let p = p as usize;
                    for m in (p..=n).step_by(p) {
                        f[m] = -f[m];
                    }
                    if let Some(p2) = p.checked_mul(p) {
                        for m in (p2..=n).step_by(p2) {
                            f[m] = 0;
                        }
                    }
                }
            }
            FSpec::Rough { z } => {
                for p in primes_up_to(z.floor() as u64) {
                    let p = p as usize;
                    for m in (p..=n).step_by(p) {
                        f[m] = 0;
                    }
                }
            }
            FSpec::SquarefreeRough { y, avoid } => {
                for p in primes_up_to(y.floor() as u64) {
                    let p = p as usize;
                    for m in (p..=n).step_by(p) {
                        f[m] = 0;
                    }
                }
                for p in primes_up_to(crate::numeric::isqrt_u64(n as u64)) {
                    let p2 = (p * p) as usize;
                    for m in (p2..=n).step_by(p2) {
                        f[m] = 0;
                    }
                }
                if let Some(p) = avoid {
                    let p = *p as usize;
                    if p >= 1 && p <= n {
                        for m in (p..=n).step_by(p) {
                            f[m] = 0;
                        }
                    }
                }
            }
        }
        f
    }
}

/// One grid row of the multiplicative exponential-sum diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct ExpsumRow {
    pub n: u64,
    pub magnitude: f64,
    /// the N/log N comparison column
    pub reference: f64,
    /// whether j lies inside the validity window
    /// j <= N^(1/3τ)/(log N)^(3+3/(2τ))
    pub in_window: bool,
}

pub const MAX_EXPSUM_N: u64 = 100_000_000;

/// |Σ_{m<=N} f(m)·e(j·m/α)| tabulated over a grid of N values.
/// Trend report only: the estimate's implied constant depends on α and is
/// never quantified, so rows are flagged against the validity window
/// rather than asserted.
pub fn multiplicative_expsum(
    f_spec: &FSpec,
    alpha: &AlphaValue,
    j: u64,
    n_grid: &[u64],
    tau: f64,
) -> Result<Vec<ExpsumRow>> {
    if j < 1 {
        return Err(Error::usage("expsum needs j >= 1"));
    }
    if n_grid.is_empty() {
        return Err(Error::usage("expsum needs a nonempty N grid"));
    }
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    let n_max = *grid.last().unwrap();
    if n_max > MAX_EXPSUM_N {
        return Err(Error::resource(format!("expsum N = {n_max} exceeds cap {MAX_EXPSUM_N}")));
    }
    if n_max < 1 {
        return Err(Error::usage("expsum needs N >= 1"));
    }
    let f = f_spec.tabulate(n_max as usize);

    // ⌊(j/α)·2^80⌋, exact for surds, certified to ~2^-120 otherwise
    const BITS: u32 = 80;
    let step = j_over_alpha_fixed(j, alpha, BITS)?;
    let mask = (1u128 << BITS) - 1;
    let scale = 2f64.powi(-(BITS as i32));

    let mut rows = Vec::with_capacity(grid.len());
    let mut sum = CompensatedSum::default();
    let mut acc = 0u128;
    let mut next = 0usize;
    for m in 1..=n_max {
        acc = (acc + step) & mask;
        let fv = f[m as usize];
        if fv != 0 {
            let term = e(acc as f64 * scale);
            sum.add(if fv > 0 { term } else { -term });
        }
        if m == grid[next] {
            let nf = m as f64;
            let window = nf.powf(1.0 / (3.0 * tau)) / nf.ln().powf(3.0 + 3.0 / (2.0 * tau));
            rows.push(ExpsumRow {
                n: m,
                magnitude: sum.value().norm(),
                reference: if m > 1 { nf / nf.ln() } else { f64::NAN },
                in_window: (j as f64) <= window,
            });
            next += 1;
            if next == grid.len() {
                break;
            }
        }
    }
    Ok(rows)
}

/// ⌊(j/α)·2^bits⌋ as u128 (exact for surds, within a unit otherwise).
fn j_over_alpha_fixed(j: u64, alpha: &AlphaValue, bits: u32) -> Result<u128> {
    use num_bigint::BigInt;
    let v = match alpha {
        AlphaValue::Exact(q) => {
            let (a, b, c, d) = q.parts();
            let (a, b, c) = (a as i128, b as i128, c as i128);
            let k = a * a - b * b * d as i128;
            // j/α = j·c·(a - b√d)/k
            crate::beatty::surd_fixed_big(j as i128 * c * a, -(j as i128) * c * b, k, d as u128, bits)
        }
        AlphaValue::Adaptive(_) => {
            let guard = bits + 80;
            let m = alpha.fixed_point(guard);
            (BigInt::from(j) << (bits + guard)) / m
        }
    };
    v.to_u128()
        .ok_or_else(|| Error::resource("j/alpha too large for 128-bit fixed point"))
}

/// Σ_{n<=N} min(x/n, 1/‖αn‖), each distance exact through
/// [`nearest_int_distance`].
pub fn minsum_type1(alpha: &AlphaValue, x: f64, n: u64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::usage("minsum needs x > 0"));
    }
    if n < 1 {
        return Err(Error::usage("minsum needs N >= 1"));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for m in 1..=n {
        let dist = nearest_int_distance(alpha, m)?;
        let term = (x / m as f64).min(1.0 / dist);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Σ_{n<=N} min(x, 1/‖αn + β‖).
pub fn minsum_type2(params: &BeattyParams, x: f64, n: u64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::usage("minsum needs x > 0"));
    }
    if n < 1 {
        return Err(Error::usage("minsum needs N >= 1"));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for m in 1..=n {
        let dist = params.nearest_int_distance_affine(m)?;
        let term = x.min(1.0 / dist);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Vaaler coefficients (a_h), (b_h) at level H for the sawtooth ψ:
/// |ψ(t) - Σ_{1<=|h|<=H} a_h e(ht)| <= Σ_{|h|<=H} b_h e(ht) pointwise,
/// with |a_h| <= 1/|h| and 0 <= b_h <= 1/(H+1).
#[derive(Debug, Clone)]
pub struct TrigApprox {
    h_max: u64,
    /// a_h = i·a_im[h-1] for h >= 1 (purely imaginary); a_{-h} = conj(a_h)
    a_im: Vec<f64>,
    /// b_h for 0 <= h <= H; b_{-h} = b_h
    b: Vec<f64>,
}

impl TrigApprox {
    pub fn h_max(&self) -> u64 {
        self.h_max
    }

    /// a_h for 1 <= |h| <= H.
    pub fn a(&self, h: i64) -> Complex64 {
        let m = h.unsigned_abs();
        assert!(m >= 1 && m <= self.h_max, "a_h index out of range");
        let v = self.a_im[(m - 1) as usize];
        Complex64::new(0.0, if h > 0 { v } else { -v })
    }

    /// b_h for |h| <= H.
    pub fn b(&self, h: i64) -> f64 {
        let m = h.unsigned_abs();
        assert!(m <= self.h_max, "b_h index out of range");
        self.b[m as usize]
    }

    /// Σ_{1<=|h|<=H} a_h e(ht); real-valued by the conjugate symmetry.
    pub fn main_sum(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for h in 1..=self.h_max {
            // a_h e(ht) + a_{-h} e(-ht) = -2·a_im·sin(2πht)
            s -= 2.0 * self.a_im[(h - 1) as usize] * (2.0 * std::f64::consts::PI * h as f64 * t).sin();
        }
        s
    }

    /// Σ_{|h|<=H} b_h e(ht); real and nonnegative (a Fejér kernel).
    pub fn majorant(&self, t: f64) -> f64 {
        let mut s = self.b[0];
        for h in 1..=self.h_max {
            s += 2.0 * self.b[h as usize] * (2.0 * std::f64::consts::PI * h as f64 * t).cos();
        }
        s
    }
}

/// The explicit Vaaler construction at level H:
/// a_h = -V(h/(H+1))/(2πih) with V(t) = πt(1-t)cot(πt) + t, and
/// b_h = (1 - |h|/(H+1))/(2H+2).
pub fn vaaler_approx(h_max: u64) -> TrigApprox {
    assert!(h_max >= 1, "vaaler level must be >= 1");
    let hp1 = (h_max + 1) as f64;
    let mut a_im = Vec::with_capacity(h_max as usize);
    for h in 1..=h_max {
        let t = h as f64 / hp1;
        let v = std::f64::consts::PI * t * (1.0 - t) / (std::f64::consts::PI * t).tan() + t;
        // -V/(2πih) = i·V/(2πh)
        a_im.push(v / (2.0 * std::f64::consts::PI * h as f64));
    }
    let mut b = Vec::with_capacity(h_max as usize + 1);
    for h in 0..=h_max {
        b.push((1.0 - h as f64 / hp1) / (2.0 * hp1));
    }
    TrigApprox { h_max, a_im, b }
}

/// Summary of a dense-grid check of the two Vaaler inequalities.
#[derive(Debug, Clone, Copy)]
pub struct VaalerGridReport {
    pub h: u64,
    pub grid: usize,
    /// grid points where |ψ - Σ a_h e(ht)| exceeds the majorant (beyond 1e-12)
    pub violations: usize,
    /// max |ψ - Σ a_h e(ht)| over points at distance >= 1/(H+1) from the
    /// jump (inside that window the sawtooth jump forces error ~ 1/2 for
    /// every trigonometric polynomial; the majorant covers it there)
    pub max_err_outside_jump: f64,
    /// max |Im Σ b_h e(ht)| from the complex-path evaluation
    pub max_majorant_imag: f64,
    /// min Re Σ b_h e(ht)
    pub majorant_min: f64,
}

impl VaalerGridReport {
    /// The bound the outside-jump error is held to: 1.1/(H+1).
    pub fn a_sum_bound(&self) -> f64 {
        1.1 / (self.h as f64 + 1.0)
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
            && self.max_err_outside_jump <= self.a_sum_bound()
            && self.max_majorant_imag <= 1e-12
            && self.majorant_min >= -1e-12
    }
}

/// Evaluate both Vaaler inequalities on the uniform grid t = k/grid,
/// computing the majorant through the full complex sum so its realness
/// and nonnegativity are observed rather than assumed.
pub fn vaaler_grid_check(h_max: u64, grid: usize) -> VaalerGridReport {
    let v = vaaler_approx(h_max);
    let mut violations = 0usize;
    let mut max_err_outside = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut maj_min = f64::INFINITY;
    let jump_window = 1.0 / (h_max as f64 + 1.0);
    for k in 0..grid {
        let t = k as f64 / grid as f64;
        let err = (sawtooth(t) - v.main_sum(t)).abs();
        let mut maj = Complex64::new(v.b(0), 0.0);
        for hh in 1..=h_max {
            let w = e((hh as f64 * t).fract());
            maj += v.b(hh as i64) * (w + w.conj());
        }
        max_imag = max_imag.max(maj.im.abs());
        maj_min = maj_min.min(maj.re);
        if err > maj.re + 1e-12 {
            violations += 1;
        }
        let dist = t.min(1.0 - t);
        if dist >= jump_window {
            max_err_outside = max_err_outside.max(err);
        }
    }
    VaalerGridReport {
        h: h_max,
        grid,
        violations,
        max_err_outside_jump: max_err_outside,
        max_majorant_imag: max_imag,
        majorant_min: maj_min,
    }
}

/// Exact divisor-in-Beatty count against the density main term N/(αd).
#[derive(Debug, Clone, Copy)]
pub struct DivisorBeattyReport {
    pub d: u64,
    pub n: u64,
    pub count: u64,
    pub main: f64,
    pub err: f64,
}

/// #{n <= N : d | n, n ∈ B_{α,β}} via exact membership of each multiple.
pub fn divisor_beatty_error(d: u64, n: u64, params: &BeattyParams) -> Result<DivisorBeattyReport> {
    if d < 1 || n < 1 {
        return Err(Error::usage("divisor diagnostic needs d >= 1 and N >= 1"));
    }
    let mut count = 0u64;
    let mut m = d;
    while m <= n {
        if params.contains(m)? {
            count += 1;
        }
        m += d;
    }
    let main = n as f64 / (params.alpha().to_f64() * d as f64);
    Ok(DivisorBeattyReport { d, n, count, main, err: count as f64 - main })
}
