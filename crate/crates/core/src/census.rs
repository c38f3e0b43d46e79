//! Segmented, parallel exact counting of the six census functions
//! C, A, N (all integers) and C*, A*, N* (members of the Beatty sequence)
//! up to x, with checkpointed output, CSV/JSON emission and resume.
//!
//! Workers share only the immutable config and base-prime table; results
//! are exact integer counts reduced associatively, so they are identical
//! for every worker count and segment size.

use std::io::{BufRead, Write};
use std::ops::Add;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{eval_series, SeriesClass};
use crate::arith::classify_parts;
use crate::beatty::{AlphaValue, BeattyParams};
use crate::error::{Error, Result};
use crate::sieve::{base_primes, SegmentFactors};

pub const MAX_CENSUS_X: u64 = 1_000_000_000;
pub const MIN_SEGMENT_SIZE: usize = 10_000;
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 18;

/// Exact counts at one checkpoint plus the elapsed wall time of this run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub x: u64,
    pub c: u64,
    pub a: u64,
    pub n: u64,
    pub c_star: u64,
    pub a_star: u64,
    pub n_star: u64,
    pub wall_s: f64,
}

impl CensusRow {
    /// The six counts, for exact comparisons that ignore timing.
    pub fn counts(&self) -> [u64; 6] {
        [self.c, self.a, self.n, self.c_star, self.a_star, self.n_star]
    }
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub x_max: u64,
    pub checkpoints: Vec<u64>,
    pub params: BeattyParams,
    pub segment_size: usize,
    pub workers: usize,
}

impl CensusConfig {
    /// Decade checkpoints `10^5, 10^6, ...` up to x_max, always ending at x_max.
    pub fn default_checkpoints(x_max: u64) -> Vec<u64> {
        let mut cps = Vec::new();
        let mut d = 100_000u64;
        while d < x_max {
            cps.push(d);
            d = d.saturating_mul(10);
        }
        cps.push(x_max);
        cps
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_max > MAX_CENSUS_X {
            return Err(Error::resource(format!(
                "x_max {} exceeds cap {MAX_CENSUS_X}",
                self.x_max
            )));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::usage("census needs at least one checkpoint"));
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::usage("checkpoints must be strictly ascending"));
        }
        if *self.checkpoints.last().unwrap() > self.x_max {
            return Err(Error::usage("checkpoints must not exceed x_max"));
        }
        if self.segment_size < MIN_SEGMENT_SIZE {
            return Err(Error::usage(format!(
                "segment_size must be >= {MIN_SEGMENT_SIZE}"
            )));
        }
        if self.workers < 1 || self.workers > 1024 {
            return Err(Error::usage("worker count must be in [1, 1024]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    c: u64,
    a: u64,
    n: u64,
    cs: u64,
    as_: u64,
    ns: u64,
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            c: self.c + o.c,
            a: self.a + o.a,
            n: self.n + o.n,
            cs: self.cs + o.cs,
            as_: self.as_ + o.as_,
            ns: self.ns + o.ns,
        }
    }
}

/// Run the census over all checkpoints.
pub fn run_census(config: &CensusConfig) -> Result<Vec<CensusRow>> {
    run_census_streaming(config, &[], |_| {})
}

/// Run the census, resuming after `resume` rows (which must be exact counts
/// at a strictly ascending prefix of the checkpoints), and handing each newly
/// completed row to `sink`.
pub fn run_census_streaming(
    config: &CensusConfig,
    resume: &[CensusRow],
    mut sink: impl FnMut(&CensusRow),
) -> Result<Vec<CensusRow>> {
    config.validate()?;
    for (row, ck) in resume.iter().zip(&config.checkpoints) {
        if row.x != *ck {
            return Err(Error::usage(format!(
                "resume row at x={} does not match checkpoint {ck}",
                row.x
            )));
        }
    }
    if resume.len() > config.checkpoints.len() {
        return Err(Error::usage("more resume rows than checkpoints"));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::resource(format!("worker pool: {e}")))?;

    let base = base_primes(config.x_max);
    let start = Instant::now();

    let mut rows: Vec<CensusRow> = resume.to_vec();
    let mut acc = match resume.last() {
        Some(r) => Counts { c: r.c, a: r.a, n: r.n, cs: r.c_star, as_: r.a_star, ns: r.n_star },
        None => Counts::default(),
    };
    let mut done_x = resume.last().map_or(0, |r| r.x);

    for &ck in config.checkpoints.iter().skip(resume.len()) {
        let interval = pool.install(|| census_interval(config, &base, done_x + 1, ck))?;
        acc = acc + interval;
        done_x = ck;
        let row = CensusRow {
            x: ck,
            c: acc.c,
            a: acc.a,
            n: acc.n,
            c_star: acc.cs,
            a_star: acc.as_,
            n_star: acc.ns,
            wall_s: start.elapsed().as_secs_f64(),
        };
        sink(&row);
        rows.push(row);
    }
    Ok(rows)
}

/// Exact counts over `[lo, hi]`, split into segments processed in parallel.
fn census_interval(config: &CensusConfig, base: &[u32], lo: u64, hi: u64) -> Result<Counts> {
    if lo > hi {
        return Ok(Counts::default());
    }
    let seg = config.segment_size as u64;
    let nseg = (hi - lo + 1).div_ceil(seg);
    (0..nseg)
        .into_par_iter()
        .map_init(
            || {
                (
                    SegmentFactors::new(config.segment_size),
                    vec![0u64; config.segment_size / 64 + 1],
                )
            },
            |(factors, bits), i| {
                let s_lo = lo + i * seg;
                let s_hi = (s_lo + seg - 1).min(hi);
                census_segment(config, base, s_lo, s_hi, factors, bits)
            },
        )
        .try_reduce(Counts::default, |a, b| Ok(a + b))
}

fn census_segment(
    config: &CensusConfig,
    base: &[u32],
    lo: u64,
    hi: u64,
    factors: &mut SegmentFactors,
    bits: &mut [u64],
) -> Result<Counts> {
    factors.load(lo, hi, base);

    for w in bits.iter_mut() {
        *w = 0;
    }
    mark_beatty_members(&config.params, lo, hi, bits)?;

    let mut counts = Counts::default();
    factors.for_each(lo, hi, |n, facs| {
        let class = classify_parts(facs);
        let idx = (n - lo) as usize;
        let member = bits[idx / 64] >> (idx % 64) & 1 == 1;
        let (cy, ab, ni) = (class.is_cyclic(), class.is_abelian(), class.is_nilpotent());
        counts.c += cy as u64;
        counts.a += ab as u64;
        counts.n += ni as u64;
        if member {
            counts.cs += cy as u64;
            counts.as_ += ab as u64;
            counts.ns += ni as u64;
        }
    });
    Ok(counts)
}

/// Set the bit of every Beatty member in `[lo, hi]` by enumerating terms:
/// one exact nth_term per member, ~(hi-lo)/α work instead of hi-lo.
fn mark_beatty_members(
    params: &BeattyParams,
    lo: u64,
    hi: u64,
    bits: &mut [u64],
) -> Result<()> {
    let beta = params.beta();
    let (bn, bd) = (*beta.numer() as i128, *beta.denom() as i128);
    // first r with term >= lo: bracket the floor estimate, then fix up exactly
    let est = crate::beatty::floor_div_alpha(
        num_rational::Rational64::new(
            i64::try_from(lo as i128 * bd - bn).map_err(|_| {
                Error::usage("beta denominator too large for this range".to_string())
            })?,
            bd as i64,
        ),
        params.alpha(),
    )?;
    let mut r = est.max(1) as u64;
    while r > 1 && params.nth_term(r - 1)? >= lo as i64 {
        r -= 1;
    }
    while params.nth_term(r)? < lo as i64 {
        r += 1;
    }
    loop {
        let t = params.nth_term(r)?;
        if t as i128 > hi as i128 {
            break;
        }
        debug_assert!(t >= lo as i64);
        let idx = (t as u64 - lo) as usize;
        bits[idx / 64] |= 1 << (idx % 64);
        r += 1;
    }
    Ok(())
}

/// One line of the ratio-convergence report.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub x: u64,
    pub c_ratio: f64,
    pub a_ratio: f64,
    pub n_ratio: f64,
    pub c_dev: f64,
    pub a_dev: f64,
    pub n_dev: f64,
    /// Flagged when a zero denominator excluded this row from the comparison.
    pub excluded: bool,
}

#[derive(Debug, Clone)]
pub struct RatioReport {
    pub inv_alpha: f64,
    pub rows: Vec<RatioRow>,
}

/// Ratios of starred to unstarred counts against the density 1/α.
pub fn ratio_report(rows: &[CensusRow], alpha: &AlphaValue) -> Result<RatioReport> {
    if rows.is_empty() {
        return Err(Error::usage("ratio report needs at least one census row"));
    }
    let inv_alpha = 1.0 / alpha.to_f64();
    let out = rows
        .iter()
        .map(|r| {
            if r.c == 0 || r.a == 0 || r.n == 0 {
                return RatioRow {
                    x: r.x,
                    c_ratio: f64::NAN,
                    a_ratio: f64::NAN,
                    n_ratio: f64::NAN,
                    c_dev: f64::NAN,
                    a_dev: f64::NAN,
                    n_dev: f64::NAN,
                    excluded: true,
                };
            }
            let c_ratio = r.c_star as f64 / r.c as f64;
            let a_ratio = r.a_star as f64 / r.a as f64;
            let n_ratio = r.n_star as f64 / r.n as f64;
            RatioRow {
                x: r.x,
                c_ratio,
                a_ratio,
                n_ratio,
                c_dev: (c_ratio - inv_alpha).abs(),
                a_dev: (a_ratio - inv_alpha).abs(),
                n_dev: (n_ratio - inv_alpha).abs(),
                excluded: false,
            }
        })
        .collect();
    Ok(RatioReport { inv_alpha, rows: out })
}

/// One line comparing an exact count with the truncated asymptotic series.
#[derive(Debug, Clone)]
pub struct TheoremRow {
    pub class: SeriesClass,
    pub starred: bool,
    pub order_used: usize,
    pub observed: u64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Compare a census row against the series main terms: the unstarred counts
/// against the α = 1 prediction and the starred counts against the 1/α one.
/// Emits ratios only; at desk scale the series has not begun to converge,
/// so nothing is asserted here.
pub fn theorem_comparison(
    row: &CensusRow,
    order: usize,
    alpha: &AlphaValue,
) -> Result<Vec<TheoremRow>> {
    let classes = [
        SeriesClass::Cyclic,
        SeriesClass::AbelianMinusCyclic,
        SeriesClass::NilpotentMinusAbelian,
    ];
    let max_any = classes.iter().map(|c| c.max_order()).max().unwrap();
    if order > max_any {
        return Err(Error::usage(format!(
            "order {order} beyond printed coefficients (max {max_any})"
        )));
    }
    let af = alpha.to_f64();
    let mut out = Vec::with_capacity(6);
    for starred in [false, true] {
        let a = if starred { af } else { 1.0 };
        for class in classes {
            let observed = match (class, starred) {
                (SeriesClass::Cyclic, false) => row.c,
                (SeriesClass::AbelianMinusCyclic, false) => row.a - row.c,
                (SeriesClass::NilpotentMinusAbelian, false) => row.n - row.a,
                (SeriesClass::Cyclic, true) => row.c_star,
                (SeriesClass::AbelianMinusCyclic, true) => row.a_star - row.c_star,
                (SeriesClass::NilpotentMinusAbelian, true) => row.n_star - row.a_star,
            };
            let order_used = order.min(class.max_order());
            let predicted = eval_series(class, row.x, order_used, a)?;
            out.push(TheoremRow {
                class,
                starred,
                order_used,
                observed,
                predicted,
                ratio: observed as f64 / predicted,
            });
        }
    }
    Ok(out)
}

pub const CENSUS_CSV_HEADER: &str = "x,c,a,n,c_star,a_star,n_star,alpha,beta,wall_s";

fn beta_f64(params: &BeattyParams) -> f64 {
    let b = params.beta();
    *b.numer() as f64 / *b.denom() as f64
}

/// Write one row in the checkpoint CSV format.
pub fn write_census_csv_row(
    row: &CensusRow,
    params: &BeattyParams,
    w: &mut impl Write,
) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{:.3}",
        row.x,
        row.c,
        row.a,
        row.n,
        row.c_star,
        row.a_star,
        row.n_star,
        params.alpha().to_f64(),
        beta_f64(params),
        row.wall_s
    )?;
    Ok(())
}

pub fn write_census_csv(
    rows: &[CensusRow],
    params: &BeattyParams,
    w: &mut impl Write,
) -> Result<()> {
    writeln!(w, "{CENSUS_CSV_HEADER}")?;
    for row in rows {
        write_census_csv_row(row, params, w)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow {
    x: u64,
    c: u64,
    a: u64,
    n: u64,
    c_star: u64,
    a_star: u64,
    n_star: u64,
    alpha: f64,
    beta: f64,
    wall_s: f64,
}

/// JSON mirror of the CSV rows (identical fields).
pub fn write_census_json(
    rows: &[CensusRow],
    params: &BeattyParams,
    w: &mut impl Write,
) -> Result<()> {
    let alpha = params.alpha().to_f64();
    let beta = beta_f64(params);
    let out: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            x: r.x,
            c: r.c,
            a: r.a,
            n: r.n,
            c_star: r.c_star,
            a_star: r.a_star,
            n_star: r.n_star,
            alpha,
            beta,
            wall_s: r.wall_s,
        })
        .collect();
    serde_json::to_writer_pretty(&mut *w, &out)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(w)?;
    Ok(())
}

/// A checkpoint row read back from CSV, with the alpha/beta columns.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub row: CensusRow,
    pub alpha: f64,
    pub beta: f64,
}

/// Parse a checkpoint file written by [`write_census_csv`].
pub fn read_census_csv(r: impl BufRead) -> Result<Vec<CsvRow>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::usage("empty checkpoint file"))??;
    if header.trim() != CENSUS_CSV_HEADER {
        return Err(Error::usage(format!(
            "unexpected checkpoint header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 10 {
            return Err(Error::usage(format!("bad checkpoint line {line:?}")));
        }
        let f = |i: usize| -> Result<u64> {
            parts[i]
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("bad checkpoint field {:?}", parts[i])))
        };
        let g = |i: usize| -> Result<f64> {
            parts[i]
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("bad checkpoint field {:?}", parts[i])))
        };
        out.push(CsvRow {
            row: CensusRow {
                x: f(0)?,
                c: f(1)?,
                a: f(2)?,
                n: f(3)?,
                c_star: f(4)?,
                a_star: f(5)?,
                n_star: f(6)?,
                wall_s: g(9)?,
            },
            alpha: g(7)?,
            beta: g(8)?,
        });
    }
    Ok(out)
}
