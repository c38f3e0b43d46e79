//! Command-line front end tying the modules together. Emits CSV (and a JSON
//! mirror for the census) with headers always present; `.` decimal point,
//! `,` separator, UTF-8.
//!
//! Exit status: 0 success, 2 usage error, 3 precision/resource error.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{
    cutoff_params, eval_series, mertens_product, mertens_sum, rough_beatty_count, SeriesClass,
};
use crate::arith::{classify, factorize_any};
use crate::beatty::{parse_beta, AlphaValue, BeattyParams};
use crate::census::{
    ratio_report, read_census_csv, run_census_streaming, theorem_comparison, write_census_csv_row,
    write_census_json, CensusConfig, CensusRow, DEFAULT_SEGMENT_SIZE, CENSUS_CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::expsum::{
    divisor_beatty_error, erdos_turan, minsum_type1, minsum_type2, multiplicative_expsum,
    vaaler_grid_check, FSpec, UnitSequence,
};

pub const THREADS_ENV: &str = "BEATTY_CENSUS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "beatty-census",
    version,
    about = "Censuses of cyclic, abelian and nilpotent numbers in Beatty sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify integers (cyclic / abelian-not-cyclic / nilpotent-not-abelian / not-nilpotent)
    Classify {
        /// integers to classify (64-bit, >= 1)
        ns: Vec<String>,
    },
    /// Exact census of C, A, N and C*, A*, N* up to x with checkpoints
    Census(Box<CensusArgs>),
    /// Beatty sequence utilities
    #[command(subcommand)]
    Beatty(BeattyCmd),
    /// Truncated asymptotic main terms for the census classes
    Asympt(AsymptArgs),
    /// Numerical diagnostics (et, vaaler, minsum, divisor, expsum, mertens, rough)
    #[command(subcommand)]
    Diagnose(DiagnoseCmd),
}

#[derive(Args, Debug, Default)]
struct CensusArgs {
    /// slope spec: sqrt:D | quad:a,b,c,d | e | pi
    #[arg(long)]
    alpha: Option<String>,
    /// offset: num/den or decimal
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// census bound (scientific notation accepted)
    #[arg(long)]
    xmax: Option<String>,
    /// comma-separated checkpoint list; default decades up to xmax
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    segment_size: Option<String>,
    /// worker count (default: env BEATTY_CENSUS_THREADS, then all cores)
    #[arg(long)]
    workers: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// checkpoint CSV from a previous run; continues after its last row
    #[arg(long)]
    resume: Option<PathBuf>,
    /// key = value file merged under explicit flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    /// also print the series comparison table at this order (stderr)
    #[arg(long)]
    compare_order: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum BeattyCmd {
    /// Members of the sequence in [1, max]
    List {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        max: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact membership tests
    Contains {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        ns: Vec<String>,
    },
    /// Exact terms ⌊α·r + β⌋
    Nth {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        rs: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct AsymptArgs {
    /// cyclic | abelian-minus-cyclic | nilpotent-minus-abelian
    #[arg(long)]
    class: String,
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 0)]
    order: usize,
    /// alpha spec, or the literal 1 for the unrestricted prediction
    #[arg(long, default_value = "1")]
    alpha: String,
}

#[derive(Subcommand, Debug)]
enum DiagnoseCmd {
    /// Erdős–Turán inequality on the Kronecker sequence of alpha
    Et {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "10000")]
        n: String,
        #[arg(long = "J", default_value = "100")]
        j: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Vaaler approximation: pointwise grid check of both inequalities
    Vaaler {
        #[arg(long = "H")]
        h: String,
        #[arg(long, default_value = "100000")]
        grid: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// min-sum evaluations (kind 1: min{x/n, 1/‖αn‖}; kind 2: min{x, 1/‖αn+β‖})
    Minsum {
        #[arg(long, default_value_t = 1)]
        kind: u8,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        n: String,
        /// exponent slack in the reference column
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// divisor-in-Beatty counts for d = 1..=dmax
    Divisor {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value = "100")]
        dmax: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// multiplicative exponential sums over an N grid
    Expsum {
        /// one | mu | rough:Z | sfrough:Y[,P]
        #[arg(long)]
        f: String,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        j: String,
        #[arg(long, default_value = "10000,100000,1000000")]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mertens sum and product across decades up to xmax
    Mertens {
        #[arg(long)]
        xmax: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// rough-number count in the sequence with both predictions
    Rough {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        /// count the alternative reading: every prime factor >= y and in B
        #[arg(long)]
        prime_membership: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parse a count that may use scientific notation (`1e8`).
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::usage(format!("bad integer {s:?}")))?;
    if !f.is_finite() || f < 0.0 || f.fract() != 0.0 || f > 9.0e15 {
        return Err(Error::usage(format!(
            "{s:?} is not a nonnegative integer representable exactly"
        )));
    }
    Ok(f as u64)
}

fn parse_count_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_count)
        .collect()
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Classify { ns } => cmd_classify(&ns),
        Cmd::Census(args) => cmd_census(*args),
        Cmd::Beatty(cmd) => cmd_beatty(cmd),
        Cmd::Asympt(args) => cmd_asympt(args),
        Cmd::Diagnose(cmd) => cmd_diagnose(cmd),
    }
}

fn cmd_classify(ns: &[String]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::usage("classify needs at least one integer"));
    }
    let parsed: Vec<u64> = ns
        .iter()
        .map(|s| {
            let v = parse_count(s)?;
            if v < 1 {
                return Err(Error::usage(format!("classify needs n >= 1, got {s:?}")));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "n,class,is_cyclic,is_abelian,is_nilpotent")?;
    for n in parsed {
        let class = classify(&factorize_any(n)?);
        writeln!(
            out,
            "{n},{},{},{},{}",
            class.label(),
            class.is_cyclic(),
            class.is_abelian(),
            class.is_nilpotent()
        )?;
    }
    Ok(())
}

fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::usage(format!("{}:{}: expected key = value", path.display(), i + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn default_workers() -> usize {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn cmd_census(args: CensusArgs) -> Result<()> {
    let file_cfg = match &args.config {
        Some(p) => read_config_file(p)?,
        None => HashMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file_cfg.get(key).cloned())
    };

    let alpha_spec = pick(&args.alpha, "alpha")
        .ok_or_else(|| Error::usage("census needs --alpha (or alpha in the config file)"))?;
    let alpha = AlphaValue::parse(&alpha_spec)?;
    let beta = parse_beta(&pick(&args.beta, "beta").unwrap_or_else(|| "0".into()))?;
    let x_max = parse_count(
        &pick(&args.xmax, "xmax")
            .ok_or_else(|| Error::usage("census needs --xmax (or xmax in the config file)"))?,
    )?;
    let checkpoints = match pick(&args.checkpoints, "checkpoints") {
        Some(s) => {
            let mut v = parse_count_list(&s)?;
            v.sort_unstable();
            v.dedup();
            v
        }
        None => CensusConfig::default_checkpoints(x_max),
    };
    let segment_size = match pick(&args.segment_size, "segment-size") {
        Some(s) => parse_count(&s)? as usize,
        None => DEFAULT_SEGMENT_SIZE,
    };
    let workers = match pick(&args.workers, "workers") {
        Some(s) => parse_count(&s)? as usize,
        None => default_workers(),
    };
    let format = pick(&args.format, "format").unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(Error::usage(format!("unknown format {format:?} (csv or json)")));
    }
    let output = args
        .output
        .clone()
        .or_else(|| file_cfg.get("output").map(PathBuf::from));

    let params = BeattyParams::new(alpha.clone(), beta);
    let config = CensusConfig { x_max, checkpoints, params, segment_size, workers };

    // resume: rows must match a checkpoint prefix and the same (alpha, beta)
    let resume_rows: Vec<CensusRow> = match &args.resume {
        None => Vec::new(),
        Some(p) => {
            let parsed = read_census_csv(BufReader::new(File::open(p)?))?;
            let af = alpha.to_f64();
            let bf = *beta.numer() as f64 / *beta.denom() as f64;
            let mut rows = Vec::new();
            for r in &parsed {
                if (r.alpha - af).abs() > 1e-9 || (r.beta - bf).abs() > 1e-9 {
                    return Err(Error::usage(format!(
                        "resume file {} was produced with different alpha/beta",
                        p.display()
                    )));
                }
                rows.push(r.row.clone());
            }
            for (row, ck) in rows.iter().zip(&config.checkpoints) {
                if row.x != *ck {
                    return Err(Error::usage(format!(
                        "resume row x={} does not match checkpoint {ck}",
                        row.x
                    )));
                }
            }
            if rows.len() > config.checkpoints.len() {
                return Err(Error::usage("resume file has more rows than checkpoints"));
            }
            rows
        }
    };

    let rows = if format == "csv" {
        let mut w = out_writer(output.as_deref())?;
        writeln!(w, "{CENSUS_CSV_HEADER}")?;
        for r in &resume_rows {
            write_census_csv_row(r, &config.params, &mut w)?;
        }
        w.flush()?;
        
        run_census_streaming(&config, &resume_rows, |row| {
            let _ = write_census_csv_row(row, &config.params, &mut w);
            let _ = w.flush();
        })?
    } else {
        let rows = run_census_streaming(&config, &resume_rows, |_| {})?;
        let mut w = out_writer(output.as_deref())?;
        write_census_json(&rows, &config.params, &mut w)?;
        w.flush()?;
        rows
    };

    // ratio report on stderr: x, ratios, 1/alpha, deviations
    let rep = ratio_report(&rows, &alpha)?;
    eprintln!("x,c_ratio,a_ratio,n_ratio,inv_alpha,c_dev,a_dev,n_dev,excluded");
    for r in &rep.rows {
        eprintln!(
            "{},{:.9},{:.9},{:.9},{:.9},{:.3e},{:.3e},{:.3e},{}",
            r.x, r.c_ratio, r.a_ratio, r.n_ratio, rep.inv_alpha, r.c_dev, r.a_dev, r.n_dev,
            r.excluded
        );
    }

    if let Some(order) = args.compare_order {
        if let Some(last) = rows.last() {
            let table = theorem_comparison(last, order, &alpha)?;
            eprintln!("class,starred,order,observed,predicted,ratio");
            for t in &table {
                eprintln!(
                    "{},{},{},{},{:.6e},{:.4}",
                    t.class.label(),
                    t.starred,
                    t.order_used,
                    t.observed,
                    t.predicted,
                    t.ratio
                );
            }
        }
    }
    Ok(())
}

fn cmd_beatty(cmd: BeattyCmd) -> Result<()> {
    match cmd {
        BeattyCmd::List { alpha, beta, max, output } => {
            let params = BeattyParams::new(AlphaValue::parse(&alpha)?, parse_beta(&beta)?);
            let max = parse_count(&max)?;
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "member")?;
            for m in params.iter_members(max) {
                writeln!(w, "{}", m?)?;
            }
            w.flush()?;
        }
        BeattyCmd::Contains { alpha, beta, ns } => {
            if ns.is_empty() {
                return Err(Error::usage("beatty contains needs at least one n"));
            }
            let params = BeattyParams::new(AlphaValue::parse(&alpha)?, parse_beta(&beta)?);
            let mut out = std::io::stdout().lock();
            writeln!(out, "n,contains")?;
            for s in &ns {
                let n = parse_count(s)?;
                writeln!(out, "{n},{}", params.contains(n)?)?;
            }
        }
        BeattyCmd::Nth { alpha, beta, rs } => {
            if rs.is_empty() {
                return Err(Error::usage("beatty nth needs at least one r"));
            }
            let params = BeattyParams::new(AlphaValue::parse(&alpha)?, parse_beta(&beta)?);
            let mut out = std::io::stdout().lock();
            writeln!(out, "r,term")?;
            for s in &rs {
                let r = parse_count(s)?;
                if r < 1 {
                    return Err(Error::usage("beatty nth needs r >= 1"));
                }
                writeln!(out, "{r},{}", params.nth_term(r)?)?;
            }
        }
    }
    Ok(())
}

fn cmd_asympt(args: AsymptArgs) -> Result<()> {
    let class = SeriesClass::parse(&args.class)?;
    let x = parse_count(&args.x)?;
    let alpha = if args.alpha.trim() == "1" {
        1.0
    } else {
        AlphaValue::parse(&args.alpha)?.to_f64()
    };
    let v = eval_series(class, x, args.order, alpha)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "class,x,order,alpha,prediction")?;
    writeln!(out, "{},{},{},{},{:.6e}", class.label(), x, args.order, alpha, v)?;
    Ok(())
}

fn cmd_diagnose(cmd: DiagnoseCmd) -> Result<()> {
    match cmd {
        DiagnoseCmd::Et { alpha, n, j, rho, sigma, output } => {
            let alpha = AlphaValue::parse(&alpha)?;
            let n = parse_count(&n)? as usize;
            let j = parse_count(&j)?;
            let seq = UnitSequence::kronecker(&alpha, n)?;
            let rep = erdos_turan(&seq, j, rho, sigma)?;
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "n,j,count,expected,actual_dev,bound,ok")?;
            writeln!(
                w,
                "{},{},{},{:.6},{:.6},{:.6},{}",
                rep.n,
                rep.j,
                rep.count_in,
                rep.expected,
                rep.actual_dev,
                rep.bound,
                rep.actual_dev <= rep.bound
            )?;
            w.flush()?;
        }
        DiagnoseCmd::Vaaler { h, grid, output } => {
            let h = parse_count(&h)?;
            if h < 1 {
                return Err(Error::usage("vaaler needs H >= 1"));
            }
            let grid = parse_count(&grid)? as usize;
            if grid < 10 {
                return Err(Error::usage("vaaler grid must have at least 10 points"));
            }
            let rep = vaaler_grid_check(h, grid);
            let mut w = out_writer(output.as_deref())?;
            writeln!(
                w,
                "h,grid,violations,max_err_outside_jump,a_bound,majorant_min,max_majorant_imag,pass"
            )?;
            writeln!(
                w,
                "{},{},{},{:.6e},{:.6e},{:.3e},{:.3e},{}",
                rep.h,
                rep.grid,
                rep.violations,
                rep.max_err_outside_jump,
                rep.a_sum_bound(),
                rep.majorant_min,
                rep.max_majorant_imag,
                rep.pass()
            )?;
            w.flush()?;
        }
        DiagnoseCmd::Minsum { kind, alpha, beta, x, n, epsilon, tau, output } => {
            let alpha = AlphaValue::parse(&alpha)?;
            let n = parse_count(&n)?;
            let e1 = 1.0 + epsilon;
            let e2 = 1.0 - 1.0 / (1.0 + tau) + epsilon;
            let (value, reference) = match kind {
                1 => (
                    minsum_type1(&alpha, x, n)?,
                    (n as f64).powf(e1) + x.powf(e2),
                ),
                2 => {
                    let params = BeattyParams::new(alpha, parse_beta(&beta)?);
                    (
                        minsum_type2(&params, x, n)?,
                        (n as f64).powf(e1) + (x * n as f64).powf(e2) + x,
                    )
                }
                other => return Err(Error::usage(format!("minsum kind must be 1 or 2, got {other}"))),
            };
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "kind,x,n,value,reference")?;
            writeln!(w, "{kind},{x},{n},{value:.6},{reference:.6}")?;
            w.flush()?;
        }
        DiagnoseCmd::Divisor { alpha, beta, dmax, n, output } => {
            let params = BeattyParams::new(AlphaValue::parse(&alpha)?, parse_beta(&beta)?);
            let dmax = parse_count(&dmax)?;
            let n = parse_count(&n)?;
            if dmax < 1 {
                return Err(Error::usage("divisor needs dmax >= 1"));
            }
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "j_or_d,N,observed,reference,flag")?;
            for d in 1..=dmax {
                let rep = divisor_beatty_error(d, n, &params)?;
                writeln!(
                    w,
                    "{d},{n},{},{:.6},{}",
                    rep.count,
                    rep.main,
                    if rep.err >= 0.0 { "above" } else { "below" }
                )?;
            }
            w.flush()?;
        }
        DiagnoseCmd::Expsum { f, alpha, j, grid, tau, output } => {
            let f = FSpec::parse(&f)?;
            let alpha = AlphaValue::parse(&alpha)?;
            let j = parse_count(&j)?;
            let grid = parse_count_list(&grid)?;
            let rows = multiplicative_expsum(&f, &alpha, j, &grid, tau)?;
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "j_or_d,N,observed,reference,flag")?;
            for r in &rows {
                writeln!(
                    w,
                    "{j},{},{:.6},{:.6},{}",
                    r.n,
                    r.magnitude,
                    r.reference,
                    if r.in_window { "in-window" } else { "outside-window" }
                )?;
            }
            w.flush()?;
        }
        DiagnoseCmd::Mertens { xmax, output } => {
            let xmax = parse_count(&xmax)?;
            if xmax < 3 {
                return Err(Error::usage("mertens needs xmax >= 3"));
            }
            if xmax > crate::analytic::MAX_MERTENS_X {
                return Err(Error::resource(format!(
                    "mertens xmax {xmax} exceeds cap {}",
                    crate::analytic::MAX_MERTENS_X
                )));
            }
            let mut xs = vec![];
            let mut d = 10u64;
            while d < xmax {
                xs.push(d);
                d *= 10;
            }
            xs.push(xmax);
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "X,observed,predicted,ratio")?;
            for &x in &xs {
                let r = mertens_sum(x)?;
                writeln!(w, "{x},{:.9},{:.9},{:.9}", r.observed, r.predicted, r.observed / r.predicted)?;
            }
            writeln!(w)?;
            writeln!(w, "X,observed,predicted,ratio")?;
            for &x in &xs {
                let r = mertens_product(x)?;
                writeln!(w, "{x},{:.9},{:.9},{:.9}", r.observed, r.predicted, r.observed / r.predicted)?;
            }
            w.flush()?;
        }
        DiagnoseCmd::Rough { x, y, alpha, beta, prime_membership, output } => {
            let params = BeattyParams::new(AlphaValue::parse(&alpha)?, parse_beta(&beta)?);
            let x = parse_count(&x)?;
            let rep = rough_beatty_count(x, y, &params, prime_membership)?;
            let mut w = out_writer(output.as_deref())?;
            writeln!(w, "X,observed,predicted,ratio")?;
            writeln!(
                w,
                "{x},{},{:.3},{:.6}",
                rep.count,
                rep.product_prediction,
                rep.count as f64 / rep.product_prediction
            )?;
            writeln!(w)?;
            writeln!(w, "X,observed,predicted,ratio")?;
            writeln!(
                w,
                "{x},{},{:.3},{:.6}",
                rep.count,
                rep.mertens_prediction,
                rep.count as f64 / rep.mertens_prediction
            )?;
            // iterated-log context for choosing y at this x
            if let Ok(c) = cutoff_params(x) {
                eprintln!("cutoffs at x={x}: y = {:.4}, z = {:.4}", c.y, c.z);
            }
            w.flush()?;
        }
    }
    Ok(())
}
