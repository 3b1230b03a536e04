//! The `seqselect` command line.
//!
//! Every command is deterministic given its flags; the default seed is
//! [`DEFAULT_SEED`]. Exit codes: 0 success, 1 a checked property failed or a
//! run could not complete, 2 bad configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{
    self, defect_at, estimate_b, f_approx, kstar_from_f, solve_xn, verify_lower_comparison,
    verify_upper_comparison, ComparisonReport, DEFAULT_TOL, ZETA_BOUND,
};
use crate::dp::{self, build_table, Mode, ValueTable};
use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::iid::{self, IidValueGrid, DEFAULT_GRID};
use crate::sim::{self, monte_carlo, Policy, DEFAULT_SEED};

/// Smallest `n` with `s(n) > sqrt(2n)`.
pub const EXPECTED_CROSSOVER: usize = 175;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "seqselect", version, about = "Optimal online selection of an increasing subsequence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write s(n) with maximizers, sqrt(2n) and f(n).
    Table(RunConfig),
    /// Find the first n with s(n) > sqrt(2n).
    Crossover(RunConfig),
    /// Check that the maximizer for f stays within sqrt(2n) +/- 2.
    Kstar(RunConfig),
    /// Residuals s(n) - f(n) at log-spaced n.
    Residuals(RunConfig),
    /// Bracket s(n) with the upper and lower comparison checks.
    CompareLemmas(RunConfig),
    /// Simulate the optimal policy.
    Simulate(RunConfig),
    /// Simulate the randomized reduction driven by the i.i.d. policy.
    Reduce(RunConfig),
    /// Grid values of the i.i.d. problem with refinement error bars.
    Iid(RunConfig),
    /// Longest increasing subsequence of random permutations.
    Lis(RunConfig),
    /// Defect of f in the recursion and the constant B.
    Defect(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float64,
    ExactRational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float64 => Mode::Float64,
            ModeArg::ExactRational => Mode::ExactRational,
        }
    }
}

/// Flags shared by every command. Unset sizes fall back to per-command
/// defaults.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Problem size (`--n` and `--n-max` are synonyms).
    #[arg(long = "n-max", visible_alias = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long = "grid-size", default_value_t = DEFAULT_GRID)]
    pub grid_size: usize,
    /// Write tabular output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Value-table cache file, read if present and written otherwise.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "float64")]
    pub mode: ModeArg,
    /// Worker thread cap; defaults to available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Gzip files written through --output and --cache.
    #[arg(long)]
    pub compress: bool,
    /// simulate: dump the trace of replicate 0 as CSV `position,value`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// iid: export the full grid as CSV `m,j,y,v`.
    #[arg(long)]
    pub export_grid: Option<PathBuf>,
    /// iid: add the exploratory column (sqrt(2n) - shat(n)) / ln n.
    #[arg(long)]
    pub exploratory: bool,
    /// crossover: use f(n) in place of s(n).
    #[arg(long)]
    pub with_f: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: None,
            replicates: None,
            seed: DEFAULT_SEED,
            grid_size: DEFAULT_GRID,
            output: None,
            format: Format::Csv,
            cache: None,
            mode: ModeArg::Float64,
            threads: None,
            compress: false,
            trace: None,
            export_grid: None,
            exploratory: false,
            with_f: false,
        }
    }
}

impl RunConfig {
    fn size(&self, default: usize) -> Result<usize> {
        match self.n {
            Some(0) => Err(Error::Config("n must be positive".into())),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    fn reps(&self, default: usize) -> Result<usize> {
        match self.replicates {
            Some(0) => Err(Error::Config("replicates must be positive".into())),
            Some(r) => Ok(r),
            None => Ok(default),
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A checked property did not hold.
    Failed(String),
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Primary output goes to `out`, diagnostics to `err`.
pub fn run_with_args<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match run(&cli.command, out, err) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Failed(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            EXIT_FAILED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Capacity { .. } => EXIT_CONFIG,
                _ => EXIT_FAILED,
            }
        }
    }
}

pub fn main() -> i32 {
    run_with_args(std::env::args_os(), &mut io::stdout(), &mut io::stderr())
}

pub fn run(command: &Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let config = match command {
        Command::Table(c)
        | Command::Crossover(c)
        | Command::Kstar(c)
        | Command::Residuals(c)
        | Command::CompareLemmas(c)
        | Command::Simulate(c)
        | Command::Reduce(c)
        | Command::Iid(c)
        | Command::Lis(c)
        | Command::Defect(c) => c,
    };
    let mut work = move || match command {
        Command::Table(c) => cmd_table(c, out, err),
        Command::Crossover(c) => cmd_crossover(c, out),
        Command::Kstar(c) => cmd_kstar(c, out, err),
        Command::Residuals(c) => cmd_residuals(c, out, err),
        Command::CompareLemmas(c) => cmd_compare_lemmas(c, out, err),
        Command::Simulate(c) => cmd_simulate(c, out),
        Command::Reduce(c) => cmd_reduce(c, out),
        Command::Iid(c) => cmd_iid(c, out),
        Command::Lis(c) => cmd_lis(c, out, err),
        Command::Defect(c) => cmd_defect(c, out, err),
    };
    match config.threads {
        Some(0) => Err(Error::Config("threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Writes `text` to `--output` (gzipped with `--compress`) or to `out`.
fn emit(config: &RunConfig, text: &str, out: &mut (dyn Write + Send)) -> Result<()> {
    match &config.output {
        Some(path) => write_file(path, text, config.compress),
        None => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str, compress: bool) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if compress {
        let mut gz = GzEncoder::new(file, Compression::default());
        gz.write_all(text.as_bytes())?;
        gz.finish()?.flush()?;
    } else {
        let mut file = file;
        file.write_all(text.as_bytes())?;
        file.flush()?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Loads the table from `--cache` when it covers `n_max`, otherwise builds
/// it (and refreshes the cache). A cache that fails validation is an error.
pub fn obtain_table(config: &RunConfig, n_max: usize, err: &mut (dyn Write + Send)) -> Result<ValueTable> {
    let mode: Mode = config.mode.into();
    if let Some(path) = &config.cache {
        if path.exists() && mode == Mode::Float64 {
            let cached = dp::load_table(path)?;
            if cached.n_max() >= n_max {
                writeln!(err, "loaded table n_max={} from {}", cached.n_max(), path.display())?;
                return Ok(cached);
            }
        }
    }
    let table = build_table(n_max, mode)?;
    if let Some(path) = &config.cache {
        dp::save_table(path, &table, config.compress)?;
        writeln!(err, "wrote table n_max={} to {}", table.n_max(), path.display())?;
    }
    Ok(table)
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    s: f64,
    kstar: usize,
    sqrt2n: f64,
    f: f64,
}

pub fn cmd_table(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config
        .n
        .ok_or_else(|| Error::Config("table needs --n-max".into()))
        .and_then(|_| config.size(1))?;
    let table = obtain_table(config, n_max, err)?;
    let rows: Vec<TableRow> = (1..=n_max)
        .map(|n| TableRow {
            n,
            s: table.value(n),
            kstar: table.kstar(n).unwrap_or(0),
            sqrt2n: (2.0 * n as f64).sqrt(),
            f: f_approx(n as u64).expect("n >= 1"),
        })
        .collect();
    let text = match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut text = String::from("n,s,kstar,sqrt2n,f\n");
            for r in &rows {
                text.push_str(&format!("{},{},{},{},{}\n", r.n, sig17(r.s), r.kstar, sig17(r.sqrt2n), sig17(r.f)));
            }
            text
        }
    };
    emit(config, &text, out)?;
    Ok(Status::Ok)
}

/// Smallest `n <= values.len() - 1` with `values[n] > sqrt(2n)`.
pub fn first_crossing(value: impl Fn(usize) -> f64, n_max: usize) -> Option<usize> {
    (1..=n_max).find(|&n| value(n) > (2.0 * n as f64).sqrt())
}

pub fn cmd_crossover(config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config.size(1000)?;
    if config.with_f {
        let found = first_crossing(|n| f_approx(n as u64).expect("n >= 1"), n_max);
        return Ok(match found {
            Some(n) => {
                writeln!(out, "{n}")?;
                Status::Ok
            }
            None => Status::Failed(format!("f(n) <= sqrt(2n) for all n <= {n_max}")),
        });
    }
    let table = build_table(n_max, config.mode.into())?;
    match first_crossing(|n| table.value(n), n_max) {
        Some(n) => {
            writeln!(out, "{n}")?;
            if n == EXPECTED_CROSSOVER {
                Ok(Status::Ok)
            } else {
                Ok(Status::Failed(format!("crossover at {n}, expected {EXPECTED_CROSSOVER}")))
            }
        }
        None => Ok(Status::Failed(format!("s(n) <= sqrt(2n) for all n <= {n_max}"))),
    }
}

#[derive(Serialize)]
struct KstarRow {
    n: usize,
    kstar_f: usize,
    x_n: f64,
    r_n: f64,
    kstar_dp: Option<usize>,
    in_window: bool,
}

pub fn cmd_kstar(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config.size(1_000_000)?;
    if n_max < 2 {
        return Err(Error::Config("kstar needs --n-max >= 2".into()));
    }
    let table = build_table(n_max + 1, Mode::Float64)?;
    let ns = asymptotics::dense_then_log(2, 10_000.min(n_max), n_max, 200);
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let k = kstar_from_f(n as u64)?;
        let root = solve_xn(n as u64, DEFAULT_TOL)?;
        let r2n = (2.0 * n as f64).sqrt();
        rows.push(KstarRow {
            n,
            kstar_f: k,
            x_n: root.x_n,
            r_n: k as f64 - r2n,
            kstar_dp: table.maximizer(n),
            in_window: (k as f64) >= r2n - 2.0 && (k as f64) <= r2n + 2.0,
        });
    }
    let inside = rows.iter().filter(|r| r.in_window).count();
    writeln!(err, "{inside}/{} points inside sqrt(2n) +/- 2", rows.len())?;
    let text = match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut text = String::from("n,kstar_f,x_n,r_n,kstar_dp,in_window\n");
            for r in &rows {
                let dp = r.kstar_dp.map(|k| k.to_string()).unwrap_or_default();
                text.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.kstar_f, sig17(r.x_n), sig17(r.r_n), dp, r.in_window));
            }
            text
        }
    };
    emit(config, &text, out)?;
    Ok(if inside == rows.len() {
        Status::Ok
    } else {
        Status::Failed(format!("{} points outside the window", rows.len() - inside))
    })
}

#[derive(Serialize)]
struct ScanRow {
    n: usize,
    s: f64,
    f: f64,
    residual: f64,
    defect: f64,
    kstar_dp: Option<usize>,
    kstar_f: Option<usize>,
}

fn scan_rows(table: &ValueTable, ns: &[usize]) -> Result<Vec<ScanRow>> {
    ns.iter()
        .map(|&n| {
            let f = f_approx(n as u64)?;
            Ok(ScanRow {
                n,
                s: table.value(n),
                f,
                residual: table.value(n) - f,
                defect: defect_at(n)?,
                kstar_dp: table.maximizer(n),
                kstar_f: if n >= 2 { Some(kstar_from_f(n as u64)?) } else { None },
            })
        })
        .collect()
}

fn scan_text(config: &RunConfig, rows: &[ScanRow]) -> Result<String> {
    Ok(match config.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let opt = |k: Option<usize>| k.map(|k| k.to_string()).unwrap_or_default();
            let mut text = String::from("n,s,f,residual,defect,kstar_dp,kstar_f\n");
            for r in rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.n,
                    sig17(r.s),
                    sig17(r.f),
                    sig17(r.residual),
                    sig17(r.defect),
                    opt(r.kstar_dp),
                    opt(r.kstar_f)
                ));
            }
            text
        }
    })
}

pub fn cmd_residuals(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config.size(1_000_000)?;
    let table = obtain_table(config, n_max, err)?;
    let ns = asymptotics::log_spaced(1, n_max, 20);
    let rows = scan_rows(&table, &ns)?;
    let scan = asymptotics::residual_scan(&table, &ns)?;
    writeln!(
        err,
        "residual range [{:.6}, {:.6}], spread {:.6}, all negative: {}",
        scan.min_residual(),
        scan.max_residual(),
        scan.spread(),
        scan.max_residual() < 0.0
    )?;
    emit(config, &scan_text(config, &rows)?, out)?;
    Ok(Status::Ok)
}

pub fn cmd_defect(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config.size(100_000)?;
    let scan = asymptotics::defect_scan(n_max)?;
    writeln!(err, "B estimate {:.12} attained at n = {}", scan.b_estimate, scan.argmax_n)?;
    let table = obtain_table(config, n_max, err)?;
    let ns = asymptotics::log_spaced(1, n_max, 20);
    let rows = scan_rows(&table, &ns)?;
    emit(config, &scan_text(config, &rows)?, out)?;
    Ok(Status::Ok)
}

pub fn cmd_compare_lemmas(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n_max = config.size(100_000)?.max(10);
    let b = estimate_b(n_max)?;
    let table = obtain_table(config, n_max, err)?;
    let f = |n: usize| f_approx(n as u64).expect("n >= 1");
    let delta = |n: usize| b * (n as f64).powf(-1.5);
    let upper = verify_upper_comparison(f, delta, &table)?;
    let lower = verify_lower_comparison(f, delta, &table)?;
    let both = ComparisonReport::combine(&upper, &lower, &table)?;
    writeln!(
        err,
        "B = {b:.12}; upper hypothesis failures {}, lower hypothesis failures {}; bracket violations {}",
        upper.hypothesis_failures.len(),
        lower.hypothesis_failures.len(),
        both.conclusion_violations.len()
    )?;
    let text = match config.format {
        Format::Json => to_json(&json!({
            "n_max": n_max,
            "b_estimate": b,
            "zeta_bound": ZETA_BOUND * b,
            "upper_initial_condition": upper.initial_condition_holds,
            "lower_initial_condition": lower.initial_condition_holds,
            "upper_hypothesis_failures": upper.hypothesis_failures,
            "lower_hypothesis_failures": lower.hypothesis_failures,
            "conclusion_violations": both.conclusion_violations,
        }))?,
        Format::Csv => {
            let mut text = String::from("n,s,bracket_low,bracket_high,defect,delta,cumulative\n");
            for n in asymptotics::log_spaced(1, n_max, 20) {
                let defect = both.defect.get(n).copied().unwrap_or(f64::NAN);
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    n,
                    sig17(table.value(n)),
                    sig17(both.bracket_low[n]),
                    sig17(both.bracket_high[n]),
                    sig17(defect),
                    sig17(both.delta[n]),
                    sig17(both.cumulative[n])
                ));
            }
            text
        }
    };
    emit(config, &text, out)?;
    Ok(if both.conclusion_holds() {
        Status::Ok
    } else {
        Status::Failed(format!("s(n) leaves the bracket at n = {:?}", &both.conclusion_violations[..both.conclusion_violations.len().min(10)]))
    })
}

pub fn cmd_simulate(config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<Status> {
    let n = config.size(100)?;
    let reps = config.reps(100_000)?;
    let table = build_table(n, Mode::Float64)?;
    let report = monte_carlo(n, reps, config.seed, &Policy::Optimal(&table))?;
    if let Some(path) = &config.trace {
        let perm = sim::random_permutation(n, &mut sim::replicate_rng(config.seed, 0));
        let trace = sim::run_policy(&perm, &table)?;
        write_file(path, &trace.to_csv(), config.compress)?;
    }
    emit(config, &to_json(&report)?, out)?;
    Ok(Status::Ok)
}

pub fn cmd_reduce(config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<Status> {
    let n = config.size(100)?;
    let reps = config.reps(100_000)?;
    let grid = IidValueGrid::build(n, config.grid_size)?;
    let report = monte_carlo(n, reps, config.seed, &Policy::Reduction(&grid))?;
    emit(config, &to_json(&report)?, out)?;
    Ok(Status::Ok)
}

pub fn cmd_iid(config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<Status> {
    let n = config.size(500)?;
    let points = iid::shat_summary(n, config.grid_size)?;
    if let Some(path) = &config.export_grid {
        write_file(path, &IidValueGrid::build(n, config.grid_size)?.to_csv(), config.compress)?;
    }
    let text = match (config.format, config.exploratory) {
        (Format::Json, _) => to_json(&points)?,
        (Format::Csv, false) => iid::summary_csv(&points),
        (Format::Csv, true) => {
            // exploratory only: no claim that this ratio converges
            let mut text = String::from("n,shat,err_bar,c_ratio\n");
            for p in &points {
                let ratio = if p.n > 1 {
                    ((2.0 * p.n as f64).sqrt() - p.shat) / (p.n as f64).ln()
                } else {
                    f64::NAN
                };
                text.push_str(&format!("{},{},{},{}\n", p.n, sig17(p.shat), sig17(p.err_bar), sig17(ratio)));
            }
            text
        }
    };
    emit(config, &text, out)?;
    Ok(Status::Ok)
}

pub fn cmd_lis(config: &RunConfig, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<Status> {
    let n = config.size(10_000)?;
    let reps = config.reps(1000)?;
    let report = monte_carlo(n, reps, config.seed, &Policy::OfflineLis)?;
    writeln!(err, "mean / (2 sqrt n) = {:.6}", report.mean / (2.0 * (n as f64).sqrt()))?;
    emit(config, &to_json(&report)?, out)?;
    Ok(Status::Ok)
}
