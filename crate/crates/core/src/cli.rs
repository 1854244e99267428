//! Command-line front end. Data goes to stdout (or `--out`), diagnostics to
//! stderr.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid spec or usage,
//! 3 dimension mismatch, 4 violation witness found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::concurrence::{concurrence_pure, spec_to_json, validate, ConcurrenceSpec, SpecForm, SpecJson};
use crate::convexroof::{convex_roof_estimate, flags_equality_check, MixedState, RoofConfig};
use crate::error::Error;
use crate::monotonicity::{
    default_kappa_grid, kappa_scan, positive_single_party, region_to_csv, search, single_element_counterexample,
    sufficient_criterion, tripartite_region, SearchConfig, ViolationWitness,
};
use crate::qstate::PureState;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID_SPEC: u8 = 2;
pub const EXIT_DIMENSION: u8 = 3;
pub const EXIT_WITNESS: u8 = 4;

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "CONCURRENCE_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "concurrence-lab",
    version,
    about = "Generalized multipartite concurrences and their LOCC monotonicity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence of a pure state.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Rewrite a spec in p or alpha form.
    Convert {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Form::Alpha)]
        to: Form,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check admissibility and normalization of a spec.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Sufficient criterion, analytic counterexamples and optional search.
    Check {
        #[arg(long)]
        spec: PathBuf,
        /// Run the numerical violation search.
        #[arg(long)]
        search: bool,
        /// Local dimensions for the search, comma separated (default qubits).
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Dims>,
        /// Restrict the search to one flag party (1-based).
        #[arg(long)]
        flag_party: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        /// Write the witness JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Violation search across the four-party kappa family.
    ScanKappa {
        /// `start:step:end` or a comma separated list.
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Dims>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the tripartite coefficient simplex.
    Region {
        #[arg(long, default_value_t = 30)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex-roof upper bound for a mixed state.
    Roof {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare a flagged mixture with its weighted parts.
    FlagsCheck {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rho1: PathBuf,
        #[arg(long)]
        rho2: PathBuf,
        #[arg(long)]
        p1: f64,
        /// 1-based.
        #[arg(long, default_value_t = 1)]
        flag_party: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    P,
    Alpha,
    Both,
}

impl From<Form> for SpecForm {
    fn from(f: Form) -> Self {
        match f {
            Form::P => SpecForm::P,
            Form::Alpha => SpecForm::Alpha,
            Form::Both => SpecForm::Both,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Evaluations per descent (search) or steps per restart (roof).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Violation threshold for the search.
    #[arg(long, default_value_t = 1e-7)]
    pub tolerance: f64,
}

impl RunArgs {
    fn search_config(&self, flag_party: Option<usize>) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            restarts: self.restarts.unwrap_or(d.restarts),
            max_iters: self.iters.unwrap_or(d.max_iters),
            seed: self.seed,
            flag_party,
            tolerance: self.tolerance,
        }
    }

    fn roof_config(&self, ensemble_size: Option<usize>) -> RoofConfig {
        let d = RoofConfig::default();
        RoofConfig {
            ensemble_size,
            restarts: self.restarts.unwrap_or(d.restarts),
            iters: self.iters.unwrap_or(d.iters),
            seed: self.seed,
        }
    }
}

/// Comma separated local dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Dims(pub Vec<usize>);

/// Values of `κ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if dims.iter().any(|&d| d < 2) {
        return Err("local dimensions must be >= 2".into());
    }
    Ok(Dims(dims))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if step <= 0.0 || end < start {
                return Err("grid needs step > 0 and end >= start".into());
            }
            let n = ((end - start) / step + 1e-9).floor() as usize;
            Ok(Grid((0..=n).map(|i| start + step * i as f64).collect()))
        }
        [_] => s.split(',').map(num).collect::<Result<_, _>>().map(Grid),
        _ => Err("expected start:step:end or a comma separated list".into()),
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn spec(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID_SPEC,
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_)
            | Error::NotPositive { .. }
            | Error::ZeroSpec
            | Error::NegativeRadicand(_)
            | Error::SpecNotSufficient => EXIT_INVALID_SPEC,
            Error::DimensionMismatch { .. } | Error::InvalidDims(_) => EXIT_DIMENSION,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Output {
    fn data(stdout: String) -> Self {
        Self {
            stdout,
            ..Default::default()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_spec(path: &Path) -> Result<ConcurrenceSpec, CliError> {
    let j: SpecJson = serde_json::from_str(&read(path)?).map_err(CliError::spec)?;
    j.to_spec().map_err(CliError::spec)
}

fn load_state(path: &Path) -> Result<PureState, CliError> {
    Ok(serde_json::from_str(&read(path)?).map_err(Error::from)?)
}

fn load_mixed(path: &Path) -> Result<MixedState, CliError> {
    Ok(serde_json::from_str(&read(path)?).map_err(Error::from)?)
}

/// Writes `data` to `out` when given, otherwise returns it for stdout.
fn emit(data: String, out: Option<&Path>) -> Result<Output, CliError> {
    match out {
        Some(p) => {
            fs::write(p, &data).map_err(Error::from)?;
            Ok(Output {
                stderr: format!("wrote {}\n", p.display()),
                ..Default::default()
            })
        }
        None => Ok(Output::data(data)),
    }
}

fn to_zero_based(flag_party: Option<usize>, n: usize) -> Result<Option<usize>, CliError> {
    match flag_party {
        None => Ok(None),
        Some(f) if f >= 1 && f <= n => Ok(Some(f - 1)),
        Some(f) => Err(CliError {
            code: EXIT_DIMENSION,
            message: format!("flag party {f} outside 1..={n}"),
        }),
    }
}

fn witness_report(w: &ViolationWitness, how: &str, out: Option<&Path>) -> Result<Output, CliError> {
    let json = w.to_json()?;
    let summary = format!(
        "violation found ({how}): gap = {:.12}, flag party {}, a = {:.12}, b = {:.12}\n",
        w.gap,
        w.flag_party + 1,
        w.a.re,
        w.b.re
    );
    let mut o = match out {
        Some(p) => {
            fs::write(p, json + "\n").map_err(Error::from)?;
            Output::data(summary)
        }
        None => Output::data(format!("{summary}{json}\n")),
    };
    o.code = EXIT_WITNESS;
    Ok(o)
}

/// Executes one parsed command.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Eval { spec, state } => {
            let spec = load_spec(spec)?;
            let psi = load_state(state)?;
            let c = concurrence_pure(&spec, &psi)?;
            Ok(Output::data(format!("{c:.12}\n")))
        }
        Command::Convert { spec, to, out } => {
            let spec = load_spec(spec)?;
            emit(spec_to_json(&spec, (*to).into())? + "\n", out.as_deref())
        }
        Command::Validate { spec } => {
            let j: SpecJson = serde_json::from_str(&read(spec)?).map_err(CliError::spec)?;
            let alpha = j.to_alpha().map_err(CliError::spec)?;
            let report = validate(&alpha);
            let mut o = Output::data(format!(
                "{report}{}\n",
                if report.is_admissible() {
                    "admissible"
                } else {
                    "not admissible"
                }
            ));
            if !report.is_admissible() {
                o.code = EXIT_INVALID_SPEC;
            }
            Ok(o)
        }
        Command::Check {
            spec,
            search: do_search,
            dims,
            flag_party,
            run,
            out,
        } => {
            let spec = load_spec(spec)?;
            let n = spec.n();
            if sufficient_criterion(&spec) {
                return Ok(Output::data("monotone (sufficient criterion)\n".into()));
            }
            let mut text = String::from("sufficient criterion fails: some nontrivial alpha is positive\n");
            if n >= 3 {
                if let Some(k) = positive_single_party(&spec) {
                    let w = single_element_counterexample(&spec, k)?;
                    let mut o = witness_report(&w, "analytic single-party construction", out.as_deref())?;
                    o.stdout = text + &o.stdout;
                    return Ok(o);
                }
            }
            if !do_search {
                text.push_str("no analytic witness applies; rerun with --search\n");
                return Ok(Output::data(text));
            }
            let dims = dims.clone().map_or_else(|| vec![2; n], |d| d.0);
            let cfg = run.search_config(to_zero_based(*flag_party, n)?);
            let report = search(&spec, &dims, &cfg)?;
            match report.witness(&spec, cfg.tolerance)? {
                Some(w) => {
                    let mut o = witness_report(&w, "search", out.as_deref())?;
                    o.stdout = text + &o.stdout;
                    Ok(o)
                }
                None => {
                    text.push_str(&format!(
                        "no violation found (evidence only): best gap {:.3e} over {} restarts\n",
                        report.min_gap(),
                        report.restart_gaps.len()
                    ));
                    Ok(Output::data(text))
                }
            }
        }
        Command::ScanKappa { grid, dims, run, out } => {
            let grid = grid.clone().map_or_else(default_kappa_grid, |g| g.0);
            let dims = dims.clone().map_or_else(|| vec![2; 4], |d| d.0);
            let result = kappa_scan(&grid, &dims, &run.search_config(None))?;
            let mut o = emit(result.to_csv(), out.as_deref())?;
            o.stderr.push_str(&match result.boundary_estimate {
                Some(b) => format!("boundary estimate: kappa1 = {b:.4}\n"),
                None => "no violated-to-monotone transition on this grid\n".into(),
            });
            Ok(o)
        }
        Command::Region { resolution, out } => {
            let pts = tripartite_region(*resolution)?;
            emit(region_to_csv(&pts), out.as_deref())
        }
        Command::Roof {
            spec,
            rho,
            ensemble_size,
            run,
        } => {
            let spec = load_spec(spec)?;
            let rho = load_mixed(rho)?;
            let e = convex_roof_estimate(&spec, &rho, &run.roof_config(*ensemble_size), &[])?;
            Ok(Output::data(format!("{:.12}\n", e.value)))
        }
        Command::FlagsCheck {
            spec,
            rho1,
            rho2,
            p1,
            flag_party,
            run,
        } => {
            let spec = load_spec(spec)?;
            let (r1, r2) = (load_mixed(rho1)?, load_mixed(rho2)?);
            let f = to_zero_based(Some(*flag_party), r1.n_parties())?.expect("given");
            let c = flags_equality_check(&spec, &r1, &r2, *p1, 1.0 - p1, f, &run.roof_config(None))?;
            Ok(Output::data(format!(
                "lhs_estimate {:.12}\nrhs_value {:.12}\nresidual {:.3e}\n",
                c.lhs_estimate, c.rhs_value, c.residual
            )))
        }
    }
}

/// Applies [`THREADS_ENV`] to the global pool; ignored if unset or invalid.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match execute(&cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            eprint!("{}", o.stderr);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
