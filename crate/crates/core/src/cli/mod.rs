//! Command-line front end.

pub mod experiments;
pub mod io;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::groups::GroupLayout;
use crate::penalty::PenaltyParams;
use crate::simulate::{Covariance, ObservationModel};
use crate::solver::{cross_validate, fit, SolverConfig};

use experiments::{Method, PhaseSpec, RowStatus, ToySpec, WidthSpec};
use io::{fmt_f64, CsvSink};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "soglasso", version, about = "Sparse overlapping group lasso: fitting and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Omit the timestamp line and timing columns so reruns are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
    /// Output file, or output directory for `fit`. Defaults to stdout / `.`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model from CSV data and a group file.
    Fit(FitArgs),
    /// Cross-validate eta1 and lambda1 over a grid.
    Cv(CvArgs),
    /// Recovery error against the number of samples.
    Phase(PhaseArgs),
    /// Clairvoyantly tuned MSE against within-group density on chain groups.
    ToyRegression(ToyArgs),
    /// Monte-Carlo checks of the mean-width and chi-square bounds.
    Width(WidthArgs),
    /// Recompute the worked penalty tables.
    PenaltyTable,
    /// Write a group file.
    GenGroups(GenGroupsArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Group file. Required: there is no implicit singleton layout.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// `key = value` settings (solver.eta1, solver.eta2, penalty.lambda1, penalty.l, loss, ...).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// The CSV inputs start with a header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25, 0.1, 0.05])]
    pub eta1_fracs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0])]
    pub lambda1: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelKind {
    Sign,
    Logistic,
    Linear,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 100)]
    pub p: usize,
    /// Size of the contiguous disjoint groups (ignored with --group-file).
    #[arg(long, default_value_t = 4)]
    pub group_size: usize,
    #[arg(long)]
    pub group_file: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 400])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = ModelKind::Sign)]
    pub model: ModelKind,
    /// Logistic steepness or linear noise level.
    #[arg(long, default_value_t = 1.0)]
    pub model_param: f64,
    /// AR(1) correlation of the design columns.
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec!["soglasso".to_string()])]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 0.3)]
    pub eta1_frac: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda1: f64,
    /// Skip the least-squares refit on the selected support.
    #[arg(long)]
    pub no_debias: bool,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 25)]
    pub groups: usize,
    #[arg(long, default_value_t = 6)]
    pub size: usize,
    #[arg(long, default_value_t = 4)]
    pub shift: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6, 0.8, 1.0])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 25)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL.map(|m| m.name().to_string()))]
    pub methods: Vec<String>,
    /// Warm-started eta1 path as fractions of eta1_max [default: 0.9 * 0.57^i, i = 0..12]
    #[arg(long, value_delimiter = ',', default_values_t = default_eta1_fracs(), hide_default_value = true)]
    pub eta1_fracs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 1.0, 3.0, 10.0])]
    pub lambda1: Vec<f64>,
}

/// Log-spaced from 0.9 down to about 2e-3.
pub fn default_eta1_fracs() -> Vec<f64> {
    (0..12).map(|i| 0.9 * 0.57f64.powi(i)).collect()
}

#[derive(Debug, Args)]
pub struct WidthArgs {
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupKind {
    Chain,
    Contiguous,
    Grid,
}

#[derive(Debug, Args)]
pub struct GenGroupsArgs {
    #[arg(value_enum)]
    pub kind: GroupKind,
    /// Number of groups (chain, contiguous) or grid rows.
    #[arg(long)]
    pub count: usize,
    /// Group size (chain, contiguous) or block side (grid).
    #[arg(long)]
    pub size: usize,
    /// Offset between consecutive chain groups or grid blocks.
    #[arg(long)]
    pub shift: Option<usize>,
    /// Grid columns.
    #[arg(long)]
    pub cols: Option<usize>,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PenaltyNotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(jobs) = cli.jobs {
        // A second build in the same process fails; the first pool stays.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let sink = CsvSink {
        path: cli.out.clone(),
        reproducible: cli.reproducible,
    };
    match &cli.command {
        Command::Fit(args) => cmd_fit(cli, args),
        Command::Cv(args) => cmd_cv(cli, args, &sink),
        Command::Phase(args) => cmd_phase(cli, args, &sink),
        Command::ToyRegression(args) => cmd_toy(cli, args, &sink),
        Command::Width(args) => cmd_width(cli, args, &sink),
        Command::PenaltyTable => cmd_penalty_table(),
        Command::GenGroups(args) => cmd_gen_groups(cli, args),
    }
}

struct LoadedData {
    phi: ndarray::Array2<f64>,
    y: ndarray::Array1<f64>,
    layout: GroupLayout,
    config: io::FitConfig,
}

fn load_data(args: &DataArgs) -> Result<LoadedData> {
    let groups = args.groups.as_ref().ok_or_else(|| {
        Error::InvalidArgument("--groups is required; use `gen-groups contiguous --size 1` for a lasso layout".into())
    })?;
    let phi = io::read_matrix(&args.design, args.header)?;
    let y = io::read_vector(&args.labels, args.header)?;
    if y.len() != phi.nrows() {
        return Err(Error::DimensionMismatch {
            what: "label count vs design rows",
            expected: phi.nrows(),
            got: y.len(),
        });
    }
    let layout = io::read_groups(groups, phi.ncols())?;
    let config = match &args.config {
        Some(path) => io::read_config(path)?,
        None => io::FitConfig::default(),
    };
    Ok(LoadedData { phi, y, layout, config })
}

fn index_rows(values: &[usize]) -> Vec<Vec<String>> {
    values.iter().map(|v| vec![v.to_string()]).collect()
}

fn cmd_fit(cli: &Cli, args: &FitArgs) -> Result<i32> {
    let data = load_data(&args.data)?;
    let result = fit(data.phi.view(), data.y.view(), &data.layout, data.config.loss, &data.config.solver)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let model: String = result.x_hat.iter().map(|v| format!("{}\n", fmt_f64(*v))).collect();
    write_file(&dir.join("model.csv"), model)?;
    let sink = |name: &str| CsvSink {
        path: Some(dir.join(name)),
        reproducible: cli.reproducible,
    };
    sink("support.csv").write(&["index"], &index_rows(&result.support))?;
    sink("active_groups.csv").write(&["group"], &index_rows(&result.active_groups))?;
    let trace: Vec<Vec<String>> = result
        .objective_trace
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_f64(*v)])
        .collect();
    sink("trace.csv").write(&["iteration", "objective"], &trace)?;
    println!(
        "iterations={} converged={} objective={} support={} active_groups={}",
        result.iterations,
        result.converged,
        fmt_f64(*result.objective_trace.last().unwrap_or(&f64::NAN)),
        result.support.len(),
        result.active_groups.len()
    );
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn write_file(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_cv(cli: &Cli, args: &CvArgs, sink: &CsvSink) -> Result<i32> {
    let data = load_data(&args.data)?;
    let base = &data.config.solver;
    let mut grid = Vec::new();
    for &lambda1 in &args.lambda1 {
        let params = PenaltyParams::new(lambda1, base.params.l_target())?;
        let max = crate::solver::eta1_max(data.phi.view(), data.y.view(), &data.layout, &params)?;
        for &frac in &args.eta1_fracs {
            grid.push(SolverConfig {
                eta1: frac * max,
                params: params.clone(),
                ..base.clone()
            });
        }
    }
    let cv = cross_validate(
        data.phi.view(),
        data.y.view(),
        &data.layout,
        data.config.loss,
        &grid,
        args.folds,
        cli.seed,
    )?;
    let rows: Vec<Vec<String>> = cv
        .table
        .iter()
        .map(|r| {
            let c = &grid[r.config_index];
            vec![
                r.config_index.to_string(),
                fmt_f64(c.eta1),
                fmt_f64(c.params.lambda1()),
                fmt_f64(r.mean_error),
                r.folds_used.to_string(),
                (r.config_index == cv.best_index).to_string(),
            ]
        })
        .collect();
    sink.write(&["config", "eta1", "lambda1", "mean_error", "folds_used", "best"], &rows)?;
    if !cv.skipped_folds.is_empty() {
        eprintln!("skipped single-class folds: {:?}", cv.skipped_folds);
    }
    Ok(EXIT_OK)
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|s| s.trim().parse()).collect()
}

fn observation_model(kind: ModelKind, param: f64) -> Result<ObservationModel> {
    match kind {
        ModelKind::Sign => Ok(ObservationModel::Sign),
        ModelKind::Logistic => ObservationModel::logistic(param),
        ModelKind::Linear => ObservationModel::linear(param),
    }
}

fn cmd_phase(cli: &Cli, args: &PhaseArgs, sink: &CsvSink) -> Result<i32> {
    let layout = match &args.group_file {
        Some(path) => io::read_groups(path, args.p)?,
        None => {
            if args.group_size == 0 || !args.p.is_multiple_of(args.group_size) {
                return Err(Error::InvalidArgument(format!(
                    "p = {} is not a multiple of the group size {}",
                    args.p, args.group_size
                )));
            }
            GroupLayout::contiguous(args.p / args.group_size, args.group_size)?
        }
    };
    let covariance = if args.rho == 0.0 { Covariance::Identity } else { Covariance::Ar1(args.rho) };
    let spec = PhaseSpec {
        layout,
        k: args.k,
        l: args.l,
        n_grid: args.n.clone(),
        trials: args.trials,
        model: observation_model(args.model, args.model_param)?,
        covariance,
        methods: parse_methods(&args.methods)?,
        eta1_frac: args.eta1_frac,
        lambda1: args.lambda1,
        debias: !args.no_debias,
        seed: cli.seed,
    };
    let rows = experiments::run_phase(&spec)?;
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.n.to_string(),
                r.trial.to_string(),
                fmt_f64(r.sq_error),
                if cli.reproducible { "0".into() } else { format!("{:.6}", r.seconds) },
            ]
        })
        .collect();
    sink.write(&["method", "n", "trial", "sq_error", "seconds"], &out)?;
    for m in &spec.methods {
        for pt in experiments::phase_curve(&rows, *m) {
            eprintln!(
                "{m} n={} mean={:.4} se={:.4} failures={}",
                pt.n, pt.mean, pt.std_error, pt.failures
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_toy(cli: &Cli, args: &ToyArgs, sink: &CsvSink) -> Result<i32> {
    let layout = GroupLayout::chain(args.groups, args.size, args.shift)?;
    eprintln!("chain of {} groups gives p = {}", args.groups, layout.dim());
    let spec = ToySpec {
        layout,
        k: args.k,
        alphas: args.alphas.clone(),
        n: args.n,
        sigma: args.sigma,
        trials: args.trials,
        methods: parse_methods(&args.methods)?,
        eta1_fracs: args.eta1_fracs.clone(),
        lambda1_grid: args.lambda1.clone(),
        seed: cli.seed,
    };
    let rows = experiments::run_toy_regression(&spec)?;
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.method.to_string(), fmt_f64(r.alpha), fmt_f64(r.mean_mse), fmt_f64(r.std_error)])
        .collect();
    sink.write(&["method", "alpha", "mean_mse", "std_error"], &out)?;
    Ok(EXIT_OK)
}

fn cmd_width(cli: &Cli, args: &WidthArgs, sink: &CsvSink) -> Result<i32> {
    let spec = WidthSpec {
        trials: args.trials,
        seed: cli.seed,
        ..WidthSpec::default()
    };
    let rows = experiments::run_width(&spec)?;
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.kind.to_string(),
                r.groups.to_string(),
                r.size.to_string(),
                r.k.to_string(),
                r.l.to_string(),
                fmt_f64(r.empirical),
                fmt_f64(r.std_error),
                fmt_f64(r.bound),
                fmt_f64(r.bound_closed),
                r.status.name().to_string(),
            ]
        })
        .collect();
    sink.write(
        &["kind", "K", "L", "k", "l", "empirical", "std_error", "bound", "bound_closed", "status"],
        &out,
    )?;
    let violations = rows.iter().filter(|r| r.status == RowStatus::Fail).count();
    let skipped = rows.iter().filter(|r| r.status == RowStatus::Skipped).count();
    eprintln!("{violations} violations");
    if skipped > 0 {
        eprintln!("{skipped} rows skipped by the enumeration guard");
    }
    Ok(if violations == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_penalty_table() -> Result<i32> {
    let cells = experiments::penalty_tables()?;
    println!("{:<6}{:<14}{:<16}{:>12}{:>12}{:>12}  check", "table", "row", "column", "expected", "computed", "|delta|");
    for c in &cells {
        println!(
            "{:<6}{:<14}{:<16}{:>12.4}{:>12.4}{:>12.2e}  {}",
            c.table,
            c.row,
            c.column,
            c.expected,
            c.computed,
            c.delta(),
            if c.ok() { "ok" } else { "FAIL" }
        );
    }
    Ok(if cells.iter().all(|c| c.ok()) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_gen_groups(cli: &Cli, args: &GenGroupsArgs) -> Result<i32> {
    let layout = match args.kind {
        GroupKind::Chain => GroupLayout::chain(args.count, args.size, args.shift.unwrap_or(args.size))?,
        GroupKind::Contiguous => GroupLayout::contiguous(args.count, args.size)?,
        GroupKind::Grid => {
            let cols = args
                .cols
                .ok_or_else(|| Error::InvalidArgument("grid layouts need --cols".into()))?;
            GroupLayout::grid(args.count, cols, args.size, args.shift.unwrap_or(args.size))?
        }
    };
    let text = format!("# p = {}\n{}", layout.dim(), io::format_groups(&layout));
    match &cli.out {
        Some(path) => write_file(path, text)?,
        None => print!("{text}"),
    }
    eprintln!("p = {} with {} groups", layout.dim(), layout.num_groups());
    Ok(EXIT_OK)
}
