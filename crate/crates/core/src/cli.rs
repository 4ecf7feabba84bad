//! Command-line front end: `fit`, `select-degree`, `curve` and `simulate`.
//!
//! Exit codes: 0 on success, 1 on bad input or arguments, 2 when the
//! estimation did not converge (a partial report is still written).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::degree::{profile_loglik_grid_with, DegreeGrid, DegreeTable, GridMode};
use crate::error::{Error, Result};
use crate::io::parse_covariates;
use crate::model::Dataset;
use crate::optimizer::{mable_fit_with, Fit, FitConfig, FitOptions};
use crate::report::{num, FitDocument};
use crate::simulation::{mse_report, SimDesign};

#[derive(Debug, Parser)]
#[command(name = "mable", version, about = "Bernstein-polynomial PH regression for interval-censored data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model at a fixed degree or at the degree chosen over a grid.
    Fit(FitArgs),
    /// Tabulate the maximised log-likelihood over a degree grid.
    SelectDegree(SelectArgs),
    /// Evaluate fitted survival and density curves at given covariates.
    Curve(CurveArgs),
    /// Monte Carlo comparison on simulated Weibull PH data.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailChoice {
    Auto,
    On,
    Off,
}

impl TailChoice {
    fn as_option(self) -> Option<bool> {
        match self {
            TailChoice::Auto => None,
            TailChoice::On => Some(true),
            TailChoice::Off => Some(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Full,
    Profile,
}

#[derive(Debug, Args)]
pub struct Tuning {
    /// Weight convergence tolerance.
    #[arg(long)]
    pub p_tol: Option<f64>,
    /// Coefficient convergence tolerance.
    #[arg(long)]
    pub gamma_tol: Option<f64>,
    /// Cap on outer alternations between weights and coefficients.
    #[arg(long)]
    pub max_outer: Option<usize>,
}

impl Tuning {
    pub fn config(&self) -> Result<FitConfig> {
        let mut cfg = FitConfig::default();
        if let Some(v) = self.p_tol {
            cfg.p_tol = v;
        }
        if let Some(v) = self.gamma_tol {
            cfg.gamma_tol = v;
        }
        if let Some(v) = self.max_outer {
            cfg.max_outer_iters = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Observation CSV with header `y1,y2,delta[,x1,...]`.
    #[arg(long)]
    pub input: PathBuf,
    /// Known end of support; defaults to the largest finite observed time.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Exponential tail beyond `tau`; `auto` adds one under right censoring
    /// when `--tau` is not given.
    #[arg(long, value_enum, default_value_t = TailChoice::Auto)]
    pub tail: TailChoice,
    /// Starting regression coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma_init: Option<Vec<f64>>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Fixed polynomial degree; conflicts with `--grid`.
    #[arg(long, conflicts_with = "grid")]
    pub degree: Option<usize>,
    /// Degree bounds `m0:mk` searched by change-point selection; `2:20` when
    /// neither this nor `--degree` is given.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<DegreeGrid>,
    #[arg(long, value_enum, default_value_t = ModeChoice::Full)]
    pub mode: ModeChoice,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Table file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Degree bounds `m0:mk`; defaults to `2:20`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<DegreeGrid>,
    #[arg(long, value_enum, default_value_t = ModeChoice::Full)]
    pub mode: ModeChoice,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Fit report written by `mable fit`.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV of covariate rows with a header line.
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    /// Curve CSV; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Time grid `start:end:count`; defaults to `[0, tau]`, stretched by half
    /// when the fit has a tail.
    #[arg(long, value_parser = parse_times)]
    pub times: Option<TimeGrid>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample size per replicate.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 300)]
    pub replicates: usize,
    /// Master seed; replicate streams are derived from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Inspection times drawn per censored subject.
    #[arg(long)]
    pub inspections: Option<usize>,
    /// Coefficient MSE table; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Pointwise survival-curve MSE table.
    #[arg(long)]
    pub curve_output: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 }).collect()
    }
}

fn parse_grid(s: &str) -> std::result::Result<DegreeGrid, String> {
    let (a, b) = s.split_once(':').ok_or("expected m0:mk")?;
    let m0 = a.trim().parse().map_err(|_| format!("bad lower degree '{a}'"))?;
    let mk = b.trim().parse().map_err(|_| format!("bad upper degree '{b}'"))?;
    DegreeGrid::from_bounds(m0, mk).map_err(|e| e.to_string())
}

fn parse_times(s: &str) -> std::result::Result<TimeGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err("expected start:end:count".into());
    };
    let start: f64 = a.trim().parse().map_err(|_| format!("bad start '{a}'"))?;
    let end: f64 = b.trim().parse().map_err(|_| format!("bad end '{b}'"))?;
    let count: usize = n.trim().parse().map_err(|_| format!("bad count '{n}'"))?;
    if !(start >= 0.0 && end >= start && end.is_finite()) || count == 0 {
        return Err("need 0 <= start <= end < inf and a positive count".into());
    }
    Ok(TimeGrid { start, end, count })
}

/// Outcome of a command that produced output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(Status::Done) => 0,
        Ok(Status::NotConverged) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NotConverged { .. } => 2,
                _ => 1,
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::SelectDegree(a) => cmd_select_degree(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(data: &DataArgs) -> Result<(Dataset, FitConfig)> {
    let ds = Dataset::from_csv_path(&data.input, data.tau)?;
    if let Some(g) = &data.gamma_init {
        if g.len() != ds.dim() {
            return Err(Error::Data(format!("--gamma-init has {} values, data has {} covariates", g.len(), ds.dim())));
        }
    }
    Ok((ds, data.tuning.config()?))
}

/// Degree table for `grid`; in profile mode `γ` is held at `--gamma-init`,
/// or at the full fit of the lowest degree when none is given.
fn degree_table(ds: &Dataset, data: &DataArgs, grid: DegreeGrid, mode: ModeChoice, cfg: &FitConfig) -> Result<DegreeTable> {
    let tail = data.tail.as_option();
    let gamma_init = data.gamma_init.as_deref();
    match mode {
        ModeChoice::Full => profile_loglik_grid_with(ds, grid, cfg, &GridMode::Full, tail, gamma_init),
        ModeChoice::Profile => {
            let gamma = match gamma_init {
                Some(g) => g.to_vec(),
                None => {
                    let first = grid.degrees().next().expect("grid is nonempty");
                    let options = FitOptions { has_tail: tail, ..FitOptions::default() };
                    mable_fit_with(ds, first, &options, cfg)?.model.gamma
                }
            };
            profile_loglik_grid_with(ds, grid, cfg, &GridMode::Profile(gamma), tail, None)
        }
    }
}

pub fn cmd_fit(a: &FitArgs) -> Result<Status> {
    let (ds, cfg) = load(&a.data)?;
    let options = FitOptions {
        has_tail: a.data.tail.as_option(),
        gamma_init: a.data.gamma_init.clone(),
        p_init: None,
    };
    let (fit, table): (Fit, Option<DegreeTable>) = match a.degree {
        Some(m) => (mable_fit_with(&ds, m, &options, &cfg)?, None),
        None => {
            let grid = a.grid.unwrap_or_default();
            let table = degree_table(&ds, &a.data, grid, a.mode, &cfg)?;
            let idx = table
                .chosen
                .ok_or_else(|| Error::DegenerateGrid("no degree could be selected".into()))?;
            let fit = match table.fits[idx].clone() {
                Some(fit) => fit,
                None => mable_fit_with(&ds, table.degrees[idx], &options, &cfg)?,
            };
            info!("selected degree {}", table.degrees[idx]);
            (fit, Some(table))
        }
    };
    let mut text = FitDocument::from_fit(&fit).render();
    if let Some(table) = &table {
        text.push_str("\n[degree_selection]\n");
        text.push_str(&table.to_csv());
    }
    emit(a.output.as_deref(), &text)?;
    if fit.report.converged {
        Ok(Status::Done)
    } else {
        warn!("fit did not converge (KKT residual {:e})", fit.report.kkt_residual);
        Ok(Status::NotConverged)
    }
}

pub fn cmd_select_degree(a: &SelectArgs) -> Result<Status> {
    let (ds, cfg) = load(&a.data)?;
    let table = degree_table(&ds, &a.data, a.grid.unwrap_or_default(), a.mode, &cfg)?;
    emit(a.output.as_deref(), &table.to_csv())?;
    if let Some(m) = table.chosen_degree() {
        info!("selected degree {m}");
    }
    Ok(Status::Done)
}

/// CSV `t,x_id,survival,density`; an unbounded density is written as `inf`.
pub fn curve_csv(doc: &FitDocument, covariates: &[Vec<f64>], times: &[f64]) -> Result<String> {
    let model = &doc.model;
    let mut s = String::from("t,x_id,survival,density\n");
    for (id, x) in covariates.iter().enumerate() {
        if x.len() != model.dim() {
            return Err(Error::Data(format!(
                "covariate row {} has {} values, the fit has {} covariates",
                id + 1,
                x.len(),
                model.dim()
            )));
        }
        for &t in times {
            let surv = model.conditional_survival(t, x)?;
            let dens = match model.conditional_density(t, x) {
                Ok(v) => v,
                Err(Error::Singular(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            s.push_str(&format!("{},{id},{},{}\n", num(t), num(surv), num(dens)));
        }
    }
    Ok(s)
}

pub fn cmd_curve(a: &CurveArgs) -> Result<Status> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", a.input.display())))?;
    let doc = FitDocument::parse(&text)?;
    let covariates = match &a.covariates {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
            parse_covariates(&text)?
        }
        None if doc.model.dim() == 0 => vec![vec![]],
        None => return Err(Error::Data("--covariates is required for a fit with covariates".into())),
    };
    let grid = a.times.unwrap_or_else(|| {
        let end = if doc.model.has_tail { 1.5 * doc.model.tau } else { doc.model.tau };
        TimeGrid { start: 0.0, end, count: 101 }
    });
    emit(a.output.as_deref(), &curve_csv(&doc, &covariates, &grid.points())?)?;
    Ok(Status::Done)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Status> {
    let defaults = SimDesign::default();
    let design = SimDesign {
        n: a.n,
        replicates: a.replicates,
        seed: a.seed,
        inspections: a.inspections.unwrap_or(defaults.inspections),
        ..defaults
    };
    design.validate()?;
    let report = mse_report(&design, &a.tuning.config()?)?;
    for m in &report.methods {
        info!("{}: mse {:?} ({} failed replicates)", m.method.label(), m.mse, m.failures);
    }
    emit(a.output.as_deref(), &report.coefficient_csv())?;
    if let Some(path) = &a.curve_output {
        emit(Some(path), &report.curve_csv())?;
    }
    Ok(Status::Done)
}
