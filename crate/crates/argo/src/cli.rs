//! Command-line interface: `simulate`, `evaluate`, `multiversion`,
//! `bootstrap-ci`, and `fit-week`.
//!
//! Exit codes: 0 success, 2 configuration errors, 3 data errors, 4
//! numerical non-convergence. All randomness flows from the configured
//! seed; rerunning a command with the same inputs and seed produces a
//! byte-identical output directory.

use crate::eval::bootstrap::{stationary_bootstrap_ci, EfficiencyEstimate};
use crate::eval::table::{build_metric_table, MetricTable};
use crate::eval::{EvalError, Period};
use crate::io::config::{resolve_periods, ConfigError, RunConfig};
use crate::io::synth::{generate_synthetic, SynthError};
use crate::io::{self, IoError};
use crate::model::{
    self, benchmarks, coefficient_trajectory, ModelError, ModelSpec, NowcastSeries, VintageMode,
};
use crate::series::{SearchPanel, SeriesError, WeeklySeries};
use crate::solver::{PenaltyRegime, SolverError};
use crate::vintage::VintageSeries;
use crate::week::{EpiWeek, WeekId};
use crate::{rng, transform};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const METHOD_ARGO: &str = "argo";
pub const METHOD_EXO_ONLY: &str = "exo-only";
pub const METHOD_NAIVE: &str = "naive";
pub const METHOD_AR3: &str = "ar3";
pub const METHOD_GFT_AR3: &str = "gft-ar3";

#[derive(Parser, Debug)]
#[command(name = "argo", version, about = "Weekly epidemic nowcasting from search-frequency panels")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic dataset from a TOML spec.
    Simulate {
        /// Generator spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full retrospective evaluation and write report files.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(VintageMode))]
        vintage_mode: Option<VintageMode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(PenaltyRegime))]
        regime: Option<PenaltyRegime>,
    },
    /// Re-run the evaluation across several panel versions and report the
    /// mean and standard deviation of every metric.
    Multiversion {
        #[arg(long)]
        config: PathBuf,
        /// Two or more panel files with identical terms and date ranges.
        #[arg(long, num_args = 2.., required = true)]
        panels: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(VintageMode))]
        vintage_mode: Option<VintageMode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(PenaltyRegime))]
        regime: Option<PenaltyRegime>,
    },
    /// Standalone relative-efficiency confidence interval from two error
    /// series files (header `error`).
    BootstrapCi {
        #[arg(long)]
        errors1: PathBuf,
        #[arg(long)]
        errors2: PathBuf,
        #[arg(long, default_value_t = 52.0)]
        mean_block_length: f64,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        seed: u64,
        /// Also write the estimate as a CSV file into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a single week and dump the solution as JSON (debugging aid).
    FitWeek {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        year: i32,
        #[arg(long)]
        week: u8,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(VintageMode))]
        vintage_mode: Option<VintageMode>,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit-code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config,
    Data,
    Numeric,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Config => 2,
            ExitKind::Data => 3,
            ExitKind::Numeric => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError { kind: ExitKind::Config, message: e.to_string() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError { kind: ExitKind::Data, message: e.to_string() }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError { kind: ExitKind::Config, message: e.to_string() }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError { kind: ExitKind::Data, message: e.to_string() }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError { kind: ExitKind::Data, message: e.to_string() }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let kind = match &e {
            ModelError::Solver(SolverError::NonConvergence(_)) => ExitKind::Numeric,
            ModelError::InvalidSpec(_) => ExitKind::Config,
            _ => ExitKind::Data,
        };
        CliError { kind, message: e.to_string() }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let kind = match e {
            SolverError::NonConvergence(_) => ExitKind::Numeric,
            _ => ExitKind::Data,
        };
        CliError { kind, message: e.to_string() }
    }
}

fn data_err(message: impl Into<String>) -> CliError {
    CliError { kind: ExitKind::Data, message: message.into() }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version printing
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        // ignore failure: the global pool can only be installed once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.kind.code()
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { spec, out } => simulate(&spec, &out),
        Command::Evaluate { config, seed, vintage_mode, out, regime } => {
            let cfg = load_config(&config, seed, vintage_mode, out, regime)?;
            evaluate(&cfg)
        }
        Command::Multiversion { config, panels, seed, vintage_mode, out, regime } => {
            let cfg = load_config(&config, seed, vintage_mode, out, regime)?;
            multiversion(&cfg, &panels)
        }
        Command::BootstrapCi { errors1, errors2, mean_block_length, replicates, level, seed, out } => {
            bootstrap_ci(&errors1, &errors2, mean_block_length, replicates, level, seed, out.as_deref())
        }
        Command::FitWeek { config, year, week, seed, vintage_mode, out } => {
            let cfg = load_config(&config, seed, vintage_mode, None, None)?;
            fit_week_dump(&cfg, year, week, out.as_deref())
        }
    }
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    vintage_mode: Option<VintageMode>,
    out: Option<PathBuf>,
    regime: Option<PenaltyRegime>,
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(m) = vintage_mode {
        cfg.vintage_mode = m;
    }
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    if let Some(r) = regime {
        cfg.model.regime = r;
    }
    Ok(cfg)
}

struct LoadedInputs {
    vintage: VintageSeries,
    panel: SearchPanel,
    gft: Option<WeeklySeries>,
}

fn load_inputs(cfg: &RunConfig) -> Result<LoadedInputs, CliError> {
    let finalized = io::read_ili_csv(&cfg.inputs.ili)?;
    let vintage = match &cfg.inputs.revisions {
        Some(p) => io::read_vintage_csv(p, finalized)?,
        None => VintageSeries::without_revisions(finalized),
    };
    let mut panel: Option<SearchPanel> = None;
    for input in &cfg.inputs.panels {
        let next = io::read_panel_csv(&input.path, input.source)?;
        panel = Some(match panel {
            None => next,
            Some(cur) => cur.concat(&next)?,
        });
    }
    let panel = panel.expect("config validation requires at least one panel");
    let gft = cfg.inputs.gft.as_ref().map(|p| io::read_ili_csv(p)).transpose()?;
    Ok(LoadedInputs { vintage, panel, gft })
}

/// The inclusive evaluation range: every finalized-axis week with enough
/// warm-up history and panel coverage, clipped to the configured date
/// bounds (which error out when they demand an infeasible week).
fn evaluation_range(
    cfg: &RunConfig,
    inputs: &LoadedInputs,
    spec: &ModelSpec,
) -> Result<(WeekId, WeekId), CliError> {
    let weeks = inputs.vintage.finalized().weeks();
    // the AR(3) benchmarks need three lags of history even when the main
    // model uses fewer
    let warmup = spec.window + spec.n_lags.max(3);
    let feasible: Vec<WeekId> = weeks
        .iter()
        .enumerate()
        .filter(|(i, w)| {
            *i >= warmup
                && inputs.panel.position_of(w.id()).is_some_and(|p| p >= spec.window)
        })
        .map(|(_, w)| w.id())
        .collect();
    let (first, last) = match (feasible.first(), feasible.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => {
            return Err(data_err(format!(
                "insufficient warm-up: no week has {} weeks of history and {} weeks of panel coverage",
                warmup,
                spec.window
            )))
        }
    };
    let mut start = first;
    let mut end = last;
    if let Some(s) = &cfg.run.start_date {
        let date: chrono::NaiveDate = s.parse().expect("validated at load");
        let requested = weeks
            .iter()
            .find(|w| w.end_date >= date)
            .ok_or_else(|| data_err(format!("start_date {date} is beyond the data")))?;
        if requested.id() < first {
            return Err(data_err(format!(
                "insufficient warm-up before {}: first feasible week is {}",
                requested.id(),
                first
            )));
        }
        start = requested.id();
    }
    if let Some(s) = &cfg.run.end_date {
        let date: chrono::NaiveDate = s.parse().expect("validated at load");
        let requested = weeks
            .iter()
            .rev()
            .find(|w| w.end_date <= date)
            .ok_or_else(|| data_err(format!("end_date {date} is before the data")))?;
        if requested.id() > last {
            return Err(data_err(format!(
                "no data to estimate {}: last feasible week is {}",
                requested.id(),
                last
            )));
        }
        end = requested.id();
    }
    if start > end {
        return Err(data_err(format!("evaluation range {start}..{end} is empty")));
    }
    Ok((start, end))
}

struct Evaluation {
    weeks: Vec<EpiWeek>,
    target: Vec<f64>,
    /// Percent-scale estimates per method, aligned with `weeks`.
    methods: Vec<(String, Vec<f64>)>,
    argo_run: NowcastSeries,
    periods: Vec<Period>,
    table: MetricTable,
    efficiency: Vec<(String, EfficiencyEstimate)>,
    range: (WeekId, WeekId),
    fallback_weeks_total: usize,
}

fn run_evaluation(
    cfg: &RunConfig,
    inputs: &LoadedInputs,
    compute_efficiency: bool,
) -> Result<Evaluation, CliError> {
    let spec = cfg.model_spec();
    spec.validate()?;
    let mode = cfg.vintage_mode;
    let range = evaluation_range(cfg, inputs, &spec)?;
    let weeks = model::weeks_in_range(&inputs.vintage, range)?;

    let argo_run =
        model::run_retrospective(&inputs.vintage, &inputs.panel, range, &spec, mode, cfg.seed)?;
    let exo_run = model::run_retrospective(
        &inputs.vintage,
        &inputs.panel,
        range,
        &spec.without_lags(),
        mode,
        cfg.seed,
    )?;

    let finalized = inputs.vintage.finalized();
    let target: Vec<f64> = weeks
        .iter()
        .map(|w| finalized.value_at(w.id()).expect("weeks come from the finalized axis"))
        .collect();

    // benchmark estimates, one pass per week over the visible history
    let mut naive_est = Vec::with_capacity(weeks.len());
    let mut ar3_est = Vec::with_capacity(weeks.len());
    let mut gft_est = Vec::with_capacity(weeks.len());
    for w in &weeks {
        let t = w.id();
        let (visible, _) = model::visible_history(&inputs.vintage, t, mode)?;
        let axis_pos = finalized.position_of(t).expect("week from axis");
        if visible.end() != finalized.week_at(axis_pos - 1).id() {
            return Err(data_err(format!(
                "history visible at {t} does not reach the prior week (ends at {})",
                visible.end()
            )));
        }
        naive_est.push(benchmarks::naive(&visible, t)?);
        ar3_est.push(benchmarks::ar3(&visible, t, spec.window)?);
        if let Some(gft) = &inputs.gft {
            gft_est.push(benchmarks::gft_ar3(&visible, gft, t, spec.window)?);
        }
    }

    let mut methods: Vec<(String, Vec<f64>)> = vec![
        (
            METHOD_ARGO.to_string(),
            argo_run.estimates_percent(&spec.transform).into_iter().map(|(_, v)| v).collect(),
        ),
        (
            METHOD_EXO_ONLY.to_string(),
            exo_run.estimates_percent(&spec.transform).into_iter().map(|(_, v)| v).collect(),
        ),
        (METHOD_AR3.to_string(), ar3_est),
        (METHOD_NAIVE.to_string(), naive_est),
    ];
    if inputs.gft.is_some() {
        methods.insert(2, (METHOD_GFT_AR3.to_string(), gft_est));
    }

    let periods = resolve_periods(cfg, &weeks)?;
    let table = build_metric_table(&weeks, &target, &methods, &periods)?;

    let mut efficiency = Vec::new();
    if compute_efficiency {
        let argo_errors: Vec<f64> =
            methods[0].1.iter().zip(&target).map(|(e, t)| e - t).collect();
        for (idx, (name, est)) in methods.iter().enumerate().skip(1) {
            let errors: Vec<f64> = est.iter().zip(&target).map(|(e, t)| e - t).collect();
            let bs_seed = rng::substream(cfg.seed, 0xB005 + idx as u64);
            let est = stationary_bootstrap_ci(
                &argo_errors,
                &errors,
                cfg.bootstrap.mean_block_length,
                cfg.bootstrap.replicates,
                cfg.bootstrap.level,
                bs_seed,
            )?;
            efficiency.push((name.clone(), est));
        }
    }

    let fallback_weeks_total =
        argo_run.entries.iter().map(|e| e.finalized_fallback_in_window).sum();
    Ok(Evaluation {
        weeks,
        target,
        methods,
        argo_run,
        periods,
        table,
        efficiency,
        range,
        fallback_weeks_total,
    })
}

#[derive(Serialize)]
struct RunMeta<'a> {
    tool_version: &'static str,
    seed: u64,
    vintage_mode: String,
    range_start: String,
    range_end: String,
    model: &'a crate::io::config::ModelSection,
    cv: &'a crate::io::config::CvSection,
    bootstrap: &'a crate::io::config::BootstrapSection,
    methods: Vec<String>,
    periods: Vec<BTreeMap<&'static str, String>>,
    panel_segments: Vec<BTreeMap<&'static str, String>>,
    finalized_fallback_weeks_total: usize,
    decisions: BTreeMap<&'static str, String>,
    outputs: Vec<String>,
}

fn decisions_map(cfg: &RunConfig) -> BTreeMap<&'static str, String> {
    let mut d = BTreeMap::new();
    d.insert("standardization", "per-window column centering and unit-variance scaling (population sd); intercept unpenalized".to_string());
    d.insert("cv_tie_break", "ties in mean held-out error go to the larger penalty".to_string());
    d.insert("cv_fold_strategy", format!("{:?}", cfg.cv.strategy));
    d.insert("cv_grid", format!("{} points (1-d) / {}x{} (2-d), {} decades below the all-zero penalty", cfg.cv.points_1d, cfg.cv.points_2d, cfg.cv.points_2d, cfg.cv.decades));
    d.insert("quantile_method", "empirical order statistics with linear interpolation".to_string());
    d.insert("bootstrap_degenerate_replicates", "resampled within the replicate substream, at most 10 attempts each".to_string());
    d.insert("benchmark_scale", "naive/ar3/external-signal benchmarks fit on the original percent scale; predictions clamped to (0, 100)".to_string());
    d.insert("rescale", "standardized panels mapped affinely per term, min to 0 and max to 100, over the file's full span".to_string());
    d.insert("coordinate_descent", format!(
        "relative coefficient-change tolerance {:e}, cycle budget {}",
        crate::solver::CD_TOL,
        crate::solver::CD_MAX_CYCLES
    ));
    d
}

fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let inputs = load_inputs(cfg)?;
    let eval = run_evaluation(cfg, &inputs, true)?;
    let out = &cfg.out_dir;
    std::fs::create_dir_all(out)
        .map_err(|e| data_err(format!("cannot create output directory {}: {e}", out.display())))?;

    write_estimates_csv(&out.join("estimates.csv"), &eval)?;
    write_metrics_csv(&out.join("metrics.csv"), &eval.table)?;
    write_efficiency_csv(&out.join("efficiency.csv"), &eval.efficiency, cfg)?;
    write_coefficients_csv(&out.join("coefficients.csv"), &eval, &inputs)?;

    let meta = RunMeta {
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        vintage_mode: cfg.vintage_mode.to_string(),
        range_start: eval.range.0.to_string(),
        range_end: eval.range.1.to_string(),
        model: &cfg.model,
        cv: &cfg.cv,
        bootstrap: &cfg.bootstrap,
        methods: eval.methods.iter().map(|(n, _)| n.clone()).collect(),
        periods: eval
            .periods
            .iter()
            .map(|p| {
                let mut m = BTreeMap::new();
                m.insert("name", p.name.clone());
                m.insert("start", p.start.to_string());
                m.insert("end", p.end.to_string());
                m
            })
            .collect(),
        panel_segments: inputs
            .panel
            .segments()
            .iter()
            .map(|s| {
                let mut m = BTreeMap::new();
                m.insert("source", s.source.to_string());
                m.insert("start_week", inputs.panel.weeks()[s.start_row].to_string());
                m
            })
            .collect(),
        finalized_fallback_weeks_total: eval.fallback_weeks_total,
        decisions: decisions_map(cfg),
        outputs: vec![
            "estimates.csv".into(),
            "metrics.csv".into(),
            "efficiency.csv".into(),
            "coefficients.csv".into(),
            "run_meta.json".into(),
        ],
    };
    let json = serde_json::to_string_pretty(&meta).expect("serializable metadata");
    io::write_text(&out.join("run_meta.json"), &json)?;
    println!(
        "evaluated {} weeks ({}..{}), {} methods -> {}",
        eval.weeks.len(),
        eval.range.0,
        eval.range.1,
        eval.methods.len(),
        out.display()
    );
    Ok(())
}

fn write_estimates_csv(path: &Path, eval: &Evaluation) -> Result<(), CliError> {
    let mut out = String::from("year,week,end_date,target");
    for (name, _) in &eval.methods {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, w) in eval.weeks.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}",
            w.year,
            w.week,
            w.end_date,
            io::format_full(eval.target[i])
        ));
        for (_, est) in &eval.methods {
            out.push(',');
            out.push_str(&io::format_full(est[i]));
        }
        out.push('\n');
    }
    io::write_text(path, &out)?;
    Ok(())
}

fn write_metrics_csv(path: &Path, table: &MetricTable) -> Result<(), CliError> {
    let mut out = String::from("period,metric,method,value,absolute,best\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.period,
            row.metric,
            row.method,
            io::format_sig6(row.value),
            io::format_sig6(row.absolute),
            row.best
        ));
    }
    io::write_text(path, &out)?;
    Ok(())
}

fn write_efficiency_csv(
    path: &Path,
    efficiency: &[(String, EfficiencyEstimate)],
    _cfg: &RunConfig,
) -> Result<(), CliError> {
    let mut out = String::from(
        "baseline,point,ci_low,ci_high,replicates,mean_block_length,level,seed\n",
    );
    for (name, est) in efficiency {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            name,
            io::format_sig6(est.point),
            io::format_sig6(est.ci_low),
            io::format_sig6(est.ci_high),
            est.replicates,
            io::format_sig6(est.mean_block_length),
            io::format_sig6(est.level),
            est.seed
        ));
    }
    io::write_text(path, &out)?;
    Ok(())
}

fn write_coefficients_csv(
    path: &Path,
    eval: &Evaluation,
    inputs: &LoadedInputs,
) -> Result<(), CliError> {
    let traj = coefficient_trajectory(&eval.argo_run);
    let mut out = String::from("year,week,end_date,active_count,intercept");
    for lag in 1..=traj.n_lags {
        out.push_str(&format!(",lag_{lag}"));
    }
    for term in inputs.panel.terms() {
        out.push(',');
        out.push_str(term);
    }
    out.push('\n');
    for (i, w) in traj.weeks.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}",
            w.year,
            w.week,
            w.end_date,
            traj.active_counts[i],
            io::format_sig6(traj.intercepts[i])
        ));
        for c in &traj.rows[i] {
            out.push(',');
            out.push_str(&io::format_sig6(*c));
        }
        out.push('\n');
    }
    io::write_text(path, &out)?;
    Ok(())
}

fn simulate(spec_path: &Path, out: &Path) -> Result<(), CliError> {
    let spec = crate::io::config::load_synthetic_spec(spec_path)?;
    let data = generate_synthetic(&spec)?;
    std::fs::create_dir_all(out)
        .map_err(|e| data_err(format!("cannot create output directory {}: {e}", out.display())))?;
    io::write_ili_csv(&out.join("ili.csv"), data.vintage.finalized())?;
    io::write_vintage_csv(&out.join("revisions.csv"), &data.vintage)?;
    let params = crate::transform::TransformParams::default();
    io::write_panel_csv(&out.join("panel.csv"), &data.panel_raw(&params))?;
    if let Some(gft) = &data.gft {
        io::write_ili_csv(&out.join("gft.csv"), gft)?;
    }
    let truth = serde_json::to_string_pretty(&data.truth).expect("serializable truth record");
    io::write_text(&out.join("truth.json"), &truth)?;
    println!(
        "simulated {} weeks, {} terms -> {}",
        spec.n_weeks,
        spec.n_terms,
        out.display()
    );
    Ok(())
}

fn multiversion(cfg: &RunConfig, panel_paths: &[PathBuf]) -> Result<(), CliError> {
    if panel_paths.len() < 2 {
        return Err(CliError {
            kind: ExitKind::Config,
            message: "multiversion needs at least two panel files".into(),
        });
    }
    let base = load_inputs(cfg)?;
    let source = cfg.inputs.panels[0].source;
    let mut versions = Vec::with_capacity(panel_paths.len());
    for p in panel_paths {
        versions.push(io::read_panel_csv(p, source)?);
    }
    let reference = &versions[0];
    for (i, v) in versions.iter().enumerate().skip(1) {
        if v.terms() != reference.terms() {
            return Err(data_err(format!(
                "panel {} has a different term set than {}",
                panel_paths[i].display(),
                panel_paths[0].display()
            )));
        }
        if v.weeks() != reference.weeks() {
            return Err(data_err(format!(
                "panel {} covers a different date range than {}",
                panel_paths[i].display(),
                panel_paths[0].display()
            )));
        }
    }

    let mut tables = Vec::with_capacity(versions.len());
    for panel in versions {
        let inputs = LoadedInputs {
            vintage: base.vintage.clone(),
            panel,
            gft: base.gft.clone(),
        };
        let eval = run_evaluation(cfg, &inputs, false)?;
        tables.push(eval.table);
    }

    // mean and standard deviation of every absolute metric across versions
    let out = &cfg.out_dir;
    std::fs::create_dir_all(out)
        .map_err(|e| data_err(format!("cannot create output directory {}: {e}", out.display())))?;
    let first = &tables[0];
    let nf = tables.len() as f64;
    let mut csv = String::from("period,metric,method,mean,std\n");
    for row in &first.rows {
        let values: Vec<f64> = tables
            .iter()
            .map(|t| {
                t.get(&row.method, &row.period, row.metric)
                    .expect("identical table structure across versions")
                    .absolute
            })
            .collect();
        let mean = values.iter().sum::<f64>() / nf;
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.period,
            row.metric,
            row.method,
            io::format_sig6(mean),
            io::format_sig6(var.sqrt())
        ));
    }
    io::write_text(&out.join("stability.csv"), &csv)?;

    let meta = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "panel_versions": panel_paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "methods": first.methods,
        "decisions": decisions_map(cfg),
    });
    io::write_text(
        &out.join("run_meta.json"),
        &serde_json::to_string_pretty(&meta).expect("serializable"),
    )?;
    println!(
        "multiversion over {} panels -> {}",
        panel_paths.len(),
        out.display()
    );
    Ok(())
}

fn bootstrap_ci(
    errors1: &Path,
    errors2: &Path,
    mean_block_length: f64,
    replicates: usize,
    level: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let e1 = io::read_error_csv(errors1)?;
    let e2 = io::read_error_csv(errors2)?;
    let est = stationary_bootstrap_ci(&e1, &e2, mean_block_length, replicates, level, seed)?;
    println!(
        "relative efficiency: point {} ci [{}, {}] (level {}, {} replicates, mean block {})",
        io::format_sig6(est.point),
        io::format_sig6(est.ci_low),
        io::format_sig6(est.ci_high),
        io::format_sig6(est.level),
        est.replicates,
        io::format_sig6(est.mean_block_length)
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| data_err(format!("cannot create {}: {e}", dir.display())))?;
        let mut csv =
            String::from("point,ci_low,ci_high,replicates,mean_block_length,level,seed\n");
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            io::format_sig6(est.point),
            io::format_sig6(est.ci_low),
            io::format_sig6(est.ci_high),
            est.replicates,
            io::format_sig6(est.mean_block_length),
            io::format_sig6(est.level),
            est.seed
        ));
        io::write_text(&dir.join("efficiency.csv"), &csv)?;
    }
    Ok(())
}

fn fit_week_dump(cfg: &RunConfig, year: i32, week: u8, out: Option<&Path>) -> Result<(), CliError> {
    let inputs = load_inputs(cfg)?;
    let spec = cfg.model_spec();
    spec.validate()?;
    let t = WeekId::new(year, week);
    let (visible, fallback) = model::visible_history(&inputs.vintage, t, cfg.vintage_mode)?;
    let y = transform::logit_series(&visible, &spec.transform).map_err(ModelError::from)?;
    let panel_log = transform::log_panel(&inputs.panel, &spec.transform)?;
    let week_seed = rng::substream(cfg.seed, rng::week_index(t.year, t.week));
    let wf = model::fit_week(&y, &panel_log, t, &spec, week_seed)?;

    let mut names: Vec<String> = (1..=spec.n_lags).map(|l| format!("lag_{l}")).collect();
    names.extend(inputs.panel.terms().iter().cloned());
    let active: Vec<serde_json::Value> = names
        .iter()
        .zip(&wf.fit.coefficients)
        .filter(|(_, c)| **c != 0.0)
        .map(|(n, c)| serde_json::json!({ "name": n, "coefficient": c }))
        .collect();
    let dump = serde_json::json!({
        "week": t.to_string(),
        "seed": week_seed,
        "vintage_mode": cfg.vintage_mode.to_string(),
        "finalized_fallback_weeks": fallback.len(),
        "resolved_penalties": wf.resolved,
        "intercept": wf.fit.intercept,
        "objective_value": wf.fit.objective_value,
        "active_set_size": wf.fit.active_set_size,
        "cycles": wf.fit.cycles,
        "active_coefficients": active,
        "cv": wf.cv,
    });
    let text = serde_json::to_string_pretty(&dump).expect("serializable dump");
    match out {
        Some(p) => io::write_text(p, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}
