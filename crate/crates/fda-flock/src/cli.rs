//! Command-line interface: config resolution, deterministic seeding, and
//! all file output.
//!
//! Commands: `run` (one scenario), `compare` (reactive vs FDA under nominal
//! and perturbed perception over shared seeds), `sweep` (one parameter over
//! a value grid), `analyze` (consensus spectrum reports). Outputs are plain
//! CSV and JSON for external plotting; nothing renders in-process.
//!
//! Exit codes: 0 success, 1 validation, 2 runtime degeneracy, 3 I/O.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{self, GraphMatrices, PhiWeights, SpectralReport};
use crate::config::{ConfigFile, Mode};
use crate::error::{Error, Result};
use crate::metrics::MetricsSample;
use crate::rng::derive_run_seed;
use crate::sim::{self, RunOutcome, RunSummary};
use crate::state::{FlockState, Model};

#[derive(Parser)]
#[command(
    name = "fda-flock",
    version,
    about = "Deterministic flocking simulator with future direction-aware control and consensus-spectrum analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics.csv, summary.json, and a manifest.
    Run(RunArgs),
    /// Run reactive and FDA over shared seeds under nominal and perturbed
    /// perception (four arms); write median time series and a summary table.
    Compare(CompareArgs),
    /// Run a grid of (parameter value x seed) scenarios; write a long-format
    /// summary table.
    Sweep(SweepArgs),
    /// Report the consensus-operator spectrum over a (theta, t_ph) grid.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (TOML); defaults to the built-in baseline.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's model: reactive | fda.
    #[arg(long)]
    model: Option<String>,
    /// Override the config's perception mode: nominal | perturbed.
    #[arg(long)]
    mode: Option<String>,
    /// Override the config's recording cadence.
    #[arg(long)]
    record_every: Option<usize>,
    /// Also write per-agent state rows to trajectory.csv.
    #[arg(long)]
    dump_trajectories: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; per-run seeds derive from it counter-style.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds per arm.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter to sweep: theta | t_ph | tau | r | delta | n.
    #[arg(long)]
    param: String,
    /// Comma-separated values, e.g. 0,0.4,0.8.
    #[arg(long)]
    values: String,
    /// Seeds per value.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    /// Master seed for the per-cell derivation.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Take the frozen configuration from a simulated scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the simulated scenario (with --config).
    #[arg(long)]
    seed: Option<u64>,
    /// Freeze the scenario at this time instead of the end (with --config).
    #[arg(long)]
    at_time: Option<f64>,
    /// Synthetic graph instead of a simulated configuration:
    /// pair | complete:N | ring:N | path:N | empty:N | cliques:A,B.
    #[arg(long)]
    graph: Option<String>,
    /// Comma-separated theta grid (default: the config's theta, or 0,0.8).
    #[arg(long)]
    theta_grid: Option<String>,
    /// Comma-separated prediction-horizon grid (default: config's t_ph or 1).
    #[arg(long)]
    tph_grid: Option<String>,
    /// Uniform alignment weight entering the operator (default 1).
    #[arg(long)]
    phi: Option<f64>,
    /// Use per-agent weights 1/deg_i instead of a uniform phi.
    #[arg(long)]
    phi_per_agent: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Entry point for the binary: parse, dispatch, map errors to exit codes.
pub fn run_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// In-process entry used by tests; `args` excludes the binary name.
pub fn try_main_from<I, S>(args: I) -> Result<i32>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv = vec!["fda-flock".to_string()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    dispatch(cli)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Analyze(args) => cmd_analyze(args),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn apply_overrides(
    file: &mut ConfigFile,
    seed: Option<u64>,
    model: &Option<String>,
    mode: &Option<String>,
    record_every: Option<usize>,
) -> Result<()> {
    if let Some(s) = seed {
        file.run.seed = s;
    }
    if let Some(m) = model {
        file.model.model = Model::from_str(m)?;
    }
    if let Some(m) = mode {
        file.run.mode = Mode::from_str(m)?;
    }
    if let Some(r) = record_every {
        file.run.record_every = r;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// run

fn cmd_run(args: RunArgs) -> Result<i32> {
    let mut file = load_config(&args.config)?;
    apply_overrides(&mut file, args.seed, &args.model, &args.mode, args.record_every)?;
    let scenario = file.to_scenario()?;
    let record = sim::run(&scenario)?;

    std::fs::create_dir_all(&args.out)?;
    let mut files = vec!["metrics.csv".to_string(), "summary.json".to_string()];
    write_metrics_csv(&args.out.join("metrics.csv"), scenario.params.m, &record.metrics)?;
    if args.dump_trajectories {
        write_trajectory_csv(&args.out.join("trajectory.csv"), scenario.params.m, &record.samples)?;
        files.push("trajectory.csv".to_string());
    }

    let summary_doc = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config_hash": file.hash(),
        "model": file.model.model.to_string(),
        "mode": file.run.mode.to_string(),
        "seed": file.run.seed,
        "outcome": record.outcome,
        "summary": record.summary,
        "metrics_rows": record.metrics.len(),
    });
    write_json(&args.out.join("summary.json"), &summary_doc)?;
    write_manifest(&args.out, &file.hash(), &[file.run.seed], &files)?;

    println!(
        "{} {} seed={}: gamma={:.4} S={:.2} d_min={:.3} rows={}",
        file.model.model,
        file.run.mode,
        file.run.seed,
        record.summary.final_gamma,
        record.summary.s_total,
        record.summary.min_distance,
        record.metrics.len()
    );
    match &record.outcome {
        RunOutcome::Completed => Ok(0),
        RunOutcome::Aborted { step, message } => {
            eprintln!("aborted at step {step}: {message}");
            Ok(2)
        }
    }
}

// ---------------------------------------------------------------------------
// compare

/// One (model, mode) arm of a comparison.
#[derive(Clone, Debug)]
pub struct ArmReport {
    pub model: Model,
    pub mode: Mode,
    /// Per-seed summaries, `Err` carrying the failure description.
    pub summaries: Vec<(u64, std::result::Result<RunSummary, String>)>,
    /// Per-timestep medians across the completed runs.
    pub median_timeseries: Vec<MedianRow>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MedianRow {
    pub t: f64,
    pub gamma: f64,
    pub d_min: f64,
    pub d_mean: f64,
    pub d_max: f64,
    pub s_cum: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Aggregate {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub n: usize,
}

impl ArmReport {
    pub fn label(&self) -> String {
        format!("{}_{}", self.model, self.mode)
    }

    pub fn ok_summaries(&self) -> Vec<&RunSummary> {
        self.summaries
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .collect()
    }

    pub fn failures(&self) -> Vec<(u64, &str)> {
        self.summaries
            .iter()
            .filter_map(|(seed, r)| r.as_ref().err().map(|m| (*seed, m.as_str())))
            .collect()
    }

    /// Quantiles of a summary quantity across completed seeds.
    pub fn aggregate<F: Fn(&RunSummary) -> f64>(&self, quantity: F) -> Aggregate {
        let mut values: Vec<f64> = self.ok_summaries().into_iter().map(quantity).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Aggregate {
            median: quantile(&values, 0.5),
            q1: quantile(&values, 0.25),
            q3: quantile(&values, 0.75),
            n: values.len(),
        }
    }
}

/// Full four-arm comparison output.
#[derive(Clone, Debug)]
pub struct CompareReport {
    pub master_seed: u64,
    pub seeds: Vec<u64>,
    pub arms: Vec<ArmReport>,
}

impl CompareReport {
    pub fn arm(&self, model: Model, mode: Mode) -> &ArmReport {
        self.arms
            .iter()
            .find(|a| a.model == model && a.mode == mode)
            .expect("arm exists by construction")
    }
}

/// Time-to-alignment for aggregation: never reached counts as +infinity.
pub fn time_to_alignment(summary: &RunSummary) -> f64 {
    summary.time_to_gamma_0_9.unwrap_or(f64::INFINITY)
}

/// Run the four comparison arms over `k` seeds derived from `master_seed`.
/// Every arm sees the same seeds, so arm-to-arm differences are paired.
pub fn compare_runs(
    base: &ConfigFile,
    master_seed: u64,
    k: usize,
    workers: Option<usize>,
) -> Result<CompareReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("--seeds must be at least 1".into()));
    }
    // Validate the base scenario once up front so a bad config fails fast.
    base.to_scenario()?;

    let seeds: Vec<u64> = (0..k as u64).map(|i| derive_run_seed(master_seed, i)).collect();
    let arms: Vec<(Model, Mode)> = vec![
        (Model::Reactive, Mode::Nominal),
        (Model::Fda, Mode::Nominal),
        (Model::Reactive, Mode::Perturbed),
        (Model::Fda, Mode::Perturbed),
    ];

    let jobs: Vec<(usize, usize)> = (0..arms.len())
        .flat_map(|a| (0..k).map(move |s| (a, s)))
        .collect();

    type JobOutput = (
        usize,
        usize,
        std::result::Result<(Vec<MetricsSample>, RunSummary), String>,
    );
    let outputs: Vec<JobOutput> = with_pool(workers, || {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(arm_idx, seed_idx)| {
                let (model, mode) = arms[arm_idx];
                let mut file = base.clone();
                file.model.model = model;
                file.run.mode = mode;
                file.run.seed = seeds[seed_idx];
                let result = file
                    .to_scenario()
                    .and_then(|scenario| sim::run(&scenario))
                    .map_err(|e| e.to_string())
                    .and_then(|record| match record.outcome {
                        RunOutcome::Completed => Ok((record.metrics, record.summary)),
                        RunOutcome::Aborted { step, ref message } => {
                            Err(format!("aborted at step {step}: {message}"))
                        }
                    });
                (arm_idx, seed_idx, result)
            })
            .collect()
    });

    let mut arm_reports = Vec::new();
    for (arm_idx, &(model, mode)) in arms.iter().enumerate() {
        let mut summaries: Vec<(u64, std::result::Result<RunSummary, String>)> = Vec::new();
        let mut series: Vec<&Vec<MetricsSample>> = Vec::new();
        for (a, s, result) in &outputs {
            if *a != arm_idx {
                continue;
            }
            debug_assert_eq!(summaries.len(), *s);
            match result {
                Ok((metrics, summary)) => {
                    summaries.push((seeds[*s], Ok(summary.clone())));
                    series.push(metrics);
                }
                Err(message) => summaries.push((seeds[*s], Err(message.clone()))),
            }
        }
        arm_reports.push(ArmReport {
            model,
            mode,
            summaries,
            median_timeseries: median_timeseries(&series),
        });
    }

    Ok(CompareReport {
        master_seed,
        seeds,
        arms: arm_reports,
    })
}

fn median_timeseries(series: &[&Vec<MetricsSample>]) -> Vec<MedianRow> {
    let Some(rows) = series.iter().map(|s| s.len()).min() else {
        return Vec::new();
    };
    (0..rows)
        .map(|row| {
            let collect = |f: &dyn Fn(&MetricsSample) -> f64| -> f64 {
                let mut values: Vec<f64> = series.iter().map(|s| f(&s[row])).collect();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                quantile(&values, 0.5)
            };
            MedianRow {
                t: series[0][row].t,
                gamma: collect(&|s| s.gamma),
                d_min: collect(&|s| s.d_min),
                d_mean: collect(&|s| s.d_mean),
                d_max: collect(&|s| s.d_max),
                s_cum: collect(&|s| s.s_cum),
            }
        })
        .collect()
}

fn cmd_compare(args: CompareArgs) -> Result<i32> {
    let file = load_config(&args.config)?;
    let master_seed = args.seed.unwrap_or(file.run.seed);
    let report = compare_runs(&file, master_seed, args.seeds, args.workers)?;

    std::fs::create_dir_all(&args.out)?;
    let mut files = Vec::new();
    for arm in &report.arms {
        let name = format!("timeseries_{}.csv", arm.label());
        write_median_timeseries_csv(&args.out.join(&name), &arm.median_timeseries)?;
        files.push(name);
    }

    // Long-format summary table.
    type Quantity = fn(&RunSummary) -> f64;
    let mut csv = String::from("model,mode,quantity,median,q1,q3,n_ok,n_failed\n");
    let quantities: [(&str, Quantity); 4] = [
        ("final_gamma", |s| s.final_gamma),
        ("time_to_gamma_0_9", time_to_alignment),
        ("s_total", |s| s.s_total),
        ("min_distance", |s| s.min_distance),
    ];
    for arm in &report.arms {
        let failed = arm.failures().len();
        for (name, f) in quantities {
            let agg = arm.aggregate(f);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                arm.model, arm.mode, name, agg.median, agg.q1, agg.q3, agg.n, failed
            );
        }
    }
    std::fs::write(args.out.join("compare_summary.csv"), csv)?;
    files.push("compare_summary.csv".to_string());

    let arms_json: Vec<serde_json::Value> = report
        .arms
        .iter()
        .map(|arm| {
            let per_seed: Vec<serde_json::Value> = arm
                .summaries
                .iter()
                .map(|(seed, result)| match result {
                    Ok(summary) => serde_json::json!({
                        "seed": seed,
                        "status": "ok",
                        "final_gamma": summary.final_gamma,
                        "time_to_gamma_0_9": summary.time_to_gamma_0_9,
                        "s_total": summary.s_total,
                        "min_distance": summary.min_distance,
                    }),
                    Err(message) => serde_json::json!({
                        "seed": seed,
                        "status": "failed",
                        "message": message,
                    }),
                })
                .collect();
            serde_json::json!({
                "model": arm.model.to_string(),
                "mode": arm.mode.to_string(),
                "per_seed": per_seed,
                "aggregates": {
                    "final_gamma": arm.aggregate(|s| s.final_gamma),
                    "time_to_gamma_0_9": arm.aggregate(time_to_alignment),
                    "s_total": arm.aggregate(|s| s.s_total),
                    "min_distance": arm.aggregate(|s| s.min_distance),
                },
            })
        })
        .collect();
    let doc = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config_hash": file.hash(),
        "master_seed": report.master_seed,
        "seeds": report.seeds,
        "arms": arms_json,
    });
    write_json(&args.out.join("compare_summary.json"), &doc)?;
    files.push("compare_summary.json".to_string());
    write_manifest(&args.out, &file.hash(), &report.seeds, &files)?;

    println!("arm                    final_gamma  t(gamma>=0.9)  S        d_min");
    for arm in &report.arms {
        println!(
            "{:<22} {:>10.4}  {:>12.3}  {:>7.2}  {:>6.3}",
            arm.label(),
            arm.aggregate(|s| s.final_gamma).median,
            arm.aggregate(time_to_alignment).median,
            arm.aggregate(|s| s.s_total).median,
            arm.aggregate(|s| s.min_distance).median,
        );
    }
    let total_failures: usize = report.arms.iter().map(|a| a.failures().len()).sum();
    if total_failures > 0 {
        eprintln!("{total_failures} run(s) failed; see compare_summary.json");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep

const SWEEP_PARAMS: [&str; 6] = ["theta", "t_ph", "tau", "r", "delta", "n"];

fn apply_sweep_value(file: &mut ConfigFile, param: &str, value: f64) -> Result<()> {
    match param {
        "theta" => file.model.theta = value,
        "t_ph" => file.model.t_ph = value,
        "tau" => file.model.tau = value,
        "r" => file.model.r = value,
        "delta" => file.model.delta = value,
        "n" => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "n value {value} is not a nonnegative integer"
                )));
            }
            file.model.n = value as usize;
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown sweep parameter `{other}` (expected one of {SWEEP_PARAMS:?})"
            )))
        }
    }
    Ok(())
}

fn parse_value_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty values list".into()));
    }
    Ok(values)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    if !SWEEP_PARAMS.contains(&args.param.as_str()) {
        return Err(Error::InvalidArgument(format!(
            "unknown sweep parameter `{}` (expected one of {SWEEP_PARAMS:?})",
            args.param
        )));
    }
    let values = parse_value_list(&args.values)?;
    if args.seeds == 0 {
        return Err(Error::InvalidArgument("--seeds must be at least 1".into()));
    }
    let mut base = load_config(&args.config)?;
    apply_overrides(&mut base, args.seed, &args.model, &args.mode, None)?;
    let master_seed = base.run.seed;

    let seeds: Vec<u64> = (0..args.seeds as u64)
        .map(|i| derive_run_seed(master_seed, i))
        .collect();
    let cells: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|v| (0..seeds.len()).map(move |s| (v, s)))
        .collect();

    type CellOutput = std::result::Result<RunSummary, String>;
    let outputs: Vec<CellOutput> = with_pool(args.workers, || {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(value_idx, seed_idx)| {
                let mut file = base.clone();
                file.run.seed = seeds[seed_idx];
                apply_sweep_value(&mut file, &args.param, values[value_idx])
                    .and_then(|_| file.to_scenario())
                    .and_then(|scenario| sim::run(&scenario))
                    .map_err(|e| e.to_string())
                    .and_then(|record| match record.outcome {
                        RunOutcome::Completed => Ok(record.summary),
                        RunOutcome::Aborted { step, ref message } => {
                            Err(format!("aborted at step {step}: {message}"))
                        }
                    })
            })
            .collect()
    });

    std::fs::create_dir_all(&args.out)?;
    let mut csv = String::from(
        "param,value,seed_index,seed,model,mode,status,final_gamma,time_to_gamma_0_9,s_total,min_distance,message\n",
    );
    let mut failures = 0usize;
    for (&(value_idx, seed_idx), output) in cells.iter().zip(&outputs) {
        match output {
            Ok(summary) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},ok,{},{},{},{},",
                    args.param,
                    values[value_idx],
                    seed_idx,
                    seeds[seed_idx],
                    base.model.model,
                    base.run.mode,
                    summary.final_gamma,
                    time_to_alignment(summary),
                    summary.s_total,
                    summary.min_distance,
                );
            }
            Err(message) => {
                failures += 1;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},failed,,,,,{}",
                    args.param,
                    values[value_idx],
                    seed_idx,
                    seeds[seed_idx],
                    base.model.model,
                    base.run.mode,
                    sanitize_csv_field(message),
                );
            }
        }
    }
    std::fs::write(args.out.join("sweep.csv"), csv)?;
    write_manifest(&args.out, &base.hash(), &seeds, &["sweep.csv".to_string()])?;

    println!(
        "sweep {} over {:?}: {} cells, {} failed",
        args.param,
        values,
        cells.len(),
        failures
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// analyze

fn parse_graph_spec(spec: &str) -> Result<GraphMatrices> {
    let bad = |msg: String| Error::InvalidArgument(msg);
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    let parse_n = |rest: Option<&str>| -> Result<usize> {
        rest.ok_or_else(|| bad(format!("graph spec `{spec}` is missing a size")))?
            .parse::<usize>()
            .map_err(|_| bad(format!("graph spec `{spec}` has a non-integer size")))
    };
    match kind {
        "pair" => Ok(analysis::graph_from_edges(2, &[(0, 1)])),
        "complete" => {
            let n = parse_n(rest)?;
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            Ok(analysis::graph_from_edges(n, &edges))
        }
        "ring" => {
            let n = parse_n(rest)?;
            if n < 3 {
                return Err(bad("ring graphs need at least 3 nodes".into()));
            }
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Ok(analysis::graph_from_edges(n, &edges))
        }
        "path" => {
            let n = parse_n(rest)?;
            if n < 2 {
                return Err(bad("path graphs need at least 2 nodes".into()));
            }
            let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            Ok(analysis::graph_from_edges(n, &edges))
        }
        "empty" => Ok(analysis::graph_from_edges(parse_n(rest)?, &[])),
        "cliques" => {
            let sizes: Vec<usize> = rest
                .ok_or_else(|| bad("cliques spec needs sizes, e.g. cliques:3,3".into()))?
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| bad(format!("bad clique size `{s}`")))
                })
                .collect::<Result<_>>()?;
            let n: usize = sizes.iter().sum();
            let mut edges = Vec::new();
            let mut offset = 0;
            for size in sizes {
                for i in 0..size {
                    for j in (i + 1)..size {
                        edges.push((offset + i, offset + j));
                    }
                }
                offset += size;
            }
            Ok(analysis::graph_from_edges(n, &edges))
        }
        other => Err(bad(format!(
            "unknown graph spec `{other}` (expected pair, complete:N, ring:N, path:N, empty:N, cliques:A,B)"
        ))),
    }
}

/// State of the scenario nearest the requested freeze time.
fn frozen_positions(file: &ConfigFile, at_time: Option<f64>) -> Result<Vec<crate::vec::VecM>> {
    let scenario = file.to_scenario()?;
    let record = sim::run(&scenario)?;
    let state: &FlockState = match at_time {
        None => record.samples.last().expect("runs always record a sample"),
        Some(t) => record
            .samples
            .iter()
            .min_by(|a, b| {
                let da = (a.time - t).abs();
                let db = (b.time - t).abs();
                da.partial_cmp(&db).unwrap()
            })
            .expect("runs always record a sample"),
    };
    Ok(state.positions())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let file = load_config(&args.config)?;
    let (graph, source) = match (&args.graph, &args.config) {
        (Some(spec), _) => (parse_graph_spec(spec)?, spec.clone()),
        (None, Some(_)) => {
            let mut file = file.clone();
            if let Some(seed) = args.seed {
                file.run.seed = seed;
            }
            let positions = frozen_positions(&file, args.at_time)?;
            (
                analysis::build_graph(&positions, file.model.r),
                format!("config seed={}", file.run.seed),
            )
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "analyze needs --graph or --config".into(),
            ))
        }
    };

    let thetas = match &args.theta_grid {
        Some(text) => parse_value_list(text)?,
        None => {
            if args.config.is_some() {
                vec![file.model.theta]
            } else {
                vec![0.0, 0.8]
            }
        }
    };
    let tphs = match &args.tph_grid {
        Some(text) => parse_value_list(text)?,
        None => {
            if args.config.is_some() {
                vec![file.model.t_ph]
            } else {
                vec![1.0]
            }
        }
    };
    let phi = if args.phi_per_agent {
        PhiWeights::PerAgent
    } else {
        PhiWeights::Scalar(args.phi.unwrap_or(1.0))
    };

    let components = graph.component_count();
    std::fs::create_dir_all(&args.out)?;
    let mut csv = String::from(
        "graph,n,components,theta,t_ph,phi_mode,phi,margin,condition,zero_modes,slowest_decay,stable,note,eigenvalues\n",
    );
    println!("graph `{source}`: n={}, components={components}", graph.n());
    println!("theta    t_ph     zero  slowest_decay  stable  note");
    for &theta in &thetas {
        for &t_ph in &tphs {
            // Stability on the report answers "does the whole flock align":
            // the expected consensus subspace is one-dimensional, so a
            // fragmented graph shows stable=false with extra zero modes.
            let row = analysis::reduced_operator(&graph, theta, phi, t_ph)
                .and_then(|(matrix, margin, condition)| {
                    analysis::spectral_report(&matrix, 1, margin, condition)
                });
            let (phi_mode, phi_value) = match phi {
                PhiWeights::Scalar(v) => ("scalar", v),
                PhiWeights::PerAgent => ("per_agent", f64::NAN),
            };
            match row {
                Ok(report) => {
                    let eigs = format_eigenvalues(&report);
                    let slowest = report
                        .slowest_decay
                        .map(|v| v.to_string())
                        .unwrap_or_default();
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        sanitize_csv_field(&source),
                        graph.n(),
                        components,
                        theta,
                        t_ph,
                        phi_mode,
                        phi_value,
                        report.margin,
                        report.condition,
                        report.zero_modes,
                        slowest,
                        report.stable,
                        sanitize_csv_field(report.note.as_deref().unwrap_or("")),
                        eigs,
                    );
                    println!(
                        "{theta:<8} {t_ph:<8} {:<5} {:<14} {:<7} {}",
                        report.zero_modes,
                        report
                            .slowest_decay
                            .map(|v| format!("{v:.6}"))
                            .unwrap_or_else(|| "-".into()),
                        report.stable,
                        report.note.as_deref().unwrap_or("")
                    );
                }
                Err(err) => {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},,,,,false,{},",
                        sanitize_csv_field(&source),
                        graph.n(),
                        components,
                        theta,
                        t_ph,
                        phi_mode,
                        phi_value,
                        sanitize_csv_field(&err.to_string()),
                    );
                    println!("{theta:<8} {t_ph:<8} flagged: {err}");
                }
            }
        }
    }
    std::fs::write(args.out.join("spectral.csv"), csv)?;
    write_manifest(&args.out, &file.hash(), &[], &["spectral.csv".to_string()])?;
    Ok(0)
}

fn format_eigenvalues(report: &SpectralReport) -> String {
    report
        .eigenvalues
        .iter()
        .map(|z| format!("{:.6e}{:+.6e}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(";")
}

// ---------------------------------------------------------------------------
// shared output plumbing

fn with_pool<F, R>(workers: Option<usize>, f: F) -> R
where
    F: FnOnce() -> R + Send,
    R: Send,
{
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn sanitize_csv_field(text: &str) -> String {
    text.replace(['\n', '\r'], " ").replace(',', ";")
}

/// metrics.csv schema: t, gamma, d_min, d_mean, d_max,
/// centroid_0..centroid_{m-1}, s_cum, components.
pub fn write_metrics_csv(path: &Path, m: usize, rows: &[MetricsSample]) -> Result<()> {
    let mut out = String::from("t,gamma,d_min,d_mean,d_max");
    for axis in 0..m {
        let _ = write!(out, ",centroid_{axis}");
    }
    out.push_str(",s_cum,components\n");
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            row.t, row.gamma, row.d_min, row.d_mean, row.d_max
        );
        for c in row.centroid.as_slice() {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{},{}", row.s_cum, row.components);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// trajectory.csv schema: step, t, agent, p_0.., v_0.., u_0..
pub fn write_trajectory_csv(path: &Path, m: usize, samples: &[FlockState]) -> Result<()> {
    let mut out = String::from("step,t,agent");
    for prefix in ["p", "v", "u"] {
        for axis in 0..m {
            let _ = write!(out, ",{prefix}_{axis}");
        }
    }
    out.push('\n');
    for state in samples {
        for (idx, agent) in state.agents.iter().enumerate() {
            let _ = write!(out, "{},{},{}", state.step, state.time, idx);
            for vector in [&agent.position, &agent.velocity, &agent.control] {
                for c in vector.as_slice() {
                    let _ = write!(out, ",{c}");
                }
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_median_timeseries_csv(path: &Path, rows: &[MedianRow]) -> Result<()> {
    let mut out = String::from("t,gamma,d_min,d_mean,d_max,s_cum\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.t, row.gamma, row.d_min, row.d_mean, row.d_max, row.s_cum
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn write_manifest(out: &Path, config_hash: &str, seeds: &[u64], files: &[String]) -> Result<()> {
    let mut listed: Vec<String> = files.to_vec();
    listed.push("manifest.json".to_string());
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "created_unix": created,
        "config_hash": config_hash,
        "seeds": seeds,
        "files": listed,
    });
    write_json(&out.join("manifest.json"), &doc)
}
