//! Parallel Monte Carlo execution and the two experiment drivers.

use std::fs;
use std::path::PathBuf;

use attinit_core::sim::{run_method, MonteCarloResult, Scenario};
use attinit_core::{Method, ScenarioConfig};
use rayon::prelude::*;

use crate::config::ExperimentSpec;
use crate::error::AppError;
use crate::output::{self, SweepSummaryRow};
use crate::plot::{self, Series};

/// Runs every method on the same `mc_runs` scenarios. Each scenario is
/// generated once from its own seed, so the result does not depend on
/// scheduling.
pub fn run_experiment(cfg: &ScenarioConfig, methods: &[Method]) -> Result<Vec<MonteCarloResult>, AppError> {
    cfg.validate().map_err(|e| AppError::Config(format!("scenario: {e}")))?;
    let per_run: Vec<Vec<_>> = (0..cfg.mc_runs)
        .into_par_iter()
        .map(|run| match Scenario::generate(cfg, run) {
            Ok(s) => methods.iter().map(|&m| run_method(cfg, m, &s).map(|t| t.errors_deg)).collect(),
            Err(e) => methods.iter().map(|_| Err(e.clone())).collect(),
        })
        .collect();
    let times: Vec<f64> = (1..=cfg.epochs()).map(|k| k as f64 * cfg.dt_s).collect();
    Ok(methods
        .iter()
        .enumerate()
        .map(|(i, &method)| MonteCarloResult {
            method,
            times: times.clone(),
            runs: per_run.iter().map(|r| r[i].clone()).collect(),
        })
        .collect())
}

#[derive(Debug)]
pub struct CaseReport {
    pub curves: PathBuf,
    pub summary: PathBuf,
    pub plot: Option<PathBuf>,
    pub results: Vec<MonteCarloResult>,
    pub failed_runs: usize,
    pub total_runs: usize,
}

fn prepare_dir(dir: &PathBuf) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

fn report_failures(results: &[MonteCarloResult]) -> usize {
    let mut failed = 0;
    for r in results {
        for (run, outcome) in r.runs.iter().enumerate() {
            if let Err(e) = outcome {
                eprintln!("warning: {} run {run} failed: {e}", r.method);
                failed += 1;
            }
        }
    }
    failed
}

/// Runs a spec and writes `curves.csv`, `summary.csv`, `mean_error.svg` and
/// the resolved `spec.toml` into `spec.outputs`.
pub fn run_case(spec: &ExperimentSpec) -> Result<CaseReport, AppError> {
    spec.validate()?;
    prepare_dir(&spec.outputs)?;
    let spec_path = spec.outputs.join("spec.toml");
    fs::write(&spec_path, spec.to_toml()?).map_err(|e| AppError::io(&spec_path, e))?;

    let results = run_experiment(&spec.scenario, &spec.methods)?;
    let curves = spec.outputs.join("curves.csv");
    output::write_curves(&curves, &results)?;
    let rows: Vec<_> = results.iter().flat_map(output::summarize).collect();
    let summary = spec.outputs.join("summary.csv");
    output::write_summary(&summary, &rows)?;

    let series: Vec<Series> = results
        .iter()
        .map(|r| Series {
            label: r.method.name().to_owned(),
            points: output::summarize(r).iter().map(|row| (row.t_s, row.mean_err_deg)).collect(),
        })
        .collect();
    let plot_path = spec.outputs.join("mean_error.svg");
    let title = format!("{}: mean attitude error over {} runs", spec.name, spec.scenario.mc_runs);
    let plot = match plot::plot_mean_errors(&plot_path, &title, &series) {
        Ok(()) => Some(plot_path),
        Err(e) => {
            eprintln!("warning: plot skipped: {e}");
            None
        }
    };

    let failed_runs = report_failures(&results);
    let total_runs = results.iter().map(|r| r.runs.len()).sum();
    Ok(CaseReport { curves, summary, plot, results, failed_runs, total_runs })
}

#[derive(Debug)]
pub struct SweepReport {
    pub sweep: PathBuf,
    pub summary: PathBuf,
    pub plot: Option<PathBuf>,
    pub levels: Vec<(f64, MonteCarloResult)>,
    pub rows: Vec<SweepSummaryRow>,
    pub failed_runs: usize,
    pub total_runs: usize,
}

pub fn validate_biases(biases: &[f64]) -> Result<(), AppError> {
    if biases.is_empty() {
        return Err(AppError::Config("biases must be non-empty".into()));
    }
    if let Some(b) = biases.iter().find(|b| !b.is_finite() || **b < 0.0) {
        return Err(AppError::Config(format!("biases: {b} is not a finite non-negative deg/h value")));
    }
    Ok(())
}

/// Runs the initializer alone at each bias level (all three axes set to the
/// level) and writes `sweep.csv`, `sweep_summary.csv` and `sweep.svg`.
pub fn run_bias_sweep(base: &ExperimentSpec, biases: &[f64]) -> Result<SweepReport, AppError> {
    base.validate()?;
    validate_biases(biases)?;
    prepare_dir(&base.outputs)?;

    let mut levels = Vec::with_capacity(biases.len());
    for &b in biases {
        let cfg = ScenarioConfig { bias_degph: [b; 3], ..base.scenario };
        let mut r = run_experiment(&cfg, &[Method::Optimal])?;
        levels.push((b, r.remove(0)));
    }

    let sweep = base.outputs.join("sweep.csv");
    output::write_sweep(&sweep, &levels)?;

    let k = base.scenario.handoff_epoch() - 1;
    let rows: Vec<SweepSummaryRow> = levels
        .iter()
        .map(|(b, r)| {
            let col = output::column(r, k);
            SweepSummaryRow {
                bias_degph: *b,
                t_s: r.times[k],
                mean_err_deg: output::mean(&col),
                std_err_deg: output::standard_error(&col),
                runs: col.len(),
            }
        })
        .collect();
    let summary = base.outputs.join("sweep_summary.csv");
    output::write_sweep_summary(&summary, &rows)?;

    let series: Vec<Series> = levels
        .iter()
        .map(|(b, r)| Series {
            label: format!("{b} deg/h"),
            points: output::summarize(r).iter().map(|row| (row.t_s, row.mean_err_deg)).collect(),
        })
        .collect();
    let plot_path = base.outputs.join("sweep.svg");
    let plot = match plot::plot_mean_errors(&plot_path, "Optimal: mean error by gyro bias", &series) {
        Ok(()) => Some(plot_path),
        Err(e) => {
            eprintln!("warning: plot skipped: {e}");
            None
        }
    };

    let results: Vec<MonteCarloResult> = levels.iter().map(|(_, r)| r.clone()).collect();
    let failed_runs = report_failures(&results);
    let total_runs = results.iter().map(|r| r.runs.len()).sum();
    Ok(SweepReport { sweep, summary, plot, levels, rows, failed_runs, total_runs })
}
