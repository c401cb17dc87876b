//! CSV schemas and per-epoch aggregation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use attinit_core::sim::MonteCarloResult;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub method: String,
    pub run: usize,
    pub t_s: f64,
    pub err_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub t_s: f64,
    pub mean_err_deg: f64,
    pub p95_err_deg: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub bias_degph: f64,
    pub run: usize,
    pub t_s: f64,
    pub err_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub bias_degph: f64,
    pub t_s: f64,
    pub mean_err_deg: f64,
    pub std_err_deg: f64,
    pub runs: usize,
}

/// Arithmetic mean, summed in the given order.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Nearest-rank 95th percentile.
pub fn p95(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Standard error of the mean (sample standard deviation over √n).
pub fn standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Values of every successful run at epoch `k`, in run order.
pub fn column(result: &MonteCarloResult, k: usize) -> Vec<f64> {
    result.successful().map(|r| r[k]).collect()
}

/// Per-epoch mean and p95 over the successful runs of one method.
pub fn summarize(result: &MonteCarloResult) -> Vec<SummaryRow> {
    let runs = result.successful().count();
    if runs == 0 {
        return Vec::new();
    }
    result
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let col = column(result, k);
            SummaryRow {
                method: result.method.name().to_owned(),
                t_s: t,
                mean_err_deg: mean(&col),
                p95_err_deg: p95(&col),
                runs,
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>, AppError> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file)))
}

fn finish<W: Write>(path: &Path, mut w: csv::Writer<W>) -> Result<(), AppError> {
    w.flush().map_err(|e| AppError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> AppError {
    AppError::io(path, std::io::Error::other(e))
}

/// `method,run,t_s,err_deg`, one row per method × successful run × epoch.
pub fn write_curves(path: &Path, results: &[MonteCarloResult]) -> Result<(), AppError> {
    let mut w = create(path)?;
    for result in results {
        for (run, curve) in result.runs.iter().enumerate() {
            let Ok(curve) = curve else { continue };
            for (&t, &err) in result.times.iter().zip(curve) {
                let row = CurveRow { method: result.method.name().to_owned(), run, t_s: t, err_deg: err };
                w.serialize(row).map_err(|e| csv_err(path, e))?;
            }
        }
    }
    finish(path, w)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), AppError> {
    let mut w = create(path)?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// `bias_degph,run,t_s,err_deg` for each bias level.
pub fn write_sweep(path: &Path, sweep: &[(f64, MonteCarloResult)]) -> Result<(), AppError> {
    let mut w = create(path)?;
    for (bias, result) in sweep {
        for (run, curve) in result.runs.iter().enumerate() {
            let Ok(curve) = curve else { continue };
            for (&t, &err) in result.times.iter().zip(curve) {
                w.serialize(SweepRow { bias_degph: *bias, run, t_s: t, err_deg: err })
                    .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    finish(path, w)
}

pub fn write_sweep_summary(path: &Path, rows: &[SweepSummaryRow]) -> Result<(), AppError> {
    let mut w = create(path)?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>, AppError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize().collect::<Result<Vec<CurveRow>, _>>().map_err(|e| csv_err(path, e))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, AppError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize().collect::<Result<Vec<SummaryRow>, _>>().map_err(|e| csv_err(path, e))
}
