//! Parallel parameter sweeps with deterministic row ordering.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::CyclePoint;

/// One sweep row: the varied parameter value and the cycle evaluated there.
/// Failures are recorded in-row so a sweep survives isolated bad points.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub parameter: f64,
    pub point: std::result::Result<CyclePoint, Error>,
}

/// Evaluates `eval` at every grid value in parallel. Rows come back in grid
/// order regardless of scheduling, so repeated runs are identical.
pub fn parallel_sweep<F>(grid: &[f64], eval: F) -> Vec<SweepRow>
where
    F: Fn(f64) -> Result<CyclePoint> + Sync,
{
    grid.par_iter()
        .map(|&parameter| SweepRow {
            parameter,
            point: eval(parameter),
        })
        .collect()
}

/// `n` evenly spaced values covering `[lo, hi]` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::config(format!(
            "grid needs finite lo < hi and n >= 2, got [{lo}, {hi}] with n = {n}"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// `n` logarithmically spaced values covering `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) {
        return Err(Error::config(format!("log grid needs lo > 0, got {lo}")));
    }
    Ok(linear_grid(lo.ln(), hi.ln(), n)?
        .into_iter()
        .map(f64::exp)
        .collect())
}
