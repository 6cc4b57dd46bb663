use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{run_single, RunMetrics};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricStats {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let mut n = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            n += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        Self {
            mean: sum / n as f64,
            min,
            max,
        }
    }
}

/// Aggregates over the runs of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis1: f64,
    pub axis2: f64,
    pub runs: usize,
    pub activated: MetricStats,
    pub activation_fraction: MetricStats,
    pub energy_reduction_pct: MetricStats,
    pub active_joint_entropy: MetricStats,
    pub entropy_floored_fraction: f64,
    pub realized_secrecy_sum: MetricStats,
    pub passes: MetricStats,
    pub messages: MetricStats,
    pub converged_fraction: f64,
}

impl SweepPoint {
    /// Folds run metrics in the order given.
    pub fn aggregate(axis1: f64, axis2: f64, runs: &[RunMetrics]) -> Self {
        let n = runs.len() as f64;
        let stats = |f: &dyn Fn(&RunMetrics) -> f64| MetricStats::of(runs.iter().map(f));
        Self {
            axis1,
            axis2,
            runs: runs.len(),
            activated: stats(&|r| r.activated as f64),
            activation_fraction: stats(&|r| r.activation_fraction),
            energy_reduction_pct: stats(&|r| r.energy_reduction_pct),
            active_joint_entropy: stats(&|r| r.active_joint_entropy.value),
            entropy_floored_fraction: runs.iter().filter(|r| r.active_joint_entropy.floored).count()
                as f64
                / n,
            realized_secrecy_sum: stats(&|r| r.realized_secrecy_sum),
            passes: stats(&|r| r.passes as f64),
            messages: stats(&|r| r.messages as f64),
            converged_fraction: runs.iter().filter(|r| r.converged).count() as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Name of the primary (x) axis, e.g. `p_e`.
    pub axis1_name: String,
    /// Name of the secondary axis; one curve per value.
    pub axis2_name: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Pe,
    M,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Pe => "p_e",
            Axis::M => "m",
        }
    }

    fn apply(self, config: &mut ExperimentConfig, value: f64) {
        match self {
            Axis::Pe => config.p_e = value,
            Axis::M => config.m = value as usize,
        }
    }
}

fn sweep(config: &ExperimentConfig, axis1: (Axis, &[f64]), axis2: (Axis, &[f64])) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(axis1.1.len() * axis2.1.len());
    for &v2 in axis2.1 {
        for &v1 in axis1.1 {
            let mut point = config.clone();
            axis2.0.apply(&mut point, v2);
            axis1.0.apply(&mut point, v1);
            point.validate()?;
            let runs = (0..point.runs as u64)
                .into_par_iter()
                .map(|k| run_single(&point, k))
                .collect::<Result<Vec<_>>>()?;
            points.push(SweepPoint::aggregate(v1, v2, &runs));
        }
    }
    Ok(SweepResult {
        axis1_name: axis1.0.name().into(),
        axis2_name: axis2.0.name().into(),
        points,
    })
}

/// Cross product of compromise probabilities (x axis) and network sizes
/// (one curve each), `config.runs` runs per point.
pub fn sweep_pe(config: &ExperimentConfig, pe_values: &[f64], m_values: &[usize]) -> Result<SweepResult> {
    let ms: Vec<f64> = m_values.iter().map(|&m| m as f64).collect();
    sweep(config, (Axis::Pe, pe_values), (Axis::M, &ms))
}

/// Cross product of network sizes (x axis) and compromise probabilities
/// (one curve each).
pub fn sweep_m(config: &ExperimentConfig, m_values: &[usize], pe_values: &[f64]) -> Result<SweepResult> {
    let ms: Vec<f64> = m_values.iter().map(|&m| m as f64).collect();
    sweep(config, (Axis::M, &ms), (Axis::Pe, pe_values))
}
