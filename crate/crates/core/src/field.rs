//! Spatially correlated Gaussian measurement field.
//!
//! Sensor readings are jointly Gaussian with an RBF covariance
//! `beta * exp(-d^2 / (2 lambda^2))`. Entropies are differential entropies of
//! subsets of readings.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky};
use crate::topology::{Deployment, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBase {
    #[default]
    Natural,
    Base2,
}

impl LogBase {
    fn scale(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Base2 => nats / LN_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationParams {
    /// Marginal variance of every reading.
    pub beta: f64,
    /// Correlation length in meters.
    pub lambda: f64,
    /// Per-sensor mean. Empty means all-zero; entropies do not depend on it.
    pub mean: Vec<f64>,
    /// Smallest conditional variance (pivot) admitted inside a logarithm.
    pub variance_floor: f64,
    pub entropy_log_base: LogBase,
}

impl Default for CorrelationParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            lambda: 1.0,
            mean: Vec::new(),
            variance_floor: 1e-12,
            entropy_log_base: LogBase::Natural,
        }
    }
}

impl CorrelationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.variance_floor > 0.0 && self.variance_floor < self.beta) {
            return Err(Error::InvalidConfig(format!(
                "variance floor must lie in (0, beta), got {}",
                self.variance_floor
            )));
        }
        Ok(())
    }
}

/// Entropy value plus whether any degeneracy handling (diagonal jitter or
/// pivot clamping) was needed to produce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    pub value: f64,
    pub floored: bool,
}

/// RBF covariance over a fixed set of sensor positions.
///
/// Entries are evaluated on demand instead of materialising the `M x M`
/// matrix; `sigma(i, j)` is bit-for-bit symmetric.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    positions: Vec<Position>,
    params: CorrelationParams,
    inv_two_lambda_sq: f64,
}

impl CovarianceModel {
    pub fn new(deployment: &Deployment, params: CorrelationParams) -> Result<Self> {
        Self::from_positions(deployment.sensor_positions.clone(), params)
    }

    pub fn from_positions(positions: Vec<Position>, params: CorrelationParams) -> Result<Self> {
        params.validate()?;
        if !params.mean.is_empty() && params.mean.len() != positions.len() {
            return Err(Error::InvalidConfig(format!(
                "mean vector has {} entries for {} sensors",
                params.mean.len(),
                positions.len()
            )));
        }
        let inv_two_lambda_sq = 1.0 / (2.0 * params.lambda * params.lambda);
        Ok(Self {
            positions,
            params,
            inv_two_lambda_sq,
        })
    }

    pub fn params(&self) -> &CorrelationParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.params.mean.get(i).copied().unwrap_or(0.0)
    }

    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.params.beta;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let (pa, pb) = (&self.positions[a], &self.positions[b]);
        let dx = pa.x - pb.x;
        let dy = pa.y - pb.y;
        self.params.beta * (-(dx * dx + dy * dy) * self.inv_two_lambda_sq).exp()
    }

    /// Row-major principal submatrix for `ids` (in the given order).
    pub fn submatrix(&self, ids: &[usize]) -> Vec<f64> {
        let k = ids.len();
        let mut out = vec![0.0; k * k];
        for (r, &i) in ids.iter().enumerate() {
            out[r * k + r] = self.params.beta;
            for (c, &j) in ids.iter().enumerate().take(r) {
                let s = self.sigma(i, j);
                out[r * k + c] = s;
                out[c * k + r] = s;
            }
        }
        out
    }

    fn entropy_from_nats(&self, nats: f64, floored: bool) -> Entropy {
        Entropy {
            value: self.params.entropy_log_base.scale(nats),
            floored,
        }
    }

    /// Differential entropy of the readings in `subset`.
    ///
    /// Panics if an id is out of range.
    pub fn joint_entropy(&self, subset: &[usize]) -> Entropy {
        let k = subset.len();
        if k == 0 {
            return self.entropy_from_nats(0.0, false);
        }
        let chol = Cholesky::factor(self.submatrix(subset), k, self.params.variance_floor);
        let nats = 0.5 * k as f64 * (1.0 + (2.0 * PI).ln()) + 0.5 * chol.log_det();
        self.entropy_from_nats(nats, chol.floored())
    }

    /// Differential entropy of reading `i` given the readings in `cond`,
    /// via the Schur complement of the conditioning block.
    pub fn conditional_entropy(&self, i: usize, cond: &[usize]) -> Result<Entropy> {
        if i >= self.len() {
            return Err(Error::UnknownId { kind: "sensor", id: i });
        }
        if let Some(&bad) = cond.iter().find(|&&j| j >= self.len()) {
            return Err(Error::UnknownId { kind: "sensor", id: bad });
        }
        if cond.contains(&i) {
            return Err(Error::InvalidArgument(format!(
                "sensor {i} cannot condition on itself"
            )));
        }
        let (var, floored) = self.conditional_variance(i, cond);
        Ok(self.entropy_from_nats(0.5 * (2.0 * PI * std::f64::consts::E * var).ln(), floored))
    }

    /// `Sigma_ii - Sigma_ic Sigma_cc^-1 Sigma_ci`, floored. Unchecked ids.
    pub(crate) fn conditional_variance(&self, i: usize, cond: &[usize]) -> (f64, bool) {
        let floor = self.params.variance_floor;
        if cond.is_empty() {
            return (self.params.beta, false);
        }
        let chol = Cholesky::factor(self.submatrix(cond), cond.len(), floor);
        let cross: Vec<f64> = cond.iter().map(|&j| self.sigma(i, j)).collect();
        let z = chol.solve_lower(&cross);
        let var = self.params.beta - dot(&z, &z);
        if var >= floor {
            (var, chol.floored())
        } else {
            (floor, true)
        }
    }
}
