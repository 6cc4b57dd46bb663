//! Simplified path-loss links and physical-layer secrecy capacity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{Deployment, NetworkGraph, NodeId};

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub path_loss_coeff: f64,
    pub path_loss_exp: f64,
    /// Transmit power, watts.
    pub tx_power: f64,
    /// Receiver noise variance, watts.
    pub noise_var: f64,
    /// Hertz.
    pub bandwidth: f64,
    /// Distances below this are treated as this (meters).
    pub min_distance: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            path_loss_coeff: 1.0,
            path_loss_exp: 3.0,
            tx_power: 0.1,
            noise_var: dbm_to_watts(-90.2),
            bandwidth: 20e6,
            min_distance: 0.01,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("path_loss_coeff", self.path_loss_coeff),
            ("tx_power", self.tx_power),
            ("noise_var", self.noise_var),
            ("bandwidth", self.bandwidth),
            ("min_distance", self.min_distance),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.path_loss_exp >= 2.0 && self.path_loss_exp.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "path_loss_exp must be at least 2, got {}",
                self.path_loss_exp
            )));
        }
        Ok(())
    }
}

/// Received signal-to-noise ratio at distance `d`.
pub fn snr(d: f64, params: &ChannelParams) -> f64 {
    let d = d.max(params.min_distance);
    params.path_loss_coeff * d.powf(-params.path_loss_exp) * params.tx_power / params.noise_var
}

/// Shannon capacity in bits/s at distance `d`.
pub fn capacity(d: f64, params: &ChannelParams) -> f64 {
    params.bandwidth * snr(d, params).ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeType {
    Uncompromised,
    Compromised,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeAssignment {
    pub t: Vec<NodeType>,
}

impl TypeAssignment {
    pub fn all(m: usize, ty: NodeType) -> Self {
        Self { t: vec![ty; m] }
    }

    pub fn from_compromised(flags: &[bool]) -> Self {
        Self {
            t: flags
                .iter()
                .map(|&c| if c { NodeType::Compromised } else { NodeType::Uncompromised })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_compromised(&self, i: usize) -> bool {
        self.t[i] == NodeType::Compromised
    }

    pub fn compromised_count(&self) -> usize {
        self.t.iter().filter(|&&t| t == NodeType::Compromised).count()
    }
}

/// Per-sensor probability that any given neighbour is compromised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefModel {
    pub p: Vec<f64>,
}

impl BeliefModel {
    pub fn uniform(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; m])
    }

    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidConfig(format!(
                "compromise probability must lie in [0, 1], got {bad}"
            )));
        }
        Ok(Self { p })
    }

    /// The shared probability when every sensor holds the same belief.
    pub fn common_prior(&self) -> Option<f64> {
        let first = *self.p.first()?;
        self.p.iter().all(|&q| q == first).then_some(first)
    }
}

/// Sink-link capacity and eavesdropper-link capacities (in nearest-first
/// neighbour order) for every sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCapacities {
    pub sink: Vec<f64>,
    pub neighbor: Vec<Vec<f64>>,
}

impl LinkCapacities {
    pub fn compute(
        deployment: &Deployment,
        graph: &NetworkGraph,
        params: &ChannelParams,
    ) -> Result<Self> {
        if graph.len() != deployment.len() {
            return Err(Error::InvalidArgument(format!(
                "graph has {} sensors, deployment has {}",
                graph.len(),
                deployment.len()
            )));
        }
        let sink = (0..deployment.len())
            .map(|i| deployment.sink_distance(i).map(|d| capacity(d, params)))
            .collect::<Result<_>>()?;
        let neighbor = graph
            .ordered_neighbors
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                nbrs.iter()
                    .map(|&j| deployment.distance(i, NodeId::Sensor(j)).map(|d| capacity(d, params)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self { sink, neighbor })
    }
}

/// Secrecy capacity given which ordered neighbours are eavesdroppers: the
/// sink capacity minus the capacity to the nearest flagged neighbour,
/// clamped at zero.
pub fn secrecy_from_capacities(sink_cap: f64, eaves_caps: &[f64], flagged: &[bool]) -> Result<f64> {
    if eaves_caps.len() != flagged.len() {
        return Err(Error::InvalidArgument(format!(
            "{} indicators for {} neighbours",
            flagged.len(),
            eaves_caps.len()
        )));
    }
    Ok(match flagged.iter().position(|&f| f) {
        Some(k) => (sink_cap - eaves_caps[k]).max(0.0),
        None => sink_cap,
    })
}

/// Expectation of [`secrecy_from_capacities`] when each neighbour is
/// independently an eavesdropper with probability `p`, obtained by
/// conditioning on the nearest eavesdropper.
pub fn expected_secrecy_from_capacities(sink_cap: f64, eaves_caps: &[f64], p: f64) -> f64 {
    let mut none_yet = 1.0;
    let mut total = 0.0;
    for &c in eaves_caps {
        total += none_yet * p * (sink_cap - c).max(0.0);
        none_yet *= 1.0 - p;
    }
    total + none_yet * sink_cap
}

/// Realised secrecy capacity of sensor `i`; `flagged` follows
/// `graph.ordered_neighbors[i]`.
pub fn secrecy_capacity(i: usize, flagged: &[bool], links: &LinkCapacities) -> Result<f64> {
    let sink = *links
        .sink
        .get(i)
        .ok_or(Error::UnknownId { kind: "sensor", id: i })?;
    secrecy_from_capacities(sink, &links.neighbor[i], flagged)
}

pub fn expected_secrecy_capacity(i: usize, links: &LinkCapacities, beliefs: &BeliefModel) -> Result<f64> {
    let sink = *links
        .sink
        .get(i)
        .ok_or(Error::UnknownId { kind: "sensor", id: i })?;
    let p = *beliefs
        .p
        .get(i)
        .ok_or(Error::UnknownId { kind: "sensor", id: i })?;
    Ok(expected_secrecy_from_capacities(sink, &links.neighbor[i], p))
}

/// Eavesdropper indicators of sensor `i`'s ordered neighbours under `types`.
pub fn indicators(i: usize, graph: &NetworkGraph, types: &TypeAssignment) -> Vec<bool> {
    graph.ordered_neighbors[i]
        .iter()
        .map(|&j| types.is_compromised(j))
        .collect()
}
