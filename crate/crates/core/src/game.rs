//! The activation game: per-sensor utilities, repercussion utilities, the
//! potential and best responses.
//!
//! A transmitting sensor earns `D * C - w * E`, where `D` is the conditional
//! entropy of its reading given its *active* neighbours, `C` its secrecy
//! capacity, `E` its per-slot energy and `w` a dimensionless energy weight.
//! A sleeping sensor earns the negation. The repercussion utility of a
//! transmitting sensor adds the change its transmission causes in each
//! neighbour's utility; with it, the sum of plain utilities is an exact
//! potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::CovarianceModel;
use crate::radio::{
    expected_secrecy_capacity, indicators, secrecy_capacity, BeliefModel, ChannelParams,
    LinkCapacities, TypeAssignment,
};
use crate::topology::{Deployment, NetworkGraph};

/// Gains at or below this (absolute) are ties; ties resolve to sleeping.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Sleep,
    Transmit,
}

impl Action {
    pub fn is_transmit(self) -> bool {
        self == Action::Transmit
    }

    pub fn flipped(self) -> Self {
        match self {
            Action::Sleep => Action::Transmit,
            Action::Transmit => Action::Sleep,
        }
    }

    /// `2a - 1`.
    fn sign(self) -> f64 {
        match self {
            Action::Sleep => -1.0,
            Action::Transmit => 1.0,
        }
    }
}

impl From<bool> for Action {
    fn from(transmit: bool) -> Self {
        if transmit {
            Action::Transmit
        } else {
            Action::Sleep
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub a: Vec<Action>,
}

impl StrategyProfile {
    pub fn all(m: usize, action: Action) -> Self {
        Self { a: vec![action; m] }
    }

    /// Bit `k` of `mask` is sensor `k`'s action (1 = transmit).
    pub fn from_mask(m: usize, mask: u64) -> Self {
        Self {
            a: (0..m).map(|k| Action::from(mask >> k & 1 == 1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn get(&self, i: usize) -> Action {
        self.a[i]
    }

    pub fn set(&mut self, i: usize, action: Action) {
        self.a[i] = action;
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i].is_transmit()).collect()
    }

    pub fn active_count(&self) -> usize {
        self.a.iter().filter(|a| a.is_transmit()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Energy per slot for each sensor, joules.
    pub e: Vec<f64>,
    /// Seconds.
    pub slot_duration: f64,
}

impl EnergyModel {
    /// Every sensor spends `tx_power * slot_duration` per slot.
    pub fn uniform(m: usize, tx_power: f64, slot_duration: f64) -> Result<Self> {
        Self::new(vec![tx_power * slot_duration; m], slot_duration)
    }

    pub fn new(e: Vec<f64>, slot_duration: f64) -> Result<Self> {
        if let Some(bad) = e.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig(format!("per-slot energy must be >= 0, got {bad}")));
        }
        if !(slot_duration > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "slot duration must be positive, got {slot_duration}"
            )));
        }
        Ok(Self { e, slot_duration })
    }

    pub fn total(&self) -> f64 {
        self.e.iter().sum()
    }
}

/// A profile with at most one sensor's action overridden.
#[derive(Clone, Copy)]
struct View<'a> {
    base: &'a [Action],
    forced: Option<(usize, Action)>,
}

impl<'a> View<'a> {
    fn new(profile: &'a StrategyProfile) -> Self {
        Self {
            base: &profile.a,
            forced: None,
        }
    }

    fn with(self, i: usize, action: Action) -> Self {
        Self {
            base: self.base,
            forced: Some((i, action)),
        }
    }

    fn get(&self, k: usize) -> Action {
        match self.forced {
            Some((i, a)) if i == k => a,
            _ => self.base[k],
        }
    }
}

/// Everything needed to evaluate utilities: the graph, the field, the radio
/// links, beliefs and energy, plus per-sensor caches.
#[derive(Debug, Clone)]
pub struct GameContext {
    graph: NetworkGraph,
    field: CovarianceModel,
    channel: ChannelParams,
    beliefs: BeliefModel,
    energy: EnergyModel,
    energy_weight: f64,
    links: LinkCapacities,
    expected_secrecy: Vec<f64>,
}

impl GameContext {
    pub fn new(
        deployment: &Deployment,
        graph: NetworkGraph,
        field: CovarianceModel,
        channel: ChannelParams,
        beliefs: BeliefModel,
        energy: EnergyModel,
        energy_weight: f64,
    ) -> Result<Self> {
        channel.validate()?;
        let m = deployment.len();
        for (what, len) in [
            ("graph", graph.len()),
            ("covariance model", field.len()),
            ("belief vector", beliefs.p.len()),
            ("energy vector", energy.e.len()),
        ] {
            if len != m {
                return Err(Error::InvalidConfig(format!(
                    "{what} covers {len} sensors, deployment has {m}"
                )));
            }
        }
        if !(energy_weight >= 0.0 && energy_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "energy weight must be >= 0, got {energy_weight}"
            )));
        }
        let links = LinkCapacities::compute(deployment, &graph, &channel)?;
        let expected_secrecy = (0..m)
            .map(|i| expected_secrecy_capacity(i, &links, &beliefs))
            .collect::<Result<_>>()?;
        Ok(Self {
            graph,
            field,
            channel,
            beliefs,
            energy,
            energy_weight,
            links,
            expected_secrecy,
        })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn field(&self) -> &CovarianceModel {
        &self.field
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn beliefs(&self) -> &BeliefModel {
        &self.beliefs
    }

    pub fn energy(&self) -> &EnergyModel {
        &self.energy
    }

    pub fn energy_weight(&self) -> f64 {
        self.energy_weight
    }

    pub fn links(&self) -> &LinkCapacities {
        &self.links
    }

    /// Cached expected secrecy capacity of sensor `i` under its belief.
    pub fn expected_secrecy(&self, i: usize) -> f64 {
        self.expected_secrecy[i]
    }

    /// Secrecy capacity of sensor `i` under realised types.
    pub fn realized_secrecy(&self, i: usize, types: &TypeAssignment) -> f64 {
        secrecy_capacity(i, &indicators(i, &self.graph, types), &self.links)
            .expect("indicators follow ordered neighbours")
    }

    /// Conditional entropy of sensor `i` given its transmitting neighbours.
    pub fn information(&self, i: usize, profile: &StrategyProfile) -> f64 {
        self.info(i, View::new(profile))
    }

    fn info(&self, i: usize, view: View<'_>) -> f64 {
        let active: Vec<usize> = self.graph.adjacency[i]
            .iter()
            .copied()
            .filter(|&j| view.get(j).is_transmit())
            .collect();
        self.field
            .conditional_entropy(i, &active)
            .expect("neighbour ids are valid and exclude self")
            .value
    }

    fn payoff(&self, i: usize, action: Action, information: f64, secrecy: f64) -> f64 {
        action.sign() * (information * secrecy - self.energy_weight * self.energy.e[i])
    }

    fn utility(&self, i: usize, view: View<'_>, secrecy: &impl Fn(usize) -> f64) -> f64 {
        self.payoff(i, view.get(i), self.info(i, view), secrecy(i))
    }

    fn repercussion(&self, i: usize, view: View<'_>, secrecy: &impl Fn(usize) -> f64) -> f64 {
        let own = self.utility(i, view, secrecy);
        if !view.get(i).is_transmit() {
            return own;
        }
        let on = view.with(i, Action::Transmit);
        let off = view.with(i, Action::Sleep);
        own + self.graph.adjacency[i]
            .iter()
            .map(|&j| self.utility(j, on, secrecy) - self.utility(j, off, secrecy))
            .sum::<f64>()
    }

    pub fn realized_utility(&self, i: usize, profile: &StrategyProfile, types: &TypeAssignment) -> f64 {
        self.utility(i, View::new(profile), &|k| self.realized_secrecy(k, types))
    }

    pub fn expected_utility(&self, i: usize, profile: &StrategyProfile) -> f64 {
        self.utility(i, View::new(profile), &|k| self.expected_secrecy[k])
    }

    pub fn repercussion_utility(
        &self,
        i: usize,
        profile: &StrategyProfile,
        types: &TypeAssignment,
    ) -> f64 {
        self.repercussion(i, View::new(profile), &|k| self.realized_secrecy(k, types))
    }

    pub fn expected_repercussion_utility(&self, i: usize, profile: &StrategyProfile) -> f64 {
        self.repercussion(i, View::new(profile), &|k| self.expected_secrecy[k])
    }

    /// Sum of every sensor's realised utility.
    pub fn potential(&self, profile: &StrategyProfile, types: &TypeAssignment) -> f64 {
        (0..self.len())
            .map(|i| self.realized_utility(i, profile, types))
            .sum()
    }

    /// Sum of every sensor's expected utility.
    pub fn expected_potential(&self, profile: &StrategyProfile) -> f64 {
        (0..self.len()).map(|i| self.expected_utility(i, profile)).sum()
    }

    /// Expected repercussion utility of sensor `i` playing `action` against
    /// the rest of `profile`.
    pub fn expected_repercussion_if(&self, i: usize, action: Action, profile: &StrategyProfile) -> f64 {
        self.repercussion(
            i,
            View::new(profile).with(i, action),
            &|k| self.expected_secrecy[k],
        )
    }

    /// `q_i(transmit) - q_i(sleep)` against the rest of `profile`.
    pub fn transmit_advantage(&self, i: usize, profile: &StrategyProfile) -> f64 {
        self.expected_repercussion_if(i, Action::Transmit, profile)
            - self.expected_repercussion_if(i, Action::Sleep, profile)
    }

    /// Best response of sensor `i`; ties go to sleeping.
    pub fn best_response(&self, i: usize, profile: &StrategyProfile) -> Action {
        Action::from(self.transmit_advantage(i, profile) > TIE_TOLERANCE)
    }
}
