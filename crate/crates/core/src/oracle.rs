//! Brute-force references for small instances.
//!
//! Everything here enumerates: all `2^M` strategy profiles, or all type
//! vectors of a neighbourhood. The closed forms used by the game and the
//! dynamics are checked against these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::verify_gbne;
use crate::error::{Error, Result};
use crate::field::{CorrelationParams, CovarianceModel};
use crate::game::{EnergyModel, GameContext, StrategyProfile};
use crate::radio::{BeliefModel, ChannelParams, TypeAssignment};
use crate::topology::{Deployment, NetworkGraph};

/// Largest `M` for profile enumeration.
pub const MAX_PROFILE_SENSORS: usize = 15;
/// Largest neighbourhood for type enumeration.
pub const MAX_TYPE_SENSORS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub equilibria: Vec<StrategyProfile>,
    pub potential_maximizer: StrategyProfile,
    pub max_expected_potential: f64,
    /// Worst relative mismatch between expected-potential differences and
    /// expected repercussion-utility differences over every unilateral flip.
    pub identity_max_error: f64,
}

impl OracleReport {
    pub fn contains(&self, profile: &StrategyProfile) -> bool {
        self.equilibria.iter().any(|e| e == profile)
    }
}

fn relative_error(reference: f64, other: f64) -> f64 {
    (reference - other).abs() / reference.abs().max(1e-30)
}

fn flipped(profile: &StrategyProfile, i: usize) -> StrategyProfile {
    let mut out = profile.clone();
    out.set(i, profile.get(i).flipped());
    out
}

/// Checks every profile against the equilibrium condition.
pub fn enumerate_equilibria(ctx: &GameContext) -> Result<OracleReport> {
    let m = ctx.len();
    if m > MAX_PROFILE_SENSORS {
        return Err(Error::TooLarge {
            size: m,
            limit: MAX_PROFILE_SENSORS,
        });
    }
    let mut equilibria = Vec::new();
    let mut best: Option<(f64, StrategyProfile)> = None;
    let mut identity_max_error: f64 = 0.0;

    for mask in 0..1u64 << m {
        let profile = StrategyProfile::from_mask(m, mask);
        let utilities: Vec<f64> = (0..m).map(|k| ctx.expected_utility(k, &profile)).collect();
        let potential: f64 = utilities.iter().sum();

        for i in 0..m {
            let other = flipped(&profile, i);
            let dv: f64 = (0..m)
                .map(|k| utilities[k] - ctx.expected_utility(k, &other))
                .sum();
            let dq = ctx.expected_repercussion_utility(i, &profile)
                - ctx.expected_repercussion_utility(i, &other);
            identity_max_error = identity_max_error.max(relative_error(dv, dq));
        }
        if verify_gbne(ctx, &profile).is_equilibrium {
            equilibria.push(profile.clone());
        }
        if best.as_ref().map_or(true, |(v, _)| potential > *v) {
            best = Some((potential, profile));
        }
    }
    let (max_expected_potential, potential_maximizer) = best.expect("at least one profile");
    Ok(OracleReport {
        equilibria,
        potential_maximizer,
        max_expected_potential,
        identity_max_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Secrecy capacity of the sensor, over its neighbours' types.
    Secrecy,
    /// Plain utility, over its neighbours' types.
    Utility,
    /// Repercussion utility, over the types of the sensor and its 2-hop
    /// neighbourhood. Needs a common prior.
    Repercussion,
}

/// Probability-weighted sum over every type configuration of the relevant
/// neighbourhood. Sensors outside it are uncompromised (they cannot matter).
pub fn expected_value_by_enumeration(
    ctx: &GameContext,
    i: usize,
    profile: &StrategyProfile,
    scope: Scope,
) -> Result<f64> {
    if i >= ctx.len() {
        return Err(Error::UnknownId { kind: "sensor", id: i });
    }
    let (members, p): (Vec<usize>, f64) = match scope {
        Scope::Secrecy | Scope::Utility => (ctx.graph().adjacency[i].clone(), ctx.beliefs().p[i]),
        Scope::Repercussion => {
            let p = ctx.beliefs().common_prior().ok_or_else(|| {
                Error::InvalidArgument(
                    "repercussion enumeration needs identical beliefs at every sensor".into(),
                )
            })?;
            let mut members = ctx.graph().two_hop[i].clone();
            members.push(i);
            (members, p)
        }
    };
    if members.len() > MAX_TYPE_SENSORS {
        return Err(Error::TooLarge {
            size: members.len(),
            limit: MAX_TYPE_SENSORS,
        });
    }
    let mut flags = vec![false; ctx.len()];
    let mut total = 0.0;
    for mask in 0..1u64 << members.len() {
        let mut weight = 1.0;
        for (bit, &k) in members.iter().enumerate() {
            let c = mask >> bit & 1 == 1;
            flags[k] = c;
            weight *= if c { p } else { 1.0 - p };
        }
        if weight == 0.0 {
            continue;
        }
        let types = TypeAssignment::from_compromised(&flags);
        let value = match scope {
            Scope::Secrecy => ctx.realized_secrecy(i, &types),
            Scope::Utility => ctx.realized_utility(i, profile, &types),
            Scope::Repercussion => ctx.repercussion_utility(i, profile, &types),
        };
        total += weight * value;
    }
    Ok(total)
}

/// Samples random `(profile, types, sensor)` triples and returns the worst
/// relative gap between the potential difference of a unilateral flip and
/// the flipper's repercussion-utility difference.
///
/// The potential difference is summed player by player over all `M` sensors,
/// so non-neighbours contribute exact zeros.
pub fn audit_potential_identity(ctx: &GameContext, trials: usize, seed: u64) -> f64 {
    let m = ctx.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let profile = StrategyProfile {
            a: (0..m).map(|_| rng.gen_bool(0.5).into()).collect(),
        };
        let flags: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
        let types = TypeAssignment::from_compromised(&flags);
        let i = rng.gen_range(0..m);
        let other = flipped(&profile, i);
        let dv: f64 = (0..m)
            .map(|k| ctx.realized_utility(k, &profile, &types) - ctx.realized_utility(k, &other, &types))
            .sum();
        let dq = ctx.repercussion_utility(i, &profile, &types)
            - ctx.repercussion_utility(i, &other, &types);
        worst = worst.max(relative_error(dv, dq));
    }
    worst
}

/// Ranges for random audit instances. Sensors are dropped by the regular
/// uniform deployment code.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRanges {
    pub m: (usize, usize),
    pub side_length: (f64, f64),
    pub comm_range: (f64, f64),
    pub belief: (f64, f64),
    /// log10 of the energy weight; wide so the energy term sometimes binds.
    pub log10_energy_weight: (f64, f64),
}

impl Default for InstanceRanges {
    fn default() -> Self {
        Self {
            m: (1, 10),
            side_length: (1.0, 6.0),
            comm_range: (0.5, 3.0),
            belief: (0.0, 1.0),
            log10_energy_weight: (0.0, 13.0),
        }
    }
}

/// Draws a random small game. Beliefs are a common prior.
pub fn random_instance(ranges: &InstanceRanges, rng: &mut impl Rng) -> Result<GameContext> {
    let m = rng.gen_range(ranges.m.0..=ranges.m.1);
    let side = rng.gen_range(ranges.side_length.0..=ranges.side_length.1);
    let r = rng.gen_range(ranges.comm_range.0..=ranges.comm_range.1);
    let p = rng.gen_range(ranges.belief.0..=ranges.belief.1);
    let weight = 10f64.powf(rng.gen_range(ranges.log10_energy_weight.0..=ranges.log10_energy_weight.1));
    let dep = Deployment::uniform(m, side, rng.gen())?;
    let graph = NetworkGraph::build(&dep, r)?;
    let field = CovarianceModel::new(&dep, CorrelationParams::default())?;
    let channel = ChannelParams::default();
    let energy = EnergyModel::uniform(m, channel.tx_power, 1e-3)?;
    GameContext::new(&dep, graph, field, channel, BeliefModel::uniform(m, p)?, energy, weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Action;
    use crate::topology::Position;

    fn context(points: &[(f64, f64)], r: f64, p: f64) -> GameContext {
        let pos: Vec<Position> = points.iter().map(|&(x, y)| Position::new(x, y)).collect();
        let m = pos.len();
        let dep = Deployment::from_positions(pos, 100.0).unwrap();
        let graph = NetworkGraph::build(&dep, r).unwrap();
        let field = CovarianceModel::new(&dep, CorrelationParams::default()).unwrap();
        let channel = ChannelParams::default();
        let energy = EnergyModel::uniform(m, channel.tx_power, 1e-3).unwrap();
        GameContext::new(&dep, graph, field, channel, BeliefModel::uniform(m, p).unwrap(), energy, 1.0)
            .unwrap()
    }

    #[test]
    fn single_sensor() {
        let ctx = context(&[(10.0, 10.0)], 2.0, 0.4);
        let report = enumerate_equilibria(&ctx).unwrap();
        let br = ctx.best_response(0, &StrategyProfile::all(1, Action::Sleep));
        assert_eq!(report.equilibria, vec![StrategyProfile::all(1, br)]);
        assert_eq!(audit_potential_identity(&ctx, 50, 1), 0.0);
    }

    #[test]
    fn decoupled_pair() {
        let ctx = context(&[(10.0, 10.0), (80.0, 80.0)], 2.0, 0.4);
        let report = enumerate_equilibria(&ctx).unwrap();
        let any = StrategyProfile::all(2, Action::Sleep);
        let expected = StrategyProfile {
            a: vec![ctx.best_response(0, &any), ctx.best_response(1, &any)],
        };
        assert_eq!(report.equilibria, vec![expected]);
        assert_eq!(audit_potential_identity(&ctx, 100, 2), 0.0);
    }

    #[test]
    fn maximizer_is_an_equilibrium() {
        let pts = [
            (50.0, 50.0),
            (50.3, 50.1),
            (50.9, 49.7),
            (49.6, 50.4),
            (50.1, 51.0),
            (51.2, 50.6),
            (49.9, 49.2),
            (50.6, 50.5),
        ];
        let ctx = context(&pts, 10.0, 0.3);
        let report = enumerate_equilibria(&ctx).unwrap();
        assert!(!report.equilibria.is_empty());
        assert!(report.contains(&report.potential_maximizer));
        assert!(report.identity_max_error <= 1e-9);
    }

    #[test]
    fn size_limits() {
        let pts: Vec<(f64, f64)> = (0..16).map(|k| (k as f64 * 5.0, 1.0)).collect();
        let ctx = context(&pts, 2.0, 0.1);
        assert!(matches!(enumerate_equilibria(&ctx), Err(Error::TooLarge { size: 16, .. })));

        let crowd: Vec<(f64, f64)> = (0..22).map(|k| (50.0 + 0.01 * k as f64, 50.0)).collect();
        let ctx = context(&crowd, 2.0, 0.1);
        let prof = StrategyProfile::all(22, Action::Transmit);
        assert!(matches!(
            expected_value_by_enumeration(&ctx, 0, &prof, Scope::Secrecy),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn degenerate_priors() {
        let pts = [(50.0, 50.0), (50.3, 50.1), (50.9, 49.7), (55.0, 50.0)];
        let prof = StrategyProfile::from_mask(4, 0b1011);
        for (p, compromised) in [(0.0, false), (1.0, true)] {
            let ctx = context(&pts, 2.0, p);
            let types = TypeAssignment::from_compromised(&[compromised; 4]);
            let s = expected_value_by_enumeration(&ctx, 0, &prof, Scope::Secrecy).unwrap();
            assert_eq!(s, ctx.realized_secrecy(0, &types));
            let u = expected_value_by_enumeration(&ctx, 0, &prof, Scope::Utility).unwrap();
            assert_eq!(u, ctx.realized_utility(0, &prof, &types));
        }
    }

    #[test]
    fn heterogeneous_beliefs_block_repercussion_enumeration() {
        let pos = vec![Position::new(1.0, 1.0), Position::new(1.5, 1.0)];
        let dep = Deployment::from_positions(pos, 10.0).unwrap();
        let graph = NetworkGraph::build(&dep, 2.0).unwrap();
        let field = CovarianceModel::new(&dep, CorrelationParams::default()).unwrap();
        let ctx = GameContext::new(
            &dep,
            graph,
            field,
            ChannelParams::default(),
            BeliefModel::new(vec![0.1, 0.7]).unwrap(),
            EnergyModel::uniform(2, 0.1, 1e-3).unwrap(),
            1.0,
        )
        .unwrap();
        let prof = StrategyProfile::all(2, Action::Transmit);
        assert!(expected_value_by_enumeration(&ctx, 0, &prof, Scope::Repercussion).is_err());
        assert!(expected_value_by_enumeration(&ctx, 0, &prof, Scope::Utility).is_ok());
    }
}
