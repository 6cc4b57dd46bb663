use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::dynamics::{run_learning, LearningOutcome};
use crate::error::{Error, Result};
use crate::field::{CovarianceModel, Entropy};
use crate::game::{EnergyModel, GameContext, StrategyProfile};
use crate::radio::{BeliefModel, TypeAssignment};
use crate::topology::{Deployment, NetworkGraph};

/// Independent sub-seeds of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub deployment: u64,
    pub types: u64,
    pub initial: u64,
}

impl RunSeeds {
    /// Splits `(master_seed, run_index)` through a dedicated ChaCha stream,
    /// so a run's randomness does not depend on which other runs exist.
    pub fn derive(master_seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(run_index);
        Self {
            deployment: rng.gen(),
            types: rng.gen(),
            initial: rng.gen(),
        }
    }
}

/// Ground-truth types: each sensor compromised independently with `p_e`.
pub fn sample_types(m: usize, p_e: f64, seed: u64) -> Result<TypeAssignment> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::InvalidConfig(format!("p_e must lie in [0, 1], got {p_e}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flags: Vec<bool> = (0..m).map(|_| rng.gen_bool(p_e)).collect();
    Ok(TypeAssignment::from_compromised(&flags))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run_index: u64,
    pub m: usize,
    pub p_e: f64,
    pub activated: usize,
    pub activation_fraction: f64,
    pub energy_reduction_pct: f64,
    /// Joint entropy of the transmitting sensors (0 for an empty set).
    pub active_joint_entropy: Entropy,
    /// Sum of realised secrecy capacities of transmitting sensors, bits/s.
    pub realized_secrecy_sum: f64,
    pub compromised: usize,
    pub passes: usize,
    pub messages: u64,
    pub converged: bool,
}

/// Everything a run produced, for callers that need more than the metrics.
#[derive(Debug, Clone)]
pub struct RunDetail {
    pub deployment: Deployment,
    pub context: GameContext,
    pub types: TypeAssignment,
    pub outcome: LearningOutcome,
    pub metrics: RunMetrics,
}

/// Builds the game for one run of `config` without learning.
pub fn build_context(config: &ExperimentConfig, seeds: RunSeeds) -> Result<(Deployment, GameContext)> {
    config.validate()?;
    let deployment =
        Deployment::uniform(config.m, config.side_length, seeds.deployment)?.with_sinks(config.sink_layout)?;
    let graph = NetworkGraph::build(&deployment, config.r)?;
    let field = CovarianceModel::new(&deployment, config.correlation.clone())?;
    let ctx = GameContext::new(
        &deployment,
        graph,
        field,
        config.channel.clone(),
        BeliefModel::uniform(config.m, config.p_e)?,
        config.energy_model(config.m)?,
        config.energy_weight,
    )?;
    Ok((deployment, ctx))
}

/// Percentage of the all-transmit energy saved by `profile`.
pub fn energy_reduction_pct(energy: &EnergyModel, profile: &StrategyProfile) -> f64 {
    let baseline = energy.total();
    if baseline <= 0.0 {
        return 0.0;
    }
    let spent: f64 = profile.active().iter().map(|&i| energy.e[i]).sum();
    100.0 * (baseline - spent) / baseline
}

pub fn run_detailed(config: &ExperimentConfig, run_index: u64) -> Result<RunDetail> {
    let seeds = RunSeeds::derive(config.master_seed, run_index);
    let (deployment, context) = build_context(config, seeds)?;
    let types = sample_types(config.m, config.p_e, seeds.types)?;
    let initial = config.initial_profile.build(config.m, seeds.initial);
    let outcome = run_learning(&context, initial, config.max_passes)?;

    let active = outcome.final_profile.active();
    let energy_reduction_pct = energy_reduction_pct(context.energy(), &outcome.final_profile);
    let metrics = RunMetrics {
        run_index,
        m: config.m,
        p_e: config.p_e,
        activated: active.len(),
        activation_fraction: active.len() as f64 / config.m as f64,
        energy_reduction_pct,
        active_joint_entropy: context.field().joint_entropy(&active),
        realized_secrecy_sum: active.iter().map(|&i| context.realized_secrecy(i, &types)).sum(),
        compromised: types.compromised_count(),
        passes: outcome.passes,
        messages: outcome.messages_sent,
        converged: outcome.converged,
    };
    Ok(RunDetail {
        deployment,
        context,
        types,
        outcome,
        metrics,
    })
}

/// Deploys, learns and measures one run; the baseline is everyone transmitting.
pub fn run_single(config: &ExperimentConfig, run_index: u64) -> Result<RunMetrics> {
    run_detailed(config, run_index).map(|d| d.metrics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            m: 60,
            side_length: 15.0,
            runs: 3,
            ..Default::default()
        }
    }

    #[test]
    fn type_sampling() {
        assert_eq!(sample_types(100, 0.0, 1).unwrap().compromised_count(), 0);
        assert_eq!(sample_types(100, 1.0, 1).unwrap().compromised_count(), 100);
        let frac = sample_types(10_000, 0.5, 9).unwrap().compromised_count() as f64 / 1e4;
        assert!((0.47..=0.53).contains(&frac), "{frac}");
        assert_eq!(sample_types(50, 0.3, 4).unwrap(), sample_types(50, 0.3, 4).unwrap());
        assert!(sample_types(5, 1.1, 0).is_err());
    }

    #[test]
    fn seeds_are_split_per_run() {
        let a = RunSeeds::derive(7, 0);
        assert_eq!(a, RunSeeds::derive(7, 0));
        assert_ne!(a, RunSeeds::derive(7, 1));
        assert_ne!(a, RunSeeds::derive(8, 0));
        assert_ne!(a.deployment, a.types);
    }

    #[test]
    fn run_is_deterministic() {
        let c = small();
        assert_eq!(run_single(&c, 2).unwrap(), run_single(&c, 2).unwrap());
    }

    #[test]
    fn metrics_are_consistent() {
        let c = small();
        let d = run_detailed(&c, 0).unwrap();
        let m = &d.metrics;
        assert!(m.converged);
        assert!(m.activated <= c.m);
        assert_eq!(m.activated, d.outcome.final_profile.active_count());
        let expected = 100.0 * (1.0 - m.activated as f64 / c.m as f64);
        assert!((m.energy_reduction_pct - expected).abs() < 1e-9);
    }

    #[test]
    fn energy_reduction_arithmetic() {
        let e = EnergyModel::uniform(4, 0.1, 1e-3).unwrap();
        let one = StrategyProfile::from_mask(4, 0b0100);
        assert!((energy_reduction_pct(&e, &one) - 75.0).abs() < 1e-12);
        assert_eq!(energy_reduction_pct(&e, &StrategyProfile::from_mask(4, 0)), 100.0);
        assert_eq!(energy_reduction_pct(&e, &StrategyProfile::from_mask(4, 0b1111)), 0.0);
    }

    #[test]
    fn nothing_active_means_full_saving() {
        // energy so expensive nobody transmits
        let mut c = small();
        c.energy_weight = 1e30;
        let m = run_single(&c, 0).unwrap();
        assert_eq!(m.activated, 0);
        assert_eq!(m.energy_reduction_pct, 100.0);
        assert_eq!(m.active_joint_entropy.value, 0.0);
        assert_eq!(m.realized_secrecy_sum, 0.0);
    }

    #[test]
    fn invalid_config_is_reported() {
        let mut c = small();
        c.p_e = 2.0;
        assert!(matches!(run_single(&c, 0), Err(Error::InvalidConfig(_))));
    }
}
