//! Oracle suite behind the `verify` command.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run_learning, InitialProfile};
use crate::error::Result;
use crate::oracle::{
    audit_potential_identity, enumerate_equilibria, expected_value_by_enumeration, random_instance,
    InstanceRanges, Scope,
};
use crate::game::StrategyProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances for the potential audit.
    pub audit_instances: usize,
    /// Samples drawn per audit instance.
    pub audit_trials: usize,
    /// Sensors checked against type enumeration.
    pub secrecy_sensors: usize,
    /// Small instances checked against profile enumeration.
    pub containment_instances: usize,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            audit_instances: 1000,
            audit_trials: 10,
            secrecy_sensors: 1000,
            containment_instances: 200,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// Worst error for numeric checks, failures for counting checks.
    pub worst: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Potential identity on random small games: worst relative error over
/// `audit_instances * audit_trials` unilateral flips.
pub fn check_potential_identity(opts: &VerifyOptions) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.audit_instances {
        let ctx = random_instance(&InstanceRanges::default(), &mut rng)?;
        worst = worst.max(audit_potential_identity(&ctx, opts.audit_trials, rng.gen()));
    }
    Ok(CheckResult {
        name: "potential-identity".into(),
        passed: worst <= opts.tolerance,
        samples: opts.audit_instances * opts.audit_trials,
        worst,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Closed-form expected secrecy against enumeration over neighbour types,
/// for sensors with at most 12 neighbours.
pub fn check_expected_secrecy(opts: &VerifyOptions) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5ec);
    let ranges = InstanceRanges {
        m: (1, 13),
        side_length: (0.5, 4.0),
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < opts.secrecy_sensors {
        let ctx = random_instance(&ranges, &mut rng)?;
        let i = rng.gen_range(0..ctx.len());
        let profile = StrategyProfile::from_mask(ctx.len(), 0);
        let brute = expected_value_by_enumeration(&ctx, i, &profile, Scope::Secrecy)?;
        let closed = ctx.expected_secrecy(i);
        worst = worst.max((brute - closed).abs() / brute.abs().max(1e-30));
        checked += 1;
    }
    Ok(CheckResult {
        name: "expected-secrecy".into(),
        passed: worst <= opts.tolerance,
        samples: checked,
        worst,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Learning from a random start on small games must converge to a profile
/// the exhaustive search lists as an equilibrium.
pub fn check_equilibrium_containment(opts: &VerifyOptions) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xe9);
    let mut failures = 0usize;
    for _ in 0..opts.containment_instances {
        let ctx = random_instance(&InstanceRanges::default(), &mut rng)?;
        let initial = InitialProfile::Random.build(ctx.len(), rng.gen());
        let outcome = run_learning(&ctx, initial, 50)?;
        let report = enumerate_equilibria(&ctx)?;
        if !outcome.converged || !report.contains(&outcome.final_profile) {
            failures += 1;
        }
    }
    Ok(CheckResult {
        name: "equilibrium-containment".into(),
        passed: failures == 0,
        samples: opts.containment_instances,
        worst: failures as f64,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_verification(opts: &VerifyOptions) -> Result<VerifyReport> {
    Ok(VerifyReport {
        checks: vec![
            check_potential_identity(opts)?,
            check_expected_secrecy(opts)?,
            check_equilibrium_containment(opts)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_suite_passes() {
        let opts = VerifyOptions {
            audit_instances: 40,
            audit_trials: 5,
            secrecy_sensors: 40,
            containment_instances: 20,
            ..Default::default()
        };
        let report = run_verification(&opts).unwrap();
        assert_eq!(report.checks.len(), 3);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks[0].samples, 200);
    }
}
