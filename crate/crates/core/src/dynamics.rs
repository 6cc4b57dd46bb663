//! Sequential best-response learning with simulated 2-hop broadcast.
//!
//! Sensors update in id order. Each update immediately becomes visible to the
//! sensors after it in the same pass. A changed action costs one broadcast by
//! the sensor plus one relay per neighbour, which is how the new action reaches
//! the 2-hop neighbourhood whose repercussion utilities depend on it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, GameContext, StrategyProfile, TIE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningOutcome {
    pub final_profile: StrategyProfile,
    /// Full passes over the sensors, including the final confirming pass.
    pub passes: usize,
    pub flips_per_pass: Vec<usize>,
    pub messages_sent: u64,
    /// Expected potential after each action change.
    pub expected_potential_trace: Vec<f64>,
    pub converged: bool,
}

impl LearningOutcome {
    pub fn total_flips(&self) -> usize {
        self.flips_per_pass.iter().sum()
    }
}

/// Runs best-response passes until one pass changes nothing or `max_passes`
/// is exhausted. Non-convergence is reported, not raised.
pub fn run_learning(
    ctx: &GameContext,
    initial: StrategyProfile,
    max_passes: usize,
) -> Result<LearningOutcome> {
    if max_passes == 0 {
        return Err(Error::InvalidArgument("max_passes must be at least 1".into()));
    }
    if initial.len() != ctx.len() {
        return Err(Error::InvalidArgument(format!(
            "initial profile has {} actions for {} sensors",
            initial.len(),
            ctx.len()
        )));
    }
    let mut profile = initial;
    let mut potential = ctx.expected_potential(&profile);
    let mut outcome = LearningOutcome {
        final_profile: StrategyProfile::all(0, Action::Sleep),
        passes: 0,
        flips_per_pass: Vec::new(),
        messages_sent: 0,
        expected_potential_trace: Vec::new(),
        converged: false,
    };

    for pass in 1..=max_passes {
        let mut flips = 0;
        for i in 0..ctx.len() {
            let advantage = ctx.transmit_advantage(i, &profile);
            let response = Action::from(advantage > TIE_TOLERANCE);
            if response == profile.get(i) {
                continue;
            }
            // By the exact-potential identity the potential moves by the
            // deviator's repercussion gain.
            let gain = if response.is_transmit() { advantage } else { -advantage };
            profile.set(i, response);
            potential += gain;
            flips += 1;
            outcome.messages_sent += 1 + ctx.graph().degree(i) as u64;
            outcome.expected_potential_trace.push(potential);
        }
        outcome.passes = pass;
        outcome.flips_per_pass.push(flips);
        if flips == 0 {
            outcome.converged = true;
            break;
        }
    }
    outcome.final_profile = profile;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbneCheck {
    pub is_equilibrium: bool,
    /// Sensors that gain more than the tie tolerance by flipping.
    pub deviators: Vec<usize>,
}

/// Checks the equilibrium condition under expected repercussion utilities.
pub fn verify_gbne(ctx: &GameContext, profile: &StrategyProfile) -> GbneCheck {
    let deviators: Vec<usize> = (0..ctx.len())
        .filter(|&i| {
            let advantage = ctx.transmit_advantage(i, profile);
            let gain = if profile.get(i).is_transmit() { -advantage } else { advantage };
            gain > TIE_TOLERANCE
        })
        .collect();
    GbneCheck {
        is_equilibrium: deviators.is_empty(),
        deviators,
    }
}

/// Starting strategy vector for learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialProfile {
    #[default]
    AllTransmit,
    AllSleep,
    /// Each sensor transmits with probability 1/2, drawn from the run seed.
    Random,
}

impl InitialProfile {
    pub fn build(self, m: usize, seed: u64) -> StrategyProfile {
        match self {
            InitialProfile::AllTransmit => StrategyProfile::all(m, Action::Transmit),
            InitialProfile::AllSleep => StrategyProfile::all(m, Action::Sleep),
            InitialProfile::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                StrategyProfile {
                    a: (0..m).map(|_| Action::from(rng.gen_bool(0.5))).collect(),
                }
            }
        }
    }
}

impl fmt::Display for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialProfile::AllTransmit => "all-transmit",
            InitialProfile::AllSleep => "all-sleep",
            InitialProfile::Random => "random",
        })
    }
}

impl FromStr for InitialProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all-transmit" => Ok(InitialProfile::AllTransmit),
            "all-sleep" => Ok(InitialProfile::AllSleep),
            "random" => Ok(InitialProfile::Random),
            other => Err(Error::InvalidConfig(format!(
                "unknown initial profile {other:?} (expected all-transmit, all-sleep or random)"
            ))),
        }
    }
}

impl TryFrom<String> for InitialProfile {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InitialProfile> for String {
    fn from(p: InitialProfile) -> Self {
        p.to_string()
    }
}
