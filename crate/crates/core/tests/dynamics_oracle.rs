use iobt_activation::dynamics::{run_learning, verify_gbne, InitialProfile};
use iobt_activation::game::{Action, StrategyProfile};
use iobt_activation::oracle::{
    audit_potential_identity, enumerate_equilibria, random_instance, InstanceRanges, MAX_PROFILE_SENSORS,
};
use iobt_activation::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trace_matches_direct_potential(seed in any::<u64>(), start in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_instance(&InstanceRanges::default(), &mut rng).unwrap();
        let init = [InitialProfile::AllTransmit, InitialProfile::AllSleep, InitialProfile::Random][start as usize]
            .build(ctx.len(), rng.gen());
        let out = run_learning(&ctx, init.clone(), 50).unwrap();
        prop_assert!(out.converged);
        prop_assert_eq!(*out.flips_per_pass.last().unwrap(), 0);
        prop_assert_eq!(out.flips_per_pass.len(), out.passes);
        prop_assert_eq!(out.expected_potential_trace.len(), out.total_flips());

        // replay the flips to recover each intermediate profile
        let mut profile = init;
        let mut replayed = Vec::new();
        let mut messages = 0u64;
        'outer: for _ in 0..out.passes {
            let mut changed = false;
            for i in 0..ctx.len() {
                let br = ctx.best_response(i, &profile);
                if br != profile.get(i) {
                    profile.set(i, br);
                    replayed.push(ctx.expected_potential(&profile));
                    messages += 1 + ctx.graph().degree(i) as u64;
                    changed = true;
                }
            }
            if !changed {
                break 'outer;
            }
        }
        prop_assert_eq!(&profile, &out.final_profile);
        prop_assert_eq!(messages, out.messages_sent);
        let scale = replayed.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        for (a, b) in out.expected_potential_trace.iter().zip(&replayed) {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
        for w in replayed.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * scale);
        }

        prop_assert!(verify_gbne(&ctx, &out.final_profile).is_equilibrium);
        let again = run_learning(&ctx, out.final_profile.clone(), 50).unwrap();
        prop_assert_eq!(again.passes, 1);
        prop_assert_eq!(again.messages_sent, 0);
        prop_assert_eq!(again.final_profile, out.final_profile);
    }

    #[test]
    fn equilibria_contain_potential_maximizer(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranges = InstanceRanges { m: (1, 8), comm_range: (0.5, 6.0), ..Default::default() };
        let ctx = random_instance(&ranges, &mut rng).unwrap();
        let report = enumerate_equilibria(&ctx).unwrap();
        prop_assert!(!report.equilibria.is_empty());
        prop_assert!(report.contains(&report.potential_maximizer));
        prop_assert!(report.identity_max_error <= 1e-9);
        for e in &report.equilibria {
            prop_assert!(verify_gbne(&ctx, e).is_equilibrium);
        }
        let out = run_learning(&ctx, StrategyProfile::all(ctx.len(), Action::Transmit), 50).unwrap();
        prop_assert!(report.contains(&out.final_profile));
    }

    #[test]
    fn audit_within_tolerance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = random_instance(&InstanceRanges::default(), &mut rng).unwrap();
        prop_assert!(audit_potential_identity(&ctx, 20, seed) <= 1e-9);
    }
}

#[test]
fn oracle_refuses_large_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let ranges = InstanceRanges {
        m: (MAX_PROFILE_SENSORS + 1, MAX_PROFILE_SENSORS + 1),
        ..Default::default()
    };
    let ctx = random_instance(&ranges, &mut rng).unwrap();
    assert!(matches!(enumerate_equilibria(&ctx), Err(Error::TooLarge { .. })));
}

#[test]
fn twelve_sensor_games_have_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ranges = InstanceRanges {
        m: (12, 12),
        ..Default::default()
    };
    for _ in 0..3 {
        let ctx = random_instance(&ranges, &mut rng).unwrap();
        assert!(!enumerate_equilibria(&ctx).unwrap().equilibria.is_empty());
    }
}
