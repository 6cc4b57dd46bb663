use iobt_activation::radio::{
    capacity, expected_secrecy_from_capacities, secrecy_from_capacities, snr, ChannelParams,
};
use proptest::prelude::*;

/// Literal product-sum form: sum over j of prod_{k<j}(1 - I_k) * I_j * C_j,
/// subtracted from the sink capacity and clamped.
fn product_sum(sink: f64, caps: &[f64], flags: &[bool]) -> f64 {
    let mut eaves = 0.0;
    for j in 0..caps.len() {
        let mut term = if flags[j] { caps[j] } else { 0.0 };
        for &f in &flags[..j] {
            term *= if f { 0.0 } else { 1.0 };
        }
        eaves += term;
    }
    if flags.iter().any(|&f| f) {
        (sink - eaves).max(0.0)
    } else {
        sink
    }
}

fn brute_expectation(sink: f64, caps: &[f64], p: f64) -> f64 {
    let n = caps.len();
    let mut total = 0.0;
    for mask in 0..1u32 << n {
        let flags: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
        let weight: f64 = flags.iter().map(|&f| if f { p } else { 1.0 - p }).product();
        total += weight * product_sum(sink, caps, &flags);
    }
    total
}

fn capacities() -> impl Strategy<Value = (f64, Vec<f64>)> {
    (1e6f64..1e10, prop::collection::vec(1e6f64..1e10, 0..=12)).prop_map(|(s, mut c)| {
        c.sort_by(|a, b| b.total_cmp(a));
        (s, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn realized_matches_product_sum((sink, caps) in capacities(), mask in any::<u32>()) {
        let flags: Vec<bool> = (0..caps.len()).map(|k| mask >> k & 1 == 1).collect();
        let s = secrecy_from_capacities(sink, &caps, &flags).unwrap();
        prop_assert_eq!(s, product_sum(sink, &caps, &flags));
        prop_assert!((0.0..=sink).contains(&s));
    }

    #[test]
    fn closed_form_matches_enumeration((sink, caps) in capacities(), p in 0.0f64..=1.0) {
        let closed = expected_secrecy_from_capacities(sink, &caps, p);
        let brute = brute_expectation(sink, &caps, p);
        prop_assert!((closed - brute).abs() <= 1e-9 * brute.abs().max(1e-30), "{closed} vs {brute}");
    }

    #[test]
    fn expectation_non_increasing_in_belief((sink, caps) in capacities()) {
        let values: Vec<f64> = (0..=10).map(|k| expected_secrecy_from_capacities(sink, &caps, k as f64 / 10.0)).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert_eq!(values[0], sink);
    }

    #[test]
    fn capacity_decreasing(d1 in 0.01f64..100.0, gap in 1e-3f64..50.0) {
        let p = ChannelParams::default();
        prop_assert!(capacity(d1, &p) > capacity(d1 + gap, &p));
        prop_assert!(capacity(d1 + gap, &p) > 0.0);
    }
}

#[test]
fn isolated_expectation_is_sink_capacity() {
    for k in 0..=10 {
        assert_eq!(expected_secrecy_from_capacities(7.5e8, &[], k as f64 / 10.0), 7.5e8);
    }
}

#[test]
fn power_law_and_clamp() {
    let p = ChannelParams {
        path_loss_exp: 2.0,
        ..Default::default()
    };
    assert!((snr(2.0, &p) / snr(4.0, &p) - 4.0).abs() < 1e-12);
    assert_eq!(snr(0.0, &p), snr(p.min_distance, &p));
    assert_eq!(snr(1e-4, &p), snr(p.min_distance, &p));
}

#[test]
fn zero_snr_limit() {
    let p = ChannelParams {
        tx_power: 1e-300,
        ..Default::default()
    };
    assert!(capacity(50.0, &p) < 1e-200);
}
