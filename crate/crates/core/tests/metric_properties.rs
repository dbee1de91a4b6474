//! Metric axioms for the signal distance, cross-checked against the
//! sampling oracle.

use morseflow::{
    distance, metric_diameter, truncation_error_bound, Extension, SymbolicSignal,
};
use morseflow_testkit::metric_oracle::sampled_distance;
use proptest::prelude::*;

const H: f64 = 0.25;

fn signal_strategy() -> impl Strategy<Value = SymbolicSignal> {
    (
        prop::collection::vec(0..3usize, 1..8),
        prop::option::of(0.0..1.0f64),
        -3i64..=3,
        any::<bool>(),
    )
        .prop_map(|(word, tau_frac, anchor, periodic)| {
            let mut tau = tau_frac.map_or(0.0, |f| f * H);
            if tau >= H {
                tau = 0.0;
            }
            let extension = if periodic {
                Extension::PeriodicWord
            } else {
                Extension::ConstantEnds
            };
            SymbolicSignal::new(word, H, tau, anchor, extension).expect("strategy output is valid")
        })
}

proptest! {
    #[test]
    fn symmetric_to_the_bit(x in signal_strategy(), y in signal_strategy(), n in 1usize..25) {
        let fwd = distance(&x, &y, n).unwrap().value;
        let bwd = distance(&y, &x, n).unwrap().value;
        prop_assert_eq!(fwd, bwd);
    }

    #[test]
    fn self_distance_is_exactly_zero(x in signal_strategy(), n in 1usize..25) {
        prop_assert_eq!(distance(&x, &x, n).unwrap().value, 0.0);
    }

    #[test]
    fn bounded_by_the_diameter(x in signal_strategy(), y in signal_strategy(), n in 1usize..25) {
        let d = distance(&x, &y, n).unwrap().value;
        prop_assert!((0.0..=metric_diameter()).contains(&d));
    }

    #[test]
    fn triangle_up_to_rounding(
        x in signal_strategy(),
        y in signal_strategy(),
        z in signal_strategy(),
        n in 1usize..25,
    ) {
        let xz = distance(&x, &z, n).unwrap().value;
        let xy = distance(&x, &y, n).unwrap().value;
        let yz = distance(&y, &z, n).unwrap().value;
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn widening_the_window_adds_at_most_the_tail(
        x in signal_strategy(),
        y in signal_strategy(),
        n in 1usize..20,
        extra in 1usize..6,
    ) {
        let narrow = distance(&x, &y, n).unwrap().value;
        let wide = distance(&x, &y, n + extra).unwrap().value;
        prop_assert!(wide >= narrow - 1e-15);
        prop_assert!(wide - narrow <= truncation_error_bound(n));
    }

    #[test]
    fn matches_the_sampling_oracle(x in signal_strategy(), y in signal_strategy()) {
        let exact = distance(&x, &y, 8).unwrap().value;
        let (approx, bound) = sampled_distance(&x, &y, 8, 512);
        prop_assert!((exact - approx).abs() <= bound + 1e-12);
    }

    #[test]
    fn zero_distance_means_agreement_on_the_window(
        x in signal_strategy(),
        y in signal_strategy(),
        n in 1usize..12,
    ) {
        let d = distance(&x, &y, n).unwrap().value;
        if d == 0.0 {
            // Probe midpoints of a fine subgrid of the window; a genuine
            // disagreement has positive length and would hit one.
            let cells = 16 * (2 * n + 1);
            let lo = -(n as f64) * H;
            for j in 0..cells {
                let t = lo + (j as f64 + 0.5) * H / 16.0;
                prop_assert_eq!(x.evaluate(t), y.evaluate(t));
            }
        }
    }
}

#[test]
fn one_interval_of_disagreement_scores_exactly_one() {
    // Words agree everywhere except on the dwell interval containing 0.
    let mut base = vec![0usize; 41];
    base[25] = 1;
    base[3] = 1;
    let mut bumped = base.clone();
    bumped[20] = 1;
    let x = SymbolicSignal::new(base, 1.0, 0.0, 20, Extension::ConstantEnds).unwrap();
    let y = SymbolicSignal::new(bumped, 1.0, 0.0, 20, Extension::ConstantEnds).unwrap();
    assert_eq!(distance(&x, &y, 20).unwrap().value, 1.0);
}

#[test]
fn everywhere_different_approaches_the_diameter() {
    let x = SymbolicSignal::constant(0, 1.0);
    let y = SymbolicSignal::constant(1, 1.0);
    let d = distance(&x, &y, 20).unwrap().value;
    assert!((d - metric_diameter()).abs() < 1e-10);
    assert!(d < metric_diameter());
}
