mod common;

use common::*;
use gou_ruin::asymptotics::a_plus;
use gou_ruin::levy_model::{jump_of_eta_minus_uw, Component, Sign};
use gou_ruin::simulator::{simulate_path, SimConfig};
use gou_ruin::{AtomicJumpMeasure, BivariateTriplet, Drift, GaussianCovariance, JumpAtom};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn subordinator_xi() -> impl Strategy<Value = BivariateTriplet> {
    (0.0..2.0f64, drift_component(), prop::collection::vec(atom(), 1..=5)).prop_filter_map(
        "η ≡ 0",
        |(dxi, deta, a)| {
            let atoms = a.into_iter().map(|a| JumpAtom::new(a.rate, a.x.abs(), a.y).unwrap());
            BivariateTriplet::new(Drift { xi: dxi, eta: deta }, GaussianCovariance::ZERO, AtomicJumpMeasure::new(atoms))
                .ok()
        },
    )
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn marginal_keeps_rate_of_nonzero_projections(t in model()) {
        for (c, pick) in [(Component::Xi, 0usize), (Component::Eta, 1)] {
            let want: f64 = t.atoms().iter().filter(|a| [a.x, a.y][pick] != 0.0).map(|a| a.rate).sum();
            prop_assert!(rel(t.marginal(c).total_rate(), want) <= 1e-12);
        }
    }

    #[test]
    fn gamma_and_drift_convert_both_ways(t in model()) {
        for c in [Component::Xi, Component::Eta] {
            let m = t.marginal(c);
            prop_assert!(rel(m.drift_from_gamma(m.gamma()), m.drift) <= 1e-12);
            prop_assert!(rel(t.marginal_gamma_from_tilde(c), m.gamma()) <= 1e-12);
        }
    }

    #[test]
    fn auxiliary_jump_is_affine_in_u(t in model(), u1 in -20.0..20.0f64, u2 in -20.0..20.0f64) {
        for a in t.atoms() {
            let slope = -(-a.x).exp_m1();
            let diff = jump_of_eta_minus_uw(u1, a.x, a.y) - jump_of_eta_minus_uw(u2, a.x, a.y);
            prop_assert!((diff - slope * (u1 - u2)).abs() <= 1e-12 * (1.0 + (slope * (u1 - u2)).abs() + a.y.abs()));
            prop_assert_eq!(jump_of_eta_minus_uw(0.0, a.x, a.y), a.y);
        }
    }

    #[test]
    fn a_plus_is_at_least_one_and_nondecreasing(t in model()) {
        let m = t.marginal(Component::Xi);
        let mut prev = 0.0;
        for k in 0..=60 {
            let x = 1.0 + k as f64 * 0.25;
            let v = a_plus(&m, x).unwrap();
            prop_assert!(v >= 1.0 && v >= prev, "A+({x}) = {v}");
            prev = v;
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn subordinator_xi_paths_never_decrease(t in subordinator_xi(), seed in any::<u64>()) {
        prop_assert!(t.marginal(Component::Xi).is_subordinator(Sign::Plus));
        let rec = simulate_path(&t, &SimConfig::new(1.0).with_horizon(10.0).with_seed(seed)).unwrap();
        for w in rec.samples.windows(2) {
            prop_assert!(w[1].xi >= w[0].xi, "ξ fell from {} to {} at t = {}", w[0].xi, w[1].xi, w[1].t);
        }
    }
}
