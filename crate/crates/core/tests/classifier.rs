mod common;

use common::*;
use gou_ruin::asymptotics::{self, AsymptoticTag};
use gou_ruin::fixtures;
use gou_ruin::levy_model::Component;
use gou_ruin::ruin_classifier::{certain_ruin_threshold, classify, ThresholdBasis};
use gou_ruin::simulator::{sample_xi_rate, Execution};
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn regimes_decrease_in_severity(t in model()) {
        check_regime_monotone(&t).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn zero_region_starts_at_inf_l(t in model()) {
        check_zero_region(&t).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn certain_ruin_level_matches_grid(t in certain_ruin_model()) {
        check_threshold_oracle(&t).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn counterexample_threshold_is_one() {
    let f = fixtures::find("remark-2-3").unwrap();
    let (b, _) = classify(&f.model);
    let m = certain_ruin_threshold(&f.model, &b).unwrap();
    assert_eq!(m.m, 1.0);
    assert!(m.inclusive);
    assert_eq!(m.basis, ThresholdBasis::SupremumOfG);
}

#[test]
fn long_run_class_agrees_with_sampled_xi_rate() {
    for f in fixtures::all() {
        let xi = f.model.marginal(Component::Xi);
        let class = asymptotics::classify(&xi);
        let s = sample_xi_rate(&f.model, 1000.0, 200, 0xa11ce, Execution::Parallel);
        let mean = xi.mean();
        let slack = 3.0 * s.std_error + 1e-12;
        assert!((s.mean_rate - mean).abs() <= slack, "{}: rate {} vs mean {mean} ± {slack}", f.name, s.mean_rate);
        match class.tag {
            AsymptoticTag::DriftsToPlusInfinity => assert!(s.mean_rate > slack, "{}: {:?}", f.name, s),
            AsymptoticTag::DriftsToMinusInfinity => assert!(s.mean_rate < -slack, "{}: {:?}", f.name, s),
            AsymptoticTag::Oscillates => assert!(s.mean_rate.abs() <= slack, "{}: {:?}", f.name, s),
        }
    }
}
