//! Random atomic models and the property checks shared by the proptest
//! suites and the acceptance harness.
#![allow(dead_code)]

use gou_ruin::bounds_engine::{compute_bounds, delta, g_eval, upsilon, BoundsReport, Taxonomy};
use gou_ruin::levy_model::{jump_of_eta_minus_uw, Component};
use gou_ruin::quadrant_thresholds::{ordering_violations, mass_of_aiu, mass_of_biu, theta_profile, Quadrant};
use gou_ruin::ruin_classifier::{certain_ruin_threshold, classify, Regime, ThresholdBasis};
use gou_ruin::simulator::{simulate_summaries, Execution, SimConfig};
use gou_ruin::{AtomicJumpMeasure, BivariateTriplet, Drift, ExtInterval, GaussianCovariance, JumpAtom};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = Result<(), String>;

fn signed(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

pub fn atom() -> impl Strategy<Value = JumpAtom> {
    let x = prop_oneof![3 => Just(0.0), 17 => signed(0.3, 3.0)];
    let y = prop_oneof![1 => Just(0.0), 5 => signed(0.2, 5.0)];
    (0.1..2.0f64, x, y).prop_filter_map("zero jump", |(r, x, y)| JumpAtom::new(r, x, y).ok())
}

pub fn drift_component() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 4 => -2.0..2.0f64]
}

pub fn gaussian() -> impl Strategy<Value = GaussianCovariance> {
    let curve = (signed(0.1, 1.5), signed(0.1, 1.5))
        .prop_map(|(a, b)| GaussianCovariance::new(a * a, a * b, b * b).expect("rank one"));
    let psd = (0.05..2.0f64, 0.05..2.0f64, -0.95..0.95f64)
        .prop_map(|(sx, se, rho)| GaussianCovariance::new(sx * sx, rho * sx * se, se * se).expect("psd"));
    prop_oneof![14 => Just(GaussianCovariance::ZERO), 3 => curve, 3 => psd]
}

fn build(d: (f64, f64), g: GaussianCovariance, atoms: Vec<JumpAtom>) -> Option<BivariateTriplet> {
    BivariateTriplet::new(Drift { xi: d.0, eta: d.1 }, g, AtomicJumpMeasure::new(atoms)).ok()
}

/// Any atomic model; `η ≡ 0` is rejected.
pub fn model() -> impl Strategy<Value = BivariateTriplet> {
    ((drift_component(), drift_component()), gaussian(), prop::collection::vec(atom(), 0..=5))
        .prop_filter_map("η identically zero", |(d, g, a)| build(d, g, a))
}

/// Models without a Gaussian part, simulable by the exact scheme.
pub fn pure_jump_model() -> impl Strategy<Value = BivariateTriplet> {
    ((drift_component(), drift_component()), prop::collection::vec(atom(), 0..=5))
        .prop_filter_map("η identically zero", |(d, a)| build(d, GaussianCovariance::ZERO, a))
}

/// Models with every atom on `y = c(e^{-x} - 1)` and `d_η = -c d_ξ`.
pub fn on_curve_model() -> impl Strategy<Value = (f64, BivariateTriplet)> {
    (signed(0.2, 4.0), signed(0.1, 2.0), prop::collection::vec((0.1..2.0f64, signed(0.3, 3.0)), 1..=4)).prop_filter_map(
        "η identically zero",
        |(c, dxi, xs)| {
            let atoms = xs.into_iter().map(|(r, x)| JumpAtom::new(r, x, c * (-x).exp_m1()).unwrap()).collect();
            build((dxi, -c * dxi), GaussianCovariance::ZERO, atoms).map(|t| (c, t))
        },
    )
}

/// `ξ → +∞` with no Gaussian part, `Π(A₁) = 0`, a bounded `{g ≤ 0}` and a
/// nonempty certain-ruin set found by a coarse scan.
pub fn certain_ruin_model() -> impl Strategy<Value = BivariateTriplet> {
    let a = (0.1..2.0f64, signed(0.3, 3.0), signed(0.2, 5.0))
        .prop_filter("outside A₁", |(_, x, y)| !(*x >= 0.0 && *y >= 0.0))
        .prop_map(|(r, x, y)| JumpAtom::new(r, x, y).unwrap());
    (0.2..2.0f64, -2.0..2.0f64, prop::collection::vec(a, 1..=4)).prop_filter_map(
        "ξ must drift to +∞",
        |(dxi, deta, atoms)| {
            let t = build((dxi, deta), GaussianCovariance::ZERO, atoms)?;
            let r = scan_range(&t);
            let found = (0..=1000).any(|k| in_ruin_set(&t, k as f64 * r / 1000.0));
            (t.marginal(Component::Xi).mean() > 0.0 && found).then_some(t)
        },
    )
}

pub fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        config(cases),
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    )
}

/// Runs `check` over `cases` generated values; the error names the
/// shrunk counterexample.
pub fn run_property<S: Strategy>(cases: u32, strategy: S, check: impl Fn(&S::Value) -> Check) -> Check
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, |v| check(&v).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn check_threshold_orderings(t: &BivariateTriplet) -> Check {
    let v = ordering_violations(&theta_profile(t));
    ensure(v.is_empty(), || format!("violated: {v:?}"))
}

pub fn check_star_inclusions(t: &BivariateTriplet) -> Check {
    let b = compute_bounds(t);
    ensure(b.l.is_subset_of(&b.lstar, 1e-12), || format!("L = {} ⊄ L* = {}", b.l, b.lstar))?;
    ensure(b.u.is_subset_of(&b.ustar, 1e-12), || format!("U = {} ⊄ U* = {}", b.u, b.ustar))
}

pub fn check_bound_functions(t: &BivariateTriplet) -> Check {
    let b = compute_bounds(t);
    let zs: Vec<f64> = (-300..=300).map(|k| k as f64 * 0.05).chain(marks(&b)).collect();
    let mut zs = zs;
    zs.sort_by(f64::total_cmp);
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &z in &zs {
        let (d, u) = (delta(&b, z).get(), upsilon(&b, z).get());
        ensure(d <= z, || format!("δ({z}) = {d} > z"))?;
        ensure(u >= z, || format!("Υ({z}) = {u} < z"))?;
        ensure(d >= prev.0, || format!("δ decreases at z = {z}: {} then {d}", prev.0))?;
        ensure(u >= prev.1, || format!("Υ decreases at z = {z}: {} then {u}", prev.1))?;
        prev = (d, u);
    }
    Ok(())
}

fn marks(b: &BoundsReport) -> Vec<f64> {
    [b.l, b.u].iter().filter(|s| !s.is_empty()).flat_map(|s| [s.inf(), s.sup()]).filter(|v| v.is_finite()).collect()
}

pub fn check_taxonomy(t: &BivariateTriplet) -> Check {
    match compute_bounds(t).taxonomy {
        Taxonomy::Inconsistent { reason } => Err(reason),
        _ => Ok(()),
    }
}

/// Grid extreme of `{u ∈ half : mass(u) > 0}` on `[-50, 50]`, with the
/// value reported for an empty set.
fn grid_extreme(mass: impl Fn(f64) -> f64, nonneg: bool, sup: bool, empty: f64) -> f64 {
    const N: i32 = 10_000;
    let step = 100.0 / N as f64;
    let hits = (0..=N).map(|k| -50.0 + k as f64 * step).filter(|&u| if nonneg { u >= 0.0 } else { u <= 0.0 });
    let hits: Vec<f64> = hits.filter(|&u| mass(u) > 0.0).collect();
    match (hits.first(), hits.last()) {
        (Some(&lo), Some(&hi)) => {
            if sup {
                hi
            } else {
                lo
            }
        }
        _ => empty,
    }
}

pub const THETA_GRID_STEP: f64 = 0.01;

pub fn check_theta_oracle(t: &BivariateTriplet) -> Check {
    let p = theta_profile(t);
    let inf = f64::INFINITY;
    // (quadrant, u ≥ 0, sup, value for an empty set)
    let theta_rules = [
        (Quadrant::A1, false, true, -inf),
        (Quadrant::A2, true, true, 0.0),
        (Quadrant::A3, false, false, 0.0),
        (Quadrant::A4, true, false, inf),
    ];
    let prime_rules = [
        (Quadrant::A1, false, false, 0.0),
        (Quadrant::A2, true, false, inf),
        (Quadrant::A3, false, true, -inf),
        (Quadrant::A4, true, true, 0.0),
    ];
    let agree = |got: f64, grid: f64, empty: f64| {
        if grid == empty && !(-50.0..=50.0).contains(&empty) {
            got == empty || got.abs() >= 50.0 - THETA_GRID_STEP
        } else {
            let clamped = got.clamp(-50.0, 50.0);
            (clamped - grid).abs() <= THETA_GRID_STEP * (1.0 + 1e-9)
        }
    };
    for (i, &(q, nonneg, sup, empty)) in theta_rules.iter().enumerate() {
        let grid = grid_extreme(|u| mass_of_aiu(t, q, u), nonneg, sup, empty);
        let got = p.theta(i + 1);
        ensure(agree(got, grid, empty), || format!("θ{} = {got}, grid oracle {grid}", i + 1))?;
    }
    for (i, &(q, nonneg, sup, empty)) in prime_rules.iter().enumerate() {
        let grid = grid_extreme(|u| mass_of_biu(t, q, u), nonneg, sup, empty);
        let got = p.theta_prime(i + 1);
        ensure(agree(got, grid, empty), || format!("θ{}′ = {got}, grid oracle {grid}", i + 1))?;
    }
    Ok(())
}

/// For `σ = 0` non-degenerate models, `L` and `U` against a direct scan of
/// the jump signs of `η - uW` and the sign of `g(u)`.
pub fn check_bounds_scan(t: &BivariateTriplet) -> Check {
    let b = compute_bounds(t);
    if b.degenerate.is_some() || !t.gaussian().is_zero() {
        return Ok(());
    }
    let near_edge = |s: &ExtInterval, u: f64| {
        !s.is_empty() && [s.inf(), s.sup()].iter().any(|e| (e - u).abs() <= 1e-9 * u.abs().max(1.0))
    };
    for k in -2000..=2000 {
        let u = k as f64 * 0.01;
        let jumps: Vec<f64> = t.atoms().iter().map(|a| jump_of_eta_minus_uw(u, a.x, a.y)).collect();
        let g = g_eval(t, u);
        let in_l = jumps.iter().all(|&j| j >= 0.0) && g >= 0.0;
        let in_u = jumps.iter().all(|&j| j <= 0.0) && g <= 0.0;
        if !near_edge(&b.l, u) {
            ensure(b.l.contains(u) == in_l, || format!("u = {u}: L = {} but scan says {in_l}", b.l))?;
        }
        if !near_edge(&b.u, u) {
            ensure(b.u.contains(u) == in_u, || format!("u = {u}: U = {} but scan says {in_u}", b.u))?;
        }
    }
    Ok(())
}

pub fn check_degenerate_intersection(t: &BivariateTriplet) -> Check {
    let b = compute_bounds(t);
    let both = b.l.intersect(&b.u);
    if both.is_empty() {
        return Ok(());
    }
    let Some(d) = b.degenerate else {
        return Err(format!("L ∩ U = {both} without a degenerate point"));
    };
    ensure(both == ExtInterval::Singleton(d.c), || format!("L ∩ U = {both}, c = {}", d.c))
}

pub fn check_regime_monotone(t: &BivariateTriplet) -> Check {
    let (b, r) = classify(t);
    ensure(r.is_monotone(), || format!("pieces not monotone: {:?}", r.pieces))?;
    let mut zs: Vec<f64> =
        (0..=400).map(|k| k as f64 * 0.05).chain(marks(&b).into_iter().filter(|v| *v >= 0.0)).collect();
    zs.sort_by(f64::total_cmp);
    let mut last = u8::MAX;
    for z in zs {
        let reg = r.at(z).ok_or_else(|| format!("no regime at z = {z}"))?;
        if let Some(s) = reg.severity() {
            ensure(s <= last, || format!("severity rises at z = {z}"))?;
            last = s;
        }
    }
    Ok(())
}

/// Zero region equals `[inf L, ∞) ∩ [0, ∞)` whenever the regime is resolved.
pub fn check_zero_region(t: &BivariateTriplet) -> Check {
    let (b, r) = classify(t);
    if b.degenerate.is_some() || r.pieces.iter().any(|p| p.regime == Regime::Unknown) {
        return Ok(());
    }
    for k in 0..=400 {
        let z = k as f64 * 0.05;
        let want = b.l.meets_nonnegative() && z >= b.l.inf();
        let got = r.at(z) == Some(Regime::Zero);
        ensure(got == want, || format!("z = {z}: Zero is {got}, L = {}", b.l))?;
    }
    Ok(())
}

pub const THRESHOLD_GRID: usize = 100_000;

fn in_ruin_set(t: &BivariateTriplet, u: f64) -> bool {
    t.atoms().iter().all(|a| jump_of_eta_minus_uw(u, a.x, a.y) <= 0.0) && g_eval(t, u) <= 0.0
}

fn scan_range(t: &BivariateTriplet) -> f64 {
    let d = t.drift();
    (-d.eta / d.xi).max(1.0) * 1.5
}

/// Certain-ruin level against a grid supremum of
/// `{u ≥ 0 : η - uW has no positive jumps, g(u) ≤ 0}` on `[0, R]`.
pub fn check_threshold_oracle(t: &BivariateTriplet) -> Check {
    let b = compute_bounds(t);
    let m = certain_ruin_threshold(t, &b);
    let step = scan_range(t) / THRESHOLD_GRID as f64;
    let grid = (0..=THRESHOLD_GRID).rev().map(|k| k as f64 * step).find(|&u| in_ruin_set(t, u));
    match (m, grid) {
        (Some(m), Some(s)) => {
            ensure(m.basis == ThresholdBasis::SupremumOfG, || format!("basis {:?}", m.basis))?;
            ensure((m.m - s).abs() <= step, || format!("m = {}, grid sup {s}, step {step}", m.m))
        }
        (Some(m), None) => ensure(m.basis != ThresholdBasis::SupremumOfG || m.m < step, || {
            format!("m = {} but the grid set is empty", m.m)
        }),
        (None, Some(s)) => Err(format!("no threshold, grid sup {s}")),
        (None, None) => Ok(()),
    }
}

/// Same seed, `z₁ < z₂`: every path ruined from `z₂` is ruined from `z₁`
/// no later, and the running minimum is ordered.
pub fn check_crn_monotone(t: &BivariateTriplet, z1: f64, z2: f64, seed: u64) -> Check {
    let cfg =
        |z| SimConfig::new(z).with_horizon(10.0).with_paths(64).with_seed(seed).with_execution(Execution::Sequential);
    let lo = simulate_summaries(t, &cfg(z1)).map_err(|e| e.to_string())?;
    let hi = simulate_summaries(t, &cfg(z2)).map_err(|e| e.to_string())?;
    for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
        ensure(a.min <= b.min && a.terminal_v <= b.terminal_v, || {
            format!("path {i}: min {} vs {}, terminal {} vs {}", a.min, b.min, a.terminal_v, b.terminal_v)
        })?;
        if let Some(tb) = b.ruin_time {
            let ta = a.ruin_time.ok_or_else(|| format!("path {i}: ruined from z = {z2} but not from {z1}"))?;
            ensure(ta <= tb, || format!("path {i}: ruin at {ta} from {z1}, {tb} from {z2}"))?;
        }
    }
    let count = |s: &[gou_ruin::simulator::PathSummary]| s.iter().filter(|p| p.ruin_time.is_some()).count();
    ensure(count(&lo) >= count(&hi), || format!("p̂({z1}) < p̂({z2})"))
}
