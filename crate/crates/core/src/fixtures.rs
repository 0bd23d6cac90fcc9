//! Embedded reference models with expected thresholds, bound sets,
//! taxonomy, degeneracy, long-run behaviour and ruin regimes.

use std::path::Path;

use serde::Serialize;

use crate::asymptotics::{self, AsymptoticTag};
use crate::bounds_engine::{compute_bounds_with_profile, delta, upsilon, BoundsReport, RayOrientation, Taxonomy};
use crate::expr;
use crate::ext::{ExtInterval, IntervalKind};
use crate::levy_model::{AtomicJumpMeasure, BivariateTriplet, Component, Drift, GaussianCovariance, JumpAtom};
use crate::model_file;
use crate::quadrant_thresholds::{theta_profile, ThetaProfile};
use crate::ruin_classifier::{certain_ruin_threshold, classify_ruin, Regime, RuinRegime};
use crate::simulator::{map_paths, path_rng, simulate_path_with_rng, Execution, SimConfig};
use AsymptoticTag::{DriftsToMinusInfinity as Minus, DriftsToPlusInfinity as Plus, Oscillates as Osc};
use Provenance::{Derived, Stated};

pub const EXACT_TOL: f64 = 1e-9;
pub const APPROX_TOL: f64 = 0.15;
const SIM_PATHS: usize = 1_000;
const SIM_HORIZON: f64 = 20.0;
const SIM_SEED: u64 = 0x5eed;

/// Whether an expectation is quoted from the source text or worked out here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Stated,
    Derived,
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn stated<T>(value: T) -> Claim<T> {
    Claim { value, provenance: Provenance::Stated }
}

fn derived<T>(value: T) -> Claim<T> {
    Claim { value, provenance: Provenance::Derived }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThetaName {
    #[serde(rename = "theta")]
    Theta(usize),
    #[serde(rename = "theta_prime")]
    ThetaPrime(usize),
}

impl ThetaName {
    fn label(self) -> String {
        match self {
            ThetaName::Theta(i) => format!("theta{i}"),
            ThetaName::ThetaPrime(i) => format!("theta{i}'"),
        }
    }

    fn get(self, p: &ThetaProfile) -> f64 {
        match self {
            ThetaName::Theta(i) => p.theta(i),
            ThetaName::ThetaPrime(i) => p.theta_prime(i),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaClaim {
    pub name: ThetaName,
    /// Exact arithmetic expression.
    pub expr: &'static str,
    /// Rounded value as printed in the source, if any.
    pub approx: Option<f64>,
    pub provenance: Provenance,
}

/// Interval with endpoints as expressions; `a` and `b` are the finite ends.
#[derive(Clone, Debug, Serialize)]
pub struct SetClaim {
    pub kind: IntervalKind,
    pub a: Option<&'static str>,
    pub b: Option<&'static str>,
}

impl SetClaim {
    fn resolve(&self) -> Result<ExtInterval, expr::ExprError> {
        let ev = |s: Option<&str>| s.map(expr::eval).transpose();
        let (a, b) = (ev(self.a)?, ev(self.b)?);
        Ok(match self.kind {
            IntervalKind::Empty => ExtInterval::Empty,
            IntervalKind::Singleton => ExtInterval::Singleton(a.expect("singleton endpoint")),
            IntervalKind::Closed => ExtInterval::Closed(a.expect("left endpoint"), b.expect("right endpoint")),
            IntervalKind::LeftRay => ExtInterval::LeftRay(b.expect("right endpoint")),
            IntervalKind::RightRay => ExtInterval::RightRay(a.expect("left endpoint")),
            IntervalKind::All => ExtInterval::All,
        })
    }
}

fn empty() -> SetClaim {
    SetClaim { kind: IntervalKind::Empty, a: None, b: None }
}
fn point(a: &'static str) -> SetClaim {
    SetClaim { kind: IntervalKind::Singleton, a: Some(a), b: None }
}
fn closed(a: &'static str, b: &'static str) -> SetClaim {
    SetClaim { kind: IntervalKind::Closed, a: Some(a), b: Some(b) }
}
fn left_ray(b: &'static str) -> SetClaim {
    SetClaim { kind: IntervalKind::LeftRay, a: None, b: Some(b) }
}
fn right_ray(a: &'static str) -> SetClaim {
    SetClaim { kind: IntervalKind::RightRay, a: Some(a), b: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeClaim {
    pub z: f64,
    pub regime: Regime,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Expected {
    pub thetas: Vec<ThetaClaim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lstar: Option<Claim<SetClaim>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ustar: Option<Claim<SetClaim>>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Claim<SetClaim>>,
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<Claim<SetClaim>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<Claim<Taxonomy>>,
    /// Degenerate point `c` as an expression, or `None` for a
    /// non-degenerate model. Always checked.
    pub degenerate: Option<Claim<&'static str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<Claim<AsymptoticTag>>,
    pub regimes: Vec<RegimeClaim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Claim<&'static str>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    pub model: BivariateTriplet,
    pub expected: Expected,
    /// Starting values for the simulation sanity check.
    pub sim_z: Vec<f64>,
}

fn atoms(list: &[(f64, f64, f64)]) -> AtomicJumpMeasure {
    AtomicJumpMeasure::new(list.iter().map(|&(r, x, y)| JumpAtom::new(r, x, y).expect("fixture atom")))
}

fn build(dxi: f64, deta: f64, gauss: (f64, f64, f64), jumps: &[(f64, f64, f64)]) -> BivariateTriplet {
    BivariateTriplet::new(
        Drift { xi: dxi, eta: deta },
        GaussianCovariance::new(gauss.0, gauss.1, gauss.2).expect("fixture covariance"),
        atoms(jumps),
    )
    .expect("fixture model")
}

fn x(s: &str) -> f64 {
    expr::eval(s).expect("fixture expression")
}

fn theta(i: usize, e: &'static str, approx: Option<f64>, provenance: Provenance) -> ThetaClaim {
    ThetaClaim { name: ThetaName::Theta(i), expr: e, approx, provenance }
}

fn theta_p(i: usize, e: &'static str, approx: Option<f64>, provenance: Provenance) -> ThetaClaim {
    ThetaClaim { name: ThetaName::ThetaPrime(i), expr: e, approx, provenance }
}

const NO_GAUSS: (f64, f64, f64) = (0.0, 0.0, 0.0);

fn brownian_lower_point() -> Vec<Fixture> {
    let variants: [(&str, f64, AsymptoticTag, Provenance); 4] = [
        ("example-4.1-dxi-1", 1.0, Plus, Stated),
        ("example-4.1-dxi-0", 0.0, Osc, Stated),
        ("example-4.1-dxi-neg1", -1.0, Minus, Stated),
        ("example-4.1-dxi-2", 2.0, Plus, Derived),
    ];
    variants
        .into_iter()
        .map(|(name, dxi, tag, prov)| Fixture {
            name,
            description: "Brownian part (B, B), jumps (±10, 10); L = {-1}, U empty",
            model: build(dxi, 2.0, (1.0, 1.0, 1.0), &[(0.5, 10.0, 10.0), (0.5, -10.0, 10.0)]),
            expected: Expected {
                l: Some(Claim { value: point("-1"), provenance: prov }),
                u: Some(Claim { value: empty(), provenance: prov }),
                taxonomy: Some(Claim { value: Taxonomy::BrownianLowerSingleton, provenance: prov }),
                degenerate: None,
                asymptotic: Some(stated(tag)),
                ..Default::default()
            },
            sim_z: vec![],
        })
        .collect()
}

fn brownian_point() -> Vec<Fixture> {
    let variants: [(&str, f64, f64, AsymptoticTag); 3] = [
        ("example-4.2", 0.5, 0.0, Plus),
        ("example-4.2-deta-1", -0.5, 1.0, Minus),
        ("example-4.2-deta-half", 0.0, 0.5, Osc),
    ];
    variants
        .into_iter()
        .map(|(name, dxi, deta, tag)| Fixture {
            name,
            description: "drift (1/2 - d_eta, d_eta), Brownian part (B, -B); L = U = {1}",
            model: build(dxi, deta, (1.0, -1.0, 1.0), &[]),
            expected: Expected {
                l: Some(stated(point("1"))),
                u: Some(stated(point("1"))),
                taxonomy: Some(derived(Taxonomy::DegeneratePoint)),
                degenerate: Some(stated("1")),
                asymptotic: Some(stated(tag)),
                ..Default::default()
            },
            sim_z: vec![],
        })
        .collect()
}

fn degenerate_jumps() -> Vec<Fixture> {
    let variants: [(&str, f64, AsymptoticTag); 3] =
        [("example-4.3", 1.0, Plus), ("example-4.3-dxi-neg1", -1.0, Minus), ("example-4.3-dxi-0", 0.0, Osc)];
    variants
        .into_iter()
        .map(|(name, dxi, tag)| {
            let mut regimes = Vec::new();
            if tag == Plus {
                regimes.push(RegimeClaim { z: 1.0, regime: Regime::One, provenance: Derived });
                regimes.push(RegimeClaim { z: 2.0, regime: Regime::Zero, provenance: Derived });
                regimes.push(RegimeClaim { z: 5.0, regime: Regime::Zero, provenance: Derived });
            }
            Fixture {
                name,
                description: "jumps (3, 2e^-3 - 2), (-3, 2e^3 - 2) on the curve through c = 2; drift (d_xi, -2 d_xi)",
                model: build(
                    dxi,
                    -2.0 * dxi,
                    NO_GAUSS,
                    &[(0.5, 3.0, 2.0 * (-3.0f64).exp() - 2.0), (0.5, -3.0, 2.0 * 3.0f64.exp() - 2.0)],
                ),
                expected: Expected {
                    thetas: vec![
                        theta(2, "2", Some(2.0), Stated),
                        theta_p(2, "2", Some(2.0), Stated),
                        theta(4, "2", Some(2.0), Stated),
                        theta_p(4, "2", Some(2.0), Stated),
                    ],
                    lstar: Some(stated(point("2"))),
                    ustar: Some(stated(point("2"))),
                    l: Some(stated(point("2"))),
                    u: Some(stated(point("2"))),
                    taxonomy: Some(derived(Taxonomy::DegeneratePoint)),
                    degenerate: Some(stated("2")),
                    asymptotic: Some(stated(tag)),
                    regimes,
                    ..Default::default()
                },
                sim_z: vec![0.5, 2.0, 5.0],
            }
        })
        .collect()
}

const T4P: &str = "1/(e^2-1)";
const T2P: &str = "-2/(e^(-4)-1)";

fn bounded_upper_family() -> Vec<Fixture> {
    let t4p = x(T4P);
    let t2p = x(T2P);
    let u_star = || closed(T4P, T2P);
    let variants: Vec<(&'static str, f64, f64, SetClaim, AsymptoticTag)> = vec![
        ("example-4.4-u-empty-osc", 0.0, 1.0, empty(), Osc),
        ("example-4.4-u-empty-plus", 1.0, 0.0, empty(), Plus),
        ("example-4.4-u-empty-minus", -1.0, 3.0, empty(), Minus),
        ("example-4.4-u-full-osc", 0.0, -1.0, u_star(), Osc),
        ("example-4.4-u-full-plus", 1.0, -3.0, u_star(), Plus),
        ("example-4.4-u-full-minus", -1.0, 0.0, u_star(), Minus),
        ("example-4.4-u-lower-point", 1.0, -t4p, point(T4P), Plus),
        ("example-4.4-u-upper-point", -1.0, t2p, point(T2P), Minus),
    ];
    let t = 1.0 / 3.0;
    variants
        .into_iter()
        .map(|(name, dxi, deta, u, tag)| {
            let upper = u.kind;
            Fixture {
                name,
                description: "jumps (4, -2), (-2, -3), (-2, 1); L empty, U* = [theta4', theta2']",
                model: build(dxi, deta, NO_GAUSS, &[(t, 4.0, -2.0), (t, -2.0, -3.0), (t, -2.0, 1.0)]),
                expected: Expected {
                    thetas: vec![theta_p(4, T4P, Some(0.2), Derived), theta_p(2, T2P, Some(2.0), Derived)],
                    ustar: Some(derived(u_star())),
                    l: Some(stated(empty())),
                    u: Some(stated(u)),
                    taxonomy: Some(derived(Taxonomy::LowerEmpty { upper })),
                    degenerate: None,
                    asymptotic: Some(stated(tag)),
                    ..Default::default()
                },
                sim_z: vec![0.0, 1.0],
            }
        })
        .collect()
}

fn others() -> Vec<Fixture> {
    let t = 1.0 / 3.0;
    let e = std::f64::consts::E;
    vec![
        Fixture {
            name: "example-4.5",
            description: "drift (0, -2), jumps (2, e^-2 - 1), (-1, e - 1), (-1, -2); U = {1}",
            model: build(0.0, -2.0, NO_GAUSS, &[(t, 2.0, (-2.0f64).exp() - 1.0), (t, -1.0, e - 1.0), (t, -1.0, -2.0)]),
            expected: Expected {
                thetas: vec![
                    theta(2, "1", Some(1.0), Stated),
                    theta_p(2, "1", Some(1.0), Stated),
                    theta(4, "1", Some(1.0), Stated),
                    theta_p(4, "1", Some(1.0), Stated),
                ],
                ustar: Some(stated(point("1"))),
                l: Some(stated(empty())),
                u: Some(stated(point("1"))),
                taxonomy: Some(derived(Taxonomy::LowerEmpty { upper: IntervalKind::Singleton })),
                degenerate: None,
                asymptotic: Some(stated(Osc)),
                ..Default::default()
            },
            sim_z: vec![0.5, 1.0, 3.0],
        },
        Fixture {
            name: "example-4.6",
            description: "drift (0, -2), jumps (-1, 2), (-2, -3), (0, -5); U = [2/(e-1), inf)",
            model: build(0.0, -2.0, NO_GAUSS, &[(t, -1.0, 2.0), (t, -2.0, -3.0), (t, 0.0, -5.0)]),
            expected: Expected {
                thetas: vec![theta_p(4, "2/(e-1)", Some(1.2), Stated)],
                lstar: Some(stated(empty())),
                ustar: Some(stated(right_ray("2/(e-1)"))),
                l: Some(stated(empty())),
                u: Some(stated(right_ray("2/(e-1)"))),
                taxonomy: Some(derived(Taxonomy::LowerEmpty { upper: IntervalKind::RightRay })),
                degenerate: None,
                asymptotic: Some(stated(Minus)),
                ..Default::default()
            },
            sim_z: vec![0.0, 2.0],
        },
        stationary_rays("example-4.7", 0.0),
        stationary_rays("example-4.7-dxi-neg1", -1.0),
        Fixture {
            name: "example-4.8",
            description: "jumps (1, 2), (1, 8), (0, -5); L empty, U = (-inf, 8/(e^-1 - 1)]",
            model: build(0.0, 0.0, NO_GAUSS, &[(t, 1.0, 2.0), (t, 1.0, 8.0), (t, 0.0, -5.0)]),
            expected: Expected {
                thetas: vec![theta_p(1, "8/(e^(-1)-1)", Some(-12.6), Stated), theta_p(3, "-inf", None, Stated)],
                lstar: Some(stated(empty())),
                ustar: Some(stated(left_ray("8/(e^(-1)-1)"))),
                l: Some(stated(empty())),
                u: Some(stated(left_ray("8/(e^(-1)-1)"))),
                taxonomy: Some(derived(Taxonomy::LowerEmpty { upper: IntervalKind::LeftRay })),
                degenerate: None,
                asymptotic: Some(stated(Plus)),
                ..Default::default()
            },
            sim_z: vec![0.0, 2.0],
        },
        Fixture {
            name: "example-4.9",
            description: "jumps (1, 2), (1, 8); L = [2/(e^-1 - 1), inf), U = (-inf, 8/(e^-1 - 1)]",
            model: build(0.0, 0.0, NO_GAUSS, &[(0.5, 1.0, 2.0), (0.5, 1.0, 8.0)]),
            expected: Expected {
                thetas: vec![
                    theta(1, "2/(e^(-1)-1)", Some(-3.2), Stated),
                    theta_p(1, "8/(e^(-1)-1)", Some(-12.6), Stated),
                    theta(4, "inf", None, Stated),
                    theta_p(3, "-inf", None, Stated),
                ],
                lstar: Some(stated(right_ray("2/(e^(-1)-1)"))),
                ustar: Some(stated(left_ray("8/(e^(-1)-1)"))),
                l: Some(stated(right_ray("2/(e^(-1)-1)"))),
                u: Some(stated(left_ray("8/(e^(-1)-1)"))),
                taxonomy: Some(stated(Taxonomy::OppositeRays { orientation: RayOrientation::UpperLeft })),
                degenerate: None,
                asymptotic: Some(stated(Plus)),
                regimes: vec![
                    RegimeClaim { z: 0.0, regime: Regime::Zero, provenance: Derived },
                    RegimeClaim { z: 4.0, regime: Regime::Zero, provenance: Derived },
                ],
                ..Default::default()
            },
            sim_z: vec![0.0, 1.0],
        },
        Fixture {
            name: "remark-2-3",
            description: "(xi, eta)_t = (t, -t - N_t); certain ruin exactly on [0, 1]",
            model: build(1.0, -1.0, NO_GAUSS, &[(1.0, 0.0, -1.0)]),
            expected: Expected {
                lstar: Some(derived(empty())),
                l: Some(derived(empty())),
                u: Some(derived(left_ray("1"))),
                taxonomy: Some(derived(Taxonomy::LowerEmpty { upper: IntervalKind::LeftRay })),
                degenerate: None,
                asymptotic: Some(stated(Plus)),
                regimes: vec![
                    RegimeClaim { z: 0.0, regime: Regime::One, provenance: Stated },
                    RegimeClaim { z: 0.5, regime: Regime::One, provenance: Stated },
                    RegimeClaim { z: 1.0, regime: Regime::One, provenance: Stated },
                    RegimeClaim { z: 1.5, regime: Regime::StrictlyBetween, provenance: Derived },
                    RegimeClaim { z: 10.0, regime: Regime::StrictlyBetween, provenance: Derived },
                ],
                threshold: Some(stated("1")),
                ..Default::default()
            },
            sim_z: vec![0.5, 1.0, 2.0],
        },
        Fixture {
            name: "remark-2-1",
            description: "independent xi_t = -t + N_t, eta_t = -t + M_t; L = U = empty",
            model: build(-1.0, -1.0, NO_GAUSS, &[(1.0, 1.0, 0.0), (1.0, 0.0, 1.0)]),
            expected: Expected {
                lstar: Some(derived(right_ray("0"))),
                ustar: Some(derived(empty())),
                l: Some(derived(empty())),
                u: Some(derived(empty())),
                taxonomy: Some(derived(Taxonomy::LowerEmpty { upper: IntervalKind::Empty })),
                degenerate: None,
                asymptotic: Some(derived(Osc)),
                ..Default::default()
            },
            sim_z: vec![0.0, 2.0],
        },
    ]
}

fn stationary_rays(name: &'static str, dxi: f64) -> Fixture {
    Fixture {
        name,
        description: "drift (d_xi, 0), jumps (-1, 2), (-2, -3); L = (-inf, -3/(e^2-1)], U = [2/(e-1), inf)",
        model: build(dxi, 0.0, NO_GAUSS, &[(0.5, -1.0, 2.0), (0.5, -2.0, -3.0)]),
        expected: Expected {
            thetas: vec![
                theta(1, "-inf", None, Stated),
                theta(3, "-3/(e^2-1)", Some(-0.5), Stated),
                theta_p(4, "2/(e-1)", Some(1.2), Stated),
            ],
            lstar: Some(stated(left_ray("-3/(e^2-1)"))),
            ustar: Some(stated(right_ray("2/(e-1)"))),
            l: Some(stated(left_ray("-3/(e^2-1)"))),
            u: Some(stated(right_ray("2/(e-1)"))),
            taxonomy: Some(stated(Taxonomy::OppositeRays { orientation: RayOrientation::LowerLeft })),
            degenerate: None,
            asymptotic: Some(stated(Minus)),
            ..Default::default()
        },
        sim_z: vec![0.3, 0.0, 2.0],
    }
}

/// All fixture variants.
pub fn all() -> Vec<Fixture> {
    let mut v = brownian_lower_point();
    v.extend(brownian_point());
    v.extend(degenerate_jumps());
    v.extend(bounded_upper_family());
    v.extend(others());
    v
}

pub fn find(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub what: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl FixtureReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn same_interval(a: &ExtInterval, b: &ExtInterval) -> bool {
    a.kind() == b.kind() && (a.is_empty() || (close(a.inf(), b.inf(), EXACT_TOL) && close(a.sup(), b.sup(), EXACT_TOL)))
}

struct Checker {
    checks: Vec<Check>,
}

impl Checker {
    fn push(&mut self, what: impl Into<String>, expected: impl ToString, actual: impl ToString, pass: bool) {
        self.checks.push(Check { what: what.into(), expected: expected.to_string(), actual: actual.to_string(), pass });
    }

    fn set(&mut self, what: &str, claim: &Option<Claim<SetClaim>>, actual: &ExtInterval) {
        let Some(c) = claim else { return };
        match c.value.resolve() {
            Ok(want) => self.push(what, want, actual, same_interval(&want, actual)),
            Err(e) => self.push(what, e, actual, false),
        }
    }
}

/// Analytic checks, plus a short simulation when `simulate` is set.
pub fn verify_fixture(f: &Fixture, simulate: bool) -> FixtureReport {
    let mut ck = Checker { checks: Vec::new() };
    let profile = theta_profile(&f.model);
    let bounds = compute_bounds_with_profile(&f.model, &profile);
    let asym = asymptotics::classify(&f.model.marginal(Component::Xi));
    let regime = classify_ruin(&f.model, &bounds, &asym);
    let ex = &f.expected;

    for t in &ex.thetas {
        let got = t.name.get(&profile);
        match expr::eval(t.expr) {
            Ok(want) => ck.push(t.name.label(), t.expr, got, close(want, got, EXACT_TOL)),
            Err(e) => ck.push(t.name.label(), e, got, false),
        }
        if let Some(approx) = t.approx {
            ck.push(format!("{} vs rounded", t.name.label()), approx, got, (got - approx).abs() <= APPROX_TOL);
        }
    }
    ck.set("L*", &ex.lstar, &bounds.lstar);
    ck.set("U*", &ex.ustar, &bounds.ustar);
    ck.set("L", &ex.l, &bounds.l);
    ck.set("U", &ex.u, &bounds.u);
    if let Some(tx) = &ex.taxonomy {
        ck.push("taxonomy", format!("{:?}", tx.value), format!("{:?}", bounds.taxonomy), tx.value == bounds.taxonomy);
    }
    let got_c = bounds.degenerate.map(|d| d.c);
    match (&ex.degenerate, got_c) {
        (None, None) => ck.push("degenerate", "none", "none", true),
        (Some(c), Some(got)) => {
            let want = x(c.value);
            ck.push("degenerate", c.value, got, (got - want).abs() <= EXACT_TOL);
        }
        (want, got) => {
            ck.push("degenerate", format!("{:?}", want.as_ref().map(|c| c.value)), format!("{got:?}"), false)
        }
    }
    if let Some(a) = &ex.asymptotic {
        ck.push("asymptotic", format!("{:?}", a.value), format!("{:?}", asym.tag), a.value == asym.tag);
    }
    for r in &ex.regimes {
        let got = regime.at(r.z);
        ck.push(format!("regime at z={}", r.z), r.regime, format!("{got:?}"), got == Some(r.regime));
    }
    if let Some(m) = &ex.threshold {
        let got = certain_ruin_threshold(&f.model, &bounds).map(|t| t.m);
        let want = x(m.value);
        ck.push("certain-ruin threshold", m.value, format!("{got:?}"), got.is_some_and(|g| close(g, want, EXACT_TOL)));
    }
    if simulate && f.model.gaussian().is_zero() {
        for &z in &f.sim_z {
            simulation_checks(&mut ck, f, &bounds, &regime, z);
        }
    }
    let pass = ck.checks.iter().all(|c| c.pass);
    FixtureReport { name: f.name.to_string(), pass, checks: ck.checks }
}

fn simulation_checks(ck: &mut Checker, f: &Fixture, bounds: &BoundsReport, regime: &RuinRegime, z: f64) {
    let cfg = SimConfig::new(z).with_horizon(SIM_HORIZON).with_paths(SIM_PATHS).with_seed(SIM_SEED);
    if let Err(e) = cfg.validate(&f.model) {
        ck.push(format!("sim z={z}"), "valid config", e, false);
        return;
    }
    let c = bounds.degenerate.map(|d| d.c);
    let recs = map_paths(cfg.paths, Execution::Parallel, |i| {
        let mut rng = path_rng(cfg.seed, i);
        simulate_path_with_rng(&f.model, &cfg, &mut rng, i, true).map(|r| {
            let jump_defect = r.jumps.iter().map(|j| j.identity_defect()).fold(0.0, f64::max);
            let degenerate_defect = c.map_or(0.0, |c| r.degenerate_defect(z, c).max(r.degenerate_z_defect(c)));
            (r.summary(), jump_defect, degenerate_defect)
        })
    });
    let recs: Vec<_> = match recs.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(r) => r,
        Err(e) => {
            ck.push(format!("sim z={z}"), "finite paths", e, false);
            return;
        }
    };
    let jd = recs.iter().map(|r| r.1).fold(0.0, f64::max);
    ck.push(format!("sim z={z} jump identity"), format!("<= {EXACT_TOL:e}"), jd, jd <= EXACT_TOL);
    if c.is_some() {
        let dd = recs.iter().map(|r| r.2).fold(0.0, f64::max);
        ck.push(format!("sim z={z} degenerate identity"), format!("<= {EXACT_TOL:e}"), dd, dd <= EXACT_TOL);
    }
    let lo = delta(bounds, z).get();
    let hi = upsilon(bounds, z).get();
    let min = recs.iter().map(|r| r.0.min).fold(f64::INFINITY, f64::min);
    let max = recs.iter().map(|r| r.0.max).fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        let ok = min >= lo - EXACT_TOL * lo.abs().max(1.0);
        ck.push(format!("sim z={z} min >= delta"), lo, min, ok);
    }
    if hi.is_finite() {
        let ok = max <= hi + EXACT_TOL * hi.abs().max(1.0);
        ck.push(format!("sim z={z} max <= upsilon"), hi, max, ok);
    }
    if regime.at(z) == Some(Regime::Zero) {
        let ruined = recs.iter().filter(|r| r.0.ruin_time.is_some()).count();
        ck.push(format!("sim z={z} ruin count in zero region"), 0, ruined, ruined == 0);
    }
}

pub fn verify_examples(simulate: bool) -> Vec<FixtureReport> {
    all().iter().map(|f| verify_fixture(f, simulate)).collect()
}

#[derive(Serialize)]
struct ExpectedFile<'a> {
    name: &'a str,
    description: &'a str,
    exact_tolerance: f64,
    approx_tolerance: f64,
    expected: &'a Expected,
}

/// Writes `<name>.json` (a loadable model file) and `<name>.expected.json`.
pub fn export(dir: &Path) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in all() {
        let model_path = dir.join(format!("{}.json", f.name));
        std::fs::write(&model_path, model_file::to_json(&f.model, Some(f.name)) + "\n")?;
        let exp = ExpectedFile {
            name: f.name,
            description: f.description,
            exact_tolerance: EXACT_TOL,
            approx_tolerance: APPROX_TOL,
            expected: &f.expected,
        };
        let exp_path = dir.join(format!("{}.expected.json", f.name));
        std::fs::write(&exp_path, serde_json::to_string_pretty(&exp).expect("expected serialisation") + "\n")?;
        written.push(model_path.display().to_string());
        written.push(exp_path.display().to_string());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: Vec<_> = all().iter().map(|f| f.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names.len(), sorted.len());
    }

    #[test]
    fn every_fixture_passes_analytically() {
        for r in verify_examples(false) {
            let fails: Vec<_> = r.failures().collect();
            assert!(fails.is_empty(), "{}: {fails:#?}", r.name);
        }
    }

    #[test]
    fn simulation_sanity_checks_pass() {
        for r in verify_examples(true) {
            let fails: Vec<_> = r.failures().collect();
            assert!(fails.is_empty(), "{}: {fails:#?}", r.name);
        }
    }

    #[test]
    fn export_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        export(dir.path()).unwrap();
        for f in all() {
            let m = model_file::load_model(&dir.path().join(format!("{}.json", f.name))).unwrap();
            assert_eq!(m, f.model, "{}", f.name);
        }
    }
}
