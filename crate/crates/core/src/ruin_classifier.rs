//! Ruin regimes `ψ(z) ∈ {0} / (0, 1) / {1}` as a function of `z ≥ 0`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{self, AsymptoticClass, AsymptoticTag, IntegralValue};
use crate::bounds_engine::{covariance_set, BoundsReport, GDescriptor};
use crate::ext::{ExtInterval, ExtReal};
use crate::levy_model::{BivariateTriplet, Component, Sign, STRUCT_TOL};
use crate::quadrant_thresholds::{theta_profile, Quadrant};

#[derive(Debug, Error, PartialEq)]
pub enum RuinError {
    #[error("Z_t converges only when ξ drifts to +∞ with I_(ξ,η) finite; here ξ is {0:?}")]
    NotConvergent(AsymptoticTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Zero,
    StrictlyBetween,
    One,
    Unknown,
}

impl Regime {
    /// Ordering `One > StrictlyBetween > Zero`; `None` for `Unknown`.
    pub fn severity(self) -> Option<u8> {
        match self {
            Regime::Zero => Some(0),
            Regime::StrictlyBetween => Some(1),
            Regime::One => Some(2),
            Regime::Unknown => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Zero => "psi = 0",
            Regime::StrictlyBetween => "0 < psi < 1",
            Regime::One => "psi = 1",
            Regime::Unknown => "unknown",
        })
    }
}

/// One piece of the regime map over `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimePiece {
    pub from: ExtReal,
    pub from_inclusive: bool,
    pub to: ExtReal,
    pub to_inclusive: bool,
    pub regime: Regime,
}

impl RegimePiece {
    pub fn contains(&self, z: f64) -> bool {
        let lo = self.from.get();
        let hi = self.to.get();
        let above = if self.from_inclusive { z >= lo } else { z > lo };
        let below = if self.to_inclusive { z <= hi } else { z < hi };
        above && below
    }
}

/// Which result decided the regime map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremTag {
    /// `V_t = e^{ξ_t}(z - c) + c`.
    DegenerateAbsorbingPoint,
    /// `ξ → -∞`, `I_{-ξ,K} < ∞`.
    StationaryLowerBound,
    /// `E ξ₁ = 0` with exponential moments.
    OscillatingLowerBound,
    /// `ξ → +∞`, `I_{ξ,η} < ∞`.
    ConvergentUpperBound,
    /// Hypotheses could not be certified.
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisStatus {
    Verified,
    Asserted,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEntry {
    pub condition: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuinRegime {
    pub pieces: Vec<RegimePiece>,
    pub breakpoints: Vec<ExtReal>,
    /// Certain-ruin threshold when `ξ → +∞`.
    pub m: Option<CertainRuinThreshold>,
    pub theorem: TheoremTag,
    pub asymptotics: AsymptoticClass,
    pub hypotheses: Vec<HypothesisEntry>,
}

impl RuinRegime {
    /// Regime at `z`; `None` for `z < 0`.
    pub fn at(&self, z: f64) -> Option<Regime> {
        self.pieces.iter().find(|p| p.contains(z)).map(|p| p.regime)
    }

    /// `{z ≥ 0 : ψ(z) = 0}` as `[start, ∞)`, if nonempty.
    pub fn zero_region_start(&self) -> Option<(f64, bool)> {
        self.pieces.iter().find(|p| p.regime == Regime::Zero).map(|p| (p.from.get(), p.from_inclusive))
    }

    /// Pieces appear in order of nonincreasing severity.
    pub fn is_monotone(&self) -> bool {
        let sev: Vec<_> = self.pieces.iter().filter_map(|p| p.regime.severity()).collect();
        sev.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Left-to-right builder over `[0, ∞)`.
struct Pieces {
    cursor: f64,
    cursor_inclusive: bool,
    out: Vec<RegimePiece>,
}

impl Pieces {
    fn new() -> Self {
        Pieces { cursor: 0.0, cursor_inclusive: true, out: Vec::new() }
    }

    /// Extends the map with `regime` up to `to` (inclusive or not).
    fn push(&mut self, to: f64, to_inclusive: bool, regime: Regime) {
        let empty = to < self.cursor || (to == self.cursor && !(self.cursor_inclusive && to_inclusive));
        if !empty {
            self.out.push(RegimePiece {
                from: ExtReal::new(self.cursor),
                from_inclusive: self.cursor_inclusive,
                to: ExtReal::new(to),
                to_inclusive,
                regime,
            });
            self.cursor = to;
            self.cursor_inclusive = !to_inclusive;
        }
    }

    fn finish(mut self, regime: Regime) -> Vec<RegimePiece> {
        self.push(f64::INFINITY, false, regime);
        let mut merged: Vec<RegimePiece> = Vec::new();
        for p in self.out {
            match merged.last_mut() {
                Some(last) if last.regime == p.regime => {
                    last.to = p.to;
                    last.to_inclusive = p.to_inclusive;
                }
                _ => merged.push(p),
            }
        }
        merged
    }
}

fn breakpoints(pieces: &[RegimePiece]) -> Vec<ExtReal> {
    pieces.iter().skip(1).map(|p| p.from).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdBasis {
    /// `m = sup{u ∈ [θ₄′, θ₂′] : g(u) ≤ 0}`.
    SupremumOfG,
    /// `m = -σ_ξη / σ_ξ²`.
    CovarianceRatio,
    /// `m = c`, exclusive.
    DegeneratePoint,
    /// `-η` a subordinator gives `ψ(0) = 1`.
    NegEtaSubordinator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertainRuinThreshold {
    pub m: f64,
    /// `ψ(m) = 1` as well.
    pub inclusive: bool,
    pub basis: ThresholdBasis,
}

/// `[θ₄′, θ₂′] ∩ {covariance condition} ∩ {g ≤ 0}` when `Π(A₁) = 0`.
pub fn certain_ruin_witness_set(triplet: &BivariateTriplet) -> ExtInterval {
    let p = theta_profile(triplet);
    if p.mass(Quadrant::A1) != 0.0 {
        return ExtInterval::Empty;
    }
    let range = ExtInterval::from_bounds(p.theta_prime(4), p.theta_prime(2));
    let gset = GDescriptor::of(triplet).nonpositive_set().expect("linear g");
    range.intersect(&covariance_set(&triplet.gaussian())).intersect(&gset)
}

/// Level `m` with `ψ(z) = 1` for `z ≤ m` (or `z < m` when degenerate).
/// Structural only; the caller is responsible for the `ξ → +∞` regime.
pub fn certain_ruin_threshold(triplet: &BivariateTriplet, bounds: &BoundsReport) -> Option<CertainRuinThreshold> {
    if let Some(d) = bounds.degenerate {
        return (d.c > 0.0).then_some(CertainRuinThreshold {
            m: d.c,
            inclusive: false,
            basis: ThresholdBasis::DegeneratePoint,
        });
    }
    let witness = certain_ruin_witness_set(triplet);
    let gauss = triplet.gaussian();
    if !witness.is_empty() {
        return Some(if gauss.var_xi > STRUCT_TOL {
            CertainRuinThreshold {
                m: -gauss.cov / gauss.var_xi,
                inclusive: true,
                basis: ThresholdBasis::CovarianceRatio,
            }
        } else {
            CertainRuinThreshold { m: witness.sup(), inclusive: true, basis: ThresholdBasis::SupremumOfG }
        });
    }
    triplet.marginal(Component::Eta).is_subordinator(Sign::Minus).then_some(CertainRuinThreshold {
        m: 0.0,
        inclusive: true,
        basis: ThresholdBasis::NegEtaSubordinator,
    })
}

fn entry(condition: &str, status: HypothesisStatus, detail: impl Into<String>) -> HypothesisEntry {
    HypothesisEntry { condition: condition.into(), status, detail: detail.into() }
}

fn verified(ok: bool) -> HypothesisStatus {
    if ok {
        HypothesisStatus::Verified
    } else {
        HypothesisStatus::Failed
    }
}

/// Zero region from `δ`: `ψ(z) = 0` iff `δ(z) ≥ 0`, i.e. `z ≥ inf L` when `sup L ≥ 0`.
fn lower_bound_map(l: &ExtInterval, before: Regime) -> Vec<RegimePiece> {
    let mut p = Pieces::new();
    if l.meets_nonnegative() {
        p.push(l.inf(), false, before);
        p.finish(Regime::Zero)
    } else {
        p.finish(before)
    }
}

pub fn classify_ruin(triplet: &BivariateTriplet, bounds: &BoundsReport, asym: &AsymptoticClass) -> RuinRegime {
    let mut hyps = Vec::new();
    let xi = asym.tag;

    if let Some(d) = bounds.degenerate {
        hyps.push(entry(
            "V_t = e^{ξ_t}(z - c) + c",
            HypothesisStatus::Verified,
            format!("atoms on the curve y = c(e^(-x) - 1), covariance and g(c) = 0 checked with c = {}", d.c),
        ));
        let mut p = Pieces::new();
        let pieces = if d.c > 0.0 {
            let below = match xi {
                AsymptoticTag::DriftsToMinusInfinity => Regime::StrictlyBetween,
                AsymptoticTag::Oscillates | AsymptoticTag::DriftsToPlusInfinity => Regime::One,
            };
            p.push(d.c, false, below);
            p.finish(Regime::Zero)
        } else {
            let all = match xi {
                AsymptoticTag::DriftsToMinusInfinity | AsymptoticTag::Oscillates => Regime::One,
                AsymptoticTag::DriftsToPlusInfinity => Regime::StrictlyBetween,
            };
            p.finish(all)
        };
        let m = (xi == AsymptoticTag::DriftsToPlusInfinity).then(|| certain_ruin_threshold(triplet, bounds)).flatten();
        return RuinRegime {
            breakpoints: breakpoints(&pieces),
            pieces,
            m,
            theorem: TheoremTag::DegenerateAbsorbingPoint,
            asymptotics: *asym,
            hypotheses: hyps,
        };
    }

    let disjoint = !bounds.l.intersects(&bounds.u);
    hyps.push(entry("L ∩ U = ∅", verified(disjoint), format!("L = {}, U = {}", bounds.l, bounds.u)));
    let unknown = |hyps: Vec<HypothesisEntry>| {
        let pieces = Pieces::new().finish(Regime::Unknown);
        RuinRegime {
            breakpoints: vec![],
            pieces,
            m: None,
            theorem: TheoremTag::Unresolved,
            asymptotics: *asym,
            hypotheses: hyps,
        }
    };
    if !disjoint {
        return unknown(hyps);
    }

    match xi {
        AsymptoticTag::DriftsToMinusInfinity => {
            let check = asymptotics::stationarity_check(triplet);
            let ok = matches!(&check, Ok(c) if c.integral.is_finite());
            hyps.push(entry(
                "I_(-ξ,K) < ∞",
                verified(ok),
                match &check {
                    Ok(c) => format!("I = {}; {}", c.integral, c.justification),
                    Err(e) => e.to_string(),
                },
            ));
            if !ok {
                return unknown(hyps);
            }
            let pieces = lower_bound_map(&bounds.l, before_zero_region(&bounds.l));
            RuinRegime {
                breakpoints: breakpoints(&pieces),
                pieces,
                m: None,
                theorem: TheoremTag::StationaryLowerBound,
                asymptotics: *asym,
                hypotheses: hyps,
            }
        }
        AsymptoticTag::Oscillates => {
            hyps.push(entry(
                "E e^{|ξ₁|} < ∞, E e^{-pξ₁} < ∞, E|η₁|^q < ∞",
                HypothesisStatus::Asserted,
                "compound Poisson jumps with finitely many atoms have all exponential moments",
            ));
            let pieces = lower_bound_map(&bounds.l, before_zero_region(&bounds.l));
            RuinRegime {
                breakpoints: breakpoints(&pieces),
                pieces,
                m: None,
                theorem: TheoremTag::OscillatingLowerBound,
                asymptotics: *asym,
                hypotheses: hyps,
            }
        }
        AsymptoticTag::DriftsToPlusInfinity => {
            let check = asymptotics::convergence_check(triplet);
            let ok = matches!(&check, Ok(c) if c.integral.is_finite());
            hyps.push(entry(
                "I_(ξ,η) < ∞",
                verified(ok),
                match &check {
                    Ok(c) => format!("I = {}; {}", c.integral, c.justification),
                    Err(e) => e.to_string(),
                },
            ));
            if !ok {
                return unknown(hyps);
            }
            let m = certain_ruin_threshold(triplet, bounds);
            let u = &bounds.u;
            let mut p = Pieces::new();
            if u.meets_nonnegative() {
                p.push(u.sup(), true, Regime::One);
            }
            let pieces = if bounds.l.meets_nonnegative() {
                p.push(bounds.l.inf(), false, Regime::StrictlyBetween);
                p.finish(Regime::Zero)
            } else {
                p.finish(Regime::StrictlyBetween)
            };
            let agrees = match m {
                Some(t) => u.meets_nonnegative() && (t.m - u.sup()).abs() <= 1e-9 * t.m.abs().max(1.0),
                None => !u.meets_nonnegative(),
            };
            hyps.push(entry(
                "certain-ruin threshold equals sup U",
                verified(agrees),
                format!("m = {:?}, sup U = {}", m.map(|t| t.m), ExtReal::new(u.sup())),
            ));
            RuinRegime {
                breakpoints: breakpoints(&pieces),
                pieces,
                m,
                theorem: TheoremTag::ConvergentUpperBound,
                asymptotics: *asym,
                hypotheses: hyps,
            }
        }
    }
}

/// Regime on `[0, inf L)` when `ξ` does not drift to `+∞`.
fn before_zero_region(l: &ExtInterval) -> Regime {
    if l.meets_nonnegative() {
        Regime::StrictlyBetween
    } else {
        Regime::One
    }
}

/// Classifies with bounds and asymptotics computed from the triplet.
pub fn classify(triplet: &BivariateTriplet) -> (BoundsReport, RuinRegime) {
    let bounds = crate::bounds_engine::compute_bounds(triplet);
    let asym = asymptotics::classify(&triplet.marginal(Component::Xi));
    let regime = classify_ruin(triplet, &bounds, &asym);
    (bounds, regime)
}

/// Support of `Z_∞ = lim Z_t`: `(-inf L, -sup U)`, or the point `-c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZInfSupport {
    pub lower: ExtReal,
    pub upper: ExtReal,
    pub degenerate_point: Option<f64>,
}

pub fn z_infinity_support(triplet: &BivariateTriplet, bounds: &BoundsReport) -> Result<ZInfSupport, RuinError> {
    let asym = asymptotics::classify(&triplet.marginal(Component::Xi));
    let convergent = asym.tag == AsymptoticTag::DriftsToPlusInfinity
        && matches!(asymptotics::convergence_check(triplet), Ok(c) if matches!(c.integral, IntegralValue::Finite(_)));
    if !convergent {
        return Err(RuinError::NotConvergent(asym.tag));
    }
    if let Some(d) = bounds.degenerate {
        let p = ExtReal::new(-d.c);
        return Ok(ZInfSupport { lower: p, upper: p, degenerate_point: Some(-d.c) });
    }
    let lower = if bounds.l.is_empty() { f64::NEG_INFINITY } else { -bounds.l.inf() };
    let upper = if bounds.u.is_empty() { f64::INFINITY } else { -bounds.u.sup() };
    Ok(ZInfSupport { lower: ExtReal::new(lower), upper: ExtReal::new(upper), degenerate_point: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::{AtomicJumpMeasure, Drift, GaussianCovariance, JumpAtom};

    fn model(d: (f64, f64), atoms: &[(f64, f64, f64)]) -> BivariateTriplet {
        BivariateTriplet::new(
            Drift { xi: d.0, eta: d.1 },
            GaussianCovariance::ZERO,
            AtomicJumpMeasure::new(atoms.iter().map(|&(r, x, y)| JumpAtom::new(r, x, y).unwrap())),
        )
        .unwrap()
    }

    fn counterexample() -> BivariateTriplet {
        model((1.0, -1.0), &[(1.0, 0.0, -1.0)])
    }

    #[test]
    fn counterexample_regime() {
        let t = counterexample();
        let (b, r) = classify(&t);
        assert_eq!(r.theorem, TheoremTag::ConvergentUpperBound);
        assert_eq!(r.at(0.0), Some(Regime::One));
        assert_eq!(r.at(1.0), Some(Regime::One));
        assert_eq!(r.at(1.0 + 1e-12), Some(Regime::StrictlyBetween));
        assert_eq!(r.at(100.0), Some(Regime::StrictlyBetween));
        let m = certain_ruin_threshold(&t, &b).unwrap();
        assert_eq!(m.m, 1.0);
        assert!(m.inclusive);
        assert_eq!(m.basis, ThresholdBasis::SupremumOfG);
        assert!(r.hypotheses.iter().all(|h| h.status != HypothesisStatus::Failed));
    }

    #[test]
    fn degenerate_convergent() {
        let e3 = (-3.0f64).exp();
        let t = model((1.0, -2.0), &[(0.5, 3.0, 2.0 * e3 - 2.0), (0.5, -3.0, 2.0 / e3 - 2.0)]);
        let (b, r) = classify(&t);
        assert_eq!(r.theorem, TheoremTag::DegenerateAbsorbingPoint);
        assert_eq!(r.at(1.999), Some(Regime::One));
        assert_eq!(r.at(2.0), Some(Regime::Zero));
        let m = certain_ruin_threshold(&t, &b).unwrap();
        assert!(!m.inclusive);
        let s = z_infinity_support(&t, &b).unwrap();
        assert!((s.degenerate_point.unwrap() + 2.0).abs() < 1e-9);
    }

    #[test]
    fn subordinator_model_never_ruins() {
        let t = model((0.0, 0.0), &[(0.5, 1.0, 2.0), (0.5, 1.0, 8.0)]);
        let (b, r) = classify(&t);
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.at(0.0), Some(Regime::Zero));
        assert_eq!(certain_ruin_threshold(&t, &b), None);
        let s = z_infinity_support(&t, &b).unwrap();
        assert!((s.lower.get() - 3.1639).abs() < 1e-4);
        assert!((s.upper.get() - 12.6558).abs() < 1e-4);
    }

    #[test]
    fn stationary_model_always_ruins() {
        let t = model((0.0, 0.0), &[(0.5, -1.0, 2.0), (0.5, -2.0, -3.0)]);
        let (b, r) = classify(&t);
        assert_eq!(r.theorem, TheoremTag::StationaryLowerBound);
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.at(5.0), Some(Regime::One));
        assert_eq!(z_infinity_support(&t, &b), Err(RuinError::NotConvergent(AsymptoticTag::DriftsToMinusInfinity)));
    }

    #[test]
    fn neg_eta_subordinator_threshold_zero() {
        // Π(A1) ≠ 0 through the atom on the positive x-axis, and η = -t.
        let t = model((1.0, -1.0), &[(1.0, 1.0, 0.0)]);
        let (b, r) = classify(&t);
        let m = certain_ruin_threshold(&t, &b).unwrap();
        assert_eq!((m.m, m.basis), (0.0, ThresholdBasis::NegEtaSubordinator));
        assert_eq!(r.at(0.0), Some(Regime::One));
        assert_eq!(r.at(0.5), Some(Regime::StrictlyBetween));

        let no_threshold = model((1.0, -1.0), &[(1.0, 1.0, 0.5), (1.0, 0.0, -3.0)]);
        let (b, _) = classify(&no_threshold);
        assert_eq!(certain_ruin_threshold(&no_threshold, &b), None);
    }

    #[test]
    fn pieces_builder_drops_empty_segments() {
        let mut p = Pieces::new();
        p.push(0.0, false, Regime::One);
        let v = p.finish(Regime::Zero);
        assert_eq!(v.len(), 1);
        assert!(v[0].from_inclusive && v[0].regime == Regime::Zero);

        let mut p = Pieces::new();
        p.push(0.0, true, Regime::One);
        let v = p.finish(Regime::StrictlyBetween);
        assert_eq!(v.len(), 2);
        assert!(!v[1].from_inclusive);
    }

    #[test]
    fn regime_serializes() {
        let (_, r) = classify(&counterexample());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["pieces"][0]["regime"], "one");
        assert_eq!(v["pieces"][1]["to"], "inf");
        assert_eq!(v["theorem"], "convergent-upper-bound");
    }
}
