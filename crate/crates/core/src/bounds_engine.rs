//! The sets `L*`, `U*`, `L`, `U`, the bound functions `δ` and `Υ`, the
//! degenerate absorbing point, and the taxonomy of `(L, U)` combinations.
//!
//! `L = {u : η - uW is a subordinator}` and `U = {u : uW - η is a subordinator}`
//! where `e^{-ξ} = ε(W)`. For finite variation the drift of `η - uW` is the
//! linear function `g(u) = d_η + u(d_ξ - σ_ξ²/2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::{ExtInterval, ExtReal, IntervalKind};
use crate::levy_model::{BivariateTriplet, Component, GaussianCovariance, Sign, STRUCT_TOL};
use crate::quadrant_thresholds::{h, snap, theta_profile, Quadrant, ThetaProfile};

/// Absolute tolerance for curve fitting and `g(c) = 0` in degeneracy detection.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("g is only implemented in linear form; infinite-variation models are not supported")]
    NonFiniteVariation,
    #[error("absorbing sets require L ∩ U = ∅, but the model is degenerate with c = {0}")]
    Degenerate(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum GDescriptor {
    /// `g(u) = c0 + c1·u`.
    Linear {
        c0: f64,
        c1: f64,
    },
    NonFinite,
}

impl GDescriptor {
    pub fn of(triplet: &BivariateTriplet) -> Self {
        let d = triplet.drift();
        GDescriptor::Linear { c0: d.eta, c1: d.xi - 0.5 * triplet.gaussian().var_xi }
    }

    pub fn eval(&self, u: f64) -> Result<f64, BoundsError> {
        match *self {
            GDescriptor::Linear { c0, c1 } => Ok(c0 + c1 * u),
            GDescriptor::NonFinite => Err(BoundsError::NonFiniteVariation),
        }
    }

    /// `{u : g(u) ≥ 0}`, i.e. `[m₁, m₂]`.
    pub fn nonnegative_set(&self) -> Result<ExtInterval, BoundsError> {
        let GDescriptor::Linear { c0, c1 } = *self else {
            return Err(BoundsError::NonFiniteVariation);
        };
        Ok(if c1 > 0.0 {
            ExtInterval::RightRay(-c0 / c1)
        } else if c1 < 0.0 {
            ExtInterval::LeftRay(-c0 / c1)
        } else if c0 >= 0.0 {
            ExtInterval::All
        } else {
            ExtInterval::Empty
        })
    }

    /// `{u : g(u) ≤ 0}`.
    pub fn nonpositive_set(&self) -> Result<ExtInterval, BoundsError> {
        let GDescriptor::Linear { c0, c1 } = *self else {
            return Err(BoundsError::NonFiniteVariation);
        };
        Ok(if c1 > 0.0 {
            ExtInterval::LeftRay(-c0 / c1)
        } else if c1 < 0.0 {
            ExtInterval::RightRay(-c0 / c1)
        } else if c0 <= 0.0 {
            ExtInterval::All
        } else {
            ExtInterval::Empty
        })
    }
}

/// `g(u) = d_η + u(d_ξ - σ_ξ²/2)`.
pub fn g_eval(triplet: &BivariateTriplet, u: f64) -> f64 {
    let d = triplet.drift();
    d.eta + u * (d.xi - 0.5 * triplet.gaussian().var_xi)
}

/// Whether `η - uW` has no Gaussian part: `σ_ξη = -u·σ_ξ²` and `σ_η² = u²·σ_ξ²`.
pub fn covariance_condition(g: &GaussianCovariance, u: f64) -> bool {
    (g.cov + u * g.var_xi).abs() <= STRUCT_TOL && (g.var_eta - u * u * g.var_xi).abs() <= STRUCT_TOL
}

/// `{u : covariance_condition(u)}`: a point, everything, or nothing.
pub fn covariance_set(g: &GaussianCovariance) -> ExtInterval {
    if g.var_xi > STRUCT_TOL {
        let u = -g.cov / g.var_xi;
        if covariance_condition(g, u) {
            ExtInterval::Singleton(u)
        } else {
            ExtInterval::Empty
        }
    } else if g.is_zero() {
        ExtInterval::All
    } else {
        ExtInterval::Empty
    }
}

fn eta_has_jumps(triplet: &BivariateTriplet, sign: Sign) -> bool {
    triplet.atoms().iter().any(|a| match sign {
        Sign::Plus => snap(a.y) > 0.0,
        Sign::Minus => snap(a.y) < 0.0,
    })
}

/// `L*` with the raw endpoints before crossed ones collapse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarSet {
    pub set: ExtInterval,
    pub raw: Option<(ExtReal, ExtReal)>,
}

fn star_from_raw(raw: Option<(f64, f64)>, zero_allowed: bool) -> StarSet {
    let set = match raw {
        Some((lo, hi)) => {
            let iv = ExtInterval::from_bounds(lo, hi);
            if iv.is_empty() || iv == ExtInterval::Singleton(0.0) {
                if zero_allowed {
                    ExtInterval::Singleton(0.0)
                } else {
                    ExtInterval::Empty
                }
            } else {
                iv
            }
        }
        None if zero_allowed => ExtInterval::Singleton(0.0),
        None => ExtInterval::Empty,
    };
    StarSet { set, raw: raw.map(|(a, b)| (ExtReal::new(a), ExtReal::new(b))) }
}

/// `L* = {u : η - uW has no negative jumps}` from the thresholds.
pub fn lstar_from_profile(triplet: &BivariateTriplet, p: &ThetaProfile) -> StarSet {
    let a2 = p.mass(Quadrant::A2) != 0.0;
    let a3 = p.mass(Quadrant::A3) != 0.0;
    let raw = match (a2, a3) {
        (true, false) => Some((p.theta(2), p.theta(4))),
        (false, true) => Some((p.theta(1), p.theta(3))),
        (false, false) => Some((p.theta(1), p.theta(4))),
        (true, true) => None,
    };
    star_from_raw(raw, !eta_has_jumps(triplet, Sign::Minus))
}

/// `U* = {u : η - uW has no positive jumps}` from the thresholds.
pub fn ustar_from_profile(triplet: &BivariateTriplet, p: &ThetaProfile) -> StarSet {
    let a1 = p.mass(Quadrant::A1) != 0.0;
    let a4 = p.mass(Quadrant::A4) != 0.0;
    let raw = match (a1, a4) {
        (false, true) => Some((p.theta_prime(4), p.theta_prime(2))),
        (true, false) => Some((p.theta_prime(3), p.theta_prime(1))),
        (false, false) => Some((p.theta_prime(3), p.theta_prime(2))),
        (true, true) => None,
    };
    star_from_raw(raw, !eta_has_jumps(triplet, Sign::Plus))
}

pub fn compute_lstar(triplet: &BivariateTriplet) -> ExtInterval {
    lstar_from_profile(triplet, &theta_profile(triplet)).set
}

pub fn compute_ustar(triplet: &BivariateTriplet) -> ExtInterval {
    ustar_from_profile(triplet, &theta_profile(triplet)).set
}

/// `L` ignoring the degenerate case.
fn l_generic(triplet: &BivariateTriplet, lstar: &ExtInterval) -> ExtInterval {
    let g = GDescriptor::of(triplet).nonnegative_set().expect("linear g");
    lstar.intersect(&covariance_set(&triplet.gaussian())).intersect_snapped(&g, STRUCT_TOL)
}

fn u_generic(triplet: &BivariateTriplet, ustar: &ExtInterval) -> ExtInterval {
    let g = GDescriptor::of(triplet).nonpositive_set().expect("linear g");
    ustar.intersect(&covariance_set(&triplet.gaussian())).intersect_snapped(&g, STRUCT_TOL)
}

pub fn compute_l(triplet: &BivariateTriplet) -> ExtInterval {
    compute_bounds(triplet).l
}

pub fn compute_u(triplet: &BivariateTriplet) -> ExtInterval {
    compute_bounds(triplet).u
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegenerateSource {
    CovarianceRatio,
    CurveFit,
    NoJumpsNoGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerateInfo {
    pub c: f64,
    pub source: DegenerateSource,
}

/// Finds `c ≠ 0` with the Gaussian part matching at `u = c`, all atoms on
/// the curve `y = c(e^{-x} - 1)` and `g(c) = 0`.
pub fn detect_degenerate(triplet: &BivariateTriplet) -> Option<DegenerateInfo> {
    let gauss = triplet.gaussian();
    let d = triplet.drift();
    let (c, source) = if gauss.var_xi > STRUCT_TOL {
        (-gauss.cov / gauss.var_xi, DegenerateSource::CovarianceRatio)
    } else if !gauss.is_zero() {
        return None;
    } else if let Some(a) = triplet.atoms().iter().find(|a| snap(a.x) != 0.0) {
        (a.y / h(a.x), DegenerateSource::CurveFit)
    } else if d.xi != 0.0 {
        (-d.eta / d.xi, DegenerateSource::NoJumpsNoGaussian)
    } else {
        return None;
    };
    if !c.is_finite() || c == 0.0 {
        return None;
    }
    let on_curve = triplet.atoms().iter().all(|a| (a.y - c * h(a.x)).abs() <= DEGENERACY_TOL);
    let ok = on_curve && covariance_condition(&gauss, c) && g_eval(triplet, c).abs() <= DEGENERACY_TOL;
    ok.then_some(DegenerateInfo { c, source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayOrientation {
    /// `L = (-∞, a]`, `U = [b, ∞)`.
    LowerLeft,
    /// `U = (-∞, a]`, `L = [b, ∞)`.
    UpperLeft,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Taxonomy {
    /// `L = ℝ`: `ξ ≡ 0` and `η` a subordinator.
    LowerAll,
    /// `U = ℝ`: `ξ ≡ 0` and `-η` a subordinator.
    UpperAll,
    BothAll,
    /// `L = U = {c}`.
    DegeneratePoint,
    /// `L` and `U` are rays meeting at `c`.
    DegenerateSplitRays {
        orientation: RayOrientation,
    },
    BrownianBothEmpty,
    BrownianLowerSingleton,
    BrownianUpperSingleton,
    /// `L = ∅`, `U` of the given shape.
    LowerEmpty {
        upper: IntervalKind,
    },
    /// `U = ∅`, `L` of the given shape.
    UpperEmpty {
        lower: IntervalKind,
    },
    OppositeRays {
        orientation: RayOrientation,
    },
    Inconsistent {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lstar: ExtInterval,
    pub ustar: ExtInterval,
    pub lstar_raw: Option<(ExtReal, ExtReal)>,
    pub ustar_raw: Option<(ExtReal, ExtReal)>,
    #[serde(rename = "L")]
    pub l: ExtInterval,
    #[serde(rename = "U")]
    pub u: ExtInterval,
    pub g: GDescriptor,
    pub degenerate: Option<DegenerateInfo>,
    pub taxonomy: Taxonomy,
    /// `{g ≥ 0} = [m1, m2]`.
    pub m1: ExtReal,
    pub m2: ExtReal,
    /// `{g ≤ 0} = [n1, n2]`.
    pub n1: ExtReal,
    pub n2: ExtReal,
    pub gaussian_zero: bool,
    pub xi_subordinator: bool,
    pub neg_xi_subordinator: bool,
    pub xi_zero: bool,
}

fn set_bounds(iv: &ExtInterval) -> (ExtReal, ExtReal) {
    if iv.is_empty() {
        (ExtReal::POS_INF, ExtReal::NEG_INF)
    } else {
        (ExtReal::new(iv.inf()), ExtReal::new(iv.sup()))
    }
}

pub fn compute_bounds(triplet: &BivariateTriplet) -> BoundsReport {
    compute_bounds_with_profile(triplet, &theta_profile(triplet))
}

pub fn compute_bounds_with_profile(triplet: &BivariateTriplet, profile: &ThetaProfile) -> BoundsReport {
    let lstar = lstar_from_profile(triplet, profile);
    let ustar = ustar_from_profile(triplet, profile);
    let g = GDescriptor::of(triplet);
    let gneg = g.nonnegative_set().expect("linear g");
    let gpos = g.nonpositive_set().expect("linear g");
    let xi = triplet.marginal(Component::Xi);
    let gaussian_zero = triplet.gaussian().is_zero();
    let xi_sub = xi.is_subordinator(Sign::Plus);
    let neg_xi_sub = xi.is_subordinator(Sign::Minus);
    let degenerate = detect_degenerate(triplet);

    let (l, u) = match degenerate {
        Some(DegenerateInfo { c, .. }) if gaussian_zero && xi_sub => {
            (ExtInterval::RightRay(c), ExtInterval::LeftRay(c))
        }
        Some(DegenerateInfo { c, .. }) if gaussian_zero && neg_xi_sub => {
            (ExtInterval::LeftRay(c), ExtInterval::RightRay(c))
        }
        Some(DegenerateInfo { c, .. }) => (ExtInterval::Singleton(c), ExtInterval::Singleton(c)),
        None => (l_generic(triplet, &lstar.set), u_generic(triplet, &ustar.set)),
    };
    let (m1, m2) = set_bounds(&gneg);
    let (n1, n2) = set_bounds(&gpos);
    let mut report = BoundsReport {
        lstar: lstar.set,
        ustar: ustar.set,
        lstar_raw: lstar.raw,
        ustar_raw: ustar.raw,
        l,
        u,
        g,
        degenerate,
        taxonomy: Taxonomy::Inconsistent { reason: "unclassified".into() },
        m1,
        m2,
        n1,
        n2,
        gaussian_zero,
        xi_subordinator: xi_sub,
        neg_xi_subordinator: neg_xi_sub,
        xi_zero: triplet.component_is_zero(Component::Xi),
    };
    report.taxonomy = classify_combination(&report);
    report
}

/// Lower bound function: the lowest level a path from `z` reaches with
/// positive probability.
pub fn delta(report: &BoundsReport, z: f64) -> ExtReal {
    let l = &report.l;
    if l.is_empty() {
        ExtReal::NEG_INF
    } else if l.contains(z) {
        ExtReal::new(z)
    } else if z >= l.sup() {
        ExtReal::new(l.sup())
    } else {
        ExtReal::NEG_INF
    }
}

/// Upper bound function, symmetric to [`delta`].
pub fn upsilon(report: &BoundsReport, z: f64) -> ExtReal {
    let u = &report.u;
    if u.is_empty() {
        ExtReal::POS_INF
    } else if u.contains(z) {
        ExtReal::new(z)
    } else if z <= u.inf() {
        ExtReal::new(u.inf())
    } else {
        ExtReal::POS_INF
    }
}

pub fn classify_combination(report: &BoundsReport) -> Taxonomy {
    use ExtInterval as I;
    let (l, u) = (report.l, report.u);
    let inconsistent = |reason: String| Taxonomy::Inconsistent { reason };

    match (l, u) {
        (I::All, I::All) => return Taxonomy::BothAll,
        (I::All, _) if report.xi_zero => return Taxonomy::LowerAll,
        (_, I::All) if report.xi_zero => return Taxonomy::UpperAll,
        (I::All, _) | (_, I::All) => return inconsistent(format!("L = {l}, U = {u} with ξ not identically zero")),
        _ => {}
    }

    if let Some(DegenerateInfo { c, .. }) = report.degenerate {
        return match (l, u) {
            (I::Singleton(a), I::Singleton(b)) if a == c && b == c => Taxonomy::DegeneratePoint,
            (I::LeftRay(a), I::RightRay(b)) if a == c && b == c => {
                Taxonomy::DegenerateSplitRays { orientation: RayOrientation::LowerLeft }
            }
            (I::RightRay(a), I::LeftRay(b)) if a == c && b == c => {
                Taxonomy::DegenerateSplitRays { orientation: RayOrientation::UpperLeft }
            }
            _ => inconsistent(format!("degenerate c = {c} but L = {l}, U = {u}")),
        };
    }
    if l.intersects(&u) {
        return inconsistent(format!("L ∩ U ≠ ∅ (L = {l}, U = {u}) without a degenerate point"));
    }

    // Subordinator consequences of the ray shapes.
    if (matches!(u, I::LeftRay(_)) || matches!(l, I::RightRay(_))) && !report.xi_subordinator {
        return inconsistent(format!("L = {l}, U = {u} require ξ to be a subordinator"));
    }
    if (matches!(l, I::LeftRay(_)) || matches!(u, I::RightRay(_))) && !report.neg_xi_subordinator {
        return inconsistent(format!("L = {l}, U = {u} require -ξ to be a subordinator"));
    }

    if !report.gaussian_zero {
        return match (l, u) {
            (I::Empty, I::Empty) => Taxonomy::BrownianBothEmpty,
            (I::Singleton(_), I::Empty) => Taxonomy::BrownianLowerSingleton,
            (I::Empty, I::Singleton(_)) => Taxonomy::BrownianUpperSingleton,
            _ => inconsistent(format!("Gaussian part present but L = {l}, U = {u}")),
        };
    }
    match (l, u) {
        (I::Empty, u) => Taxonomy::LowerEmpty { upper: u.kind() },
        (l, I::Empty) => Taxonomy::UpperEmpty { lower: l.kind() },
        (I::LeftRay(a), I::RightRay(b)) if a < b => Taxonomy::OppositeRays { orientation: RayOrientation::LowerLeft },
        (I::RightRay(b), I::LeftRay(a)) if a < b => Taxonomy::OppositeRays { orientation: RayOrientation::UpperLeft },
        _ => inconsistent(format!("both nonempty but not opposite rays: L = {l}, U = {u}")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AbsorbingSet {
    /// `U ∪ L` for `U = (-∞, a]`, `L = [b, ∞)`.
    Union {
        upper: ExtInterval,
        lower: ExtInterval,
    },
    Interval {
        set: ExtInterval,
    },
    /// `(a, b)` for `L = (-∞, a]`, `U = [b, ∞)`.
    Open {
        a: f64,
        b: f64,
    },
}

impl AbsorbingSet {
    pub fn contains(&self, v: f64) -> bool {
        match self {
            AbsorbingSet::Union { upper, lower } => upper.contains(v) || lower.contains(v),
            AbsorbingSet::Interval { set } => set.contains(v),
            AbsorbingSet::Open { a, b } => *a < v && v < *b,
        }
    }
}

/// Maximal absorbing sets when `L ∩ U = ∅`.
pub fn absorbing_sets(report: &BoundsReport) -> Result<Vec<AbsorbingSet>, BoundsError> {
    use ExtInterval as I;
    if let Some(d) = report.degenerate {
        return Err(BoundsError::Degenerate(d.c));
    }
    Ok(match (report.l, report.u) {
        (l @ I::RightRay(_), u @ I::LeftRay(_)) => vec![AbsorbingSet::Union { upper: u, lower: l }],
        (I::Empty, u @ I::LeftRay(_)) => vec![AbsorbingSet::Interval { set: u }],
        (l @ I::RightRay(_), I::Empty) => vec![AbsorbingSet::Interval { set: l }],
        (I::LeftRay(a), I::RightRay(b)) => vec![AbsorbingSet::Open { a, b }],
        _ => vec![],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionBundle {
    /// The condition list as stated.
    pub literal: bool,
    /// `literal` plus the drift clause needed for the equivalence to hold.
    pub refined: bool,
    /// Whether `(L, U)` has the predicted finite opposite-ray shape.
    pub shape_matches: bool,
    /// Subordinator consequence of the bundle.
    pub subordinator: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `U = (-∞, a]`, `L = [b, ∞)`; `ξ` a subordinator, `|V_t| → ∞`.
    pub divergent: ConditionBundle,
    /// `L = (-∞, a]`, `U = [b, ∞)`; `-ξ` a subordinator, `V` stationary on `(a, b)`.
    pub stationary: ConditionBundle,
    pub stationary_support: Option<(f64, f64)>,
    pub consistent: bool,
}

pub fn structure_conditions_check(triplet: &BivariateTriplet) -> StructureReport {
    let p = theta_profile(triplet);
    let r = compute_bounds_with_profile(triplet, &p);
    let d = triplet.drift();
    let sigma_zero = triplet.gaussian().is_zero();
    let applicable = r.degenerate.is_none();

    let div_literal = sigma_zero
        && d.xi >= 0.0
        && p.mass(Quadrant::A3) == 0.0
        && p.mass(Quadrant::A4) == 0.0
        && p.theta_prime(1) > f64::NEG_INFINITY
        && p.theta(2) < f64::INFINITY;
    let div_refined = div_literal && (d.xi > 0.0 || d.eta == 0.0);
    let div_shape = matches!((r.u, r.l), (ExtInterval::LeftRay(a), ExtInterval::RightRay(b)) if a < b);
    let div_sub = r.xi_subordinator;
    let divergent = ConditionBundle {
        literal: div_literal,
        refined: div_refined,
        shape_matches: div_shape,
        subordinator: div_sub,
        consistent: !applicable || (div_refined == div_shape && (!div_refined || div_sub)),
    };

    let st_literal = sigma_zero
        && d.xi <= 0.0
        && p.mass(Quadrant::A1) == 0.0
        && p.mass(Quadrant::A2) == 0.0
        && p.theta_prime(4) < f64::INFINITY
        && p.theta(3) > f64::NEG_INFINITY;
    let st_refined = st_literal && (d.xi < 0.0 || d.eta == 0.0);
    let (st_shape, support) = match (r.l, r.u) {
        (ExtInterval::LeftRay(a), ExtInterval::RightRay(b)) if a < b => (true, Some((a, b))),
        _ => (false, None),
    };
    let st_sub = r.neg_xi_subordinator;
    let stationary = ConditionBundle {
        literal: st_literal,
        refined: st_refined,
        shape_matches: st_shape,
        subordinator: st_sub,
        consistent: !applicable || (st_refined == st_shape && (!st_refined || st_sub)),
    };
    let consistent = divergent.consistent && stationary.consistent;
    StructureReport { divergent, stationary, stationary_support: support, consistent }
}
