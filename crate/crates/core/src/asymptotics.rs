//! Long-run behaviour of `ξ` and the integral conditions `J±`, `I_{X,Y}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::levy_model::{BivariateTriplet, Component, MarginalAtom, MarginalTriplet, STRUCT_TOL};
use crate::quadrature::{self, QuadratureError, DEFAULT_REL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticTag {
    DriftsToPlusInfinity,
    DriftsToMinusInfinity,
    Oscillates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticBasis {
    MeanSign,
    JIntegral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClass {
    pub tag: AsymptoticTag,
    pub basis: AsymptoticBasis,
    pub mean: Option<f64>,
}

/// `E X₁ = d + Σ rate·size`.
pub fn mean_xi1(m: &MarginalTriplet) -> f64 {
    m.mean()
}

/// Classifies by the sign of `E X₁`, with a tolerance scaled to the terms
/// that make up the mean.
pub fn classify(m: &MarginalTriplet) -> AsymptoticClass {
    let mean = m.mean();
    let scale = m.drift.abs() + m.atoms.iter().map(|a| (a.rate * a.size).abs()).sum::<f64>();
    let tag = if mean.abs() <= STRUCT_TOL * scale.max(1.0) {
        AsymptoticTag::Oscillates
    } else if mean > 0.0 {
        AsymptoticTag::DriftsToPlusInfinity
    } else {
        AsymptoticTag::DriftsToMinusInfinity
    };
    AsymptoticClass { tag, basis: AsymptoticBasis::MeanSign, mean: Some(mean) }
}

/// Trichotomy through `J±` for processes whose mean is not usable.
/// `J⁺ < ∞ = J⁻` gives drift to `-∞` and vice versa; both infinite gives oscillation.
pub fn classify_by_j(positive: &TailFunction, negative: &TailFunction) -> Result<AsymptoticClass, AsymptoticsError> {
    let jp = j_plus(positive, negative)?;
    let jm = j_plus(negative, positive)?;
    let tag = match (jp, jm) {
        (IntegralValue::Finite(_), IntegralValue::Infinite) => AsymptoticTag::DriftsToMinusInfinity,
        (IntegralValue::Infinite, IntegralValue::Finite(_)) => AsymptoticTag::DriftsToPlusInfinity,
        (IntegralValue::Infinite, IntegralValue::Infinite) => AsymptoticTag::Oscillates,
        (jp, jm) => return Err(AsymptoticsError::Indeterminate { j_plus: jp, j_minus: jm }),
    };
    Ok(AsymptoticClass { tag, basis: AsymptoticBasis::JIntegral, mean: None })
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("A(x) requires x >= 1, got {0}")]
    BelowOne(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("J-integrals do not determine the behaviour: J+ = {j_plus}, J- = {j_minus}")]
    Indeterminate { j_plus: IntegralValue, j_minus: IntegralValue },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum IntegralValue {
    Finite(f64),
    Infinite,
    Unknown,
}

impl IntegralValue {
    pub fn is_finite(self) -> bool {
        matches!(self, IntegralValue::Finite(_))
    }
}

impl fmt::Display for IntegralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralValue::Finite(v) => write!(f, "{v}"),
            IntegralValue::Infinite => write!(f, "inf"),
            IntegralValue::Unknown => write!(f, "unknown"),
        }
    }
}

/// What the caller knows about integrals against a user-supplied tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailHint {
    /// The tail vanishes on `[upper, ∞)`.
    BoundedSupport {
        upper: f64,
    },
    /// Integrals converge; the contribution beyond `cutoff` is negligible.
    Convergent {
        cutoff: f64,
    },
    Divergent,
    Unknown,
}

/// Nonincreasing tail `T(x) = Π((x, ∞))` on `[1, ∞)`.
#[derive(Clone)]
pub enum TailFunction {
    /// Step function of finitely many atoms `(rate, size)` with `size > 0`.
    Atomic(Vec<MarginalAtom>),
    Callable {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        hint: TailHint,
    },
}

impl fmt::Debug for TailFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailFunction::Atomic(a) => f.debug_tuple("Atomic").field(a).finish(),
            TailFunction::Callable { hint, .. } => {
                f.debug_struct("Callable").field("hint", hint).finish_non_exhaustive()
            }
        }
    }
}

impl TailFunction {
    pub fn callable(f: impl Fn(f64) -> f64 + Send + Sync + 'static, hint: TailHint) -> Self {
        TailFunction::Callable { f: Arc::new(f), hint }
    }

    /// `Π̄⁺` of a marginal.
    pub fn positive(m: &MarginalTriplet) -> Self {
        TailFunction::Atomic(m.atoms.iter().filter(|a| a.size > 0.0).copied().collect())
    }

    /// `Π̄⁻`, stored by absolute jump size.
    pub fn negative(m: &MarginalTriplet) -> Self {
        TailFunction::Atomic(
            m.atoms.iter().filter(|a| a.size < 0.0).map(|a| MarginalAtom { rate: a.rate, size: -a.size }).collect(),
        )
    }

    /// Two-sided tail `Π̄(x) = Π̄⁺(x) + Π̄⁻(x)`.
    pub fn two_sided(m: &MarginalTriplet) -> Self {
        TailFunction::Atomic(m.atoms.iter().map(|a| MarginalAtom { rate: a.rate, size: a.size.abs() }).collect())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TailFunction::Atomic(atoms) => atoms.iter().filter(|a| a.size > x).map(|a| a.rate).sum(),
            TailFunction::Callable { f, .. } => f(x),
        }
    }

    /// Checks nonnegativity and monotonicity on a grid of `[1, upper]`.
    pub fn spot_check(&self, upper: f64, points: usize) -> bool {
        let mut prev = f64::INFINITY;
        for i in 0..=points {
            let x = 1.0 + (upper - 1.0) * i as f64 / points as f64;
            let v = self.eval(x);
            if !(v >= 0.0 && v <= prev) {
                return false;
            }
            prev = v;
        }
        true
    }
}

/// `A(x) = max{T(1), 1} + ∫_1^x T(s) ds`.
pub fn a_function(tail: &TailFunction, x: f64) -> Result<f64, AsymptoticsError> {
    if x.is_nan() || x < 1.0 {
        return Err(AsymptoticsError::BelowOne(x));
    }
    let base = tail.eval(1.0).max(1.0);
    let integral = match tail {
        TailFunction::Atomic(atoms) => atoms.iter().map(|a| a.rate * (a.size.min(x) - 1.0).max(0.0)).sum(),
        TailFunction::Callable { f, hint } => {
            let hi = match *hint {
                TailHint::BoundedSupport { upper } => x.min(upper.max(1.0)),
                _ => x,
            };
            quadrature::integrate(&|s| f(s), 1.0, hi, DEFAULT_REL_TOL)?
        }
    };
    Ok(base + integral)
}

/// `A⁺` of a marginal.
pub fn a_plus(m: &MarginalTriplet, x: f64) -> Result<f64, AsymptoticsError> {
    a_function(&TailFunction::positive(m), x)
}

/// `A⁻` of a marginal.
pub fn a_minus(m: &MarginalTriplet, x: f64) -> Result<f64, AsymptoticsError> {
    a_function(&TailFunction::negative(m), x)
}

/// Stieltjes integral `∫_{(lo, ∞)} w(x) d(-T)(x)` for a continuous weight `w`
/// with derivative `dw`, by parts on the finite range the hint allows.
fn stieltjes_against_tail(
    tail: &TailFunction,
    lo: f64,
    w: &dyn Fn(f64) -> Result<f64, AsymptoticsError>,
    dw: &dyn Fn(f64) -> Result<f64, AsymptoticsError>,
) -> Result<IntegralValue, AsymptoticsError> {
    match tail {
        TailFunction::Atomic(atoms) => {
            let mut s = 0.0;
            for a in atoms.iter().filter(|a| a.size > lo) {
                s += a.rate * w(a.size)?;
            }
            Ok(IntegralValue::Finite(s))
        }
        TailFunction::Callable { f, hint } => {
            let hi = match *hint {
                TailHint::BoundedSupport { upper } => upper,
                TailHint::Convergent { cutoff } => cutoff,
                TailHint::Divergent => return Ok(IntegralValue::Infinite),
                TailHint::Unknown => return Ok(IntegralValue::Unknown),
            };
            if hi <= lo {
                return Ok(IntegralValue::Finite(0.0));
            }
            // ∫_{(a,b]} w d(-T) = w(a)T(a) - w(b)T(b) + ∫_a^b T w'
            let err = std::cell::RefCell::new(None);
            let integrand = |s: f64| match dw(s) {
                Ok(d) => f(s) * d,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    0.0
                }
            };
            let body = quadrature::integrate(&integrand, lo, hi, DEFAULT_REL_TOL);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let v = w(lo)? * f(lo) - w(hi)? * f(hi) + body?;
            Ok(IntegralValue::Finite(v))
        }
    }
}

/// `J⁺ = ∫_{(1,∞)} x / A⁻(x) |Π̄⁺(dx)|`; `J⁻` is `j_plus(negative, positive)`.
pub fn j_plus(positive: &TailFunction, negative: &TailFunction) -> Result<IntegralValue, AsymptoticsError> {
    let w = |x: f64| Ok(x / a_function(negative, x)?);
    // d/dx [x / A(x)] = (A(x) - x·T(x)) / A(x)²
    let dw = |x: f64| {
        let a = a_function(negative, x)?;
        Ok((a - x * negative.eval(x)) / (a * a))
    };
    stieltjes_against_tail(positive, 1.0, &w, &dw)
}

pub fn j_minus(positive: &TailFunction, negative: &TailFunction) -> Result<IntegralValue, AsymptoticsError> {
    j_plus(negative, positive)
}

/// `I_{X,Y} = ∫_{(e,∞)} ln y / A_X⁺(ln y) |Π̄_Y(dy)|` with `Π̄_Y` two-sided.
pub fn i_integral(x: &MarginalTriplet, target_tail: &TailFunction) -> Result<IntegralValue, AsymptoticsError> {
    let tx = TailFunction::positive(x);
    let w = |y: f64| {
        let l = y.ln();
        Ok(l / a_function(&tx, l)?)
    };
    // d/dy [ln y / A(ln y)] = (A(ln y) - ln y·T(ln y)) / (y·A(ln y)²)
    let dw = |y: f64| {
        let l = y.ln();
        let a = a_function(&tx, l)?;
        Ok((a - l * tx.eval(l)) / (y * a * a))
    };
    stieltjes_against_tail(target_tail, std::f64::consts::E, &w, &dw)
}

/// Jump part of `K_t = η_t + Σ (e^{Δξ}-1)Δη - t·σ_{ξη}`: atom `(rate, x, y)`
/// becomes `(rate, e^x·y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeasure {
    pub atoms: Vec<MarginalAtom>,
    /// Always `-σ_{ξη}`.
    pub drift_correction: f64,
}

impl KMeasure {
    /// One-dimensional triplet of `K` (atoms are not merged).
    pub fn marginal(&self, triplet: &BivariateTriplet) -> MarginalTriplet {
        MarginalTriplet {
            drift: triplet.drift().eta + self.drift_correction,
            variance: triplet.gaussian().var_eta,
            atoms: self.atoms.clone(),
        }
    }
}

pub fn derive_k_measure(triplet: &BivariateTriplet) -> KMeasure {
    let atoms = triplet
        .atoms()
        .iter()
        .filter(|a| a.y != 0.0)
        .map(|a| MarginalAtom { rate: a.rate, size: a.x.exp() * a.y })
        .collect();
    KMeasure { atoms, drift_correction: -triplet.gaussian().cov }
}

/// Hypotheses of the stationary and convergent regimes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub class: AsymptoticClass,
    /// `I_{-ξ,K}` (stationary) or `I_{ξ,η}` (convergent).
    pub integral: IntegralValue,
    pub holds: bool,
    pub justification: String,
}

/// `ξ → -∞` and `I_{-ξ,K} < ∞`.
pub fn stationarity_check(triplet: &BivariateTriplet) -> Result<HypothesisCheck, AsymptoticsError> {
    let xi = triplet.marginal(Component::Xi);
    let class = classify(&xi);
    let k = derive_k_measure(triplet).marginal(triplet);
    let integral = i_integral(&xi.negated(), &TailFunction::two_sided(&k))?;
    let holds = class.tag == AsymptoticTag::DriftsToMinusInfinity && integral.is_finite();
    Ok(HypothesisCheck {
        class,
        integral,
        holds,
        justification: "atomic jump measure: I is a finite sum over atoms of K with |size| > e".into(),
    })
}

/// `ξ → +∞` and `I_{ξ,η} < ∞`.
pub fn convergence_check(triplet: &BivariateTriplet) -> Result<HypothesisCheck, AsymptoticsError> {
    let xi = triplet.marginal(Component::Xi);
    let class = classify(&xi);
    let eta = triplet.marginal(Component::Eta);
    let integral = i_integral(&xi, &TailFunction::two_sided(&eta))?;
    let holds = class.tag == AsymptoticTag::DriftsToPlusInfinity && integral.is_finite();
    Ok(HypothesisCheck {
        class,
        integral,
        holds,
        justification: "atomic jump measure: I is a finite sum over atoms of eta with |size| > e".into(),
    })
}
