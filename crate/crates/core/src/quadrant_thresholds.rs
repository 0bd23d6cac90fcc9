//! Quadrant masses and the eight thresholds `θ₁..θ₄`, `θ₁′..θ₄′`.
//!
//! For `h(x) = e^{-x} - 1` and `f_u(x, y) = y - u·h(x)`, the sets are
//! `A_i^u = {(x, y) ∈ A_i : f_u < 0}` and `B_i^u = {(x, y) ∈ A_i : f_u > 0}`.
//! With atomic measures the thresholds are extremes of per-atom solution sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::ExtReal;
use crate::levy_model::{BivariateTriplet, JumpAtom, STRUCT_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("ratio undefined for an atom on the vertical axis (x = 0)")]
    OnVerticalAxis,
    #[error("quadrant index must be 1..=4, got {0}")]
    BadIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    A1,
    A2,
    A3,
    A4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::A1, Quadrant::A2, Quadrant::A3, Quadrant::A4];

    pub fn from_index(i: usize) -> Result<Self, ThresholdError> {
        match i {
            1 => Ok(Quadrant::A1),
            2 => Ok(Quadrant::A2),
            3 => Ok(Quadrant::A3),
            4 => Ok(Quadrant::A4),
            _ => Err(ThresholdError::BadIndex(i)),
        }
    }

    /// Closed quadrant membership.
    pub fn contains(self, x: f64, y: f64) -> bool {
        let (x, y) = (snap(x), snap(y));
        match self {
            Quadrant::A1 => x >= 0.0 && y >= 0.0,
            Quadrant::A2 => x >= 0.0 && y <= 0.0,
            Quadrant::A3 => x <= 0.0 && y <= 0.0,
            Quadrant::A4 => x <= 0.0 && y >= 0.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Values within the structural tolerance of an axis are placed on it.
#[inline]
pub(crate) fn snap(v: f64) -> f64 {
    if v.abs() <= STRUCT_TOL {
        0.0
    } else {
        v
    }
}

#[inline]
pub(crate) fn h(x: f64) -> f64 {
    (-snap(x)).exp_m1()
}

/// Critical `u` solving `y - u(e^{-x} - 1) = 0`.
pub fn ratio(x: f64, y: f64) -> Result<f64, ThresholdError> {
    if snap(x) == 0.0 {
        return Err(ThresholdError::OnVerticalAxis);
    }
    Ok(y / h(x))
}

/// Total rate of atoms in `A_i^u`.
pub fn mass_of_aiu(triplet: &BivariateTriplet, q: Quadrant, u: f64) -> f64 {
    triplet.atoms().iter().filter(|a| q.contains(a.x, a.y) && snap(a.y) - u * h(a.x) < 0.0).map(|a| a.rate).sum()
}

/// Total rate of atoms in `B_i^u`.
pub fn mass_of_biu(triplet: &BivariateTriplet, q: Quadrant, u: f64) -> f64 {
    triplet.atoms().iter().filter(|a| q.contains(a.x, a.y) && snap(a.y) - u * h(a.x) > 0.0).map(|a| a.rate).sum()
}

/// Masses of the quadrant differences that decide each threshold's fallback.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OpenMasses {
    pub a1_minus_a4: f64,
    pub a2_minus_a1: f64,
    pub a2_minus_a3: f64,
    pub a3_minus_a4: f64,
    pub a3_minus_a2: f64,
    pub a4_minus_a1: f64,
    pub a4_minus_a3: f64,
    pub a1_minus_a2: f64,
}

impl OpenMasses {
    pub fn of(triplet: &BivariateTriplet) -> Self {
        let mut m = OpenMasses::default();
        for a in triplet.atoms() {
            let (x, y, r) = (snap(a.x), snap(a.y), a.rate);
            if x > 0.0 && y >= 0.0 {
                m.a1_minus_a4 += r;
            }
            if x >= 0.0 && y < 0.0 {
                m.a2_minus_a1 += r;
            }
            if x > 0.0 && y <= 0.0 {
                m.a2_minus_a3 += r;
            }
            if x <= 0.0 && y < 0.0 {
                m.a3_minus_a4 += r;
            }
            if x < 0.0 && y <= 0.0 {
                m.a3_minus_a2 += r;
            }
            if x < 0.0 && y >= 0.0 {
                m.a4_minus_a1 += r;
            }
            if x <= 0.0 && y > 0.0 {
                m.a4_minus_a3 += r;
            }
            if x >= 0.0 && y > 0.0 {
                m.a1_minus_a2 += r;
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaProfile {
    /// `θ₁..θ₄`.
    pub theta: [ExtReal; 4],
    /// `θ₁′..θ₄′`.
    pub theta_prime: [ExtReal; 4],
    pub quadrant_mass: [f64; 4],
    pub open_mass: OpenMasses,
}

impl ThetaProfile {
    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i - 1].get()
    }

    pub fn theta_prime(&self, i: usize) -> f64 {
        self.theta_prime[i - 1].get()
    }

    pub fn mass(&self, q: Quadrant) -> f64 {
        self.quadrant_mass[q.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cond {
    /// `f_u < 0`
    A,
    /// `f_u > 0`
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Half {
    NonPos,
    NonNeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Sup,
    Inf,
}

/// `(lo, hi)` of the set of `u` in the half-line where the atom satisfies the
/// condition; open or closed ends do not affect sup and inf.
fn atom_u_set(a: &JumpAtom, cond: Cond, half: Half) -> Option<(f64, f64)> {
    let (x, y) = (snap(a.x), snap(a.y));
    let (hl_lo, hl_hi) = match half {
        Half::NonPos => (f64::NEG_INFINITY, 0.0),
        Half::NonNeg => (0.0, f64::INFINITY),
    };
    if x == 0.0 {
        let holds = match cond {
            Cond::A => y < 0.0,
            Cond::B => y > 0.0,
        };
        return holds.then_some((hl_lo, hl_hi));
    }
    let hv = h(x);
    let r = y / hv;
    // Condition reduces to u > r or u < r depending on the sign of h.
    let above = matches!((cond, hv > 0.0), (Cond::A, true) | (Cond::B, false));
    let (lo, hi) = if above { (r.max(hl_lo), hl_hi) } else { (hl_lo, r.min(hl_hi)) };
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

fn extreme(triplet: &BivariateTriplet, q: Quadrant, cond: Cond, half: Half, op: Op) -> f64 {
    let sets = triplet.atoms().iter().filter(|a| q.contains(a.x, a.y)).filter_map(|a| atom_u_set(a, cond, half));
    match op {
        Op::Sup => sets.map(|(_, hi)| hi).fold(f64::NEG_INFINITY, f64::max),
        Op::Inf => sets.map(|(lo, _)| lo).fold(f64::INFINITY, f64::min),
    }
}

struct ThetaRule {
    op: Op,
    half: Half,
    fallback: f64,
}

fn theta_spec(i: usize, m: &OpenMasses) -> (ThetaRule, bool) {
    let inf = f64::INFINITY;
    match i {
        1 => (ThetaRule { op: Op::Sup, half: Half::NonPos, fallback: -inf }, m.a1_minus_a4 == 0.0),
        2 => (ThetaRule { op: Op::Sup, half: Half::NonNeg, fallback: 0.0 }, m.a2_minus_a1 == 0.0),
        3 => (ThetaRule { op: Op::Inf, half: Half::NonPos, fallback: 0.0 }, m.a3_minus_a4 == 0.0),
        _ => (ThetaRule { op: Op::Inf, half: Half::NonNeg, fallback: inf }, m.a4_minus_a1 == 0.0),
    }
}

fn theta_prime_spec(i: usize, m: &OpenMasses) -> (ThetaRule, bool) {
    let inf = f64::INFINITY;
    match i {
        1 => (ThetaRule { op: Op::Inf, half: Half::NonPos, fallback: 0.0 }, m.a1_minus_a2 == 0.0),
        2 => (ThetaRule { op: Op::Inf, half: Half::NonNeg, fallback: inf }, m.a2_minus_a3 == 0.0),
        3 => (ThetaRule { op: Op::Sup, half: Half::NonPos, fallback: -inf }, m.a3_minus_a2 == 0.0),
        _ => (ThetaRule { op: Op::Sup, half: Half::NonNeg, fallback: 0.0 }, m.a4_minus_a3 == 0.0),
    }
}

/// `θ_i`: `sup{u ≤ 0 : Π(A₁^u) > 0}`, `sup{u ≥ 0 : Π(A₂^u) > 0}`,
/// `inf{u ≤ 0 : Π(A₃^u) > 0}`, `inf{u ≥ 0 : Π(A₄^u) > 0}`, each replaced by
/// its fallback when the governing quadrant difference carries no mass.
pub fn theta(triplet: &BivariateTriplet, i: usize) -> Result<ExtReal, ThresholdError> {
    let q = Quadrant::from_index(i)?;
    let (spec, use_fallback) = theta_spec(i, &OpenMasses::of(triplet));
    if use_fallback {
        return Ok(ExtReal::new(spec.fallback));
    }
    Ok(ExtReal::new(extreme(triplet, q, Cond::A, spec.half, spec.op)))
}

/// `θ_i′`: the same construction with `B_i^u` and the opposite extremes.
pub fn theta_prime(triplet: &BivariateTriplet, i: usize) -> Result<ExtReal, ThresholdError> {
    let q = Quadrant::from_index(i)?;
    let (spec, use_fallback) = theta_prime_spec(i, &OpenMasses::of(triplet));
    if use_fallback {
        return Ok(ExtReal::new(spec.fallback));
    }
    Ok(ExtReal::new(extreme(triplet, q, Cond::B, spec.half, spec.op)))
}

pub fn quadrant_mass(triplet: &BivariateTriplet, q: Quadrant) -> f64 {
    triplet.atoms().iter().filter(|a| q.contains(a.x, a.y)).map(|a| a.rate).sum()
}

pub fn theta_profile(triplet: &BivariateTriplet) -> ThetaProfile {
    let theta = [1, 2, 3, 4].map(|i| theta(triplet, i).expect("index in range"));
    let theta_prime = [1, 2, 3, 4].map(|i| theta_prime(triplet, i).expect("index in range"));
    ThetaProfile {
        theta,
        theta_prime,
        quadrant_mass: Quadrant::ALL.map(|q| quadrant_mass(triplet, q)),
        open_mass: OpenMasses::of(triplet),
    }
}

/// Orderings and fallback equivalences the thresholds must satisfy.
/// Returns the list of violated statements.
pub fn ordering_violations(p: &ThetaProfile) -> Vec<String> {
    let mut out = Vec::new();
    let t = |i| p.theta(i);
    let tp = |i| p.theta_prime(i);
    let mut check = |ok: bool, what: &str| {
        if !ok {
            out.push(what.to_string());
        }
    };
    if p.mass(Quadrant::A1) != 0.0 {
        check(tp(1) <= t(1) && t(1) <= 0.0, "Π(A1)≠0 ⇒ θ1′ ≤ θ1 ≤ 0");
    }
    if p.mass(Quadrant::A2) != 0.0 {
        check(0.0 <= tp(2) && tp(2) <= t(2), "Π(A2)≠0 ⇒ 0 ≤ θ2′ ≤ θ2");
    }
    if p.mass(Quadrant::A3) != 0.0 {
        check(t(3) <= tp(3) && tp(3) <= 0.0, "Π(A3)≠0 ⇒ θ3 ≤ θ3′ ≤ 0");
    }
    if p.mass(Quadrant::A4) != 0.0 {
        check(0.0 <= t(4) && t(4) <= tp(4), "Π(A4)≠0 ⇒ 0 ≤ θ4 ≤ θ4′");
    }
    let inf = f64::INFINITY;
    if p.mass(Quadrant::A1) == 0.0 {
        check(t(1) == -inf && tp(1) == 0.0, "Π(A1)=0 ⇒ θ1=-∞, θ1′=0");
    }
    if p.mass(Quadrant::A2) == 0.0 {
        check(t(2) == 0.0 && tp(2) == inf, "Π(A2)=0 ⇒ θ2=0, θ2′=∞");
    }
    if p.mass(Quadrant::A3) == 0.0 {
        check(t(3) == 0.0 && tp(3) == -inf, "Π(A3)=0 ⇒ θ3=0, θ3′=-∞");
    }
    if p.mass(Quadrant::A4) == 0.0 {
        check(t(4) == inf && tp(4) == 0.0, "Π(A4)=0 ⇒ θ4=∞, θ4′=0");
    }
    out
}
