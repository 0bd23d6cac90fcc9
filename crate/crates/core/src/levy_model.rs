//! Characteristic data of a bivariate Lévy process `(ξ, η)` with a finite,
//! atomic jump measure.
//!
//! The canonical drift parameter is the pathwise drift vector `d`. Finite
//! activity implies finite variation of the jump part, so `d` always exists;
//! truncated locations `γ` are derived on demand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for structural predicates (axis membership, PSD check).
pub const STRUCT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("jump atom rate must be positive and finite, got {0}")]
    NonPositiveRate(f64),
    #[error("jump atom at the origin (0, 0) is not a valid jump")]
    ZeroJump,
    #[error("non-finite value in field `{0}`")]
    NonFinite(&'static str),
    #[error("variance `{field}` must be non-negative, got {value}")]
    NegativeVariance { field: &'static str, value: f64 },
    #[error("gaussian covariance is not positive semidefinite: cov²={cov_sq} > var_xi·var_eta={prod}")]
    NotPositiveSemidefinite { cov_sq: f64, prod: f64 },
    #[error("atom probabilities must sum to 1 (within 1e-9), got {0}")]
    ProbabilitySum(f64),
    #[error("atom probability must be in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("compound Poisson intensity must be non-negative and finite, got {0}")]
    BadIntensity(f64),
    #[error("eta is identically zero; the process must have a non-trivial eta component")]
    TrivialEta,
}

/// One atom of the jump measure: jumps of size `(x, y)` arriving at `rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpAtom {
    pub rate: f64,
    pub x: f64,
    pub y: f64,
}

impl JumpAtom {
    pub fn new(rate: f64, x: f64, y: f64) -> Result<Self, ModelError> {
        if !x.is_finite() {
            return Err(ModelError::NonFinite("x"));
        }
        if !y.is_finite() {
            return Err(ModelError::NonFinite("y"));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(ModelError::NonPositiveRate(rate));
        }
        if x == 0.0 && y == 0.0 {
            return Err(ModelError::ZeroJump);
        }
        Ok(JumpAtom { rate, x, y })
    }
}

/// Finite-activity jump measure stored as rate-weighted atoms.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AtomicJumpMeasure {
    atoms: Vec<JumpAtom>,
}

impl AtomicJumpMeasure {
    /// Merges atoms sharing the same `(x, y)` by summing rates.
    pub fn new(atoms: impl IntoIterator<Item = JumpAtom>) -> Self {
        let mut merged: Vec<JumpAtom> = Vec::new();
        for a in atoms {
            match merged.iter_mut().find(|m| m.x == a.x && m.y == a.y) {
                Some(m) => m.rate += a.rate,
                None => merged.push(a),
            }
        }
        AtomicJumpMeasure { atoms: merged }
    }

    /// Compound Poisson form: intensity `lambda` and a jump law `(p, x, y)`.
    pub fn from_compound_poisson(
        lambda: f64,
        law: impl IntoIterator<Item = (f64, f64, f64)>,
    ) -> Result<Self, ModelError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(ModelError::BadIntensity(lambda));
        }
        let law: Vec<_> = law.into_iter().collect();
        let total: f64 = law.iter().map(|(p, _, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ModelError::ProbabilitySum(total));
        }
        if lambda == 0.0 {
            return Ok(AtomicJumpMeasure::default());
        }
        let atoms = law
            .into_iter()
            .map(|(p, x, y)| {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(ModelError::BadProbability(p));
                }
                JumpAtom::new(lambda * p, x, y)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AtomicJumpMeasure::new(atoms))
    }

    pub fn atoms(&self) -> &[JumpAtom] {
        &self.atoms
    }

    pub fn total_rate(&self) -> f64 {
        self.atoms.iter().map(|a| a.rate).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Gaussian covariance matrix `[[σ_ξ², σ_ξη], [σ_ξη, σ_η²]]` per unit time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GaussianCovariance {
    pub var_xi: f64,
    pub cov: f64,
    pub var_eta: f64,
}

impl GaussianCovariance {
    pub const ZERO: GaussianCovariance = GaussianCovariance { var_xi: 0.0, cov: 0.0, var_eta: 0.0 };

    pub fn new(var_xi: f64, cov: f64, var_eta: f64) -> Result<Self, ModelError> {
        for (name, v) in [("var_xi", var_xi), ("cov", cov), ("var_eta", var_eta)] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if var_xi < 0.0 {
            return Err(ModelError::NegativeVariance { field: "var_xi", value: var_xi });
        }
        if var_eta < 0.0 {
            return Err(ModelError::NegativeVariance { field: "var_eta", value: var_eta });
        }
        let cov_sq = cov * cov;
        let prod = var_xi * var_eta;
        if cov_sq > prod + STRUCT_TOL {
            return Err(ModelError::NotPositiveSemidefinite { cov_sq, prod });
        }
        Ok(GaussianCovariance { var_xi, cov, var_eta })
    }

    pub fn is_zero(&self) -> bool {
        self.var_xi.abs() <= STRUCT_TOL && self.cov.abs() <= STRUCT_TOL && self.var_eta.abs() <= STRUCT_TOL
    }
}

/// Pathwise drift vector `(d_ξ, d_η)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub xi: f64,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Xi,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Characteristic data of `(ξ, η)`: drift vector, Gaussian covariance and
/// atomic jump measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BivariateTriplet {
    drift: Drift,
    gaussian: GaussianCovariance,
    jumps: AtomicJumpMeasure,
}

impl BivariateTriplet {
    /// Rejects a process whose η component vanishes identically.
    pub fn new(drift: Drift, gaussian: GaussianCovariance, jumps: AtomicJumpMeasure) -> Result<Self, ModelError> {
        if !drift.xi.is_finite() {
            return Err(ModelError::NonFinite("drift.xi"));
        }
        if !drift.eta.is_finite() {
            return Err(ModelError::NonFinite("drift.eta"));
        }
        // Re-validate: fields are public on the covariance type.
        let gaussian = GaussianCovariance::new(gaussian.var_xi, gaussian.cov, gaussian.var_eta)?;
        let t = BivariateTriplet { drift, gaussian, jumps };
        if t.component_is_zero(Component::Eta) {
            return Err(ModelError::TrivialEta);
        }
        Ok(t)
    }

    pub fn drift(&self) -> Drift {
        self.drift
    }

    pub fn gaussian(&self) -> GaussianCovariance {
        self.gaussian
    }

    pub fn jumps(&self) -> &AtomicJumpMeasure {
        &self.jumps
    }

    pub fn atoms(&self) -> &[JumpAtom] {
        self.jumps.atoms()
    }

    /// True when the given coordinate process is identically zero.
    pub fn component_is_zero(&self, which: Component) -> bool {
        let (d, var, on_axis): (f64, f64, fn(&JumpAtom) -> bool) = match which {
            Component::Xi => (self.drift.xi, self.gaussian.var_xi, |a| a.x == 0.0),
            Component::Eta => (self.drift.eta, self.gaussian.var_eta, |a| a.y == 0.0),
        };
        d == 0.0 && var <= STRUCT_TOL && self.atoms().iter().all(on_axis)
    }

    /// One-dimensional triplet of `ξ` or `η`.
    pub fn marginal(&self, which: Component) -> MarginalTriplet {
        let (drift, variance) = match which {
            Component::Xi => (self.drift.xi, self.gaussian.var_xi),
            Component::Eta => (self.drift.eta, self.gaussian.var_eta),
        };
        let mut atoms: Vec<MarginalAtom> = Vec::new();
        for a in self.atoms() {
            let size = match which {
                Component::Xi => a.x,
                Component::Eta => a.y,
            };
            if size == 0.0 {
                continue;
            }
            match atoms.iter_mut().find(|m| m.size == size) {
                Some(m) => m.rate += a.rate,
                None => atoms.push(MarginalAtom { rate: a.rate, size }),
            }
        }
        MarginalTriplet { drift, variance, atoms }
    }

    /// Location `(γ̃_ξ, γ̃_η)` under the bivariate unit-ball truncation:
    /// `γ̃ = d + ∫_{x²+y²<1} (x, y) Π(d(x, y))`.
    pub fn gamma_tilde(&self) -> (f64, f64) {
        let (mut gx, mut gy) = (self.drift.xi, self.drift.eta);
        for a in self.atoms() {
            if a.x * a.x + a.y * a.y < 1.0 {
                gx += a.rate * a.x;
                gy += a.rate * a.y;
            }
        }
        (gx, gy)
    }

    /// Marginal location obtained from `γ̃` by moving mass between the
    /// unit-ball and unit-interval truncations:
    /// `γ_ξ = γ̃_ξ + ∫_{|x|<1, x²+y²≥1} x Π`, and symmetrically for `η`.
    pub fn marginal_gamma_from_tilde(&self, which: Component) -> f64 {
        let (gx, gy) = self.gamma_tilde();
        let mut g = match which {
            Component::Xi => gx,
            Component::Eta => gy,
        };
        for a in self.atoms() {
            let (own, _) = match which {
                Component::Xi => (a.x, a.y),
                Component::Eta => (a.y, a.x),
            };
            if own.abs() < 1.0 && a.x * a.x + a.y * a.y >= 1.0 {
                g += a.rate * own;
            }
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalAtom {
    pub rate: f64,
    pub size: f64,
}

/// One-dimensional characteristic data `(d, σ², Π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalTriplet {
    pub drift: f64,
    pub variance: f64,
    pub atoms: Vec<MarginalAtom>,
}

impl MarginalTriplet {
    /// `γ = d + Σ_{|size|<1} rate·size`.
    pub fn gamma(&self) -> f64 {
        self.drift + self.small_jump_mean()
    }

    /// Inverse of [`MarginalTriplet::gamma`] for the same atoms.
    pub fn drift_from_gamma(&self, gamma: f64) -> f64 {
        gamma - self.small_jump_mean()
    }

    fn small_jump_mean(&self) -> f64 {
        self.atoms.iter().filter(|a| a.size.abs() < 1.0).map(|a| a.rate * a.size).sum()
    }

    /// `E X₁ = d + Σ rate·size`.
    pub fn mean(&self) -> f64 {
        self.drift + self.atoms.iter().map(|a| a.rate * a.size).sum::<f64>()
    }

    /// Whether `sign·X` is a subordinator: no Gaussian part, no jumps against
    /// the sign, and drift of the right sign.
    pub fn is_subordinator(&self, sign: Sign) -> bool {
        let s = sign.factor();
        self.variance <= STRUCT_TOL && s * self.drift >= 0.0 && self.atoms.iter().all(|a| s * a.size >= 0.0)
    }

    pub fn negated(&self) -> MarginalTriplet {
        MarginalTriplet {
            drift: -self.drift,
            variance: self.variance,
            atoms: self.atoms.iter().map(|a| MarginalAtom { rate: a.rate, size: -a.size }).collect(),
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.atoms.iter().map(|a| a.rate).sum()
    }
}

/// Jump of the auxiliary process `η - uW`, where `e^{-ξ} = ε(W)`:
/// `y - u(e^{-x} - 1)`.
#[inline]
pub fn jump_of_eta_minus_uw(u: f64, x: f64, y: f64) -> f64 {
    y - u * (-x).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triplet(d: (f64, f64), atoms: &[(f64, f64, f64)]) -> BivariateTriplet {
        let atoms = atoms.iter().map(|&(r, x, y)| JumpAtom::new(r, x, y).unwrap());
        BivariateTriplet::new(Drift { xi: d.0, eta: d.1 }, GaussianCovariance::ZERO, AtomicJumpMeasure::new(atoms))
            .unwrap()
    }

    #[test]
    fn marginal_projects_and_merges() {
        let t = triplet((0.3, 0.0), &[(0.5, -1.0, 2.0), (0.5, -2.0, -3.0)]);
        let xi = t.marginal(Component::Xi);
        assert_eq!(xi.drift, 0.3);
        assert_eq!(xi.atoms, vec![MarginalAtom { rate: 0.5, size: -1.0 }, MarginalAtom { rate: 0.5, size: -2.0 }]);

        let merged = triplet((0.0, 0.0), &[(1.0, 1.0, 2.0), (1.0, 1.0, 8.0)]).marginal(Component::Xi);
        assert_eq!(merged.atoms, vec![MarginalAtom { rate: 2.0, size: 1.0 }]);
    }

    #[test]
    fn marginal_drops_zero_projection() {
        let t = triplet((0.0, 0.0), &[(1.0, 0.0, -5.0)]);
        assert!(t.marginal(Component::Xi).atoms.is_empty());
    }

    #[test]
    fn counterexample_eta_marginal() {
        let t = triplet((1.0, -1.0), &[(1.0, 0.0, -1.0)]);
        let eta = t.marginal(Component::Eta);
        assert_eq!(eta.drift, -1.0);
        assert_eq!(eta.atoms, vec![MarginalAtom { rate: 1.0, size: -1.0 }]);
    }

    #[test]
    fn gamma_from_drift_small_jumps_only() {
        let m = MarginalTriplet { drift: 0.0, variance: 0.0, atoms: vec![MarginalAtom { rate: 1.0, size: 0.5 }] };
        assert_eq!(m.gamma(), 0.5);
        let big = MarginalTriplet { drift: 2.0, variance: 0.0, atoms: vec![MarginalAtom { rate: 1.0, size: 10.0 }] };
        assert_eq!(big.gamma(), 2.0);
        assert_eq!(big.drift_from_gamma(big.gamma()), 2.0);
        assert_eq!(m.drift_from_gamma(m.gamma()), 0.0);
    }

    #[test]
    fn marginal_gamma_two_routes_agree() {
        let t = triplet(
            (0.25, -0.75),
            &[(0.5, 0.5, 0.2), (0.7, 0.3, 2.0), (1.1, -0.4, -0.95), (0.2, 3.0, 0.1), (0.3, -0.9, 0.6)],
        );
        for which in [Component::Xi, Component::Eta] {
            let via_tilde = t.marginal_gamma_from_tilde(which);
            let via_drift = t.marginal(which).gamma();
            assert!((via_tilde - via_drift).abs() < 1e-14, "{which:?}: {via_tilde} vs {via_drift}");
        }
    }

    #[test]
    fn subordinator_checks() {
        let t = triplet((0.0, 0.0), &[(0.5, 1.0, 2.0), (0.5, 1.0, 8.0)]);
        assert!(t.marginal(Component::Xi).is_subordinator(Sign::Plus));
        assert!(!t.marginal(Component::Xi).is_subordinator(Sign::Minus));

        let xi = MarginalTriplet { drift: -1.0, variance: 0.0, atoms: vec![MarginalAtom { rate: 1.0, size: 1.0 }] };
        assert!(!xi.is_subordinator(Sign::Plus));
        assert!(!xi.is_subordinator(Sign::Minus));

        let zero = MarginalTriplet { drift: 0.0, variance: 0.0, atoms: vec![] };
        assert!(zero.is_subordinator(Sign::Plus) && zero.is_subordinator(Sign::Minus));

        let brownian = MarginalTriplet { drift: 1.0, variance: 1.0, atoms: vec![] };
        assert!(!brownian.is_subordinator(Sign::Plus));
    }

    #[test]
    fn eta_minus_uw_jumps() {
        let e3 = (-3.0f64).exp();
        assert!(jump_of_eta_minus_uw(2.0, 3.0, 2.0 * e3 - 2.0).abs() < 1e-15);
        assert_eq!(jump_of_eta_minus_uw(0.0, 1.7, -0.4), -0.4);
        let e2 = (-2.0f64).exp();
        assert!(jump_of_eta_minus_uw(1.0, 2.0, e2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_degenerate_inputs() {
        assert_eq!(JumpAtom::new(0.0, 1.0, 1.0), Err(ModelError::NonPositiveRate(0.0)));
        assert_eq!(JumpAtom::new(-1.0, 1.0, 1.0), Err(ModelError::NonPositiveRate(-1.0)));
        assert_eq!(JumpAtom::new(1.0, 0.0, 0.0), Err(ModelError::ZeroJump));
        assert!(matches!(GaussianCovariance::new(1.0, 2.0, 1.0), Err(ModelError::NotPositiveSemidefinite { .. })));
        assert!(GaussianCovariance::new(1.0, -1.0, 1.0).is_ok());
        let err = BivariateTriplet::new(
            Drift { xi: 1.0, eta: 0.0 },
            GaussianCovariance::ZERO,
            AtomicJumpMeasure::new([JumpAtom::new(1.0, 1.0, 0.0).unwrap()]),
        );
        assert_eq!(err, Err(ModelError::TrivialEta));
    }

    #[test]
    fn compound_poisson_ingest_converts_to_rates() {
        let m = AtomicJumpMeasure::from_compound_poisson(2.0, [(0.5, 1.0, 2.0), (0.5, 1.0, 8.0)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.total_rate(), 2.0);
        assert!(matches!(
            AtomicJumpMeasure::from_compound_poisson(1.0, [(0.5, 1.0, 2.0), (0.4, 1.0, 8.0)]),
            Err(ModelError::ProbabilitySum(_))
        ));
    }

    #[test]
    fn duplicate_atoms_merge() {
        let m = AtomicJumpMeasure::new([JumpAtom::new(0.25, 1.0, 2.0).unwrap(), JumpAtom::new(0.5, 1.0, 2.0).unwrap()]);
        assert_eq!(m.atoms(), &[JumpAtom { rate: 0.75, x: 1.0, y: 2.0 }]);
    }
}
