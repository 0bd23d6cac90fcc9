//! Monte Carlo simulation of GOU paths.

mod exec;
mod path;

use serde::Serialize;
use thiserror::Error;

pub use exec::{map_paths, Execution};
pub use path::{path_rng, simulate_drivers, simulate_path_with_rng};

use crate::bounds_engine::{compute_lstar, compute_ustar};
use crate::ext::ExtInterval;
use crate::levy_model::BivariateTriplet;

pub const DEFAULT_HORIZON: f64 = 50.0;
pub const DEFAULT_PATHS: usize = 10_000;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("exact jump-drift scheme needs a zero Gaussian covariance; pass a step size to use the Euler scheme")]
    GaussianWithExactScheme,
    #[error("non-finite state on path {path} at t={t}: {dump}")]
    NonFinite { path: u64, t: f64, dump: String },
    #[error("barrier precondition failed: {0}")]
    BarrierPrecondition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    ExactJumpDrift,
    EulerMaruyama { dt: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub z: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(z: f64) -> Self {
        SimConfig {
            z,
            horizon: DEFAULT_HORIZON,
            paths: DEFAULT_PATHS,
            seed: 0,
            scheme: Scheme::ExactJumpDrift,
            execution: Execution::default(),
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_paths(mut self, paths: usize) -> Self {
        self.paths = paths;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self, triplet: &BivariateTriplet) -> Result<(), SimError> {
        if !self.z.is_finite() {
            return Err(SimError::InvalidConfig(format!("z must be finite, got {}", self.z)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(SimError::InvalidConfig(format!("horizon must be positive and finite, got {}", self.horizon)));
        }
        if self.paths == 0 {
            return Err(SimError::InvalidConfig("paths must be positive".into()));
        }
        match self.scheme {
            Scheme::ExactJumpDrift if !triplet.gaussian().is_zero() => Err(SimError::GaussianWithExactScheme),
            Scheme::EulerMaruyama { dt } if !(dt.is_finite() && dt > 0.0 && dt <= self.horizon) => {
                Err(SimError::InvalidConfig(format!("dt must lie in (0, horizon], got {dt}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_biased_low(&self) -> bool {
        matches!(self.scheme, Scheme::EulerMaruyama { .. })
    }
}

/// State at an observation time; `z` is the stochastic integral `Z_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub xi: f64,
    pub v: f64,
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpEvent {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v_before: f64,
    pub v_after: f64,
}

impl JumpEvent {
    /// Relative defect of `ΔV = e^{Δξ}(Δη − V_{t-}(e^{−Δξ} − 1))`.
    pub fn identity_defect(&self) -> f64 {
        let predicted = self.x.exp() * (self.y - self.v_before * (-self.x).exp_m1());
        let actual = self.v_after - self.v_before;
        let scale = self.v_before.abs().max(self.v_after.abs()).max(predicted.abs()).max(f64::MIN_POSITIVE);
        (actual - predicted).abs() / scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathRecord {
    pub samples: Vec<Sample>,
    pub jumps: Vec<JumpEvent>,
    pub running_min: f64,
    pub running_max: f64,
    pub ruin_time: Option<f64>,
    pub terminal_v: f64,
    pub terminal_z: f64,
    pub terminal_xi: f64,
}

impl PathRecord {
    pub fn event_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Largest relative defect `|V - want| / max(|want|, 1)` of
    /// `V_t = e^{ξ_t}(z - c) + c` over the samples.
    pub fn degenerate_defect(&self, z: f64, c: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let want = s.xi.exp() * (z - c) + c;
                (s.v - want).abs() / want.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Largest defect of `Z_t = c(e^{-ξ_t} - 1)` over the samples, relative to
    /// `|c|·max(1, max_{s≤t} e^{-ξ_s})`, the size of the largest partial sum.
    pub fn degenerate_z_defect(&self, c: f64) -> f64 {
        let mut peak = 1.0f64;
        let mut worst = 0.0f64;
        for s in &self.samples {
            peak = peak.max((-s.xi).exp());
            let want = c * (-s.xi).exp_m1();
            worst = worst.max((s.z - want).abs() / (c.abs().max(f64::MIN_POSITIVE) * peak));
        }
        worst
    }

    pub fn summary(&self) -> PathSummary {
        PathSummary {
            ruin_time: self.ruin_time,
            min: self.running_min,
            max: self.running_max,
            terminal_v: self.terminal_v,
            terminal_z: self.terminal_z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathSummary {
    pub ruin_time: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub terminal_v: f64,
    pub terminal_z: f64,
}

/// Simulates path `index` of the configured run.
pub fn simulate_path_index(
    triplet: &BivariateTriplet,
    config: &SimConfig,
    index: u64,
    record: bool,
) -> Result<PathRecord, SimError> {
    config.validate(triplet)?;
    let mut rng = path_rng(config.seed, index);
    simulate_path_with_rng(triplet, config, &mut rng, index, record)
}

/// Path 0 of the configured run, with every event recorded.
pub fn simulate_path(triplet: &BivariateTriplet, config: &SimConfig) -> Result<PathRecord, SimError> {
    simulate_path_index(triplet, config, 0, true)
}

pub fn simulate_summaries(triplet: &BivariateTriplet, config: &SimConfig) -> Result<Vec<PathSummary>, SimError> {
    config.validate(triplet)?;
    map_paths(config.paths, config.execution, |i| {
        let mut rng = path_rng(config.seed, i);
        simulate_path_with_rng(triplet, config, &mut rng, i, false).map(|r| r.summary())
    })
    .into_iter()
    .collect()
}

pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuinEstimate {
    pub z: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ruined: usize,
    pub paths: usize,
    pub horizon: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub biased_low: bool,
    pub note: String,
}

impl RuinEstimate {
    pub fn from_summaries(config: &SimConfig, summaries: &[PathSummary]) -> Self {
        let ruined = summaries.iter().filter(|s| s.ruin_time.is_some_and(|t| t <= config.horizon)).count();
        let n = summaries.len();
        let (ci_low, ci_high) = wilson_interval(ruined, n);
        let mut note = format!(
            "finite-horizon estimate over [0, {}]; p_hat is a lower bound on the infinite-horizon ruin probability",
            config.horizon
        );
        if config.is_biased_low() {
            note.push_str("; Euler scheme checks ruin at grid points only (biased-low)");
        }
        RuinEstimate {
            z: config.z,
            p_hat: if n == 0 { 0.0 } else { ruined as f64 / n as f64 },
            ci_low,
            ci_high,
            ruined,
            paths: n,
            horizon: config.horizon,
            seed: config.seed,
            scheme: config.scheme,
            biased_low: config.is_biased_low(),
            note,
        }
    }
}

pub fn estimate_ruin(triplet: &BivariateTriplet, config: &SimConfig) -> Result<RuinEstimate, SimError> {
    let s = simulate_summaries(triplet, config)?;
    Ok(RuinEstimate::from_summaries(config, &s))
}

pub const QUANTILE_LEVELS: [f64; 7] = [0.0, 0.01, 0.05, 0.5, 0.95, 0.99, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantile {
    pub level: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremesEstimate {
    pub z: f64,
    pub paths: usize,
    pub horizon: f64,
    pub min_quantiles: Vec<Quantile>,
    pub max_quantiles: Vec<Quantile>,
    pub min_of_min: f64,
    pub max_of_max: f64,
}

fn empirical_quantiles(mut v: Vec<f64>) -> Vec<Quantile> {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    QUANTILE_LEVELS
        .iter()
        .map(|&level| {
            let i = ((level * (n - 1) as f64).round() as usize).min(n - 1);
            Quantile { level, value: v[i] }
        })
        .collect()
}

impl ExtremesEstimate {
    pub fn from_summaries(config: &SimConfig, s: &[PathSummary]) -> Self {
        let mins: Vec<f64> = s.iter().map(|p| p.min).collect();
        let maxs: Vec<f64> = s.iter().map(|p| p.max).collect();
        ExtremesEstimate {
            z: config.z,
            paths: s.len(),
            horizon: config.horizon,
            min_of_min: mins.iter().copied().fold(f64::INFINITY, f64::min),
            max_of_max: maxs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_quantiles: empirical_quantiles(mins),
            max_quantiles: empirical_quantiles(maxs),
        }
    }
}

pub fn estimate_extremes(triplet: &BivariateTriplet, config: &SimConfig) -> Result<ExtremesEstimate, SimError> {
    let s = simulate_summaries(triplet, config)?;
    Ok(ExtremesEstimate::from_summaries(config, &s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierSide {
    /// No jump from above the level to at or below it.
    Lower,
    /// No jump from below the level to at or above it.
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierCheck {
    pub level: f64,
    pub side: BarrierSide,
    pub holds: bool,
    pub crossings: usize,
    pub jumps_checked: usize,
    pub paths: usize,
}

fn near_member(set: &ExtInterval, level: f64) -> bool {
    let tol = 1e-9 * level.abs().max(1.0);
    set.contains(level) || set.contains(level - tol) || set.contains(level + tol)
}

/// Counts jumps that carry a path across `level` against the given side.
/// `level` must lie in `L*` (lower side) or `U*` (upper side).
pub fn verify_barrier(
    triplet: &BivariateTriplet,
    config: &SimConfig,
    level: f64,
    side: BarrierSide,
) -> Result<BarrierCheck, SimError> {
    if config.scheme != Scheme::ExactJumpDrift {
        return Err(SimError::BarrierPrecondition("requires the exact jump-drift scheme".into()));
    }
    if !level.is_finite() {
        return Err(SimError::BarrierPrecondition(format!("level must be finite, got {level}")));
    }
    let (name, set) = match side {
        BarrierSide::Lower => ("L*", compute_lstar(triplet)),
        BarrierSide::Upper => ("U*", compute_ustar(triplet)),
    };
    if set.is_empty() {
        return Err(SimError::BarrierPrecondition(format!("{name} is empty")));
    }
    if !near_member(&set, level) {
        return Err(SimError::BarrierPrecondition(format!("level {level} is not in {name} = {set}")));
    }
    config.validate(triplet)?;
    let counts: Result<Vec<(usize, usize)>, SimError> = map_paths(config.paths, config.execution, |i| {
        let mut rng = path_rng(config.seed, i);
        let rec = simulate_path_with_rng(triplet, config, &mut rng, i, true)?;
        let crossings = rec
            .jumps
            .iter()
            .filter(|j| match side {
                BarrierSide::Lower => j.v_before > level && j.v_after <= level,
                BarrierSide::Upper => j.v_before < level && j.v_after >= level,
            })
            .count();
        Ok((crossings, rec.jumps.len()))
    })
    .into_iter()
    .collect();
    let counts = counts?;
    let crossings = counts.iter().map(|c| c.0).sum();
    Ok(BarrierCheck {
        level,
        side,
        holds: crossings == 0,
        crossings,
        jumps_checked: counts.iter().map(|c| c.1).sum(),
        paths: config.paths,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriverSample {
    pub horizon: f64,
    pub paths: usize,
    pub mean_rate: f64,
    pub std_error: f64,
}

/// Sample mean and standard error of `ξ_T / T`.
pub fn sample_xi_rate(
    triplet: &BivariateTriplet,
    horizon: f64,
    paths: usize,
    seed: u64,
    exec: Execution,
) -> DriverSample {
    let xs = map_paths(paths, exec, |i| {
        let mut rng = path_rng(seed, i);
        simulate_drivers(triplet, horizon, &mut rng).0 / horizon
    });
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    DriverSample { horizon, paths, mean_rate: mean, std_error: (var / n).sqrt() }
}
