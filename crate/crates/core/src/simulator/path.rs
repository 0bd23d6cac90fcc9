use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

use super::{JumpEvent, PathRecord, Sample, Scheme, SimConfig, SimError};
use crate::bounds_engine::detect_degenerate;
use crate::levy_model::{BivariateTriplet, JumpAtom};

/// Stream `path` under key `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// `expm1(a) / a`, continuous at 0.
#[inline]
pub(crate) fn phi(a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        a.exp_m1() / a
    }
}

/// Solution of `V' = d·V + e` after time `s` from `v0`.
#[inline]
pub(crate) fn flow(v0: f64, d: f64, e: f64, s: f64) -> f64 {
    v0 * (d * s).exp() + e * s * phi(d * s)
}

/// First `s` in `[0, tau]` with `flow(v0, d, e, s) = 0`, given `v0 ≥ 0` and
/// a negative endpoint.
pub(crate) fn zero_crossing(v0: f64, d: f64, e: f64, tau: f64) -> f64 {
    let s = if d == 0.0 { -v0 / e } else { -(d * v0 / e).ln_1p() / d };
    if s.is_finite() {
        s.clamp(0.0, tau)
    } else {
        tau
    }
}

/// Compound Poisson jump source shared by both schemes.
pub(crate) struct JumpClock<'a> {
    atoms: &'a [JumpAtom],
    exp: Option<Exp<f64>>,
    pick: Option<WeightedIndex<f64>>,
}

impl<'a> JumpClock<'a> {
    pub(crate) fn new(triplet: &'a BivariateTriplet) -> Self {
        let atoms = triplet.atoms();
        let rate = triplet.jumps().total_rate();
        if atoms.is_empty() || rate <= 0.0 {
            return JumpClock { atoms, exp: None, pick: None };
        }
        JumpClock {
            atoms,
            exp: Some(Exp::new(rate).expect("positive finite rate")),
            pick: Some(WeightedIndex::new(atoms.iter().map(|a| a.rate)).expect("positive rates")),
        }
    }

    pub(crate) fn wait<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.exp {
            Some(e) => e.sample(rng),
            None => f64::INFINITY,
        }
    }

    pub(crate) fn atom<R: Rng>(&self, rng: &mut R) -> JumpAtom {
        let i = self.pick.as_ref().expect("jump drawn without atoms").sample(rng);
        self.atoms[i]
    }
}

struct State {
    t: f64,
    xi: f64,
    v: f64,
    /// `(c, V - c)` when the atoms lie on the curve through `c`.
    centred: Option<(f64, f64)>,
    z_int: f64,
    min: f64,
    max: f64,
    ruin: Option<f64>,
    record: bool,
    samples: Vec<Sample>,
    jumps: Vec<JumpEvent>,
}

impl State {
    fn new(z: f64, centre: Option<f64>, record: bool) -> Self {
        let mut s = State {
            t: 0.0,
            xi: 0.0,
            v: z,
            centred: centre.map(|c| (c, z - c)),
            z_int: 0.0,
            min: z,
            max: z,
            ruin: (z < 0.0).then_some(0.0),
            record,
            samples: Vec::new(),
            jumps: Vec::new(),
        };
        s.sample();
        s
    }

    fn sample(&mut self) {
        if self.record {
            self.samples.push(Sample { t: self.t, xi: self.xi, v: self.v, z: self.z_int });
        }
    }

    fn observe(&mut self, path: u64) -> Result<(), SimError> {
        if !(self.v.is_finite() && self.xi.is_finite() && self.z_int.is_finite()) {
            let tail: Vec<String> = self
                .samples
                .iter()
                .rev()
                .take(5)
                .map(|s| format!("t={} xi={} V={} Z={}", s.t, s.xi, s.v, s.z))
                .collect();
            return Err(SimError::NonFinite {
                path,
                t: self.t,
                dump: format!("xi={} V={} Z={}; last samples: [{}]", self.xi, self.v, self.z_int, tail.join("; ")),
            });
        }
        self.min = self.min.min(self.v);
        self.max = self.max.max(self.v);
        if self.ruin.is_none() && self.v < 0.0 {
            self.ruin = Some(self.t);
        }
        self.sample();
        Ok(())
    }

    fn jump(&mut self, a: JumpAtom, path: u64) -> Result<(), SimError> {
        let before = self.v;
        self.v = match &mut self.centred {
            // atoms on y = c(e^{-x} - 1): V_t - c = e^{Δξ}(V_{t-} - c)
            Some((c, w)) => {
                *w *= a.x.exp();
                *c + *w
            }
            // V_t = e^{Δξ}(V_{t-} + Δη)
            None => a.x.exp() * (before + a.y),
        };
        self.z_int += (-self.xi).exp() * a.y;
        self.xi += a.x;
        if self.record {
            self.jumps.push(JumpEvent { t: self.t, x: a.x, y: a.y, v_before: before, v_after: self.v });
        }
        self.observe(path)
    }

    fn finish(self) -> PathRecord {
        PathRecord {
            samples: self.samples,
            jumps: self.jumps,
            running_min: self.min,
            running_max: self.max,
            ruin_time: self.ruin,
            terminal_v: self.v,
            terminal_z: self.z_int,
            terminal_xi: self.xi,
        }
    }
}

pub fn simulate_path_with_rng<R: Rng>(
    triplet: &BivariateTriplet,
    config: &SimConfig,
    rng: &mut R,
    path: u64,
    record: bool,
) -> Result<PathRecord, SimError> {
    match config.scheme {
        Scheme::ExactJumpDrift => exact(triplet, config, rng, path, record),
        Scheme::EulerMaruyama { dt } => euler(triplet, config, dt, rng, path, record),
    }
}

fn exact<R: Rng>(
    triplet: &BivariateTriplet,
    config: &SimConfig,
    rng: &mut R,
    path: u64,
    record: bool,
) -> Result<PathRecord, SimError> {
    let d = triplet.drift();
    let centre = detect_degenerate(triplet).map(|i| i.c);
    let clock = JumpClock::new(triplet);
    let mut st = State::new(config.z, centre, record);
    loop {
        let wait = clock.wait(rng);
        let remaining = config.horizon - st.t;
        let tau = wait.min(remaining);
        let v0 = st.v;
        let (v1, eta_flow) = match &mut st.centred {
            Some((c, w)) => {
                *w *= (d.xi * tau).exp();
                (*c + *w, -*c * d.xi)
            }
            None => (flow(v0, d.xi, d.eta, tau), d.eta),
        };
        st.z_int += d.eta * (-st.xi).exp() * tau * phi(-d.xi * tau);
        st.xi += d.xi * tau;
        if st.ruin.is_none() && v1 < 0.0 {
            st.ruin = Some(st.t + zero_crossing(v0, d.xi, eta_flow, tau));
        }
        st.t += tau;
        st.v = v1;
        st.observe(path)?;
        if wait >= remaining {
            break;
        }
        let a = clock.atom(rng);
        st.jump(a, path)?;
    }
    Ok(st.finish())
}

/// Lower-triangular factor of the per-unit-time covariance.
fn cholesky(var_xi: f64, cov: f64, var_eta: f64) -> (f64, f64, f64) {
    if var_xi <= 0.0 {
        return (0.0, 0.0, var_eta.max(0.0).sqrt());
    }
    let l11 = var_xi.sqrt();
    let l21 = cov / l11;
    let l22 = (var_eta - l21 * l21).max(0.0).sqrt();
    (l11, l21, l22)
}

fn euler<R: Rng>(
    triplet: &BivariateTriplet,
    config: &SimConfig,
    dt: f64,
    rng: &mut R,
    path: u64,
    record: bool,
) -> Result<PathRecord, SimError> {
    let d = triplet.drift();
    let g = triplet.gaussian();
    let (l11, l21, l22) = cholesky(g.var_xi, g.cov, g.var_eta);
    let centre = detect_degenerate(triplet).map(|i| i.c);
    let clock = JumpClock::new(triplet);
    let mut st = State::new(config.z, centre, record);
    let mut next_jump = clock.wait(rng);
    let mut next_grid = dt.min(config.horizon);
    while st.t < config.horizon {
        let t_next = next_grid.min(next_jump).min(config.horizon);
        let h = t_next - st.t;
        let (n1, n2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        let sq = h.sqrt();
        let dxi = d.xi * h + sq * l11 * n1;
        let deta = d.eta * h + sq * (l21 * n1 + l22 * n2);
        st.z_int += (-st.xi).exp() * deta;
        st.v = match &mut st.centred {
            // exact on the grid: V_t - c = e^{ξ_t}(z - c)
            Some((c, w)) => {
                *w *= dxi.exp();
                *c + *w
            }
            None => dxi.exp() * (st.v + deta),
        };
        st.xi += dxi;
        st.t = t_next;
        st.observe(path)?;
        if t_next == next_grid {
            next_grid = (next_grid + dt).min(config.horizon);
        }
        if t_next == next_jump && t_next < config.horizon {
            let a = clock.atom(rng);
            st.jump(a, path)?;
            next_jump = st.t + clock.wait(rng);
        }
    }
    Ok(st.finish())
}

/// `(ξ_T, η_T)` without the GOU state.
pub fn simulate_drivers<R: Rng>(triplet: &BivariateTriplet, horizon: f64, rng: &mut R) -> (f64, f64) {
    let d = triplet.drift();
    let g = triplet.gaussian();
    let (l11, l21, l22) = cholesky(g.var_xi, g.cov, g.var_eta);
    let (n1, n2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
    let sq = horizon.sqrt();
    let mut xi = d.xi * horizon + sq * l11 * n1;
    let mut eta = d.eta * horizon + sq * (l21 * n1 + l22 * n2);
    let clock = JumpClock::new(triplet);
    let mut t = clock.wait(rng);
    while t <= horizon {
        let a = clock.atom(rng);
        xi += a.x;
        eta += a.y;
        t += clock.wait(rng);
    }
    (xi, eta)
}
