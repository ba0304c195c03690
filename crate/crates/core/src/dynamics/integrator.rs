use serde::{Deserialize, Serialize};

use super::{HamSystem, PhaseState};
use crate::error::{invalid, Result};

/// Splitting scheme for one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Störmer-Verlet, kick-drift-kick.
    #[default]
    Verlet,
    /// Fourth-order Yoshida composition of three Verlet steps.
    Yoshida4,
}

impl Scheme {
    fn substeps(self) -> &'static [f64] {
        const VERLET: [f64; 1] = [1.0];
        // w1 = 1/(2 − 2^{1/3}), w0 = −2^{1/3}/(2 − 2^{1/3})
        const YOSHIDA: [f64; 3] = [1.351_207_191_959_657_7, -1.702_414_383_919_315_3, 1.351_207_191_959_657_7];
        match self {
            Scheme::Verlet => &VERLET,
            Scheme::Yoshida4 => &YOSHIDA,
        }
    }
}

/// A drift left the positive orthant; the orbit is a collapse candidate.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("width left the physical domain during a drift")]
pub struct StepError;

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Collapse,
    Escape,
    StepLimit,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Collapse => "collapse",
            Termination::Escape => "escape",
            Termination::StepLimit => "step-limit",
        }
    }

    pub fn is_bound(&self) -> bool {
        matches!(self, Termination::Completed | Termination::StepLimit)
    }
}

/// One symplectic step of length `dt`.
pub fn step<S: HamSystem<D>, const D: usize>(
    sys: &S,
    state: &PhaseState<D>,
    dt: f64,
    scheme: Scheme,
) -> std::result::Result<PhaseState<D>, StepError> {
    let mut prop = Propagator::new(sys, *state, dt, scheme);
    prop.advance()?;
    Ok(prop.state)
}

/// Fixed-step integration settings. Times and thresholds are in units of the
/// system's own length and time scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub scheme: Scheme,
    /// Record every n-th step; the final state is always recorded.
    pub sample_every: usize,
    /// Collapse when any width drops below this many length scales.
    pub collapse_width: f64,
    /// Escape when a width exceeds this many length scales while growing.
    pub escape_width: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::Verlet,
            sample_every: 1,
            collapse_width: 1e-2,
            escape_width: 1e3,
            max_steps: usize::MAX,
        }
    }
}

impl IntegrateOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("time step must be positive"));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample interval must be at least one step"));
        }
        if !(self.collapse_width > 0.0 && self.escape_width > self.collapse_width) {
            return Err(invalid("collapse/escape widths must satisfy 0 < collapse < escape"));
        }
        Ok(())
    }

    /// Physical-to-event check for a state after a successful step.
    pub(crate) fn event<S: HamSystem<D>, const D: usize>(&self, sys: &S, s: &PhaseState<D>) -> Option<Termination> {
        let l = sys.length_scale();
        if s.q.iter().any(|&q| q < self.collapse_width * l) || !sys.energy(s).is_finite() {
            return Some(Termination::Collapse);
        }
        let escaping = s.q.iter().zip(&s.p).any(|(&q, &p)| q > self.escape_width * l && p > 0.0);
        escaping.then_some(Termination::Escape)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory<const D: usize> {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState<D>>,
    pub energies: Vec<f64>,
    pub termination: Termination,
}

impl<const D: usize> Trajectory<D> {
    /// `max |E(t) − E(0)| / |E(0)|` over the samples.
    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &PhaseState<D> {
        self.states.last().expect("trajectory has at least the initial sample")
    }
}

/// Integrates from `s0` until `t_end` (in units of the system time scale)
/// or until a physical event. Physical events end the trajectory and are
/// reported through [`Trajectory::termination`].
pub fn integrate<S: HamSystem<D>, const D: usize>(
    sys: &S,
    s0: &PhaseState<D>,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory<D>> {
    opts.validate()?;
    if !sys.in_domain(&s0.q) {
        return Err(invalid("initial state outside the physical domain"));
    }
    let t_unit = sys.time_scale();
    let n_steps = (t_end / opts.dt).round().max(0.0) as usize;
    let mut prop = Propagator::new(sys, *s0, opts.dt * t_unit, opts.scheme);
    let mut traj = Trajectory { times: vec![0.0], states: vec![*s0], energies: vec![sys.energy(s0)], termination: Termination::Completed };
    let record = |traj: &mut Trajectory<D>, prop: &Propagator<S, D>| {
        traj.times.push(prop.steps as f64 * opts.dt);
        traj.states.push(prop.state);
        traj.energies.push(sys.energy(&prop.state));
    };
    for k in 1..=n_steps {
        if k > opts.max_steps {
            traj.termination = Termination::StepLimit;
            break;
        }
        if prop.advance().is_err() {
            traj.termination = Termination::Collapse;
            break;
        }
        if let Some(ev) = opts.event(sys, &prop.state) {
            record(&mut traj, &prop);
            traj.termination = ev;
            return Ok(traj);
        }
        if k % opts.sample_every == 0 || k == n_steps {
            record(&mut traj, &prop);
        }
    }
    if traj.termination != Termination::Completed && traj.times.last() != Some(&(prop.steps as f64 * opts.dt)) {
        record(&mut traj, &prop);
    }
    Ok(traj)
}

/// Stepper that keeps the force at the current position between steps.
pub(crate) struct Propagator<'a, S, const D: usize> {
    sys: &'a S,
    pub dt: f64,
    scheme: Scheme,
    pub state: PhaseState<D>,
    force: [f64; D],
    pub steps: usize,
}

impl<'a, S: HamSystem<D>, const D: usize> Propagator<'a, S, D> {
    pub fn new(sys: &'a S, state: PhaseState<D>, dt: f64, scheme: Scheme) -> Self {
        let force = sys.force(&state.q);
        Self { sys, dt, scheme, state, force, steps: 0 }
    }

    /// Replaces the current state, e.g. after a renormalization.
    pub fn reset(&mut self, state: PhaseState<D>) {
        self.force = self.sys.force(&state.q);
        self.state = state;
    }

    pub fn advance(&mut self) -> std::result::Result<(), StepError> {
        self.advance_by(self.dt)?;
        self.steps += 1;
        Ok(())
    }

    /// One step of arbitrary length without touching the step counter.
    pub fn advance_by(&mut self, dt: f64) -> std::result::Result<(), StepError> {
        let inv_m = 1.0 / self.sys.mass();
        let mut s = self.state;
        let mut f = self.force;
        for &w in self.scheme.substeps() {
            let h = w * dt;
            for i in 0..D {
                s.p[i] += 0.5 * h * f[i];
                s.q[i] += h * s.p[i] * inv_m;
            }
            if !self.sys.in_domain(&s.q) {
                return Err(StepError);
            }
            f = self.sys.force(&s.q);
            for i in 0..D {
                s.p[i] += 0.5 * h * f[i];
            }
        }
        self.state = s;
        self.force = f;
        Ok(())
    }
}
