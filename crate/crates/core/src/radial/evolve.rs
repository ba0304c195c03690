use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dst::{laplacian_spectrum, SineTransform};
use super::operator::{observables, potential_of};
use super::{GpeParams, RadialState};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationMode {
    Real,
    Imaginary,
}

/// Strang split-step propagator that owns its state. The kinetic factor uses
/// the exact spectrum of the three-point Laplacian in the sine basis.
pub struct SplitStepper {
    pub state: RadialState,
    params: GpeParams,
    dt: f64,
    mode: PropagationMode,
    transform: SineTransform,
    kinetic: Vec<Complex64>,
    /// Potential of the current density; reused across real-time steps,
    /// where the density does not change between the two half kicks.
    cached_potential: Option<Vec<f64>>,
    /// `μ` from the norm decay of the last imaginary-time step.
    pub last_decay_mu: f64,
}

impl SplitStepper {
    pub fn new(state: RadialState, params: GpeParams, dt: f64, mode: PropagationMode) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt must be positive"));
        }
        let n = state.grid.n;
        let kinetic = laplacian_spectrum(n, state.grid.h())
            .into_iter()
            .map(|e| match mode {
                PropagationMode::Real => Complex64::from_polar(1.0, -e * dt),
                PropagationMode::Imaginary => Complex64::new((-e * dt).exp(), 0.0),
            })
            .collect();
        Ok(Self { state, params, dt, mode, transform: SineTransform::new(n), kinetic, cached_potential: None, last_decay_mu: f64::NAN })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kick(&mut self, potential: &[f64]) {
        let half = 0.5 * self.dt;
        match self.mode {
            PropagationMode::Real => {
                for (u, v) in self.state.u.iter_mut().zip(potential) {
                    *u *= Complex64::from_polar(1.0, -v * half);
                }
            }
            PropagationMode::Imaginary => {
                for (u, v) in self.state.u.iter_mut().zip(potential) {
                    *u *= (-v * half).exp();
                }
            }
        }
    }

    fn drift(&mut self) {
        self.transform.forward(&mut self.state.u);
        for (u, k) in self.state.u.iter_mut().zip(&self.kinetic) {
            *u *= k;
        }
        self.transform.inverse(&mut self.state.u);
    }

    pub fn step(&mut self) {
        match self.mode {
            PropagationMode::Real => {
                let v = self.cached_potential.take().unwrap_or_else(|| potential_of(&self.state, &self.params));
                self.kick(&v);
                self.drift();
                let v = potential_of(&self.state, &self.params);
                self.kick(&v);
                self.cached_potential = Some(v);
            }
            PropagationMode::Imaginary => {
                // Both half kicks use the potential of the incoming state so
                // that the fixed point keeps the symmetric splitting error.
                let v = potential_of(&self.state, &self.params);
                self.kick(&v);
                self.drift();
                self.kick(&v);
                self.last_decay_mu = -self.state.norm_sqr().ln() / (2.0 * self.dt);
                self.state.normalize();
            }
        }
    }
}

/// One split step of `state`.
pub fn split_step(state: &RadialState, dt: f64, params: &GpeParams, mode: PropagationMode) -> Result<RadialState> {
    let mut s = SplitStepper::new(state.clone(), *params, dt, mode)?;
    s.step();
    Ok(s.state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Observables are recorded every this many steps.
    pub sample_every: usize,
    pub max_peak_density: f64,
    /// Collapse is flagged when the rms width drops below this many cells.
    pub min_width_cells: f64,
    /// Collapse is also flagged when the energy at a sample departs from its
    /// initial value by more than this fraction (of `max(|E₀|, 1)`): the
    /// collapsing core has outrun the grid.
    pub max_energy_drift: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { t_end: 10.0, dt: 1e-4, sample_every: 100, max_peak_density: 1e6, min_width_cells: 10.0, max_energy_drift: 1e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolveTermination {
    Completed,
    Collapse,
}

impl EvolveTermination {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvolveTermination::Completed => "completed",
            EvolveTermination::Collapse => "collapse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackSample {
    pub t: f64,
    pub rms_width: f64,
    pub energy: f64,
    pub peak_density: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub samples: Vec<TrackSample>,
    pub termination: EvolveTermination,
    pub final_state: RadialState,
}

impl Track {
    pub fn widths(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.rms_width).collect()
    }
}

/// Cheap per-step collapse indicators: rms width and the density at the
/// origin, both without the Hartree term.
fn width_and_peak(s: &RadialState) -> (f64, f64) {
    let grid = &s.grid;
    let h = grid.h();
    let (mut norm, mut r2) = (0.0, 0.0);
    for (i, z) in s.u.iter().enumerate() {
        let f = z.norm_sqr();
        norm += f;
        r2 += f * grid.r(i).powi(2);
    }
    let peak = (4.0 * s.u[0].norm_sqr() - s.u[1].norm_sqr() / 4.0) / (3.0 * h * h) / (4.0 * std::f64::consts::PI * h * norm);
    ((r2 / norm).sqrt(), peak)
}

/// Real-time evolution with periodic observables. Stops early on collapse.
pub fn evolve_track(state0: &RadialState, params: &GpeParams, opts: &EvolveOptions) -> Result<Track> {
    if !(opts.t_end > 0.0) || opts.sample_every == 0 {
        return Err(invalid("t_end must be positive and sample_every non-zero"));
    }
    let min_width = opts.min_width_cells * state0.grid.h();
    let steps = (opts.t_end / opts.dt).round() as usize;
    let mut stepper = SplitStepper::new(state0.clone(), *params, opts.dt, PropagationMode::Real)?;
    let sample = |s: &RadialState, t: f64| {
        let o = observables(s, params);
        TrackSample { t, rms_width: o.rms_width, energy: o.energy, peak_density: o.peak_density, norm: o.norm }
    };
    let mut samples = vec![sample(&stepper.state, 0.0)];
    let mut termination = EvolveTermination::Completed;
    let e0 = samples[0].energy;
    for k in 1..=steps {
        stepper.step();
        let (width, peak) = width_and_peak(&stepper.state);
        let mut collapsed = !width.is_finite() || peak > opts.max_peak_density || width < min_width;
        if collapsed || k % opts.sample_every == 0 || k == steps {
            let s = sample(&stepper.state, k as f64 * opts.dt);
            collapsed |= !s.energy.is_finite() || (s.energy - e0).abs() > opts.max_energy_drift * e0.abs().max(1.0);
            samples.push(s);
        }
        if collapsed {
            termination = EvolveTermination::Collapse;
            break;
        }
    }
    Ok(Track { samples, termination, final_state: stepper.state })
}
