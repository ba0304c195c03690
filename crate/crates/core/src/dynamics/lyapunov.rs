use serde::{Deserialize, Serialize};

use super::integrator::{IntegrateOptions, Propagator, Termination};
use super::{HamSystem, PhaseState};
use crate::error::{invalid, Result};

/// Benettin two-trajectory estimator settings. Times are in units of the
/// system time scale; separations are measured in the norm
/// `|δq/L|² + |δp/P|²` with the system's length and momentum scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub t_end: f64,
    /// Renormalization interval.
    pub tau: f64,
    pub d0: f64,
    pub integrate: IntegrateOptions,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { t_end: 1e3, tau: 1.0, d0: 1e-8, integrate: IntegrateOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MleResult {
    /// `(t, running average)` after every renormalization.
    pub running: Vec<(f64, f64)>,
    /// Running average at the last renormalization.
    pub estimate: f64,
    /// Mean of the running average over the last quarter of the run.
    pub last_quarter: f64,
    pub termination: Termination,
    /// Time reached; shorter than `t_end` when the orbit terminated early.
    pub t_reached: f64,
}

/// Maximal Lyapunov exponent in units of `1/time_scale`.
pub fn mle<S: HamSystem<D>, const D: usize>(sys: &S, s0: &PhaseState<D>, opts: &MleOptions) -> Result<MleResult> {
    let io = &opts.integrate;
    io.validate()?;
    if !(opts.tau > 0.0 && opts.d0 > 0.0 && opts.t_end > 0.0) {
        return Err(invalid("t_end, tau and d0 must be positive"));
    }
    if !sys.in_domain(&s0.q) {
        return Err(invalid("initial state outside the physical domain"));
    }
    let (l, p_unit) = (sys.length_scale(), sys.momentum_scale());
    let dt = io.dt * sys.time_scale();
    let steps_per_tau = (opts.tau / io.dt).round().max(1.0) as usize;
    let tau = steps_per_tau as f64 * io.dt;
    let intervals = (opts.t_end / tau).round().max(1.0) as usize;

    let offset = opts.d0 / ((2 * D) as f64).sqrt();
    let mut s1 = *s0;
    for i in 0..D {
        s1.q[i] += offset * l;
        s1.p[i] += offset * p_unit;
    }
    let mut base = Propagator::new(sys, *s0, dt, io.scheme);
    let mut pert = Propagator::new(sys, s1, dt, io.scheme);

    let mut log_sum = 0.0;
    let mut running = Vec::with_capacity(intervals);
    let mut termination = Termination::Completed;
    'outer: for j in 1..=intervals {
        for _ in 0..steps_per_tau {
            if base.steps >= io.max_steps {
                termination = Termination::StepLimit;
                break 'outer;
            }
            if base.advance().is_err() || pert.advance().is_err() {
                termination = Termination::Collapse;
                break 'outer;
            }
            if let Some(ev) = io.event(sys, &base.state) {
                termination = ev;
                break 'outer;
            }
        }
        let (a, b) = (base.state, pert.state);
        let mut d2 = 0.0;
        for i in 0..D {
            d2 += ((b.q[i] - a.q[i]) / l).powi(2) + ((b.p[i] - a.p[i]) / p_unit).powi(2);
        }
        let d = d2.sqrt();
        log_sum += (d / opts.d0).ln();
        let t = j as f64 * tau;
        running.push((t, log_sum / t));
        let scale = opts.d0 / d;
        let mut renorm = a;
        for i in 0..D {
            renorm.q[i] += (b.q[i] - a.q[i]) * scale;
            renorm.p[i] += (b.p[i] - a.p[i]) * scale;
        }
        if !sys.in_domain(&renorm.q) {
            termination = Termination::Collapse;
            break;
        }
        pert.reset(renorm);
    }
    let estimate = running.last().map_or(f64::NAN, |r| r.1);
    let tail = &running[running.len() - running.len().div_ceil(4).min(running.len())..];
    let last_quarter = if tail.is_empty() { f64::NAN } else { tail.iter().map(|r| r.1).sum::<f64>() / tail.len() as f64 };
    Ok(MleResult {
        t_reached: running.last().map_or(0.0, |r| r.0),
        running,
        estimate,
        last_quarter,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    BoundRegular,
    BoundChaotic,
    Collapse,
    Escape,
}

impl OrbitClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitClass::BoundRegular => "bound-regular",
            OrbitClass::BoundChaotic => "bound-chaotic",
            OrbitClass::Collapse => "collapse",
            OrbitClass::Escape => "escape",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Exponents above this (in `1/time_scale`) are chaotic.
    pub mle: f64,
}

impl ClassifyThresholds {
    /// One percent of a natural frequency given in `1/time_scale`.
    pub fn from_frequency(omega: f64) -> Self {
        Self { mle: 1e-2 * omega }
    }
}

pub fn classify(termination: Termination, mle_estimate: f64, thresholds: &ClassifyThresholds) -> OrbitClass {
    match termination {
        Termination::Collapse => OrbitClass::Collapse,
        Termination::Escape => OrbitClass::Escape,
        Termination::Completed | Termination::StepLimit => {
            if mle_estimate > thresholds.mle {
                OrbitClass::BoundChaotic
            } else {
                OrbitClass::BoundRegular
            }
        }
    }
}
