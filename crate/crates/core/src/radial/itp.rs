use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::evolve::{PropagationMode, SplitStepper};
use super::operator::{gpe_apply, observables};
use super::stationary::{Branch, StationaryResult};
use super::{GpeParams, Interactions, RadialGrid, RadialState};
use crate::error::{Error, Result};
use crate::mono::{mono_fixed_points, FixedPointKind, MonoParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItpOptions {
    pub grid: RadialGrid,
    pub dt: f64,
    pub max_steps: usize,
    /// Relative change of `⟨H⟩` between checks.
    pub tol_mu: f64,
    /// `‖ψ_k − ψ_{k−1}‖/dt`, an estimate of `‖(H − μ)ψ‖`.
    pub tol_residual: f64,
    pub check_every: usize,
    /// A first relaxation runs at `warmup_factor · dt`; 1 disables it.
    pub warmup_factor: f64,
}

impl Default for ItpOptions {
    fn default() -> Self {
        Self { grid: RadialGrid::default(), dt: 1e-3, max_steps: 500_000, tol_mu: 1e-10, tol_residual: 1e-8, check_every: 50, warmup_factor: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItpResult {
    pub stationary: StationaryResult,
    /// `μ` from the per-step norm decay.
    pub mu_decay: f64,
    pub steps: usize,
    /// Whether the widened restart was needed.
    pub retried: bool,
}

/// Ground state by imaginary-time split-step relaxation. The start is the
/// stable Gaussian variational state (or the oscillator ground state when
/// interactions are off); a run that collapses is restarted once from a
/// Gaussian twice as wide.
pub fn ground_state_itp(params: &GpeParams, opts: &ItpOptions) -> Result<ItpResult> {
    let k0 = if params.interactions == Interactions::ALL {
        let mono = MonoParams::new(params.a, params.gamma)?;
        mono_fixed_points(&mono)
            .into_iter()
            .find(|f| f.kind == FixedPointKind::Elliptic)
            .map(|f| 1.5f64.sqrt() / f.q_star)
            .unwrap_or(1.0)
    } else if params.gamma > 0.0 {
        params.gamma.sqrt()
    } else {
        1.0
    };
    match relax(params, opts, k0) {
        Ok(r) => Ok(r),
        Err(Error::Diverged(_)) => relax(params, opts, 0.5 * k0).map(|r| ItpResult { retried: true, ..r }),
        Err(e) => Err(e),
    }
}

fn relax(params: &GpeParams, opts: &ItpOptions, k: f64) -> Result<ItpResult> {
    let grid = opts.grid;
    let mut state = RadialState::gaussian(grid, k);
    let mut steps = 0;
    let mut mu_decay = f64::NAN;
    let stages: &[f64] = if opts.warmup_factor > 1.0 { &[opts.warmup_factor, 1.0] } else { &[1.0] };
    for &factor in stages {
        let dt = opts.dt * factor;
        let mut stepper = SplitStepper::new(state, *params, dt, PropagationMode::Imaginary)?;
        let (n, mu) = run_stage(&mut stepper, params, opts, dt)?;
        steps += n;
        mu_decay = mu;
        state = stepper.state;
    }
    let o = observables(&state, params);
    let hpsi = gpe_apply(&state, params);
    let residual = (4.0 * PI * grid.h() * hpsi.iter().zip(&state.u).map(|(a, u)| (a - u * o.mu).norm_sqr()).sum::<f64>()).sqrt();
    Ok(ItpResult {
        stationary: StationaryResult { state, mu: o.mu, energy: o.energy, branch: Branch::Stable, residual },
        mu_decay,
        steps,
        retried: false,
    })
}

fn run_stage(stepper: &mut SplitStepper, params: &GpeParams, opts: &ItpOptions, dt: f64) -> Result<(usize, f64)> {
    let min_width = 10.0 * stepper.state.grid.h();
    let mut mu_prev = observables(&stepper.state, params).mu;
    let mut steps = 0;
    loop {
        let check = (steps + 1) % opts.check_every == 0;
        let before = if check { Some(stepper.state.clone()) } else { None };
        stepper.step();
        steps += 1;
        let Some(before) = before else { continue };
        let o = observables(&stepper.state, params);
        if !o.mu.is_finite() || o.rms_width < min_width {
            return Err(Error::Diverged(format!("imaginary-time run collapsed after {steps} steps")));
        }
        let change = before.distance_up_to_phase(&stepper.state) / dt;
        let mu_change = (o.mu - mu_prev).abs() / o.mu.abs().max(1e-300);
        mu_prev = o.mu;
        if mu_change < opts.tol_mu && change < opts.tol_residual {
            return Ok((steps, stepper.last_decay_mu));
        }
        if steps >= opts.max_steps {
            return Err(Error::NoConvergence { iterations: steps, residual: change });
        }
    }
}
