use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::BandedMatrix;
use super::hartree::hartree_quadrature;
use super::operator::{gpe_apply, observables};
use super::{GpeParams, Interactions, RadialGrid, RadialState};
use crate::error::{invalid, Error, Result};
use crate::mono::{mono_fixed_points, FixedPointKind, MonoParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Stable,
    Unstable,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Stable => "stable",
            Branch::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryOptions {
    pub grid: RadialGrid,
    pub max_iterations: usize,
    /// Converged when the largest relative Newton update falls below this.
    pub tol: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { grid: RadialGrid::default(), max_iterations: 100, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryResult {
    pub state: RadialState,
    pub mu: f64,
    pub energy: f64,
    pub branch: Branch,
    /// `‖Hψ − μψ‖₂`.
    pub residual: f64,
}

/// Stationary state on the requested branch.
///
/// The stable branch is relaxed directly from the Gaussian variational seed
/// (or from the oscillator ground state when interactions are off). The
/// unstable branch is reached by following the solution family from the
/// stable state toward larger central amplitude, with the scattering length
/// as an unknown, through the fold and back up to the requested value.
pub fn stationary_state(params: &GpeParams, branch: Branch, opts: &StationaryOptions) -> Result<StationaryResult> {
    let (k, mu) = if params.interactions == Interactions::ALL {
        let mono = MonoParams::new(params.a, params.gamma)?;
        let fp = mono_fixed_points(&mono)
            .into_iter()
            .find(|fp| fp.kind != FixedPointKind::Hyperbolic)
            .ok_or_else(|| Error::BranchNotFound(format!("no variational seed at a = {}", params.a)))?;
        ((1.5f64).sqrt() / fp.q_star, fp.mu)
    } else {
        if branch == Branch::Unstable || params.gamma <= 0.0 {
            return Err(invalid("without both interactions only the trapped stable branch is available"));
        }
        (params.gamma.sqrt(), 3.0 * params.gamma)
    };
    let guess = RadialState::gaussian(opts.grid, k);
    let stable = stationary_from(params, &guess, mu, Branch::Stable, opts)?;
    match branch {
        Branch::Stable => Ok(stable),
        Branch::Unstable => {
            let family = Family::new(params, opts);
            let x = family.unstable_from(family.pack(&stable), params.a)?;
            family.finish(x, Branch::Unstable)
        }
    }
}

/// Newton relaxation of the discretized stationary problem at fixed
/// scattering length from an arbitrary real, nodeless guess.
pub fn stationary_from(params: &GpeParams, guess: &RadialState, mu_guess: f64, branch: Branch, opts: &StationaryOptions) -> Result<StationaryResult> {
    let family = Family::new(params, opts);
    let mut g = guess.clone();
    g.normalize();
    let x0 = family.initial(&g, mu_guess, params.a);
    let x = family.solve(x0, Pin::ScatteringLength(params.a))?;
    family.finish(x, branch)
}

/// Fold of the grid solution family: the smallest scattering length at
/// which stationary states exist for the given trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldPoint {
    pub a: f64,
    pub mu: f64,
    /// `u(h)` of the state at the fold.
    pub center: f64,
}

pub fn grid_critical_a(gamma: f64, opts: &StationaryOptions) -> Result<FoldPoint> {
    let a0 = 0.5 * crate::mono::mono_critical_a(gamma);
    let params = GpeParams::new(a0, gamma)?;
    let stable = stationary_state(&params, Branch::Stable, opts)?;
    let family = Family::new(&params, opts);
    let mut x = family.pack(&stable);
    // March in the central amplitude until a(c) turns around.
    let mut pts: Vec<(f64, Vec<f64>)> = vec![(x[0], x.clone())];
    let mut step = 0.05;
    loop {
        let c = pts.last().unwrap().0 * (1.0 + step);
        match family.solve(family.predict(&pts, c), Pin::Center(c)) {
            Ok(xn) => {
                pts.push((c, xn));
                let m = pts.len();
                if m >= 3 && pts[m - 1].1[ALPHA] > pts[m - 2].1[ALPHA] {
                    break;
                }
                step = (step * 1.5).min(0.2);
            }
            Err(_) => {
                step *= 0.5;
                if step < 1e-6 {
                    return Err(Error::BranchNotFound("continuation stalled before the fold".into()));
                }
            }
        }
        if pts.len() > 2000 {
            return Err(Error::BranchNotFound("no fold within the continuation budget".into()));
        }
    }
    let m = pts.len();
    let (mut lo, mut hi) = (pts[m - 3].0.ln(), pts[m - 1].0.ln());
    let a_at = |lc: f64, near: &Vec<f64>| -> Result<(f64, Vec<f64>)> {
        let xs = family.solve(near.clone(), Pin::Center(lc.exp()))?;
        Ok((xs[ALPHA], xs))
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    x = pts[m - 2].1.clone();
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut s1) = a_at(x1, &x)?;
    let (mut f2, mut s2) = a_at(x2, &x)?;
    while hi - lo > 1e-9 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            s2 = s1.clone();
            x1 = hi - phi * (hi - lo);
            (f1, s1) = a_at(x1, &s2)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            s1 = s2.clone();
            x2 = lo + phi * (hi - lo);
            (f2, s2) = a_at(x2, &s1)?;
        }
    }
    let (a, xs, lc) = if f1 < f2 { (f1, s1, x1) } else { (f2, s2, x2) };
    Ok(FoldPoint { a, mu: xs[MU], center: lc.exp() })
}

const STRIDE: usize = 5;
const MU: usize = 2;
const ALPHA: usize = 3;

#[derive(Debug, Clone, Copy)]
enum Pin {
    ScatteringLength(f64),
    /// Fixes `u(h)`; the scattering length becomes an unknown.
    Center(f64),
}

/// Discrete stationary problem. Unknowns per node are `u`, `w = rU`, `μ`,
/// `a` and the cumulative norm; the replicated scalars keep the Jacobian
/// banded.
struct Family {
    grid: RadialGrid,
    params: GpeParams,
    opts: StationaryOptions,
}

impl Family {
    fn new(params: &GpeParams, opts: &StationaryOptions) -> Self {
        Self { grid: opts.grid, params: *params, opts: *opts }
    }

    fn initial(&self, g: &RadialState, mu: f64, a: f64) -> Vec<f64> {
        let (n, h) = (self.grid.n, self.grid.h());
        let f: Vec<f64> = g.u.iter().map(|z| z.norm_sqr()).collect();
        let hartree = hartree_quadrature(&self.grid, &f);
        let mut x = vec![0.0; STRIDE * n];
        let mut cum = 0.0;
        for i in 0..n {
            cum += 4.0 * PI * h * f[i];
            x[STRIDE * i] = g.u[i].re;
            x[STRIDE * i + 1] = self.grid.r(i) * hartree[i];
            x[STRIDE * i + MU] = mu;
            x[STRIDE * i + ALPHA] = a;
            x[STRIDE * i + 4] = cum;
        }
        x
    }

    fn pack(&self, r: &StationaryResult) -> Vec<f64> {
        self.initial(&r.state, r.mu, self.params.a)
    }

    /// Linear extrapolation in the central amplitude from the last two
    /// solutions.
    fn predict(&self, pts: &[(f64, Vec<f64>)], c: f64) -> Vec<f64> {
        match pts {
            [.., (c1, x1), (c2, x2)] => {
                let t = (c - c2) / (c2 - c1);
                x2.iter().zip(x1).map(|(b, a)| b + t * (b - a)).collect()
            }
            [.., (_, x)] => x.clone(),
            [] => unreachable!("prediction needs a solution"),
        }
    }

    /// Walks from a stable-branch solution through the fold to the state at
    /// `target` on the other side.
    fn unstable_from(&self, x0: Vec<f64>, target: f64) -> Result<Vec<f64>> {
        let c0 = x0[0];
        let mut pts: Vec<(f64, Vec<f64>)> = vec![(c0, x0)];
        let mut step = 0.05;
        let mut turned = false;
        let (lo, hi) = loop {
            let (c_prev, x_prev) = pts.last().unwrap().clone();
            let c = c_prev * (1.0 + step);
            match self.solve(self.predict(&pts, c), Pin::Center(c)) {
                Ok(xn) => {
                    let a_new = xn[ALPHA];
                    turned |= a_new > x_prev[ALPHA];
                    if turned && a_new >= target {
                        break ((c_prev, x_prev), (c, xn));
                    }
                    pts.push((c, xn));
                    step = (step * 1.5).min(0.2);
                }
                Err(_) => {
                    step *= 0.5;
                    if step < 1e-6 {
                        return Err(Error::BranchNotFound(format!("continuation stalled at u(h) = {c_prev:.6e}")));
                    }
                }
            }
            if c > 1e4 * c0 || pts.len() > 2000 {
                return Err(Error::BranchNotFound(format!("no unstable state at a = {target}")));
            }
        };
        // Illinois regula falsi on a(c) = target.
        let (mut a_pt, mut b_pt) = (lo, hi);
        let (mut fa, mut fb) = (a_pt.1[ALPHA] - target, b_pt.1[ALPHA] - target);
        let mut side = 0;
        for _ in 0..100 {
            let c = (a_pt.0 * fb - b_pt.0 * fa) / (fb - fa);
            let t = (c - a_pt.0) / (b_pt.0 - a_pt.0);
            let guess: Vec<f64> = a_pt.1.iter().zip(&b_pt.1).map(|(p, q)| p + t * (q - p)).collect();
            let xs = self.solve(guess, Pin::Center(c))?;
            let fc = xs[ALPHA] - target;
            if fc.abs() < 1e-13 * target.abs().max(1.0) {
                return self.solve(xs, Pin::ScatteringLength(target));
            }
            if (fc < 0.0) == (fa < 0.0) {
                a_pt = (c, xs);
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b_pt = (c, xs);
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Err(Error::NoConvergence { iterations: 100, residual: fa.abs().min(fb.abs()) })
    }

    fn solve(&self, mut x: Vec<f64>, pin: Pin) -> Result<Vec<f64>> {
        let n = self.grid.n;
        let mut f = self.residual(&x, pin);
        let mut f_norm = norm2(&f);
        let mut iterations = 0;
        loop {
            if iterations >= self.opts.max_iterations || !f_norm.is_finite() {
                return Err(Error::NoConvergence { iterations, residual: f_norm });
            }
            iterations += 1;
            let lu = self.jacobian(&x, pin).factor().ok_or_else(|| Error::BranchNotFound("singular Newton matrix".into()))?;
            let mut dx: Vec<f64> = f.iter().map(|v| -v).collect();
            lu.solve(&mut dx);
            if dx.iter().any(|v| !v.is_finite()) {
                return Err(Error::BranchNotFound("non-finite Newton update".into()));
            }
            let mut alpha = 1.0;
            let (trial, trial_f, trial_norm) = loop {
                let t: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + alpha * d).collect();
                let tf = self.residual(&t, pin);
                let tn = norm2(&tf);
                if tn <= (1.0 - 1e-4 * alpha) * f_norm || alpha < 1.0 / 1024.0 || f_norm < 1e-14 {
                    break (t, tf, tn);
                }
                alpha *= 0.5;
            };
            let u_scale = (0..n).map(|i| x[STRIDE * i].abs()).fold(0.0, f64::max).max(1e-300);
            let du = (0..n).map(|i| (alpha * dx[STRIDE * i]).abs()).fold(0.0, f64::max) / u_scale;
            let dmu = (alpha * dx[MU]).abs() / x[MU].abs().max(1.0);
            let da = (alpha * dx[ALPHA]).abs() / x[ALPHA].abs().max(1.0);
            x = trial;
            f = trial_f;
            f_norm = trial_norm;
            if du < self.opts.tol && dmu < self.opts.tol && da < self.opts.tol {
                return Ok(x);
            }
        }
    }

    fn finish(&self, x: Vec<f64>, branch: Branch) -> Result<StationaryResult> {
        let (n, h) = (self.grid.n, self.grid.h());
        let params = GpeParams { a: x[ALPHA], ..self.params };
        let mu = x[MU];
        let u: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[STRIDE * i], 0.0)).collect();
        let mut state = RadialState::new(self.grid, u)?;
        if state.u.iter().map(|z| z.re).sum::<f64>() < 0.0 {
            state.u.iter_mut().for_each(|z| *z = -*z);
        }
        let peak = state.u.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        if state.u.iter().any(|z| z.re < -1e-8 * peak) {
            return Err(Error::BranchNotFound("relaxation converged to a state with nodes".into()));
        }
        state.normalize();
        let hpsi = gpe_apply(&state, &params);
        let residual = (4.0 * PI * h * hpsi.iter().zip(&state.u).map(|(a, u)| (a - u * mu).norm_sqr()).sum::<f64>()).sqrt();
        let energy = observables(&state, &params).energy;
        Ok(StationaryResult { state, mu, energy, branch, residual })
    }

    fn contact_on(&self) -> f64 {
        if self.params.interactions.contact {
            8.0 * PI
        } else {
            0.0
        }
    }

    fn long_range(&self) -> f64 {
        if self.params.interactions.long_range {
            1.0
        } else {
            0.0
        }
    }

    fn residual(&self, x: &[f64], pin: Pin) -> Vec<f64> {
        let (n, h) = (self.grid.n, self.grid.h());
        let g = self.contact_on();
        let lr = self.long_range();
        let gamma2 = self.params.gamma * self.params.gamma;
        let u = |j: isize| if j < 0 || j >= n as isize { 0.0 } else { x[STRIDE * j as usize] };
        let w = |j: isize| {
            if j < 0 {
                0.0
            } else if j >= n as isize {
                -2.0
            } else {
                x[STRIDE * j as usize + 1]
            }
        };
        let s = |j: isize| if j < 0 || j >= n as isize { 0.0 } else { 8.0 * PI * u(j).powi(2) / self.grid.r(j as usize) };
        let mut out = vec![0.0; STRIDE * n];
        for i in 0..n {
            let ii = i as isize;
            let b = STRIDE * i;
            let r = self.grid.r(i);
            let (ui, wi, mi, ai) = (x[b], x[b + 1], x[b + MU], x[b + ALPHA]);
            let v = gamma2 * r * r + g * ai * ui * ui / (r * r) + lr * wi / r;
            out[b] = -(u(ii + 1) - 2.0 * ui + u(ii - 1)) + h * h * (v - mi) * ui;
            out[b + 1] = w(ii + 1) - 2.0 * wi + w(ii - 1) - h * h / 12.0 * (s(ii + 1) + 10.0 * s(ii) + s(ii - 1));
            out[b + MU] = if i + 1 < n { x[b + STRIDE + MU] - mi } else { x[b + 4] - 1.0 };
            out[b + ALPHA] = match (i, pin) {
                (0, Pin::ScatteringLength(a)) => ai - a,
                (0, Pin::Center(c)) => ui - c,
                _ => ai - x[b - STRIDE + ALPHA],
            };
            let prev = if i > 0 { x[b - 1] } else { 0.0 };
            out[b + 4] = x[b + 4] - prev - 4.0 * PI * h * ui * ui;
        }
        out
    }

    fn jacobian(&self, x: &[f64], pin: Pin) -> BandedMatrix {
        let (n, h) = (self.grid.n, self.grid.h());
        let g = self.contact_on();
        let lr = self.long_range();
        let gamma2 = self.params.gamma * self.params.gamma;
        let hh = h * h;
        let mut j = BandedMatrix::zeros(STRIDE * n, 6, 5);
        for i in 0..n {
            let b = STRIDE * i;
            let r = self.grid.r(i);
            let (ui, wi, mi, ai) = (x[b], x[b + 1], x[b + MU], x[b + ALPHA]);
            let (ru, rw, rm, ra, rn) = (b, b + 1, b + MU, b + ALPHA, b + 4);
            let v = gamma2 * r * r + g * ai * ui * ui / (r * r) + lr * wi / r;
            j.add(ru, ru, 2.0 + hh * (v - mi) + hh * 2.0 * g * ai * ui * ui / (r * r));
            j.add(ru, rw, hh * lr * ui / r);
            j.add(ru, rm, -hh * ui);
            j.add(ru, ra, hh * g * ui * ui * ui / (r * r));
            if i > 0 {
                j.add(ru, ru - STRIDE, -1.0);
            }
            if i + 1 < n {
                j.add(ru, ru + STRIDE, -1.0);
            }

            let ds = |k: usize| hh / 12.0 * 16.0 * PI * x[STRIDE * k] / self.grid.r(k);
            j.add(rw, rw, -2.0);
            j.add(rw, ru, -10.0 * ds(i));
            if i > 0 {
                j.add(rw, rw - STRIDE, 1.0);
                j.add(rw, ru - STRIDE, -ds(i - 1));
            }
            if i + 1 < n {
                j.add(rw, rw + STRIDE, 1.0);
                j.add(rw, ru + STRIDE, -ds(i + 1));
            }

            if i + 1 < n {
                j.add(rm, rm + STRIDE, 1.0);
                j.add(rm, rm, -1.0);
            } else {
                j.add(rm, rn, 1.0);
            }

            match (i, pin) {
                (0, Pin::ScatteringLength(_)) => j.add(ra, ra, 1.0),
                (0, Pin::Center(_)) => j.add(ra, ru, 1.0),
                _ => {
                    j.add(ra, ra, 1.0);
                    j.add(ra, ra - STRIDE, -1.0);
                }
            }

            j.add(rn, rn, 1.0);
            if i > 0 {
                j.add(rn, rn - STRIDE, -1.0);
            }
            j.add(rn, ru, -8.0 * PI * h * ui);
        }
        j
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
