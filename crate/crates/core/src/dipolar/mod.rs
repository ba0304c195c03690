//! Axisymmetric Gaussian ansatz for the dipolar condensate.
//!
//! The width parameters `A_ρ`, `A_z` of `ψ = exp{i(A_ρ ρ² + A_z z² + γ)}` are
//! mapped onto canonical coordinates by
//!
//! ```text
//! Re A_ρ = p_ρ/(4q_ρ),  Im A_ρ = 1/(4q_ρ²),  Re A_z = p_z/(4q_z),  Im A_z = 1/(8q_z²)
//! ```
//!
//! and the dynamics is generated by
//!
//! ```text
//! H = (p_ρ² + p_z²)/2 + 1/(2q_ρ²) + 2γ_ρ² q_ρ² + (a/a_d)/(2√(2π) q_ρ² q_z)
//!       + 1/(8q_z²) + 2γ_z² q_z² + D(q_ρ, q_z).
//! ```
//!
//! The density is Gaussian with variances `q_ρ²` (each transverse axis) and
//! `2q_z²` (axial), so the spherical locus is `q_ρ² = 2q_z²`, where the
//! dipolar term `D` vanishes. See [`anisotropy`] for its evaluation.

pub mod anisotropy;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{HamSystem, PhaseState};
use crate::error::{invalid, Result};
use crate::units::DipolarScaled;

/// `√(2π)`.
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipolarParams {
    pub scaled: DipolarScaled,
    pub gamma_rho: f64,
    pub gamma_z: f64,
}

impl DipolarParams {
    pub fn new(scaled: DipolarScaled) -> Self {
        let (gamma_rho, gamma_z) = scaled.trap_frequencies();
        Self { scaled, gamma_rho, gamma_z }
    }

    pub fn from_scaled(gamma_bar_scaled: f64, lambda: f64, a: f64) -> Result<Self> {
        Ok(Self::new(DipolarScaled::new(gamma_bar_scaled, lambda, a)?))
    }

    pub fn with_scattering_length(&self, a: f64) -> Self {
        Self::new(DipolarScaled { a_scaled: a, ..self.scaled })
    }

    pub fn a(&self) -> f64 {
        self.scaled.a_scaled
    }

    /// Widths minimizing the non-interacting (pure trap) potential.
    pub fn oscillator_widths(&self) -> (f64, f64) {
        (1.0 / (2.0 * self.gamma_rho).sqrt(), 0.5 / self.gamma_z.sqrt())
    }

    pub fn kinetic_term(&self, q_rho: f64, q_z: f64) -> f64 {
        0.5 / (q_rho * q_rho) + 0.125 / (q_z * q_z)
    }

    pub fn trap_term(&self, q_rho: f64, q_z: f64) -> f64 {
        2.0 * (self.gamma_rho * self.gamma_rho * q_rho * q_rho + self.gamma_z * self.gamma_z * q_z * q_z)
    }

    pub fn contact_term(&self, q_rho: f64, q_z: f64) -> f64 {
        self.a() / (2.0 * SQRT_2PI * q_rho * q_rho * q_z)
    }

    /// Mean-field dipole-dipole energy of the Gaussian density.
    pub fn dipolar_term(&self, q_rho: f64, q_z: f64) -> f64 {
        let t = shape_parameter(q_rho, q_z);
        anisotropy::shape(t).0 / (2.0 * SQRT_2PI * q_rho * q_rho * q_z)
    }

    pub fn potential(&self, q_rho: f64, q_z: f64) -> f64 {
        self.kinetic_term(q_rho, q_z)
            + self.trap_term(q_rho, q_z)
            + self.contact_term(q_rho, q_z)
            + self.dipolar_term(q_rho, q_z)
    }

    /// `(∂V/∂q_ρ, ∂V/∂q_z)`.
    pub fn gradient(&self, q_rho: f64, q_z: f64) -> [f64; 2] {
        let (qr2, qz2) = (q_rho * q_rho, q_z * q_z);
        let t = shape_parameter(q_rho, q_z);
        let (f, df) = anisotropy::shape(t);
        let k = 1.0 / (2.0 * SQRT_2PI * qr2 * q_z);
        let contact = self.a() * k;
        let dd_rho = k * (df * q_rho / qz2 - 2.0 * f / q_rho);
        let dd_z = k * (-df * qr2 / (qz2 * q_z) - f / q_z);
        [
            -1.0 / (qr2 * q_rho) + 4.0 * self.gamma_rho * self.gamma_rho * q_rho - 2.0 * contact / q_rho + dd_rho,
            -0.25 / (qz2 * q_z) + 4.0 * self.gamma_z * self.gamma_z * q_z - contact / q_z + dd_z,
        ]
    }

    /// Hessian of `V` by central differences of the analytic gradient.
    pub fn hessian(&self, q_rho: f64, q_z: f64) -> Matrix2<f64> {
        let h = [1e-5 * q_rho, 1e-5 * q_z];
        let col = |i: usize| {
            let (mut plus, mut minus) = ([q_rho, q_z], [q_rho, q_z]);
            plus[i] += h[i];
            minus[i] -= h[i];
            let gp = self.gradient(plus[0], plus[1]);
            let gm = self.gradient(minus[0], minus[1]);
            [(gp[0] - gm[0]) / (2.0 * h[i]), (gp[1] - gm[1]) / (2.0 * h[i])]
        };
        let (c0, c1) = (col(0), col(1));
        let off = 0.5 * (c0[1] + c1[0]);
        Matrix2::new(c0[0], off, off, c1[1])
    }

    pub fn energy(&self, s: &DipState) -> f64 {
        0.5 * (s.p_rho * s.p_rho + s.p_z * s.p_z) + self.potential(s.q_rho, s.q_z)
    }

    /// Sum of the magnitudes of all potential terms; the natural scale for
    /// relative convergence tests.
    fn potential_scale(&self, q_rho: f64, q_z: f64) -> f64 {
        self.kinetic_term(q_rho, q_z)
            + self.trap_term(q_rho, q_z)
            + self.contact_term(q_rho, q_z).abs()
            + self.dipolar_term(q_rho, q_z).abs()
    }
}

impl HamSystem<2> for DipolarParams {
    fn mass(&self) -> f64 {
        1.0
    }

    fn potential(&self, q: &[f64; 2]) -> f64 {
        DipolarParams::potential(self, q[0], q[1])
    }

    fn force(&self, q: &[f64; 2]) -> [f64; 2] {
        let g = self.gradient(q[0], q[1]);
        [-g[0], -g[1]]
    }

    /// Geometric mean of the trap oscillator widths.
    fn length_scale(&self) -> f64 {
        let (r, z) = self.oscillator_widths();
        (r * r * z).cbrt()
    }

    /// Inverse of the geometric-mean trap frequency `4γ̄` of the width modes.
    fn time_scale(&self) -> f64 {
        0.25 / (self.gamma_rho * self.gamma_rho * self.gamma_z).cbrt()
    }
}

/// `q_ρ²/(2q_z²) − 1`.
pub fn shape_parameter(q_rho: f64, q_z: f64) -> f64 {
    q_rho * q_rho / (2.0 * q_z * q_z) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipState {
    pub q_rho: f64,
    pub q_z: f64,
    pub p_rho: f64,
    pub p_z: f64,
}

impl From<DipState> for PhaseState<2> {
    fn from(s: DipState) -> Self {
        PhaseState::new([s.q_rho, s.q_z], [s.p_rho, s.p_z])
    }
}

impl From<PhaseState<2>> for DipState {
    fn from(s: PhaseState<2>) -> Self {
        DipState { q_rho: s.q[0], q_z: s.q[1], p_rho: s.p[0], p_z: s.p[1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipWidthParams {
    pub a_rho_r: f64,
    pub a_rho_i: f64,
    pub a_z_r: f64,
    pub a_z_i: f64,
}

pub fn dip_from_a(w: &DipWidthParams) -> Result<DipState> {
    if !(w.a_rho_i > 0.0) || !(w.a_z_i > 0.0) {
        return Err(invalid("imaginary parts of the widths must be positive"));
    }
    let q_rho = 0.5 / w.a_rho_i.sqrt();
    let q_z = 1.0 / (8.0 * w.a_z_i).sqrt();
    Ok(DipState { q_rho, q_z, p_rho: 4.0 * q_rho * w.a_rho_r, p_z: 4.0 * q_z * w.a_z_r })
}

pub fn dip_to_a(s: &DipState) -> Result<DipWidthParams> {
    if !(s.q_rho > 0.0) || !(s.q_z > 0.0) {
        return Err(invalid("widths must be positive"));
    }
    Ok(DipWidthParams {
        a_rho_r: s.p_rho / (4.0 * s.q_rho),
        a_rho_i: 0.25 / (s.q_rho * s.q_rho),
        a_z_r: s.p_z / (4.0 * s.q_z),
        a_z_i: 0.125 / (s.q_z * s.q_z),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipFixedPointKind {
    Minimum,
    Saddle,
    Maximum,
}

impl DipFixedPointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Minimum => "minimum",
            Self::Saddle => "saddle",
            Self::Maximum => "maximum",
        }
    }

    fn from_hessian(h: &Matrix2<f64>) -> Self {
        let ev = h.symmetric_eigenvalues();
        match (ev[0] > 0.0, ev[1] > 0.0) {
            (true, true) => Self::Minimum,
            (false, false) => Self::Maximum,
            _ => Self::Saddle,
        }
    }
}

/// Linearization spectrum of the flow at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// Eigenvalues of `J·Hess(H)`, sorted by real then imaginary part.
    pub eigenvalues: [Complex64; 4],
    /// Set when some eigenvalue is indistinguishable from zero.
    pub marginal: bool,
}

impl Spectrum {
    /// Number of `(λ, −λ)` pairs with a real part that is not negligible.
    pub fn unstable_pairs(&self) -> usize {
        let scale = self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.eigenvalues.iter().filter(|z| z.re > 1e-7 * scale).count()
    }

    /// Largest real part, the linear growth rate.
    pub fn growth_rate(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(0.0, f64::max)
    }

    /// Smallest and largest oscillation frequency among the imaginary pairs.
    pub fn frequencies(&self) -> Vec<f64> {
        let scale = self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut w: Vec<f64> = self
            .eigenvalues
            .iter()
            .filter(|z| z.im > 0.0 && z.re.abs() <= 1e-7 * scale)
            .map(|z| z.im)
            .collect();
        w.sort_by(f64::total_cmp);
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipFixedPoint {
    pub q_rho_star: f64,
    pub q_z_star: f64,
    pub energy: f64,
    pub mu: f64,
    pub kind: DipFixedPointKind,
    pub spectrum: Spectrum,
}

impl DipFixedPoint {
    pub fn state(&self) -> DipState {
        DipState { q_rho: self.q_rho_star, q_z: self.q_z_star, p_rho: 0.0, p_z: 0.0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct DipFixedPoints {
    /// Sorted by increasing energy.
    pub points: Vec<DipFixedPoint>,
    pub warnings: Vec<String>,
}

impl DipFixedPoints {
    pub fn minimum(&self) -> Option<&DipFixedPoint> {
        self.points.iter().find(|p| p.kind == DipFixedPointKind::Minimum)
    }

    pub fn saddle(&self) -> Option<&DipFixedPoint> {
        self.points.iter().find(|p| p.kind == DipFixedPointKind::Saddle)
    }
}

/// Options of the multi-start Newton search.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointSearch {
    pub seeds_per_axis: usize,
    /// Seed range in multiples of the oscillator widths.
    pub seed_span: (f64, f64),
    pub max_iterations: usize,
    pub dedup_tol: f64,
}

impl Default for FixedPointSearch {
    fn default() -> Self {
        Self { seeds_per_axis: 16, seed_span: (1e-2, 1e2), max_iterations: 200, dedup_tol: 1e-6 }
    }
}

/// Eigenvalues of the linearized canonical flow `[[0, I/m], [−Hess V, 0]]`.
pub fn dip_stability(q_rho: f64, q_z: f64, params: &DipolarParams) -> Spectrum {
    let h = params.hessian(q_rho, q_z);
    let m = Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -h[(0, 0)], -h[(0, 1)], 0.0, 0.0, //
        -h[(1, 0)], -h[(1, 1)], 0.0, 0.0,
    );
    let ev = m.complex_eigenvalues();
    let mut eigenvalues = [ev[0], ev[1], ev[2], ev[3]];
    // Deflate roundoff: each pair is either purely real or purely imaginary.
    let scale = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in eigenvalues.iter_mut() {
        if z.re.abs() < 1e-9 * scale {
            z.re = 0.0;
        }
        if z.im.abs() < 1e-9 * scale {
            z.im = 0.0;
        }
    }
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let unit = 1.0 / params.time_scale();
    let marginal = eigenvalues.iter().any(|z| z.re.abs() < 1e-8 * unit && z.im.abs() < 1e-8 * unit);
    Spectrum { eigenvalues, marginal }
}

/// `μ = E + C + D` at a stationary width pair.
pub fn dip_chemical_potential(q_rho: f64, q_z: f64, params: &DipolarParams) -> f64 {
    params.potential(q_rho, q_z) + params.contact_term(q_rho, q_z) + params.dipolar_term(q_rho, q_z)
}

/// Newton iteration on `∇V = 0` in logarithmic coordinates `x = ln q`,
/// which keeps both widths positive. The step is halved while it fails to
/// reduce the gradient norm.
fn newton_from(params: &DipolarParams, mut q: [f64; 2], opts: &FixedPointSearch) -> Option<[f64; 2]> {
    let (r0, z0) = params.oscillator_widths();
    let bounds = [(r0 * 1e-6, r0 * 1e6), (z0 * 1e-6, z0 * 1e6)];
    let log_grad = |q: [f64; 2]| {
        let g = params.gradient(q[0], q[1]);
        [g[0] * q[0], g[1] * q[1]]
    };
    let norm = |g: [f64; 2]| (g[0] * g[0] + g[1] * g[1]).sqrt();
    let mut g = log_grad(q);
    for _ in 0..opts.max_iterations {
        let scale = params.potential_scale(q[0], q[1]);
        if norm(g) <= 1e-10 * scale {
            return Some(q);
        }
        let h = params.hessian(q[0], q[1]);
        let grad = params.gradient(q[0], q[1]);
        // Hessian with respect to ln q.
        let hl = Matrix2::new(
            q[0] * q[0] * h[(0, 0)] + q[0] * grad[0],
            q[0] * q[1] * h[(0, 1)],
            q[1] * q[0] * h[(1, 0)],
            q[1] * q[1] * h[(1, 1)] + q[1] * grad[1],
        );
        let det = hl[(0, 0)] * hl[(1, 1)] - hl[(0, 1)] * hl[(1, 0)];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let mut dx = [
            -(hl[(1, 1)] * g[0] - hl[(0, 1)] * g[1]) / det,
            -(-hl[(1, 0)] * g[0] + hl[(0, 0)] * g[1]) / det,
        ];
        // Cap a single step at a factor e² in either width.
        let big = dx[0].abs().max(dx[1].abs());
        if big > 2.0 {
            dx = [dx[0] * 2.0 / big, dx[1] * 2.0 / big];
        }
        let current = norm(g);
        let mut accepted = None;
        for _ in 0..30 {
            let trial = [q[0] * dx[0].exp(), q[1] * dx[1].exp()];
            let gt = log_grad(trial);
            if norm(gt).is_finite() && norm(gt) < current {
                accepted = Some((trial, gt));
                break;
            }
            dx = [0.5 * dx[0], 0.5 * dx[1]];
        }
        let (next, gn) = match accepted {
            Some(v) => v,
            None => {
                // No descent in the gradient norm; accept only at roundoff level.
                return (current <= 1e-8 * scale).then_some(q);
            }
        };
        if !(bounds[0].0..bounds[0].1).contains(&next[0]) || !(bounds[1].0..bounds[1].1).contains(&next[1]) {
            return None;
        }
        let small_step = dx[0].abs().max(dx[1].abs()) < 1e-14;
        q = next;
        g = gn;
        if small_step {
            let scale = params.potential_scale(q[0], q[1]);
            return (norm(g) <= 1e-8 * scale).then_some(q);
        }
    }
    None
}

/// Stationary points of the width potential from a log-spaced grid of Newton
/// seeds, deduplicated and classified. Empty below the critical scattering
/// length.
pub fn dip_fixed_points(params: &DipolarParams) -> DipFixedPoints {
    dip_fixed_points_with(params, &FixedPointSearch::default())
}

pub fn dip_fixed_points_with(params: &DipolarParams, opts: &FixedPointSearch) -> DipFixedPoints {
    let (r0, z0) = params.oscillator_widths();
    let n = opts.seeds_per_axis;
    let (lo, hi) = opts.seed_span;
    let axis = |w: f64| -> Vec<f64> {
        (0..n).map(|i| w * lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64)).collect()
    };
    let (rs, zs) = (axis(r0), axis(z0));
    let seeds: Vec<[f64; 2]> = rs.iter().flat_map(|&r| zs.iter().map(move |&z| [r, z])).collect();
    let converged: Vec<Option<[f64; 2]>> = seeds.par_iter().map(|&s| newton_from(params, s, opts)).collect();

    let mut out = DipFixedPoints::default();
    let mut found: Vec<[f64; 2]> = Vec::new();
    for q in converged.into_iter().flatten() {
        let mut duplicate = false;
        for f in &found {
            let d = ((q[0] - f[0]).powi(2) + (q[1] - f[1]).powi(2)).sqrt();
            let r = (f[0] * f[0] + f[1] * f[1]).sqrt();
            if d <= opts.dedup_tol * r {
                duplicate = true;
                break;
            }
            if d <= 10.0 * opts.dedup_tol * r {
                out.warnings.push(format!(
                    "distinct fixed points ({:.9e}, {:.9e}) and ({:.9e}, {:.9e}) are within 10x the dedup tolerance",
                    q[0], q[1], f[0], f[1]
                ));
            }
        }
        if !duplicate {
            found.push(q);
        }
    }
    out.points = found
        .into_iter()
        .map(|q| DipFixedPoint {
            q_rho_star: q[0],
            q_z_star: q[1],
            energy: params.potential(q[0], q[1]),
            mu: dip_chemical_potential(q[0], q[1], params),
            kind: DipFixedPointKind::from_hessian(&params.hessian(q[0], q[1])),
            spectrum: dip_stability(q[0], q[1], params),
        })
        .collect();
    out.points.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out
}

/// Critical scattering length at fixed `(N²γ̄, λ)`: bisection on existence of
/// stationary points between `a_lo` (none) and `a_hi` (some).
pub fn dip_critical_a(params: &DipolarParams, mut a_lo: f64, mut a_hi: f64, tol: f64) -> Result<f64> {
    let exists = |a: f64| !dip_fixed_points(&params.with_scattering_length(a)).points.is_empty();
    if exists(a_lo) || !exists(a_hi) {
        return Err(invalid(format!("[{a_lo}, {a_hi}] does not bracket the fold")));
    }
    while a_hi - a_lo > tol {
        let mid = 0.5 * (a_lo + a_hi);
        if exists(mid) {
            a_hi = mid;
        } else {
            a_lo = mid;
        }
    }
    Ok(0.5 * (a_lo + a_hi))
}

/// `V(q_ρ, q_z)` on a rectangular log-spaced window, row-major in `q_ρ`.
pub fn dip_landscape(
    params: &DipolarParams,
    q_rho: (f64, f64),
    q_z: (f64, f64),
    n_rho: usize,
    n_z: usize,
) -> Vec<[f64; 3]> {
    let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64)).collect()
    };
    let (rs, zs) = (axis(q_rho, n_rho), axis(q_z, n_z));
    rs.iter()
        .flat_map(|&r| zs.iter().map(move |&z| [r, z, params.potential(r, z)]))
        .collect()
}
