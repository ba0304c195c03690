use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hartree::hartree_quadrature;
use super::{GpeParams, RadialGrid, RadialState};

/// Local part of the mean-field operator at every node:
/// `γ²r² + 8πa|ψ|² + U`.
pub(crate) fn mean_field_potential(grid: &RadialGrid, f: &[f64], params: &GpeParams) -> Vec<f64> {
    let g = params.contact_coefficient();
    let hartree = if params.interactions.long_range { Some(hartree_quadrature(grid, f)) } else { None };
    (0..grid.n)
        .map(|i| {
            let r = grid.r(i);
            let mut v = params.gamma * params.gamma * r * r + g * f[i] / (r * r);
            if let Some(u) = &hartree {
                v += u[i];
            }
            v
        })
        .collect()
}

pub(crate) fn potential_of(state: &RadialState, params: &GpeParams) -> Vec<f64> {
    let f: Vec<f64> = state.u.iter().map(|z| z.norm_sqr()).collect();
    mean_field_potential(&state.grid, &f, params)
}

fn laplacian_u(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    let zero = Complex64::default();
    (0..n)
        .map(|i| {
            let left = if i > 0 { u[i - 1] } else { zero };
            let right = if i + 1 < n { u[i + 1] } else { zero };
            (left - u[i] * 2.0 + right) / (h * h)
        })
        .collect()
}

/// `r · H[ψ]ψ` on the interior nodes, i.e. the operator acting on `u`.
pub fn gpe_apply(state: &RadialState, params: &GpeParams) -> Vec<Complex64> {
    let v = potential_of(state, params);
    let lap = laplacian_u(&state.u, state.grid.h());
    state.u.iter().zip(&lap).zip(&v).map(|((u, l), v)| -l + u * v).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub norm: f64,
    /// `⟨−Δ⟩`.
    pub kinetic: f64,
    /// `⟨γ²r²⟩`.
    pub trap: f64,
    /// `8πa ∫|ψ|⁴`.
    pub contact: f64,
    /// `∫ U |ψ|²`.
    pub hartree: f64,
    /// `kinetic + trap + contact/2 + hartree/2`.
    pub energy: f64,
    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub mu: f64,
    /// `√⟨r²⟩`.
    pub rms_width: f64,
    /// `|ψ|²` extrapolated to the origin.
    pub peak_density: f64,
}

pub fn observables(state: &RadialState, params: &GpeParams) -> Observables {
    let grid = &state.grid;
    let h = grid.h();
    let w = 4.0 * PI * h;
    let f: Vec<f64> = state.u.iter().map(|z| z.norm_sqr()).collect();
    let norm = w * f.iter().sum::<f64>();
    let lap = laplacian_u(&state.u, h);
    let kinetic = -w * state.u.iter().zip(&lap).map(|(u, l)| (u.conj() * l).re).sum::<f64>() / norm;
    let r2 = w * f.iter().enumerate().map(|(i, fi)| fi * grid.r(i).powi(2)).sum::<f64>() / norm;
    let trap = params.gamma * params.gamma * r2;
    let contact = params.contact_coefficient() * w * f.iter().enumerate().map(|(i, fi)| fi * fi / grid.r(i).powi(2)).sum::<f64>() / (norm * norm);
    let hartree = if params.interactions.long_range {
        let u = hartree_quadrature(grid, &f);
        w * f.iter().zip(&u).map(|(fi, ui)| fi * ui).sum::<f64>() / (norm * norm)
    } else {
        0.0
    };
    let density0 = f[0] / (h * h);
    let density1 = f[1] / (4.0 * h * h);
    Observables {
        norm,
        kinetic,
        trap,
        contact,
        hartree,
        energy: kinetic + trap + 0.5 * contact + 0.5 * hartree,
        mu: kinetic + trap + contact + hartree,
        rms_width: r2.sqrt(),
        peak_density: ((4.0 * density0 - density1) / 3.0) / norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Interactions;

    #[test]
    fn oscillator_ground_state_residual_is_second_order() {
        // ψ = π^{-3/4} e^{-r²/2} solves −Δψ + r²ψ = 3ψ.
        let params = GpeParams::new(0.0, 1.0).unwrap().with_interactions(Interactions::NONE);
        let residual = |n: usize| {
            let grid = RadialGrid::new(12.0, n).unwrap();
            let s = RadialState::gaussian(grid, 1.0);
            let hu = gpe_apply(&s, &params);
            hu.iter().zip(&s.u).map(|(a, u)| (a - u * 3.0).norm()).fold(0.0, f64::max)
        };
        let (e1, e2) = (residual(511), residual(1023));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn oscillator_observables() {
        let params = GpeParams::new(0.0, 1.0).unwrap().with_interactions(Interactions::NONE);
        let s = RadialState::gaussian(RadialGrid::new(12.0, 2048).unwrap(), 1.0);
        let o = observables(&s, &params);
        assert!((o.rms_width.powi(2) - 1.5).abs() < 1e-10);
        assert!((o.mu - 3.0).abs() < 1e-4);
        assert!((o.energy - 3.0).abs() < 1e-4);
        assert!((o.peak_density - PI.powf(-1.5)).abs() < 1e-8);
    }

    #[test]
    fn gaussian_interaction_energies_match_closed_forms() {
        // For the Gaussian of width parameter k: contact 8πa k³/(2π)^{3/2},
        // Hartree −2√2 k/√π.
        let (a, k) = (-0.4, 0.9);
        let params = GpeParams::new(a, 0.0).unwrap();
        let s = RadialState::gaussian(RadialGrid::new(16.0, 2048).unwrap(), k);
        let o = observables(&s, &params);
        let contact = 8.0 * PI * a * k.powi(3) / (2.0 * PI).powf(1.5);
        let hartree = -2.0 * 2f64.sqrt() * k / PI.sqrt();
        assert!((o.contact - contact).abs() < 1e-10, "{} {contact}", o.contact);
        assert!((o.hartree - hartree).abs() < 1e-8, "{} {hartree}", o.hartree);
        assert!((o.kinetic - 1.5 * k * k).abs() < 1e-4);
    }
}
