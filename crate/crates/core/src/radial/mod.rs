//! Grid treatment of the spherically symmetric condensate with an attractive
//! `1/r` interaction.
//!
//! The orbital is stored as `u(r) = r ψ(r)` on the interior nodes
//! `r_i = i h`, `i = 1..=n`, `h = r_max/(n + 1)`, with `u(0) = u(r_max) = 0`.
//! The mean-field operator is
//!
//! ```text
//! H[ψ] = −Δ + γ² r² + 8π a |ψ|² + U[ψ],   U(r) = −2 ∫ |ψ(r′)|² / |r − r′| d³r′,
//! ```
//!
//! and the orbital is normalized as `4π ∫ |u|² dr = 1`. The radial Laplacian
//! is the three-point difference on `u`; the split-step propagator uses the
//! exact spectrum of that difference operator, so stationary solutions,
//! imaginary-time relaxation and real-time evolution share one discrete
//! model.

mod banded;
mod checkpoint;
mod dst;
mod evolve;
mod hartree;
mod itp;
mod operator;
mod spline;
mod stationary;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use evolve::{evolve_track, split_step, EvolveOptions, EvolveTermination, PropagationMode, SplitStepper, Track, TrackSample};
pub use hartree::{hartree_1r, hartree_at_origin, hartree_poisson};
pub use itp::{ground_state_itp, ItpOptions, ItpResult};
pub use operator::{gpe_apply, observables, Observables};
pub use spline::stretch;
pub use stationary::{grid_critical_a, stationary_from, stationary_state, Branch, FoldPoint, StationaryOptions, StationaryResult};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform grid of interior nodes on `(0, r_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(invalid("r_max must be positive"));
        }
        if n < 8 {
            return Err(invalid("the grid needs at least 8 interior points"));
        }
        Ok(Self { r_max, n })
    }

    pub fn h(&self) -> f64 {
        self.r_max / (self.n + 1) as f64
    }

    /// `r_i` for the zero-based interior index `i`.
    pub fn r(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self { r_max: 16.0, n: 2048 }
    }
}

/// `u = rψ` on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    pub grid: RadialGrid,
    pub u: Vec<Complex64>,
}

impl RadialState {
    pub fn new(grid: RadialGrid, u: Vec<Complex64>) -> Result<Self> {
        if u.len() != grid.n {
            return Err(invalid(format!("expected {} samples, got {}", grid.n, u.len())));
        }
        Ok(Self { grid, u })
    }

    /// Samples `ψ` from a radial function and normalizes.
    pub fn from_psi(grid: RadialGrid, psi: impl Fn(f64) -> Complex64) -> Self {
        let u = (0..grid.n).map(|i| grid.r(i) * psi(grid.r(i))).collect();
        let mut s = Self { grid, u };
        s.normalize();
        s
    }

    /// Normalized Gaussian `(k²/π)^{3/4} e^{−k²r²/2}`; the variational width
    /// `q` corresponds to `k² = 3/(2q²)`.
    pub fn gaussian(grid: RadialGrid, k: f64) -> Self {
        Self::from_psi(grid, |r| Complex64::new((-0.5 * k * k * r * r).exp(), 0.0))
    }

    /// `4π h Σ |u_i|²`.
    pub fn norm_sqr(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.grid.h() * self.u.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        if s > 0.0 {
            self.u.iter_mut().for_each(|z| *z /= s);
        }
    }

    /// `|ψ(r_i)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.u.iter().enumerate().map(|(i, z)| z.norm_sqr() / self.grid.r(i).powi(2)).collect()
    }

    pub fn psi(&self) -> Vec<Complex64> {
        self.u.iter().enumerate().map(|(i, z)| z / self.grid.r(i)).collect()
    }

    /// `⟨a|b⟩ = 4π h Σ conj(a_i) b_i`.
    pub fn inner(&self, other: &RadialState) -> Complex64 {
        let s: Complex64 = self.u.iter().zip(&other.u).map(|(a, b)| a.conj() * b).sum();
        s * 4.0 * std::f64::consts::PI * self.grid.h()
    }

    /// `‖a − b‖` after removing the global phase of `b` relative to `a`.
    pub fn distance_up_to_phase(&self, other: &RadialState) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        let d: f64 = self.u.iter().zip(&other.u).map(|(a, b)| (a - b * phase).norm_sqr()).sum();
        (4.0 * std::f64::consts::PI * self.grid.h() * d).sqrt()
    }
}

/// Interaction switches, used to isolate terms in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interactions {
    pub contact: bool,
    pub long_range: bool,
}

impl Interactions {
    pub const ALL: Self = Self { contact: true, long_range: true };
    pub const NONE: Self = Self { contact: false, long_range: false };
}

impl Default for Interactions {
    fn default() -> Self {
        Self::ALL
    }
}

/// Scattering length, trap strength and active interactions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpeParams {
    pub a: f64,
    pub gamma: f64,
    pub interactions: Interactions,
}

impl GpeParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !a.is_finite() || !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("a must be finite and gamma non-negative"));
        }
        Ok(Self { a, gamma, interactions: Interactions::ALL })
    }

    pub fn with_interactions(mut self, interactions: Interactions) -> Self {
        self.interactions = interactions;
        self
    }

    /// Coefficient of `|ψ|²` in the contact potential.
    pub(crate) fn contact_coefficient(&self) -> f64 {
        if self.interactions.contact {
            8.0 * std::f64::consts::PI * self.a
        } else {
            0.0
        }
    }
}
