//! Natural-unit reductions.
//!
//! The monopolar equation is written in "Bohr radius" `a_u = ħ²/(m u)` and
//! "Rydberg energy" `E_u = ħ²/(2 m a_u²)` units; the dipolar one in the dipole
//! length `a_d = μ₀ μ² m / (2π ħ²)` and `E_d = ħ²/(2 m a_d²)`. The constants
//! themselves cancel from the scaled equations and never appear at runtime.
//!
//! Solutions of the monopolar equation depend only on `γ/N²` and `N² a/a_u`;
//! dipolar solutions only on `N² γ̄`, `λ` and `a/a_d`. Downstream modules accept
//! the scaled types exclusively.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonopolarPhysical {
    pub n_particles: u64,
    /// Scattering length in units of `a_u`.
    pub a_over_au: f64,
    /// Trap frequency `ħω₀/(2E_u)`.
    pub gamma: f64,
}

impl MonopolarPhysical {
    pub fn new(n_particles: u64, a_over_au: f64, gamma: f64) -> Result<Self> {
        if n_particles == 0 {
            return Err(invalid("particle number must be at least 1"));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(invalid(format!("trap frequency must be finite and >= 0, got {gamma}")));
        }
        if !a_over_au.is_finite() {
            return Err(invalid("scattering length must be finite"));
        }
        Ok(Self { n_particles, a_over_au, gamma })
    }
}

/// `(γ/N², N² a/a_u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonopolarScaled {
    pub gamma_scaled: f64,
    pub a_scaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipolarPhysical {
    pub n_particles: u64,
    /// Scattering length in units of `a_d`.
    pub a_over_ad: f64,
    pub gamma_rho: f64,
    pub gamma_z: f64,
}

impl DipolarPhysical {
    pub fn new(n_particles: u64, a_over_ad: f64, gamma_rho: f64, gamma_z: f64) -> Result<Self> {
        if n_particles == 0 {
            return Err(invalid("particle number must be at least 1"));
        }
        for (name, g) in [("gamma_rho", gamma_rho), ("gamma_z", gamma_z)] {
            if !(g > 0.0) || !g.is_finite() {
                return Err(invalid(format!("{name} must be finite and > 0, got {g}")));
            }
        }
        if !a_over_ad.is_finite() {
            return Err(invalid("scattering length must be finite"));
        }
        Ok(Self { n_particles, a_over_ad, gamma_rho, gamma_z })
    }
}

/// `(N² γ̄, λ, a/a_d)` with `γ̄ = γ_ρ^{2/3} γ_z^{1/3}` and `λ = γ_z/γ_ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipolarScaled {
    pub gamma_bar_scaled: f64,
    pub lambda: f64,
    pub a_scaled: f64,
}

impl DipolarScaled {
    pub fn new(gamma_bar_scaled: f64, lambda: f64, a_scaled: f64) -> Result<Self> {
        if !(gamma_bar_scaled > 0.0) || !gamma_bar_scaled.is_finite() {
            return Err(invalid(format!("scaled mean trap frequency must be > 0, got {gamma_bar_scaled}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("aspect ratio must be > 0, got {lambda}")));
        }
        if !a_scaled.is_finite() {
            return Err(invalid("scattering length must be finite"));
        }
        Ok(Self { gamma_bar_scaled, lambda, a_scaled })
    }

    /// Radial and axial trap frequencies of the `N = 1` problem.
    pub fn trap_frequencies(&self) -> (f64, f64) {
        let gamma_rho = self.gamma_bar_scaled / self.lambda.cbrt();
        (gamma_rho, self.lambda * gamma_rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Monopolar,
    Dipolar,
}

pub fn to_scaled_monopolar(p: &MonopolarPhysical) -> MonopolarScaled {
    let n2 = (p.n_particles as f64) * (p.n_particles as f64);
    MonopolarScaled { gamma_scaled: p.gamma / n2, a_scaled: n2 * p.a_over_au }
}

pub fn to_scaled_dipolar(p: &DipolarPhysical) -> DipolarScaled {
    let n2 = (p.n_particles as f64) * (p.n_particles as f64);
    // (N⁶ γ_ρ² γ_z)^{1/3} in one rounding chain: equivalent tuples that differ by
    // power-of-two rescalings land on the same bits.
    let gamma_bar_scaled = (n2 * n2 * n2 * p.gamma_rho * p.gamma_rho * p.gamma_z).cbrt();
    DipolarScaled {
        gamma_bar_scaled,
        lambda: p.gamma_z / p.gamma_rho,
        a_scaled: p.a_over_ad,
    }
}

/// Physical mean-field energy from the scaled (`N = 1`) energy.
///
/// Monopolar energies come out in units of `E_u`, dipolar ones in `E_d`.
pub fn unscale_energy(e_scaled: f64, n_particles: u64, kind: InteractionKind) -> f64 {
    let n = n_particles as f64;
    match kind {
        InteractionKind::Monopolar => n * n * n * e_scaled,
        InteractionKind::Dipolar => e_scaled / n,
    }
}

/// Inverse of [`unscale_energy`].
pub fn scale_energy(e_physical: f64, n_particles: u64, kind: InteractionKind) -> f64 {
    let n = n_particles as f64;
    match kind {
        InteractionKind::Monopolar => e_physical / (n * n * n),
        InteractionKind::Dipolar => e_physical * n,
    }
}
