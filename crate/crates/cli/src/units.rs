//! Parameter flag groups shared by the subcommands.

use clap::Args;
use lrbec::dipolar::DipolarParams;
use lrbec::mono::MonoParams;
use lrbec::radial::GpeParams;
use lrbec::units::{to_scaled_dipolar, to_scaled_monopolar, DipolarPhysical, DipolarScaled, MonopolarPhysical};
use serde::{Deserialize, Serialize};
use toml::Table;

use crate::error::{usage, CliResult};

/// Trap of the `1/r` gas. Physical input is `(N, a/a_u, γ)`; with `--scaled`
/// the values are `(N² a/a_u, γ/N²)` and `N` must be 1.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MonoTrap {
    /// Particle number.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    /// Trap frequency.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Read `--a` and `--gamma` as scaled parameters.
    #[arg(long)]
    pub scaled: bool,
}

impl MonoTrap {
    /// Scaled `(a, γ)` for a scattering length given in input units.
    pub fn scaled_pair(&self, a: f64) -> CliResult<(f64, f64)> {
        if self.scaled {
            if self.n != 1 {
                return Err(usage("--scaled parameters already absorb N; leave --n at 1"));
            }
            return Ok((a, self.gamma));
        }
        let s = to_scaled_monopolar(&MonopolarPhysical::new(self.n, a, self.gamma)?);
        Ok((s.a_scaled, s.gamma_scaled))
    }

    pub fn mono(&self, a: f64) -> CliResult<MonoParams> {
        let (a, gamma) = self.scaled_pair(a)?;
        Ok(MonoParams::new(a, gamma)?)
    }

    pub fn gpe(&self, a: f64) -> CliResult<GpeParams> {
        let (a, gamma) = self.scaled_pair(a)?;
        Ok(GpeParams::new(a, gamma)?)
    }

    /// Input-unit scattering length of a scaled one.
    pub fn unscale_a(&self, a_scaled: f64) -> f64 {
        if self.scaled {
            a_scaled
        } else {
            let n = self.n as f64;
            a_scaled / (n * n)
        }
    }

    pub fn describe(&self, a: f64) -> CliResult<Table> {
        let (a_s, g_s) = self.scaled_pair(a)?;
        let mut t = Table::new();
        t.insert("a_scaled".into(), a_s.into());
        t.insert("gamma_scaled".into(), g_s.into());
        Ok(t)
    }
}

/// Axisymmetric trap of the dipolar gas. Physical input is
/// `(N, γ_ρ, γ_z)`; with `--scaled` it is `(N² γ̄, λ)`. The scattering length
/// `a/a_d` needs no scaling.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DipTrap {
    /// Particle number.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long)]
    pub gamma_rho: Option<f64>,
    #[arg(long)]
    pub gamma_z: Option<f64>,
    /// Scaled mean trap frequency `N² γ̄` (with `--scaled`).
    #[arg(long)]
    pub gamma_bar: Option<f64>,
    /// Aspect ratio `γ_z/γ_ρ` (with `--scaled`).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Read the trap as `--gamma-bar` and `--lambda`.
    #[arg(long)]
    pub scaled: bool,
}

impl DipTrap {
    pub fn scaled(&self, a: f64) -> CliResult<DipolarScaled> {
        if self.scaled {
            if self.n != 1 || self.gamma_rho.is_some() || self.gamma_z.is_some() {
                return Err(usage("--scaled takes --gamma-bar and --lambda only"));
            }
            let (Some(g), Some(l)) = (self.gamma_bar, self.lambda) else {
                return Err(usage("--scaled needs --gamma-bar and --lambda"));
            };
            return Ok(DipolarScaled::new(g, l, a)?);
        }
        if self.gamma_bar.is_some() || self.lambda.is_some() {
            return Err(usage("--gamma-bar and --lambda need --scaled"));
        }
        let (Some(gr), Some(gz)) = (self.gamma_rho, self.gamma_z) else {
            return Err(usage("physical input needs --gamma-rho and --gamma-z"));
        };
        Ok(to_scaled_dipolar(&DipolarPhysical::new(self.n, a, gr, gz)?))
    }

    pub fn params(&self, a: f64) -> CliResult<DipolarParams> {
        Ok(DipolarParams::new(self.scaled(a)?))
    }

    pub fn describe(&self, a: f64) -> CliResult<Table> {
        let s = self.scaled(a)?;
        let mut t = Table::new();
        t.insert("gamma_bar_scaled".into(), s.gamma_bar_scaled.into());
        t.insert("lambda".into(), s.lambda.into());
        t.insert("a_scaled".into(), s.a_scaled.into());
        Ok(t)
    }
}
