//! Fixed-point sweeps and energy landscapes of the variational systems.

use std::path::Path;

use clap::Args;
use lrbec::dipolar::{dip_critical_a, dip_fixed_points, dip_landscape};
use lrbec::mono::{mono_critical_a, mono_fixed_points};
use serde::{Deserialize, Serialize};

use super::{insert, linspace, Common, Experiment, Report};
use crate::error::{usage, CliResult};
use crate::table::{float, Table};
use crate::units::{DipTrap, MonoTrap};

/// Stationary widths of the `1/r` gas over a range of scattering lengths.
/// Rows: `a branch q E mu kind`. The fold is added as a sweep node when it
/// falls inside the range.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BifurcateMono {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: MonoTrap,
    #[arg(long, default_value_t = -1.3)]
    pub a_min: f64,
    #[arg(long, default_value_t = -0.2)]
    pub a_max: f64,
    /// Number of intervals between `a-min` and `a-max`.
    #[arg(long, default_value_t = 110)]
    pub a_steps: usize,
}

impl Experiment for BifurcateMono {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        if !(self.a_min <= self.a_max) {
            return Err(usage("--a-min must not exceed --a-max"));
        }
        let (_, gamma) = self.trap.scaled_pair(self.a_min)?;
        let fold_scaled = mono_critical_a(gamma);
        let fold = self.trap.unscale_a(fold_scaled);
        let mut nodes = linspace(self.a_min, self.a_max, self.a_steps);
        if (self.a_min..=self.a_max).contains(&fold) {
            nodes.push(fold);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
        }

        let mut table = Table::create(out, &["a", "branch", "q", "E", "mu", "kind"])?;
        for &a in &nodes {
            for (branch, fp) in mono_fixed_points(&self.trap.mono(a)?).iter().enumerate() {
                table.row(&[float(a), branch.to_string(), float(fp.q_star), float(fp.energy), float(fp.mu), fp.kind.as_str().into()])?;
            }
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a_min)?, ..Default::default() };
        report.parameters.remove("a_scaled");
        insert(&mut report.termination, "status", "completed");
        insert(&mut report.termination, "rows", rows as i64);
        insert(&mut report.termination, "nodes", nodes.len() as i64);
        insert(&mut report.termination, "critical_a", fold);
        insert(&mut report.termination, "critical_a_scaled", fold_scaled);
        Ok(report)
    }
}

/// Stationary widths of the dipolar gas over a range of `a/a_d`.
/// Rows: `a branch q_rho q_z NE Nmu kind`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BifurcateDip {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: DipTrap,
    #[arg(long, default_value_t = -0.2)]
    pub a_min: f64,
    #[arg(long, default_value_t = 0.2)]
    pub a_max: f64,
    #[arg(long, default_value_t = 80)]
    pub a_steps: usize,
    /// Bisection tolerance of the fold search.
    #[arg(long, default_value_t = 1e-8)]
    pub fold_tol: f64,
}

impl Experiment for BifurcateDip {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        if !(self.a_min <= self.a_max) {
            return Err(usage("--a-min must not exceed --a-max"));
        }
        let base = self.trap.params(self.a_min)?;
        let nodes = linspace(self.a_min, self.a_max, self.a_steps);
        let mut table = Table::create(out, &["a", "branch", "q_rho", "q_z", "NE", "Nmu", "kind"])?;
        let mut warnings = Vec::new();
        for &a in &nodes {
            let fps = dip_fixed_points(&base.with_scattering_length(a));
            for (branch, fp) in fps.points.iter().enumerate() {
                table.row(&[
                    float(a),
                    branch.to_string(),
                    float(fp.q_rho_star),
                    float(fp.q_z_star),
                    float(fp.energy),
                    float(fp.mu),
                    fp.kind.as_str().into(),
                ])?;
            }
            warnings.extend(fps.warnings.into_iter().map(|w| format!("a = {a}: {w}")));
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a_min)?, ..Default::default() };
        report.parameters.remove("a_scaled");
        insert(&mut report.termination, "status", "completed");
        insert(&mut report.termination, "rows", rows as i64);
        if let Ok(fold) = dip_critical_a(&base, self.a_min, self.a_max, self.fold_tol) {
            insert(&mut report.termination, "critical_a", fold);
        }
        insert(&mut report.termination, "warnings", warnings);
        Ok(report)
    }
}

/// Variational potential `V(q_ρ, q_z)` of the dipolar gas on a logarithmic
/// raster. Rows: `q_rho q_z V`. The window defaults to 0.05–5 oscillator widths.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Landscape {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: DipTrap,
    /// Scattering length `a/a_d`.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long)]
    pub q_rho_min: Option<f64>,
    #[arg(long)]
    pub q_rho_max: Option<f64>,
    #[arg(long)]
    pub q_z_min: Option<f64>,
    #[arg(long)]
    pub q_z_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub n_rho: usize,
    #[arg(long, default_value_t = 101)]
    pub n_z: usize,
}

impl Experiment for Landscape {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        let params = self.trap.params(self.a)?;
        let (r0, z0) = params.oscillator_widths();
        let q_rho = (self.q_rho_min.unwrap_or(0.05 * r0), self.q_rho_max.unwrap_or(5.0 * r0));
        let q_z = (self.q_z_min.unwrap_or(0.05 * z0), self.q_z_max.unwrap_or(5.0 * z0));
        for (lo, hi) in [q_rho, q_z] {
            if !(lo > 0.0 && hi >= lo) {
                return Err(usage("landscape window must satisfy 0 < min <= max"));
            }
        }
        if self.n_rho == 0 || self.n_z == 0 {
            return Err(usage("raster needs at least one node per axis"));
        }
        let mut table = Table::create(out, &["q_rho", "q_z", "V"])?;
        for [r, z, v] in dip_landscape(&params, q_rho, q_z, self.n_rho, self.n_z) {
            table.row(&[float(r), float(z), float(v)])?;
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a)?, ..Default::default() };
        insert(&mut report.termination, "status", "completed");
        insert(&mut report.termination, "rows", rows as i64);
        insert(&mut report.termination, "q_rho_window", vec![q_rho.0, q_rho.1]);
        insert(&mut report.termination, "q_z_window", vec![q_z.0, q_z.1]);
        Ok(report)
    }
}
