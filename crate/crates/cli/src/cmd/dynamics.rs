//! Trajectories, Poincaré sections and orbit classification.

use std::path::Path;

use clap::Args;
use lrbec::dynamics::{
    classify_sweep, integrate, poincare, seed_on_section, ClassifyThresholds, MleOptions, PhaseState, Section, SectionOptions,
    SeedWindow, SweepOptions,
};
use serde::{Deserialize, Serialize};

use super::{insert, Common, Experiment, Integrator, Report};
use crate::error::{usage, CliResult};
use crate::table::{float, Table};
use crate::units::{DipTrap, MonoTrap};

/// Phase portrait of the `1/r` gas: one orbit per starting width, started at
/// rest. Rows: `orbit t q p E`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Portrait {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: MonoTrap,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: Integrator,
    /// Scattering length.
    #[arg(long)]
    pub a: f64,
    /// Starting widths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q0: Vec<f64>,
    /// Common starting momentum.
    #[arg(long, default_value_t = 0.0)]
    pub p0: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
}

impl Experiment for Portrait {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        if self.q0.is_empty() {
            return Err(usage("--q0 needs at least one width"));
        }
        let sys = self.trap.mono(self.a)?;
        let opts = lrbec::dynamics::IntegrateOptions { sample_every: self.sample_every, ..self.integrator.options() };
        let mut table = Table::create(out, &["orbit", "t", "q", "p", "E"])?;
        let mut terminations = Vec::new();
        for (orbit, &q0) in self.q0.iter().enumerate() {
            let traj = integrate(&sys, &PhaseState::new([q0], [self.p0]), self.t_end, &opts)?;
            for ((t, s), e) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
                table.row(&[orbit.to_string(), float(*t), float(s.q[0]), float(s.p[0]), float(*e)])?;
            }
            terminations.push(traj.termination.as_str());
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a)?, ..Default::default() };
        insert(&mut report.termination, "status", "completed");
        insert(&mut report.termination, "rows", rows as i64);
        insert(&mut report.termination, "orbits", terminations);
        Ok(report)
    }
}

/// Seeding window in the recorded `(q_ρ, p_ρ)` plane.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Window {
    #[arg(long)]
    pub q_min: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Upper bound on the number of seeds per energy.
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
}

impl Window {
    fn seed_window(&self) -> CliResult<SeedWindow> {
        match (self.q_min, self.q_max, self.p_min, self.p_max) {
            (Some(a), Some(b), Some(c), Some(d)) => Ok(SeedWindow { q: (a, b), p: (c, d) }),
            _ => Err(usage("the seed window needs --q-min, --q-max, --p-min and --p-max")),
        }
    }
}

/// Surface of section `p_z = 0` of the dipolar gas at one energy.
/// Rows: `orbit t re_A_rho im_A_rho termination`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Poincare {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: DipTrap,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: Integrator,
    #[command(flatten)]
    #[serde(flatten)]
    pub window: Window,
    /// Scattering length `a/a_d`.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    /// Scaled energy `N·E`.
    #[arg(long)]
    pub energy: Option<f64>,
    /// Crossings recorded per orbit.
    #[arg(long, default_value_t = 200)]
    pub crossings: usize,
    /// Time limit per orbit.
    #[arg(long, default_value_t = 1e5)]
    pub t_max: f64,
}

impl Experiment for Poincare {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        let energy = self.energy.ok_or_else(|| usage("poincare needs --energy"))?;
        let sys = self.trap.params(self.a)?;
        let section = Section::default();
        let seeds = seed_on_section(&sys, energy, &self.window.seed_window()?, self.window.seeds, &section)?;
        let opts = SectionOptions {
            section,
            n_crossings: self.crossings,
            t_max: self.t_max,
            integrate: self.integrator.options(),
            ..Default::default()
        };
        let traces = poincare(&sys, &seeds, &opts)?;
        let mut table = Table::create(out, &["orbit", "t", "re_A_rho", "im_A_rho", "termination"])?;
        for trace in &traces {
            for pt in &trace.points {
                table.row(&[trace.orbit.to_string(), float(pt.t), float(pt.re_a_rho), float(pt.im_a_rho), trace.termination.as_str().into()])?;
            }
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a)?, ..Default::default() };
        insert(&mut report.parameters, "energy", energy);
        insert(&mut report.termination, "status", if seeds.is_empty() { "empty-shell" } else { "completed" });
        insert(&mut report.termination, "rows", rows as i64);
        insert(&mut report.termination, "orbits", traces.iter().map(|t| t.termination.as_str()).collect::<Vec<_>>());
        Ok(report)
    }
}

/// Maximal Lyapunov exponent and orbit class for every seed of a window at
/// several energies. Rows: `energy seed q_rho p_rho mle class termination`;
/// island fractions go to the manifest.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifySweep {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: DipTrap,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: Integrator,
    #[command(flatten)]
    #[serde(flatten)]
    pub window: Window,
    /// Scattering length `a/a_d`.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    /// Scaled energies `N·E`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub energies: Vec<f64>,
    /// Integration time of each exponent estimate.
    #[arg(long, default_value_t = 5e3)]
    pub t_end: f64,
    /// Renormalization interval.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Initial separation of the shadow orbit.
    #[arg(long, default_value_t = 1e-8)]
    pub d0: f64,
    /// Exponents above this are chaotic.
    #[arg(long, default_value_t = 4.5e-3)]
    pub mle_threshold: f64,
}

impl Experiment for ClassifySweep {
    fn common(&self) -> &Common {
        &self.common
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        if self.energies.is_empty() {
            return Err(usage("classify-sweep needs --energies"));
        }
        let sys = self.trap.params(self.a)?;
        let opts = SweepOptions {
            window: self.window.seed_window()?,
            seeds: self.window.seeds,
            section: Section::default(),
            mle: MleOptions { t_end: self.t_end, tau: self.tau, d0: self.d0, integrate: self.integrator.options() },
            thresholds: ClassifyThresholds { mle: self.mle_threshold },
        };
        let sweep = classify_sweep(&sys, &self.energies, &opts)?;
        let mut table = Table::create(out, &["energy", "seed", "q_rho", "p_rho", "mle", "class", "termination"])?;
        for e in &sweep {
            for s in &e.seeds {
                table.row(&[
                    float(e.energy),
                    s.index.to_string(),
                    float(s.seed.q[0]),
                    float(s.seed.p[0]),
                    float(s.mle),
                    s.class.as_str().into(),
                    s.termination.as_str().into(),
                ])?;
            }
        }
        let rows = table.finish()?;

        let mut report = Report { parameters: self.trap.describe(self.a)?, ..Default::default() };
        insert(&mut report.termination, "status", "completed");
        insert(&mut report.termination, "rows", rows as i64);
        insert(&mut report.termination, "energies", sweep.iter().map(|e| e.energy).collect::<Vec<_>>());
        insert(&mut report.termination, "seeds", sweep.iter().map(|e| e.seeds.len() as i64).collect::<Vec<_>>());
        insert(&mut report.termination, "island_fractions", sweep.iter().map(|e| e.island_fraction()).collect::<Vec<_>>());
        Ok(report)
    }
}
