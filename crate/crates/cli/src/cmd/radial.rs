//! Grid solutions of the radial `1/r` Gross-Pitaevskii equation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lrbec::radial::{
    evolve_track, ground_state_itp, hartree_1r, observables, read_checkpoint, stationary_state, stretch, write_checkpoint, Branch, EvolveOptions,
    GpeParams, ItpOptions, RadialGrid, RadialState, StationaryOptions, StationaryResult,
};
use serde::{Deserialize, Serialize};
use toml::Table as Doc;

use super::{insert, Common, Experiment, Report};
use crate::error::{usage, CliError, CliResult};
use crate::table::{float, Table};
use crate::units::MonoTrap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchArg {
    Stable,
    Unstable,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Stable => Branch::Stable,
            BranchArg::Unstable => Branch::Unstable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Newton relaxation of the discretized equation.
    Newton,
    /// Imaginary-time propagation (stable branch only).
    Itp,
}

/// Radial grid and stationary-solver flags.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Solver {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: MonoTrap,
    /// Scattering length.
    #[arg(long)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = BranchArg::Stable)]
    pub branch: BranchArg,
    #[arg(long, value_enum, default_value_t = Method::Newton)]
    pub method: Method,
    /// Outer radius of the grid.
    #[arg(long, default_value_t = 64.0)]
    pub r_max: f64,
    /// Interior grid points.
    #[arg(long, default_value_t = 4095)]
    pub grid_n: usize,
    /// Newton tolerance on the relative update.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    /// Imaginary time step.
    #[arg(long, default_value_t = 1e-3)]
    pub itp_dt: f64,
}

impl Solver {
    fn params(&self) -> CliResult<GpeParams> {
        self.trap.gpe(self.a)
    }

    fn solve(&self, params: &GpeParams) -> CliResult<(StationaryResult, Option<usize>)> {
        let grid = RadialGrid::new(self.r_max, self.grid_n)?;
        match self.method {
            Method::Newton => {
                let opts = StationaryOptions { grid, max_iterations: self.max_iterations, tol: self.tol };
                Ok((stationary_state(params, self.branch.into(), &opts)?, None))
            }
            Method::Itp => {
                if self.branch != BranchArg::Stable {
                    return Err(usage("imaginary-time propagation only reaches the stable branch"));
                }
                let r = ground_state_itp(params, &ItpOptions { grid, dt: self.itp_dt, ..Default::default() })?;
                Ok((r.stationary, Some(r.steps)))
            }
        }
    }

    fn describe(&self) -> CliResult<Doc> {
        let mut t = self.trap.describe(self.a)?;
        insert(&mut t, "r_max", self.r_max);
        insert(&mut t, "grid_n", self.grid_n as i64);
        Ok(t)
    }
}

fn save_checkpoint(path: &Path, state: &RadialState) -> CliResult<()> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    write_checkpoint(&mut w, state)?;
    w.flush().map_err(CliError::io(path))
}

/// Stationary orbital on one branch. Rows: `r re_psi im_psi U` with the
/// long-range potential `U`; the summary goes to the manifest.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Stationary {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: Solver,
    /// Also write the state as a binary checkpoint.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

impl Experiment for Stationary {
    fn common(&self) -> &Common {
        &self.common
    }

    fn extra_outputs(&self) -> Vec<&Path> {
        self.checkpoint.as_deref().into_iter().collect()
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        let params = self.solver.params()?;
        let (st, steps) = self.solver.solve(&params)?;
        let psi = st.state.psi();
        let u = hartree_1r(&st.state);
        let mut table = Table::create(out, &["r", "re_psi", "im_psi", "U"])?;
        for (i, (p, ui)) in psi.iter().zip(&u).enumerate() {
            table.row(&[float(st.state.grid.r(i)), float(p.re), float(p.im), float(*ui)])?;
        }
        let rows = table.finish()?;
        if let Some(path) = &self.checkpoint {
            save_checkpoint(path, &st.state)?;
        }

        let o = observables(&st.state, &params);
        let mut report = Report { parameters: self.solver.describe()?, ..Default::default() };
        let t = &mut report.termination;
        insert(t, "status", "converged");
        insert(t, "rows", rows as i64);
        insert(t, "branch", st.branch.as_str());
        insert(t, "mu", st.mu);
        insert(t, "energy", st.energy);
        insert(t, "residual", st.residual);
        insert(t, "rms_width", o.rms_width);
        if let Some(n) = steps {
            insert(t, "itp_steps", n as i64);
        }
        Ok(report)
    }
}

/// Real-time split-step evolution of a stationary state after the width
/// perturbation `ψ(r) → f ψ(r f^{2/3})`. Rows: `t width E peak_density`.
/// Collapse ends the run early and is reported, not treated as an error.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Evolve {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: Solver,
    /// Width perturbation factor `f`.
    #[arg(long, default_value_t = 1.0)]
    pub stretch: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 100)]
    pub sample_every: usize,
    /// Relative energy change that flags a collapse the grid cannot follow.
    #[arg(long, default_value_t = 1e-2)]
    pub max_energy_drift: f64,
    /// Start from this checkpoint instead of solving for a stationary state.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Write the final state as a binary checkpoint.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

impl Experiment for Evolve {
    fn common(&self) -> &Common {
        &self.common
    }

    fn extra_outputs(&self) -> Vec<&Path> {
        self.checkpoint.as_deref().into_iter().collect()
    }

    fn run(&self, out: &Path) -> CliResult<Report> {
        let params = self.solver.params()?;
        let mut report = Report { parameters: self.solver.describe()?, ..Default::default() };
        let start = match &self.initial {
            Some(path) => {
                let file = File::open(path).map_err(CliError::io(path))?;
                read_checkpoint(BufReader::new(file))?
            }
            None => {
                let (st, _) = self.solver.solve(&params)?;
                insert(&mut report.parameters, "stationary_mu", st.mu);
                insert(&mut report.parameters, "stationary_energy", st.energy);
                st.state
            }
        };
        let state0 = stretch(&start, self.stretch)?;
        let opts = EvolveOptions {
            t_end: self.t_end,
            dt: self.dt,
            sample_every: self.sample_every,
            max_energy_drift: self.max_energy_drift,
            ..Default::default()
        };
        let track = evolve_track(&state0, &params, &opts)?;
        let mut table = Table::create(out, &["t", "width", "E", "peak_density"])?;
        for s in &track.samples {
            table.row(&[float(s.t), float(s.rms_width), float(s.energy), float(s.peak_density)])?;
        }
        let rows = table.finish()?;
        if let Some(path) = &self.checkpoint {
            save_checkpoint(path, &track.final_state)?;
        }

        let t = &mut report.termination;
        insert(t, "status", track.termination.as_str());
        insert(t, "rows", rows as i64);
        if let Some(last) = track.samples.last() {
            insert(t, "t_final", last.t);
            insert(t, "width_final", last.rms_width);
        }
        Ok(report)
    }
}
