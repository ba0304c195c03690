use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lrbec::dynamics::{IntegrateOptions, Scheme};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::Table;

use crate::error::CliResult;

pub mod dynamics;
pub mod radial;
pub mod variational;

/// Flags every subcommand takes.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Common {
    /// Output table; the manifest goes to `<out>.manifest.toml`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// TOML document whose keys override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replace existing output and manifest files.
    #[arg(long)]
    pub overwrite: bool,
}

/// What a finished run reports for its manifest.
#[derive(Debug, Default)]
pub struct Report {
    pub parameters: Table,
    pub termination: Table,
}

pub trait Experiment: Serialize + DeserializeOwned {
    fn common(&self) -> &Common;

    /// Files written besides the table and its manifest.
    fn extra_outputs(&self) -> Vec<&Path> {
        Vec::new()
    }

    /// Validates, computes and writes the table to `out`.
    fn run(&self, out: &Path) -> CliResult<Report>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Verlet,
    Yoshida4,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Verlet => Scheme::Verlet,
            SchemeArg::Yoshida4 => Scheme::Yoshida4,
        }
    }
}

/// Fixed-step integrator flags, in units of the system's time scale.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Integrator {
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Verlet)]
    pub scheme: SchemeArg,
}

impl Integrator {
    pub fn options(&self) -> IntegrateOptions {
        IntegrateOptions { dt: self.dt, scheme: self.scheme.into(), ..Default::default() }
    }
}

/// `steps + 1` evenly spaced values from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect()
}

pub fn insert(t: &mut Table, key: &str, value: impl Into<toml::Value>) {
    t.insert(key.to_owned(), value.into());
}
