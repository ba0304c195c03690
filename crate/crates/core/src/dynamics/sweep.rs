use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::Termination;
use super::lyapunov::{classify, mle, ClassifyThresholds, MleOptions, OrbitClass};
use super::section::{seed_on_section, Section, SeedWindow};
use super::{HamSystem, PhaseState};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub window: SeedWindow,
    pub seeds: usize,
    pub section: Section,
    pub mle: MleOptions,
    pub thresholds: ClassifyThresholds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedClassification {
    pub index: usize,
    pub seed: PhaseState<2>,
    pub class: OrbitClass,
    pub mle: f64,
    pub termination: Termination,
    pub t_reached: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyClassification {
    pub energy: f64,
    pub seeds: Vec<SeedClassification>,
}

impl EnergyClassification {
    /// Share of the realized seeds that stay bound and regular; zero when the
    /// energy shell misses the window.
    pub fn island_fraction(&self) -> f64 {
        if self.seeds.is_empty() {
            return 0.0;
        }
        let regular = self.seeds.iter().filter(|s| s.class == OrbitClass::BoundRegular).count();
        regular as f64 / self.seeds.len() as f64
    }

    pub fn count(&self, class: OrbitClass) -> usize {
        self.seeds.iter().filter(|s| s.class == class).count()
    }
}

/// Seeds each energy on the section and classifies every orbit. All orbits
/// run in parallel; results keep energy and seed order.
pub fn classify_sweep<S: HamSystem<2>>(sys: &S, energies: &[f64], opts: &SweepOptions) -> Result<Vec<EnergyClassification>> {
    let seeded = energies
        .iter()
        .map(|&e| seed_on_section(sys, e, &opts.window, opts.seeds, &opts.section))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, PhaseState<2>)> = seeded
        .iter()
        .enumerate()
        .flat_map(|(ie, seeds)| seeds.iter().enumerate().map(move |(is, s)| (ie, is, *s)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(ie, index, seed)| {
            mle(sys, &seed, &opts.mle).map(|r| {
                let class = classify(r.termination, r.last_quarter, &opts.thresholds);
                (ie, SeedClassification { index, seed, class, mle: r.last_quarter, termination: r.termination, t_reached: r.t_reached })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<EnergyClassification> = energies.iter().map(|&energy| EnergyClassification { energy, seeds: Vec::new() }).collect();
    for (ie, c) in results {
        out[ie].seeds.push(c);
    }
    Ok(out)
}
