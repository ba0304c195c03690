//! Integration and chaos toolkit for the variational Hamiltonian systems.
//!
//! Both systems have a kinetic energy `|p|²/(2m)` separable from the
//! potential, so everything here is written against [`HamSystem`], with the
//! phase-space dimension fixed at compile time.

mod integrator;
mod lyapunov;
mod section;
mod sweep;

pub use integrator::{integrate, step, IntegrateOptions, Scheme, StepError, Termination, Trajectory};
pub use lyapunov::{classify, mle, ClassifyThresholds, MleOptions, MleResult, OrbitClass};
pub use section::{
    poincare, seed_on_section, Crossing, CrossingDirection, Section, SectionOptions, SectionPoint,
    SectionTrace, SeedWindow,
};
pub use sweep::{classify_sweep, EnergyClassification, SeedClassification, SweepOptions};

use serde::{Deserialize, Serialize};

/// Canonical coordinates of a `D`-degree-of-freedom system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState<const D: usize> {
    #[serde(with = "serde_arrays")]
    pub q: [f64; D],
    #[serde(with = "serde_arrays")]
    pub p: [f64; D],
}

impl<const D: usize> PhaseState<D> {
    pub fn new(q: [f64; D], p: [f64; D]) -> Self {
        Self { q, p }
    }

    pub fn at_rest(q: [f64; D]) -> Self {
        Self { q, p: [0.0; D] }
    }

    pub fn flip_momenta(&self) -> Self {
        let mut p = self.p;
        p.iter_mut().for_each(|x| *x = -*x);
        Self { q: self.q, p }
    }
}

/// A Hamiltonian `H = |p|²/(2m) + V(q)` on the open positive orthant.
pub trait HamSystem<const D: usize>: Sync {
    fn mass(&self) -> f64;

    fn potential(&self, q: &[f64; D]) -> f64;

    /// `-∇V(q)`.
    fn force(&self, q: &[f64; D]) -> [f64; D];

    /// Characteristic width; collapse and escape thresholds are multiples of it.
    fn length_scale(&self) -> f64;

    /// Characteristic oscillation time, the unit for step sizes and
    /// Lyapunov renormalization intervals.
    fn time_scale(&self) -> f64;

    fn kinetic(&self, p: &[f64; D]) -> f64 {
        p.iter().map(|x| x * x).sum::<f64>() / (2.0 * self.mass())
    }

    fn energy(&self, s: &PhaseState<D>) -> f64 {
        self.kinetic(&s.p) + self.potential(&s.q)
    }

    fn in_domain(&self, q: &[f64; D]) -> bool {
        q.iter().all(|&x| x > 0.0 && x.is_finite())
    }

    /// Momentum unit matching [`length_scale`](Self::length_scale) and
    /// [`time_scale`](Self::time_scale).
    fn momentum_scale(&self) -> f64 {
        self.mass() * self.length_scale() / self.time_scale()
    }
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(a: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        a.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(d: De) -> Result<[f64; D], De::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"fixed-size array"))
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// `H = p²/2 + ω² q²/2` shifted to `q₀ = 1` so it lives in the positive domain.
    pub struct Harmonic {
        pub omega: f64,
    }

    impl HamSystem<1> for Harmonic {
        fn mass(&self) -> f64 {
            1.0
        }
        fn potential(&self, q: &[f64; 1]) -> f64 {
            0.5 * self.omega * self.omega * (q[0] - 1.0).powi(2)
        }
        fn force(&self, q: &[f64; 1]) -> [f64; 1] {
            [-self.omega * self.omega * (q[0] - 1.0)]
        }
        fn length_scale(&self) -> f64 {
            1.0
        }
        fn time_scale(&self) -> f64 {
            1.0 / self.omega
        }
    }

    /// Two uncoupled oscillators, integrable.
    pub struct Harmonic2 {
        pub omega: [f64; 2],
    }

    impl HamSystem<2> for Harmonic2 {
        fn mass(&self) -> f64 {
            1.0
        }
        fn potential(&self, q: &[f64; 2]) -> f64 {
            (0..2).map(|i| 0.5 * self.omega[i].powi(2) * (q[i] - 1.0).powi(2)).sum()
        }
        fn force(&self, q: &[f64; 2]) -> [f64; 2] {
            [0, 1].map(|i| -self.omega[i].powi(2) * (q[i] - 1.0))
        }
        fn length_scale(&self) -> f64 {
            1.0
        }
        fn time_scale(&self) -> f64 {
            1.0
        }
    }
}
