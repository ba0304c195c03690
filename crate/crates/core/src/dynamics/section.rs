//! Surfaces of section for two-degree-of-freedom systems.
//!
//! The section plane is `p_k = 0` for one momentum index `k`; the other
//! degree of freedom is recorded in the complex width parametrization
//! `A = p/(4q) + i/(c q²)`, with `c = 4` for the radial and `c = 8` for the
//! axial width.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{IntegrateOptions, Propagator, Termination};
use super::{HamSystem, PhaseState};
use crate::error::{invalid, Error, Result};
use crate::roots::{brent, log_grid_roots};

/// Which sign changes of the section momentum count as crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingDirection {
    /// Momentum increasing through zero.
    #[default]
    Upward,
    Downward,
    Both,
}

/// Direction of an individual crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Crossing {
    Upward,
    Downward,
}

impl Crossing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Crossing::Upward => "up",
            Crossing::Downward => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    /// Index of the momentum that vanishes on the plane.
    pub momentum_index: usize,
    pub direction: CrossingDirection,
}

impl Default for Section {
    /// The `p_z = 0` plane, upward crossings.
    fn default() -> Self {
        Self { momentum_index: 1, direction: CrossingDirection::Upward }
    }
}

impl Section {
    fn validate(&self) -> Result<()> {
        if self.momentum_index > 1 {
            return Err(invalid("section momentum index must be 0 or 1"));
        }
        Ok(())
    }

    /// Index of the recorded degree of freedom.
    pub fn recorded_index(&self) -> usize {
        1 - self.momentum_index
    }

    /// `(Re A, Im A)` of the recorded degree of freedom.
    pub fn project(&self, s: &PhaseState<2>) -> (f64, f64) {
        let r = self.recorded_index();
        let c = if r == 0 { 4.0 } else { 8.0 };
        (s.p[r] / (4.0 * s.q[r]), 1.0 / (c * s.q[r] * s.q[r]))
    }

    fn classify(&self, before: f64, after: f64) -> Option<Crossing> {
        let up = before < 0.0 && after >= 0.0;
        let down = before > 0.0 && after <= 0.0;
        match self.direction {
            CrossingDirection::Upward if up => Some(Crossing::Upward),
            CrossingDirection::Downward if down => Some(Crossing::Downward),
            CrossingDirection::Both if up => Some(Crossing::Upward),
            CrossingDirection::Both if down => Some(Crossing::Downward),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub orbit: usize,
    /// Crossing time in units of the system time scale.
    pub t: f64,
    pub re_a_rho: f64,
    pub im_a_rho: f64,
    pub crossing: Crossing,
    pub state: PhaseState<2>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionTrace {
    pub orbit: usize,
    pub points: Vec<SectionPoint>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionOptions {
    pub section: Section,
    pub n_crossings: usize,
    /// Give up after this time (system units) and report `step-limit`.
    pub t_max: f64,
    pub integrate: IntegrateOptions,
    /// Allowed relative energy spread among the seeds.
    pub energy_tol: f64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self {
            section: Section::default(),
            n_crossings: 200,
            t_max: 1e5,
            integrate: IntegrateOptions::default(),
            energy_tol: 1e-8,
        }
    }
}

/// Rectangular seeding window in the recorded `(q, p)` plane, in absolute units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedWindow {
    pub q: (f64, f64),
    pub p: (f64, f64),
}

/// Crossing sequences for every seed, in seed order.
pub fn poincare<S: HamSystem<2>>(sys: &S, seeds: &[PhaseState<2>], opts: &SectionOptions) -> Result<Vec<SectionTrace>> {
    opts.section.validate()?;
    opts.integrate.validate()?;
    if let Some(first) = seeds.first() {
        let e0 = sys.energy(first);
        let spread = seeds.iter().map(|s| ((sys.energy(s) - e0) / e0).abs()).fold(0.0, f64::max);
        if !(spread <= opts.energy_tol) {
            return Err(Error::EnergyMismatch(spread));
        }
    }
    if let Some(bad) = seeds.iter().find(|s| !sys.in_domain(&s.q)) {
        return Err(invalid(format!("seed {:?} outside the physical domain", bad.q)));
    }
    Ok(seeds.par_iter().enumerate().map(|(i, s)| trace(sys, i, s, opts)).collect())
}

fn trace<S: HamSystem<2>>(sys: &S, orbit: usize, seed: &PhaseState<2>, opts: &SectionOptions) -> SectionTrace {
    let io = &opts.integrate;
    let k = opts.section.momentum_index;
    let dt = io.dt * sys.time_scale();
    let max_steps = ((opts.t_max / io.dt).ceil() as usize).min(io.max_steps);
    let mut prop = Propagator::new(sys, *seed, dt, io.scheme);
    let mut points = Vec::with_capacity(opts.n_crossings);
    let termination = loop {
        if points.len() >= opts.n_crossings {
            break Termination::Completed;
        }
        if prop.steps >= max_steps {
            break Termination::StepLimit;
        }
        let before = prop.state;
        if prop.advance().is_err() {
            break Termination::Collapse;
        }
        if let Some(ev) = io.event(sys, &prop.state) {
            break ev;
        }
        if let Some(crossing) = opts.section.classify(before.p[k], prop.state.p[k]) {
            let (tau, on_plane) = refine_crossing(sys, &before, dt, io, k);
            let (re, im) = opts.section.project(&on_plane);
            points.push(SectionPoint {
                orbit,
                t: (prop.steps - 1) as f64 * io.dt + tau / sys.time_scale(),
                re_a_rho: re,
                im_a_rho: im,
                crossing,
                state: on_plane,
            });
        }
    };
    SectionTrace { orbit, points, termination }
}

/// Sub-step length `τ ∈ (0, dt]` from `before` that lands on `p_k = 0`, and
/// the state there. The sub-step uses the same symplectic map, so the
/// refined point stays on the integrator's energy shell.
fn refine_crossing<S: HamSystem<2>>(
    sys: &S,
    before: &PhaseState<2>,
    dt: f64,
    io: &IntegrateOptions,
    k: usize,
) -> (f64, PhaseState<2>) {
    let advance = |tau: f64| {
        let mut p = Propagator::new(sys, *before, tau, io.scheme);
        p.advance_by(tau).map(|_| p.state)
    };
    let pk = |tau: f64| if tau == 0.0 { before.p[k] } else { advance(tau).map_or(f64::NAN, |s| s.p[k]) };
    let tau = brent(pk, 0.0, dt, 0.0).unwrap_or(dt);
    let state = if tau == 0.0 { *before } else { advance(tau).unwrap_or(*before) };
    (tau, state)
}

/// Seeds on the section plane at total energy `energy`.
///
/// An `n_q × n_p` grid with `n_q·n_p ≥ n_seeds` nodes (a single column when
/// the momentum window is degenerate) is laid over the window in the recorded
/// `(q, p)`. For each node the section momentum is set to zero and every root
/// of `H = energy` in the remaining width is kept whose force points in the
/// section's crossing direction. At most `n_seeds` states are returned, in
/// grid order; the set is empty when the energy shell misses the window.
pub fn seed_on_section<S: HamSystem<2>>(
    sys: &S,
    energy: f64,
    window: &SeedWindow,
    n_seeds: usize,
    section: &Section,
) -> Result<Vec<PhaseState<2>>> {
    section.validate()?;
    let SeedWindow { q: (q_lo, q_hi), p: (p_lo, p_hi) } = *window;
    if !(q_lo > 0.0 && q_hi >= q_lo && p_hi >= p_lo) {
        return Err(invalid("seed window must have 0 < q_lo <= q_hi and p_lo <= p_hi"));
    }
    let r = section.recorded_index();
    let k = section.momentum_index;
    let (n_q, n_p) = if p_hi == p_lo {
        (n_seeds.max(1), 1)
    } else {
        let n_q = (n_seeds as f64).sqrt().ceil().max(1.0) as usize;
        (n_q, n_seeds.div_ceil(n_q).max(1))
    };
    let node = |lo: f64, hi: f64, i: usize, n: usize| if n == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
    let l = sys.length_scale();
    let mut seeds = Vec::new();
    for iq in 0..n_q {
        for ip in 0..n_p {
            let (qr, pr) = (node(q_lo, q_hi, iq, n_q), node(p_lo, p_hi, ip, n_p));
            let mut p = [0.0; 2];
            p[r] = pr;
            let target = energy - sys.kinetic(&p);
            let at = |x: f64| {
                let mut q = [0.0; 2];
                q[r] = qr;
                q[k] = x;
                q
            };
            let shell = |x: f64| sys.potential(&at(x)) - target;
            for x in log_grid_roots(shell, 1e-3 * l, 1e3 * l, 2000) {
                let s = PhaseState::new(at(x), p);
                let f = sys.force(&s.q)[k];
                let direction_ok = match section.direction {
                    CrossingDirection::Upward => f >= 0.0,
                    CrossingDirection::Downward => f <= 0.0,
                    CrossingDirection::Both => true,
                };
                if direction_ok && ((sys.energy(&s) - energy) / energy).abs() <= 1e-10 {
                    seeds.push(s);
                }
            }
        }
    }
    seeds.truncate(n_seeds);
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipolar::{dip_fixed_points, DipolarParams};
    use crate::dynamics::testing::Harmonic2;

    fn reference_trap() -> DipolarParams {
        DipolarParams::from_scaled(3.4e4, 6.0, 0.1).unwrap()
    }

    #[test]
    fn harmonic_crossings_are_periodic() {
        let sys = Harmonic2 { omega: [1.0, 2.0] };
        let seed = PhaseState::new([1.2, 0.5], [0.0, 0.0]);
        let opts = SectionOptions { n_crossings: 5, ..Default::default() };
        let traces = poincare(&sys, &[seed], &opts).unwrap();
        let pts = &traces[0].points;
        assert_eq!(pts.len(), 5);
        // Verlet rotates phase space at ω̃ = (2/dt) asin(ω dt/2) instead of ω.
        let dt = opts.integrate.dt;
        let period = std::f64::consts::TAU / ((2.0 / dt) * (2.0 * dt / 2.0).asin());
        for w in pts.windows(2) {
            assert!((w[1].t - w[0].t - period).abs() < 1e-9, "{}", w[1].t - w[0].t);
        }
        for p in pts {
            assert!(p.state.p[1].abs() < 1e-10);
            assert_eq!(p.crossing, Crossing::Upward);
        }
    }

    #[test]
    fn both_directions_doubles_the_rate() {
        let sys = Harmonic2 { omega: [1.0, 2.0] };
        let seed = PhaseState::new([1.2, 0.5], [0.0, 0.0]);
        let section = Section { direction: CrossingDirection::Both, ..Default::default() };
        let opts = SectionOptions { n_crossings: 6, section, ..Default::default() };
        let pts = &poincare(&sys, &[seed], &opts).unwrap()[0].points;
        assert!(pts.windows(2).all(|w| w[0].crossing != w[1].crossing));
        let dt = opts.integrate.dt;
        let half_period = std::f64::consts::PI / ((2.0 / dt) * (2.0 * dt / 2.0).asin());
        assert!((pts[1].t - pts[0].t - half_period).abs() < 1e-9);
    }

    #[test]
    fn mismatched_energies_are_rejected() {
        let sys = Harmonic2 { omega: [1.0, 2.0] };
        let seeds = [PhaseState::new([1.2, 0.5], [0.0, 0.0]), PhaseState::new([1.3, 0.5], [0.0, 0.0])];
        assert!(matches!(poincare(&sys, &seeds, &Default::default()), Err(Error::EnergyMismatch(_))));
    }

    #[test]
    fn seeds_below_the_ground_state_are_empty() {
        let p = reference_trap();
        let min = *dip_fixed_points(&p).minimum().unwrap();
        let w = SeedWindow { q: (0.5 * min.q_rho_star, 2.0 * min.q_rho_star), p: (-1.0, 1.0) };
        let seeds = seed_on_section(&p, 0.99 * min.energy, &w, 25, &Section::default()).unwrap();
        assert!(seeds.is_empty());
    }

    #[test]
    fn seeds_cluster_at_the_minimum_just_above_it() {
        let p = reference_trap();
        let min = *dip_fixed_points(&p).minimum().unwrap();
        // Odd grid so the centre node sits on the minimum.
        let w = SeedWindow { q: (0.9 * min.q_rho_star, 1.1 * min.q_rho_star), p: (-50.0, 50.0) };
        let seeds = seed_on_section(&p, min.energy * (1.0 + 1e-4), &w, 441, &Section::default()).unwrap();
        assert!(!seeds.is_empty());
        for s in &seeds {
            assert!((s.q[0] / min.q_rho_star - 1.0).abs() < 0.02);
            assert!((s.q[1] / min.q_z_star - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn seeds_lie_on_the_energy_shell() {
        let p = reference_trap();
        let min = *dip_fixed_points(&p).minimum().unwrap();
        let w = SeedWindow { q: (0.8 * min.q_rho_star, 1.25 * min.q_rho_star), p: (0.0, 0.0) };
        let seeds = seed_on_section(&p, 4.5e5, &w, 20, &Section::default()).unwrap();
        assert!(seeds.len() >= 20, "{}", seeds.len());
        for s in &seeds {
            assert_eq!(s.p[1], 0.0);
            assert!(((p.energy_of(s) - 4.5e5) / 4.5e5).abs() < 1e-10);
            // Upward crossings happen at the inner turning point of q_z.
            assert!(HamSystem::force(&p, &s.q)[1] >= 0.0);
        }
    }

    #[test]
    fn dipolar_section_points_are_on_plane_and_shell() {
        let p = reference_trap();
        let min = *dip_fixed_points(&p).minimum().unwrap();
        let w = SeedWindow { q: (0.8 * min.q_rho_star, 1.2 * min.q_rho_star), p: (0.0, 0.0) };
        let seeds = seed_on_section(&p, 4.5e5, &w, 4, &Section::default()).unwrap();
        let opts = SectionOptions { n_crossings: 30, ..Default::default() };
        let traces = poincare(&p, &seeds, &opts).unwrap();
        for t in &traces {
            assert_eq!(t.termination, Termination::Completed);
            assert_eq!(t.points.len(), 30);
            for pt in &t.points {
                assert!(pt.state.p[1].abs() < 1e-10, "{}", pt.state.p[1]);
                assert!(((p.energy_of(&pt.state) - 4.5e5) / 4.5e5).abs() < 1e-8);
                assert!(pt.im_a_rho > 0.0);
            }
        }
    }

    trait EnergyOf {
        fn energy_of(&self, s: &PhaseState<2>) -> f64;
    }
    impl EnergyOf for DipolarParams {
        fn energy_of(&self, s: &PhaseState<2>) -> f64 {
            HamSystem::energy(self, s)
        }
    }
}
