//! Isotropic Gaussian ansatz for the condensate with attractive `1/r`
//! interaction: a one-degree-of-freedom Hamiltonian
//!
//! ```text
//! H(q, p) = p² + 9/(4q²) + 3√3 a/(2√π q³) − √3/(√π q) [+ γ² q²]
//! ```
//!
//! with `q = √⟨r²⟩` the rms width (units of `a_u`) and `p` its conjugate
//! momentum. The trap term is optional; for a Gaussian `⟨γ² r²⟩ = γ² q²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{HamSystem, PhaseState};
use crate::error::{invalid, Result};
use crate::roots::brent;
use crate::units::MonopolarScaled;

/// `√3/√π`, the coefficient of the long-range term.
const LONG_RANGE: f64 = 0.977_205_023_805_839_8;
/// `3√3/(2√π)`, the coefficient of the contact term.
const CONTACT: f64 = 1.465_807_535_708_759_6;

/// Tolerance on `|a − a_cr|` inside which the fixed-point pair is reported as
/// a single degenerate point.
pub const DEGENERATE_A_TOL: f64 = 1e-12;
/// `|V''|` below this is treated as a zero curvature.
pub const DEGENERATE_CURVATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonoParams {
    /// Scaled scattering length `N² a/a_u`.
    pub a: f64,
    /// Scaled trap frequency `γ/N²`; zero for self-trapping.
    pub gamma: f64,
}

impl MonoParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(invalid("scattering length must be finite"));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(invalid(format!("trap frequency must be >= 0, got {gamma}")));
        }
        Ok(Self { a, gamma })
    }

    pub fn self_trapped(a: f64) -> Self {
        Self { a, gamma: 0.0 }
    }

    pub fn kinetic_term(&self, q: f64) -> f64 {
        9.0 / (4.0 * q * q)
    }

    pub fn contact_term(&self, q: f64) -> f64 {
        CONTACT * self.a / (q * q * q)
    }

    pub fn long_range_term(&self, q: f64) -> f64 {
        -LONG_RANGE / q
    }

    pub fn trap_term(&self, q: f64) -> f64 {
        self.gamma * self.gamma * q * q
    }

    pub fn potential(&self, q: f64) -> f64 {
        self.kinetic_term(q) + self.contact_term(q) + self.long_range_term(q) + self.trap_term(q)
    }

    /// `−dV/dq`.
    pub fn force(&self, q: f64) -> f64 {
        let q2 = q * q;
        9.0 / (2.0 * q2 * q) + 3.0 * CONTACT * self.a / (q2 * q2) - LONG_RANGE / q2 - 2.0 * self.gamma * self.gamma * q
    }

    /// `d²V/dq²`.
    pub fn curvature(&self, q: f64) -> f64 {
        let q2 = q * q;
        27.0 / (2.0 * q2 * q2) + 12.0 * CONTACT * self.a / (q2 * q2 * q) - 2.0 * LONG_RANGE / (q2 * q)
            + 2.0 * self.gamma * self.gamma
    }

    pub fn energy(&self, s: &MonoState) -> f64 {
        s.p * s.p + self.potential(s.q)
    }

    /// `q⁴ V'(q)`, a polynomial with the same positive roots as `V'`.
    fn fixed_point_polynomial(&self, q: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        2.0 * g2 * q.powi(5) + LONG_RANGE * q * q - 4.5 * q - 3.0 * CONTACT * self.a
    }
}

impl From<MonopolarScaled> for MonoParams {
    fn from(s: MonopolarScaled) -> Self {
        Self { a: s.a_scaled, gamma: s.gamma_scaled }
    }
}

impl HamSystem<1> for MonoParams {
    /// `p²` kinetic energy corresponds to `m = 1/2`.
    fn mass(&self) -> f64 {
        0.5
    }

    fn potential(&self, q: &[f64; 1]) -> f64 {
        MonoParams::potential(self, q[0])
    }

    fn force(&self, q: &[f64; 1]) -> [f64; 1] {
        [MonoParams::force(self, q[0])]
    }

    fn length_scale(&self) -> f64 {
        1.0
    }

    fn time_scale(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonoState {
    pub q: f64,
    pub p: f64,
}

impl From<MonoState> for PhaseState<1> {
    fn from(s: MonoState) -> Self {
        PhaseState::new([s.q], [s.p])
    }
}

impl From<PhaseState<1>> for MonoState {
    fn from(s: PhaseState<1>) -> Self {
        MonoState { q: s.q[0], p: s.p[0] }
    }
}

/// Complex Gaussian width `A = A_r + i A_i` of `ψ = exp{i[A r² + γ]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonoWidthParam {
    pub a_r: f64,
    pub a_i: f64,
}

/// `q = √(3/(4A_i))`, `p = A_r √(3/A_i)`.
pub fn mono_from_a(w: &MonoWidthParam) -> Result<MonoState> {
    if !(w.a_i > 0.0) {
        return Err(invalid(format!("Im A must be positive, got {}", w.a_i)));
    }
    Ok(MonoState { q: (3.0 / (4.0 * w.a_i)).sqrt(), p: w.a_r * (3.0 / w.a_i).sqrt() })
}

pub fn mono_to_a(s: &MonoState) -> Result<MonoWidthParam> {
    if !(s.q > 0.0) {
        return Err(invalid(format!("width must be positive, got {}", s.q)));
    }
    Ok(MonoWidthParam { a_r: s.p / (2.0 * s.q), a_i: 3.0 / (4.0 * s.q * s.q) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

impl FixedPointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Elliptic => "elliptic",
            Self::Hyperbolic => "hyperbolic",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonoFixedPoint {
    pub q_star: f64,
    pub energy: f64,
    pub mu: f64,
    pub kind: FixedPointKind,
    /// Oscillation frequency (elliptic), growth rate (hyperbolic) or zero.
    pub eigen: f64,
}

/// Stability of a root of `V'`: the linearized flow `δq̇ = 2δp`,
/// `δṗ = −V''δq` has eigenvalues `±√(−2V'')`.
pub fn mono_stability(q_star: f64, params: &MonoParams) -> (FixedPointKind, f64) {
    let v2 = params.curvature(q_star);
    let scale = 27.0 / (2.0 * q_star.powi(4));
    if v2.abs() <= DEGENERATE_CURVATURE_TOL * scale.max(1.0) {
        (FixedPointKind::Degenerate, 0.0)
    } else if v2 > 0.0 {
        (FixedPointKind::Elliptic, (2.0 * v2).sqrt())
    } else {
        (FixedPointKind::Hyperbolic, (-2.0 * v2).sqrt())
    }
}

/// `μ = E + C(q*) + U(q*)`: the interaction terms enter the stationary
/// equation with twice their weight in the energy functional.
pub fn mono_chemical_potential(q_star: f64, params: &MonoParams) -> f64 {
    params.potential(q_star) + params.contact_term(q_star) + params.long_range_term(q_star)
}

fn build_fixed_point(q: f64, params: &MonoParams, force_degenerate: bool) -> MonoFixedPoint {
    let (kind, eigen) = if force_degenerate { (FixedPointKind::Degenerate, 0.0) } else { mono_stability(q, params) };
    MonoFixedPoint {
        q_star: q,
        energy: params.potential(q),
        mu: mono_chemical_potential(q, params),
        kind,
        eigen,
    }
}

/// Stationary widths, sorted by increasing `q*`.
///
/// Self-trapped systems use the closed-form roots of
/// `(√3/√π) q² − (9/2) q − (9√3/(2√π)) a = 0`; trapped systems bracket the
/// roots of `q⁴ V'(q)` on either side of its minimum.
pub fn mono_fixed_points(params: &MonoParams) -> Vec<MonoFixedPoint> {
    if params.gamma == 0.0 {
        let a_cr = mono_critical_a(0.0);
        if (params.a - a_cr).abs() < DEGENERATE_A_TOL {
            let q = 4.5 / (2.0 * LONG_RANGE);
            return vec![build_fixed_point(q, params, true)];
        }
        let (qa, qb, qc) = (LONG_RANGE, -4.5, -3.0 * CONTACT * params.a);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Vec::new();
        }
        // Cancellation-free quadratic roots.
        let t = -0.5 * (qb - disc.sqrt());
        let mut roots: Vec<f64> = [t / qa, qc / t].into_iter().filter(|&q| q > 0.0 && q.is_finite()).collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        return roots.into_iter().map(|q| build_fixed_point(q, params, false)).collect();
    }

    // P(q) = q⁴V'(q) has a single minimum at the fold width, so each side
    // of it holds at most one root.
    let poly = |q: f64| params.fixed_point_polynomial(q);
    let q_f = fold_width(params.gamma);
    let p_min = poly(q_f);
    if p_min.abs() < DEGENERATE_A_TOL * 3.0 * CONTACT {
        return vec![build_fixed_point(q_f, params, true)];
    }
    if p_min > 0.0 {
        return Vec::new();
    }
    let mut roots = Vec::with_capacity(2);
    if poly(0.0) > 0.0 {
        roots.extend(brent(poly, 0.0, q_f, 1e-16 * q_f));
    }
    let mut hi = 2.0 * q_f;
    while poly(hi) <= 0.0 {
        hi *= 2.0;
    }
    roots.extend(brent(poly, q_f, hi, 1e-16 * q_f));
    roots.into_iter().map(|q| build_fixed_point(polish_root(q, params), params, false)).collect()
}

fn polish_root(mut q: f64, params: &MonoParams) -> f64 {
    for _ in 0..20 {
        let f = -params.force(q);
        let df = params.curvature(q);
        if df == 0.0 {
            break;
        }
        let dq = f / df;
        let next = q - dq;
        if !(next > 0.0) {
            break;
        }
        q = next;
        if dq.abs() <= 1e-15 * q || f.abs() < 1e-14 {
            break;
        }
    }
    q
}

/// Width at which `d/dq [q⁴V'(q)] = 0`, i.e. where the fixed-point pair merges.
fn fold_width(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    let d = |q: f64| 10.0 * g2 * q.powi(4) + 2.0 * LONG_RANGE * q - 4.5;
    let hi = 4.5 / (2.0 * LONG_RANGE);
    brent(d, 0.0, hi, 1e-16 * hi).unwrap_or(hi)
}

/// Critical scattering length below which no stationary width exists.
///
/// `γ = 0` gives the closed form `−3π/8`. For `γ > 0` the fold is found from
/// the double-root conditions `P(q) = P'(q) = 0` of `P(q) = q⁴V'(q)`: `P'`
/// is monotone in `q`, and `P = 0` is then linear in `a`.
pub fn mono_critical_a(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return -3.0 * PI / 8.0;
    }
    let q = fold_width(gamma);
    let g2 = gamma * gamma;
    (2.0 * g2 * q.powi(5) + LONG_RANGE * q * q - 4.5 * q) / (3.0 * CONTACT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_roots(a: f64) -> Vec<f64> {
        // Oracle: textbook quadratic formula with the coefficients re-derived
        // from the potential, independent of the library's stable form.
        let s = (3.0 / PI).sqrt();
        let c = -9.0 * 3f64.sqrt() * a / (2.0 * PI.sqrt());
        let d = 4.5 * 4.5 - 4.0 * s * c;
        if d < 0.0 {
            return vec![];
        }
        vec![(4.5 - d.sqrt()) / (2.0 * s), (4.5 + d.sqrt()) / (2.0 * s)]
    }

    #[test]
    fn coefficients() {
        assert!((LONG_RANGE - (3.0 / PI).sqrt()).abs() < 1e-16);
        assert!((CONTACT - 3.0 * 3f64.sqrt() / (2.0 * PI.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let p = MonoParams::self_trapped(0.0);
        let e = p.energy(&MonoState { q: 1.0, p: 0.0 });
        assert!((e - (2.25 - (3.0 / PI).sqrt())).abs() < 1e-15);
        assert!((e - 1.272_794_976_194_16).abs() < 1e-12);

        let far = MonoParams::self_trapped(-0.7).energy(&MonoState { q: 1e8, p: 1.0 });
        assert!((far - 1.0).abs() < 1e-7);

        let crit = MonoParams::self_trapped(-3.0 * PI / 8.0);
        let qd = 9.0 * PI.sqrt() / (4.0 * 3f64.sqrt());
        // V at the degenerate point in closed form: the three terms with q = qd.
        let s = (3.0 / PI).sqrt();
        let v = 9.0 / (4.0 * qd * qd) - 3.0 * 3f64.sqrt() * 3.0 * PI / 8.0 / (2.0 * PI.sqrt() * qd.powi(3)) - s / qd;
        assert!((crit.energy(&MonoState { q: qd, p: 0.0 }) - v).abs() < 1e-14);
    }

    #[test]
    fn force_examples() {
        let p = MonoParams::self_trapped(0.0);
        let q_star = 9.0 * PI.sqrt() / (2.0 * 3f64.sqrt());
        assert!((q_star - 4.604_970).abs() < 1e-6);
        assert!(p.force(q_star).abs() < 1e-15);
        assert!((p.force(1.0) - (4.5 - (3.0 / PI).sqrt())).abs() < 1e-14);
        assert!((p.force(1.0) - 3.522_79).abs() < 1e-5);
    }

    #[test]
    fn force_and_curvature_match_finite_differences() {
        let params = [MonoParams::self_trapped(-0.9), MonoParams::new(0.4, 0.3).unwrap()];
        let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
        for p in &params {
            for _ in 0..20 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let q = 0.5 + 9.5 * (x as f64 / u64::MAX as f64);
                let h = 1e-5;
                let fd = -(p.potential(q + h) - p.potential(q - h)) / (2.0 * h);
                assert!((p.force(q) - fd).abs() <= 1e-6 * p.force(q).abs().max(1e-3), "q={q}");
                let fd2 = -(p.force(q + h) - p.force(q - h)) / (2.0 * h);
                assert!((p.curvature(q) - fd2).abs() <= 1e-6 * p.curvature(q).abs().max(1e-3));
            }
        }
    }

    #[test]
    fn fixed_points_at_a_minus_one() {
        let p = MonoParams::self_trapped(-1.0);
        let fps = mono_fixed_points(&p);
        let oracle = quadratic_roots(-1.0);
        assert_eq!(fps.len(), 2);
        assert!((fps[0].q_star - oracle[0]).abs() < 1e-12);
        assert!((fps[1].q_star - oracle[1]).abs() < 1e-12);
        assert!((fps[0].q_star - 1.407_255).abs() < 1e-6);
        assert!((fps[1].q_star - 3.197_716).abs() < 1e-6);
        assert_eq!(fps[0].kind, FixedPointKind::Hyperbolic);
        assert_eq!(fps[1].kind, FixedPointKind::Elliptic);
        for fp in &fps {
            // Hamilton's equations vanish.
            assert!(p.force(fp.q_star).abs() < 1e-10);
        }
    }

    #[test]
    fn fixed_point_counts() {
        assert!(mono_fixed_points(&MonoParams::self_trapped(-1.3)).is_empty());
        let crit = mono_fixed_points(&MonoParams::self_trapped(-3.0 * PI / 8.0));
        assert_eq!(crit.len(), 1);
        assert_eq!(crit[0].kind, FixedPointKind::Degenerate);
        assert!((crit[0].q_star - 9.0 * PI.sqrt() / (4.0 * 3f64.sqrt())).abs() < 1e-14);
        assert!((crit[0].q_star - 2.302_485).abs() < 1e-6);
        for a in [-1.17, -0.8, -0.3, -1e-3] {
            assert_eq!(mono_fixed_points(&MonoParams::self_trapped(a)).len(), 2, "a={a}");
        }
        for a in [0.0, 0.2, 3.0] {
            let fps = mono_fixed_points(&MonoParams::self_trapped(a));
            assert_eq!(fps.len(), 1, "a={a}");
            assert_eq!(fps[0].kind, FixedPointKind::Elliptic);
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn chemical_potential_at_a_zero_is_minus_one_over_pi() {
        let p = MonoParams::self_trapped(0.0);
        let fp = mono_fixed_points(&p)[0];
        assert!((fp.energy + 1.0 / (3.0 * PI)).abs() < 1e-14);
        assert!((fp.mu + 1.0 / PI).abs() < 1e-14);
        assert!((fp.mu + 0.318_31).abs() < 1e-5);
    }

    #[test]
    fn branches_merge_at_the_fold() {
        let a_cr = mono_critical_a(0.0);
        let mut prev_gap = f64::INFINITY;
        let mut ratios = Vec::new();
        for da in [1e-2, 1e-4, 1e-6, 1e-8] {
            let fps = mono_fixed_points(&MonoParams::self_trapped(a_cr + da));
            assert_eq!(fps.len(), 2);
            let gap = (fps[0].mu - fps[1].mu).abs();
            assert!(gap < prev_gap && gap > 0.0);
            prev_gap = gap;
            ratios.push((fps[1].q_star - fps[0].q_star) / da.sqrt());
        }
        // Square-root opening of a tangent bifurcation.
        for r in &ratios[1..] {
            assert!((r / ratios.last().unwrap() - 1.0).abs() < 1e-2, "{ratios:?}");
        }
        assert!(prev_gap < 1e-3);
    }

    #[test]
    fn stability_classes() {
        let p = MonoParams::self_trapped(-1.0);
        let fps = mono_fixed_points(&p);
        let (k, rate) = mono_stability(fps[0].q_star, &p);
        assert_eq!(k, FixedPointKind::Hyperbolic);
        assert!((rate - (-2.0 * p.curvature(fps[0].q_star)).sqrt()).abs() < 1e-15);
        let (k, w) = mono_stability(fps[1].q_star, &p);
        assert_eq!(k, FixedPointKind::Elliptic);
        assert!(w > 0.0);
        let qd = 9.0 * PI.sqrt() / (4.0 * 3f64.sqrt());
        assert_eq!(mono_stability(qd, &MonoParams::self_trapped(-3.0 * PI / 8.0)).0, FixedPointKind::Degenerate);
    }

    #[test]
    fn critical_a_with_trap_is_continuous_and_consistent() {
        let a0 = mono_critical_a(0.0);
        assert!((mono_critical_a(1e-9) - a0).abs() < 1e-9);
        for gamma in [0.05, 0.2, 1.0] {
            let a_cr = mono_critical_a(gamma);
            assert!(mono_fixed_points(&MonoParams::new(a_cr - 1e-6, gamma).unwrap()).is_empty());
            let above = mono_fixed_points(&MonoParams::new(a_cr + 1e-6, gamma).unwrap());
            assert_eq!(above.len(), 2, "gamma={gamma}");
            // Confinement compresses the cloud, so the fold moves towards a = 0.
            assert!(a_cr > a0, "gamma={gamma}: {a_cr}");
        }
    }

    #[test]
    fn trapped_fixed_points_agree_with_polynomial_roots() {
        let p = MonoParams::new(-0.5, 0.1).unwrap();
        let fps = mono_fixed_points(&p);
        assert_eq!(fps.len(), 2);
        for fp in fps {
            assert!(p.force(fp.q_star).abs() < 1e-12);
        }
        // Repulsive contact plus trap: a single minimum.
        let fps = mono_fixed_points(&MonoParams::new(1.0, 0.5).unwrap());
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].kind, FixedPointKind::Elliptic);
    }

    #[test]
    fn width_parameter_maps() {
        let s = mono_from_a(&MonoWidthParam { a_r: 0.0, a_i: 0.75 }).unwrap();
        assert!((s.q - 1.0).abs() < 1e-15 && s.p == 0.0);
        let s = mono_from_a(&MonoWidthParam { a_r: 0.5, a_i: 0.75 }).unwrap();
        assert!((s.q - 1.0).abs() < 1e-15 && (s.p - 1.0).abs() < 1e-15);
        assert!(mono_from_a(&MonoWidthParam { a_r: 0.0, a_i: 0.0 }).is_err());
        assert!(mono_to_a(&MonoState { q: -1.0, p: 0.0 }).is_err());
    }

    proptest::proptest! {
        #[test]
        fn width_maps_round_trip(a_r in -10.0f64..10.0, a_i in 1e-3f64..1e3) {
            let w = MonoWidthParam { a_r, a_i };
            let back = mono_to_a(&mono_from_a(&w).unwrap()).unwrap();
            proptest::prop_assert!((back.a_r - a_r).abs() <= 1e-12 * a_r.abs().max(1e-300));
            proptest::prop_assert!((back.a_i - a_i).abs() <= 1e-12 * a_i);
        }
    }
}
