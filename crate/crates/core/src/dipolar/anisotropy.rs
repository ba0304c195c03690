//! Shape function of the dipolar mean-field energy of an axisymmetric Gaussian.
//!
//! With `t = q_ρ²/(2q_z²) − 1` (zero for a spherical density, positive when
//! oblate, in `(−1, 0)` when prolate) the dipolar term is
//!
//! ```text
//! D(q_ρ, q_z) = F(t) / (2√(2π) q_ρ² q_z),
//! F(t) = [3 + 2t − 3(1 + t) g(t)] / (6t),
//! ```
//!
//! where `g(t) = arctan(√t)/√t` for oblate shapes and `artanh(√−t)/√−t` for
//! prolate ones; both are the same analytic function `Σ (−t)ⁿ/(2n+1)`.
//! Near the spherical locus `F` suffers catastrophic cancellation and is
//! evaluated from its Taylor series `F(t) = Σ_{k≥1} (−1)^{k+1} tᵏ/(4(k+1)² − 1)`.

/// `|t|` below which the series is used. With 40 terms the truncation error
/// is below `10⁻²⁰`, and the closed form loses at most `~3·10⁻¹⁴` relative
/// accuracy just outside.
pub const SERIES_RADIUS: f64 = 0.3;
const SERIES_TERMS: usize = 40;

/// Which real branch evaluates `g(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeRegime {
    Oblate,
    Prolate,
    NearSpherical,
}

pub fn regime(t: f64) -> ShapeRegime {
    if t.abs() < SERIES_RADIUS {
        ShapeRegime::NearSpherical
    } else if t > 0.0 {
        ShapeRegime::Oblate
    } else {
        ShapeRegime::Prolate
    }
}

fn g(t: f64) -> f64 {
    if t > 0.0 {
        let s = t.sqrt();
        s.atan() / s
    } else {
        let s = (-t).sqrt();
        s.atanh() / s
    }
}

fn series_coefficient(k: usize) -> f64 {
    let m = (k + 1) as f64;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign / (4.0 * m * m - 1.0)
}

/// `F(t)` and `F'(t)`.
pub fn shape(t: f64) -> (f64, f64) {
    match regime(t) {
        ShapeRegime::NearSpherical => shape_series(t),
        _ => shape_closed(t),
    }
}

fn shape_series(t: f64) -> (f64, f64) {
    // Horner on both the series and its derivative.
    let mut f = 0.0;
    let mut df = 0.0;
    for k in (1..=SERIES_TERMS).rev() {
        let c = series_coefficient(k);
        f = f * t + c;
        df = df * t + (k as f64) * c;
    }
    (f * t, df)
}

fn shape_closed(t: f64) -> (f64, f64) {
    let gv = g(t);
    // g'(t) = (1/(1+t) − g)/(2t)
    let dg = (1.0 / (1.0 + t) - gv) / (2.0 * t);
    let num = 3.0 + 2.0 * t - 3.0 * (1.0 + t) * gv;
    let dnum = 2.0 - 3.0 * gv - 3.0 * (1.0 + t) * dg;
    let f = num / (6.0 * t);
    let df = (dnum * t - num) / (6.0 * t * t);
    (f, df)
}
