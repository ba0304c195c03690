use num_complex::Complex64;

use super::RadialState;
use crate::error::{invalid, Result};

/// Natural cubic spline through `(i h, y_i)`, `i = 0..len`.
struct UniformSpline {
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl UniformSpline {
    fn new(h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system (1, 4, 1) m = 6 Δ²y / h² for the interior.
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]) / (h * h);
                let denom = 4.0 - if i > 0 { c[i - 1] } else { 0.0 };
                c[i] = 1.0 / denom;
                d[i] = (rhs - if i > 0 { d[i - 1] } else { 0.0 }) / denom;
            }
            for i in (0..k).rev() {
                m[i + 1] = d[i] - if i + 1 < k { c[i] * m[i + 2] } else { 0.0 };
            }
        }
        Self { h, y, m }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        if x < 0.0 || x > self.h * (n - 1) as f64 {
            return 0.0;
        }
        let j = ((x / self.h).floor() as usize).min(n - 2);
        let t = x / self.h - j as f64;
        let s = 1.0 - t;
        let h2 = self.h * self.h / 6.0;
        s * self.y[j] + t * self.y[j + 1] + h2 * ((s * s * s - s) * self.m[j] + (t * t * t - t) * self.m[j + 1])
    }
}

/// `ψ(r) → f ψ(r f^{2/3})`, i.e. `u(r) → f^{1/3} u(r f^{2/3})`, by cubic
/// interpolation. The map preserves the norm in the continuum; samples
/// beyond the outer boundary are zero.
pub fn stretch(state: &RadialState, f: f64) -> Result<RadialState> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid("stretch factor must be positive"));
    }
    let grid = state.grid;
    let with_ends = |part: fn(&Complex64) -> f64| {
        let mut y = Vec::with_capacity(grid.n + 2);
        y.push(0.0);
        y.extend(state.u.iter().map(part));
        y.push(0.0);
        UniformSpline::new(grid.h(), y)
    };
    let re = with_ends(|z| z.re);
    let im = with_ends(|z| z.im);
    let (amp, scale) = (f.cbrt(), f.powf(2.0 / 3.0));
    let u = (0..grid.n)
        .map(|i| {
            let x = grid.r(i) * scale;
            Complex64::new(re.eval(x), im.eval(x)) * amp
        })
        .collect();
    RadialState::new(grid, u)
}
