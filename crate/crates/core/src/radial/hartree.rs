use std::f64::consts::PI;

use super::{RadialGrid, RadialState};

/// Long-range potential `U(r_i) = −2 (Q(r_i)/r_i + G(r_i))` with
/// `Q(r) = 4π ∫₀^r |u|² dr′` and `G(r) = 4π ∫_r^{r_max} |u|²/r′ dr′`.
/// Cumulative trapezoid sums carry end-point Euler–Maclaurin corrections,
/// which makes them fourth order.
pub fn hartree_1r(state: &RadialState) -> Vec<f64> {
    let f: Vec<f64> = state.u.iter().map(|z| z.norm_sqr()).collect();
    hartree_quadrature(&state.grid, &f)
}

/// `U(0) = −2 G(0)`.
pub fn hartree_at_origin(state: &RadialState) -> f64 {
    let grid = &state.grid;
    let h = grid.h();
    let g: Vec<f64> = state.u.iter().enumerate().map(|(i, z)| z.norm_sqr() / grid.r(i)).collect();
    let n = g.len();
    let trap: f64 = h * g.iter().sum::<f64>();
    let slope0 = (4.0 * g[0] - g[1]) / (2.0 * h);
    let slope_end = (-4.0 * g[n - 1] + g[n - 2]) / (2.0 * h);
    -2.0 * 4.0 * PI * (trap - h * h / 12.0 * (slope_end - slope0))
}

/// Same potential from `w = rU`, `w″ = 8π|u|²/r`, `w(0) = 0`,
/// `w(r_max) = −2Q(r_max)`, solved with the Numerov scheme.
pub fn hartree_poisson(state: &RadialState) -> Vec<f64> {
    let grid = &state.grid;
    let (n, h) = (grid.n, grid.h());
    let src: Vec<f64> = state.u.iter().enumerate().map(|(i, z)| 8.0 * PI * z.norm_sqr() / grid.r(i)).collect();
    let total = state.norm_sqr();
    let w_end = -2.0 * total;
    let s = |j: isize| if j < 0 || j >= n as isize { 0.0 } else { src[j as usize] };
    let mut rhs: Vec<f64> = (0..n as isize).map(|i| h * h / 12.0 * (s(i - 1) + 10.0 * s(i) + s(i + 1))).collect();
    rhs[n - 1] -= w_end;
    // Thomas algorithm for the constant (1, −2, 1) stencil.
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = 1.0 / -2.0;
    d[0] = rhs[0] / -2.0;
    for i in 1..n {
        let m = -2.0 - c[i - 1];
        c[i] = 1.0 / m;
        d[i] = (rhs[i] - d[i - 1]) / m;
    }
    let mut w = vec![0.0; n];
    w[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        w[i] = d[i] - c[i] * w[i + 1];
    }
    w.iter().enumerate().map(|(i, wi)| wi / grid.r(i)).collect()
}

/// Quadrature route on precomputed `|u_i|²`.
pub(crate) fn hartree_quadrature(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let (n, h) = (grid.n, grid.h());
    let g: Vec<f64> = f.iter().enumerate().map(|(i, fi)| fi / grid.r(i)).collect();
    // Values at node `j + 1`; `|u|²` is even and `|u|²/r` odd about the origin.
    let at = |v: &[f64], parity: f64, j: isize| {
        if j >= n as isize {
            0.0
        } else if j >= 0 {
            v[j as usize]
        } else if j == -1 {
            0.0
        } else {
            parity * v[(-j - 2) as usize]
        }
    };
    let slope = |v: &[f64], parity: f64, j: isize| {
        (8.0 * (at(v, parity, j + 1) - at(v, parity, j - 1)) - (at(v, parity, j + 2) - at(v, parity, j - 2))) / (12.0 * h)
    };

    let mut q = vec![0.0; n];
    let mut acc = 0.0;
    for i in 0..n {
        let j = i as isize;
        acc += 0.5 * h * (at(f, 1.0, j - 1) + f[i]);
        q[i] = 4.0 * PI * (acc - h * h / 12.0 * slope(f, 1.0, j));
    }

    let slope_end = slope(&g, -1.0, n as isize);
    let mut big_g = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        let j = i as isize;
        acc += 0.5 * h * (at(&g, -1.0, j + 1) + g[i]);
        big_g[i] = 4.0 * PI * (acc - h * h / 12.0 * (slope_end - slope(&g, -1.0, j)));
    }
    (0..n).map(|i| -2.0 * (q[i] / grid.r(i) + big_g[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use num_complex::Complex64;

    fn erf(x: f64) -> f64 {
        // Series for small arguments, continued fraction otherwise; both are
        // accurate to well below 1e-13 on the ranges used here.
        if x.abs() < 3.0 {
            let mut term = x;
            let mut sum = x;
            let mut k = 0.0;
            loop {
                k += 1.0;
                term *= -x * x / k;
                let add = term / (2.0 * k + 1.0);
                sum += add;
                if add.abs() < 1e-17 * sum.abs() {
                    break;
                }
            }
            2.0 / PI.sqrt() * sum
        } else {
            let mut f = 0.0;
            for k in (1..60).rev() {
                f = k as f64 / 2.0 / (x + f);
            }
            1.0 - (-x * x).exp() / PI.sqrt() / (x + f)
        }
    }

    #[test]
    fn gaussian_potential_matches_error_function() {
        let grid = RadialGrid::new(16.0, 2048).unwrap();
        let k = 1.3;
        let s = RadialState::gaussian(grid, k);
        let u = hartree_1r(&s);
        let worst = (0..grid.n).map(|i| (u[i] + 2.0 * erf(k * grid.r(i)) / grid.r(i)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert!((hartree_at_origin(&s) + 4.0 * k / PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn quadrature_and_poisson_routes_agree() {
        let grid = RadialGrid::default();
        let s = RadialState::from_psi(grid, |r| Complex64::new((1.0 + 0.3 * r * r) * (-0.6 * r * r).exp(), 0.2 * r * (-r).exp()));
        let a = hartree_1r(&s);
        let b = hartree_poisson(&s);
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn uniform_ball_potential() {
        // Density 3/(4πR³) inside R: U = −(3 − r²/R²)/R inside and −2/r outside.
        let grid = RadialGrid::new(8.0, 4095).unwrap();
        let big_r = 2.0;
        let h = grid.h();
        let f: Vec<f64> = (0..grid.n)
            .map(|i| {
                let r = grid.r(i);
                if r < big_r - 1e-12 {
                    3.0 / (4.0 * PI * big_r.powi(3)) * r * r
                } else {
                    0.0
                }
            })
            .collect();
        let u = hartree_quadrature(&grid, &f);
        for i in (0..grid.n).step_by(97) {
            let r = grid.r(i);
            let exact = if r < big_r { -(3.0 - r * r / (big_r * big_r)) / big_r } else { -2.0 / r };
            // The step in the density makes the rule first order near the edge.
            assert!((u[i] - exact).abs() < 10.0 * h, "r={r} {} {exact}", u[i]);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let k = 1.0;
        let err = |n: usize| {
            let grid = RadialGrid::new(12.0, n).unwrap();
            let s = RadialState::gaussian(grid, k);
            let u = hartree_1r(&s);
            (0..n).map(|i| (u[i] + 2.0 * erf(k * grid.r(i)) / grid.r(i)).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(127), err(255));
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "order {order}");
    }
}
