//! Bracketing root finders shared by the variational and dynamics modules.

/// Brent's method on a sign-changing bracket. Returns `None` if `[a, b]` does
/// not bracket a root.
pub(crate) fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

/// All sign changes of `f` on a log-spaced grid over `[lo, hi]`, each refined
/// with [`brent`]. Roots are returned in increasing order.
pub(crate) fn log_grid_roots<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo * (ratio * i as f64).exp()).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..points - 1 {
        let (f0, f1) = (fs[i], fs[i + 1]);
        if !f0.is_finite() || !f1.is_finite() {
            continue;
        }
        if f0 == 0.0 {
            out.push(xs[i]);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            if let Some(r) = brent(&mut f, xs[i], xs[i + 1], 1e-15 * xs[i + 1]) {
                out.push(r);
            }
        }
    }
    if fs[points - 1] == 0.0 {
        out.push(xs[points - 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn grid_scan_finds_all_roots() {
        let roots = log_grid_roots(|x| (x - 0.5) * (x - 3.0) * (x - 40.0), 1e-2, 1e2, 400);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.5, 3.0, 40.0]) {
            assert!((r - e).abs() < 1e-12 * e);
        }
    }
}
