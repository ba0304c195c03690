use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Type-I discrete sine transform of length `n`,
/// `X_k = Σ_j x_j sin(π (j+1)(k+1)/(n+1))`, through a complex FFT of the odd
/// extension. The transform is its own inverse up to the factor `2/(n+1)`.
pub(crate) struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Self { n, fft, buffer: vec![Complex64::default(); 2 * (n + 1)], scratch }
    }

    pub fn forward(&mut self, x: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        self.buffer[0] = Complex64::default();
        self.buffer[n + 1] = Complex64::default();
        for j in 0..n {
            self.buffer[j + 1] = x[j];
            self.buffer[2 * (n + 1) - 1 - j] = -x[j];
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        let i_half = Complex64::new(0.0, 0.5);
        for k in 0..n {
            x[k] = self.buffer[k + 1] * i_half;
        }
    }

    pub fn inverse(&mut self, x: &mut [Complex64]) {
        self.forward(x);
        let s = 2.0 / (self.n + 1) as f64;
        x.iter_mut().for_each(|z| *z *= s);
    }
}

/// Eigenvalues of the negative three-point Laplacian with Dirichlet ends,
/// `(4/h²) sin²(π m / (2(n+1)))`, `m = 1..=n`.
pub(crate) fn laplacian_spectrum(n: usize, h: f64) -> Vec<f64> {
    (1..=n).map(|m| (4.0 / (h * h)) * (std::f64::consts::PI * m as f64 / (2.0 * (n + 1) as f64)).sin().powi(2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum_and_inverts() {
        let n = 13;
        let x: Vec<Complex64> = (0..n).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64).cos())).collect();
        let mut y = x.clone();
        let mut t = SineTransform::new(n);
        t.forward(&mut y);
        for k in 0..n {
            let direct: Complex64 = (0..n)
                .map(|j| x[j] * (std::f64::consts::PI * ((j + 1) * (k + 1)) as f64 / (n + 1) as f64).sin())
                .sum();
            assert!((direct - y[k]).norm() < 1e-12);
        }
        t.inverse(&mut y);
        for j in 0..n {
            assert!((y[j] - x[j]).norm() < 1e-13);
        }
    }

    #[test]
    fn sine_modes_diagonalize_the_difference_laplacian() {
        let (n, h) = (20, 0.1);
        let eps = laplacian_spectrum(n, h);
        let m = 5;
        let v: Vec<f64> = (0..n).map(|j| (std::f64::consts::PI * ((j + 1) * m) as f64 / (n + 1) as f64).sin()).collect();
        for j in 0..n {
            let left = if j > 0 { v[j - 1] } else { 0.0 };
            let right = if j + 1 < n { v[j + 1] } else { 0.0 };
            let lap = -(left - 2.0 * v[j] + right) / (h * h);
            assert!((lap - eps[m - 1] * v[j]).abs() < 1e-10);
        }
    }
}
