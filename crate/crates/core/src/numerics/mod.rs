//! Small numerical kernels shared by the modules: quadrature, tridiagonal
//! solves and FFT-based periodic operators.

pub mod cg;
pub mod fourier;
pub mod quad;
pub mod tridiag;

/// `n` uniformly spaced nodes from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + h * i as f64).collect()
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
