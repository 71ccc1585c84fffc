//! FFT-based operators on periodic grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Spectral calculus on `n` equispaced samples of a `period`-periodic function.
#[derive(Clone)]
pub struct Periodic1d {
    n: usize,
    period: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Periodic1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Periodic1d")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

/// Signed integer wavenumber of FFT bin `k` for length `n`.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl Periodic1d {
    pub fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            period,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Angular wavenumber of bin `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI / self.period * signed_index(k, self.n) as f64
    }

    /// Unnormalised DFT of real samples.
    pub fn transform(&self, values: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`Self::transform`] (includes the `1/n` factor), real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        spectrum.iter().map(|c| c.re * scale).collect()
    }

    /// `order`-th derivative by spectral differentiation. The Nyquist mode is
    /// dropped for odd orders.
    pub fn derivative(&self, values: &[f64], order: u32) -> Vec<f64> {
        let mut spec = self.transform(values);
        self.apply_derivative(&mut spec, order);
        self.inverse_real(spec)
    }

    pub(crate) fn apply_derivative(&self, spec: &mut [Complex<f64>], order: u32) {
        if order == 0 {
            return;
        }
        let n = self.n;
        for (k, c) in spec.iter_mut().enumerate() {
            if order % 2 == 1 && n % 2 == 0 && k == n / 2 {
                *c = Complex::new(0.0, 0.0);
                continue;
            }
            let ik = Complex::new(0.0, self.wavenumber(k));
            *c *= ik.powu(order);
        }
    }
}

/// Trigonometric interpolant of real periodic samples, evaluated with its
/// first two derivatives.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    /// Fundamental angular wavenumber `2π / period`.
    w0: f64,
    /// Coefficients `c_k`, `k = 0..=m`, of the non-negative modes.
    coeffs: Vec<Complex<f64>>,
    /// Real Nyquist coefficient for even lengths (enters as a cosine).
    nyquist: Option<f64>,
}

impl TrigInterpolant {
    pub fn new(samples: &[f64], period: f64) -> Self {
        let n = samples.len();
        let op = Periodic1d::new(n, period);
        let spec = op.transform(samples);
        let scale = 1.0 / n as f64;
        let m = (n - 1) / 2;
        let coeffs = spec[..=m].iter().map(|c| *c * scale).collect();
        let nyquist = (n % 2 == 0 && n > 0).then(|| spec[n / 2].re * scale);
        Self {
            w0: 2.0 * PI / period,
            coeffs,
            nyquist,
        }
    }

    /// Value and first two derivatives at `s`.
    pub fn eval(&self, s: f64) -> [f64; 3] {
        let z = Complex::from_polar(1.0, self.w0 * s);
        let mut zk = Complex::new(1.0, 0.0);
        let mut out = [self.coeffs[0].re, 0.0, 0.0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            zk *= z;
            let e = *c * zk;
            let w = k as f64 * self.w0;
            out[0] += 2.0 * e.re;
            out[1] -= 2.0 * w * e.im;
            out[2] -= 2.0 * w * w * e.re;
        }
        if let Some(cn) = self.nyquist {
            let w = (self.coeffs.len()) as f64 * self.w0;
            let (sn, cs) = (w * s).sin_cos();
            out[0] += cn * cs;
            out[1] -= cn * w * sn;
            out[2] -= cn * w * w * cs;
        }
        out
    }

    pub fn value(&self, s: f64) -> f64 {
        let z = Complex::from_polar(1.0, self.w0 * s);
        let mut zk = Complex::new(1.0, 0.0);
        let mut out = self.coeffs[0].re;
        for c in self.coeffs.iter().skip(1) {
            zk *= z;
            out += 2.0 * (*c * zk).re;
        }
        if let Some(cn) = self.nyquist {
            out += cn * (self.coeffs.len() as f64 * self.w0 * s).cos();
        }
        out
    }
}

/// FFT solver for diagonal-in-Fourier operators on an `nx x ny` periodic
/// grid stored x-fastest (`index = j * nx + i`).
#[derive(Clone)]
pub struct Periodic2d {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Periodic2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Periodic2d")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

impl Periodic2d {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fx: planner.plan_fft_forward(nx),
            ix: planner.plan_fft_inverse(nx),
            fy: planner.plan_fft_forward(ny),
            iy: planner.plan_fft_inverse(ny),
        }
    }

    fn transpose(src: &[Complex<f64>], rows: usize, cols: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); src.len()];
        for r in 0..rows {
            for c in 0..cols {
                out[c * rows + r] = src[r * cols + c];
            }
        }
        out
    }

    /// Solve `symbol(kx, ky) * u_hat = f_hat` mode by mode. `symbol` receives
    /// FFT bin indices; a zero symbol zeroes that mode.
    pub fn solve<F>(&self, rhs: &[f64], symbol: F) -> Vec<f64>
    where
        F: Fn(usize, usize) -> f64,
    {
        let (nx, ny) = (self.nx, self.ny);
        let mut buf: Vec<Complex<f64>> = rhs.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fx.process(&mut buf);
        let mut t = Self::transpose(&buf, ny, nx);
        self.fy.process(&mut t);
        // t is laid out as [kx][ky]
        for kx in 0..nx {
            for ky in 0..ny {
                let s = symbol(kx, ky);
                let c = &mut t[kx * ny + ky];
                *c = if s == 0.0 { Complex::new(0.0, 0.0) } else { *c / s };
            }
        }
        self.iy.process(&mut t);
        let mut back = Self::transpose(&t, nx, ny);
        self.ix.process(&mut back);
        let scale = 1.0 / (nx * ny) as f64;
        back.iter().map(|c| c.re * scale).collect()
    }
}

/// Eigenvalues of the periodic three-point second difference with spacing
/// `h`, one per FFT bin.
pub fn second_difference_symbol(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| (2.0 * (2.0 * PI * k as f64 / n as f64).cos() - 2.0) / (h * h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_of_trig_polynomial() {
        let n = 32;
        let op = Periodic1d::new(n, 2.0 * PI);
        let s: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = s.iter().map(|x| (3.0 * x).sin() + 0.5 * x.cos()).collect();
        let d1 = op.derivative(&f, 1);
        let d2 = op.derivative(&f, 2);
        for (j, x) in s.iter().enumerate() {
            assert!((d1[j] - (3.0 * (3.0 * x).cos() - 0.5 * x.sin())).abs() < 1e-12);
            assert!((d2[j] - (-9.0 * (3.0 * x).sin() - 0.5 * x.cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolant_reproduces_off_grid_values() {
        let n = 16;
        let s: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = s.iter().map(|x| (2.0 * x).cos() + x.sin()).collect();
        let it = TrigInterpolant::new(&f, 2.0 * PI);
        let x = 0.377;
        let [v, d, dd] = it.eval(x);
        assert!((v - ((2.0 * x).cos() + x.sin())).abs() < 1e-13);
        assert!((d - (-2.0 * (2.0 * x).sin() + x.cos())).abs() < 1e-12);
        assert!((dd - (-4.0 * (2.0 * x).cos() - x.sin())).abs() < 1e-12);
    }

    #[test]
    fn poisson_solve_inverts_discrete_laplacian() {
        let (nx, ny) = (16, 8);
        let (hx, hy) = (1.0 / nx as f64, 0.5 / ny as f64);
        let u: Vec<f64> = (0..nx * ny)
            .map(|idx| {
                let (i, j) = (idx % nx, idx / nx);
                (2.0 * PI * i as f64 / nx as f64).sin() * (2.0 * PI * 2.0 * j as f64 / ny as f64).cos()
            })
            .collect();
        let mut lap = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = u[j * nx + i];
                let e = u[j * nx + (i + 1) % nx];
                let w = u[j * nx + (i + nx - 1) % nx];
                let n = u[((j + 1) % ny) * nx + i];
                let s = u[((j + ny - 1) % ny) * nx + i];
                lap[j * nx + i] = (e - 2.0 * c + w) / (hx * hx) + (n - 2.0 * c + s) / (hy * hy);
            }
        }
        let lx = second_difference_symbol(nx, hx);
        let ly = second_difference_symbol(ny, hy);
        let back = Periodic2d::new(nx, ny).solve(&lap, |kx, ky| lx[kx] + ly[ky]);
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
