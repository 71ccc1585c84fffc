//! Optimal profile `θ₀`, blending function `η` and the constants derived
//! from them.

use std::path::Path;

use crate::numerics::quad::{gauss_legendre, simpson};
use crate::numerics::tridiag;
use crate::potential::{DoubleWell, ViscosityModel};
use crate::{Error, Result};

/// Default half-width of the stretched-variable domain.
pub const DEFAULT_L_RHO: f64 = 15.0;
/// Default number of grid cells.
pub const DEFAULT_N: usize = 512;

/// Spacing of the internal grid the boundary value problem is solved on.
const SOLVE_SPACING: f64 = 0.02;
const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-10;

/// Heteroclinic solution of `θ'' = f'(θ)`, `θ(0) = 0`, `θ(±∞) = ±1`,
/// sampled on a uniform grid over `[−L_ρ, L_ρ]`.
#[derive(Debug, Clone)]
pub struct Profile {
    potential: DoubleWell,
    l_rho: f64,
    h: f64,
    rho: Vec<f64>,
    theta: Vec<f64>,
    theta_p: Vec<f64>,
    theta_pp: Vec<f64>,
    sigma: f64,
    alpha: f64,
    residual: f64,
    newton_iterations: usize,
    // Fine half-line solution on [0, L_ρ] used for off-grid evaluation.
    fine_h: f64,
    fine: Vec<[f64; 3]>,
}

impl Profile {
    /// Profile of the quartic potential with default domain and resolution.
    pub fn quartic() -> Self {
        Self::compute(&DoubleWell::Quartic, DEFAULT_L_RHO, DEFAULT_N).expect("default quartic profile always converges")
    }

    /// Solve for `θ₀` on `[−l_rho, l_rho]` with `n` cells (`n` even, so that
    /// `ρ = 0` is a node).
    ///
    /// The equation is discretised with the fourth-order Numerov scheme on
    /// the half line `[0, l_rho]` with `θ(0) = 0` and the tail condition
    /// `1 − θ(ρ + h) = (1 − θ(ρ)) e^{−αh}` at the far end, then extended by
    /// oddness. The solve grid is an integer refinement of the output grid.
    pub fn compute(potential: &DoubleWell, l_rho: f64, n: usize) -> Result<Self> {
        potential.validate()?;
        if !(l_rho >= 10.0) {
            return Err(Error::invalid(format!("profile half-width must be >= 10, got {l_rho}")));
        }
        if n < 256 || n % 2 != 0 {
            return Err(Error::invalid(format!(
                "profile grid needs an even number of cells >= 256, got {n}"
            )));
        }
        let alpha = potential.alpha();
        let h = 2.0 * l_rho / n as f64;
        let refine = (h / SOLVE_SPACING).ceil().max(1.0) as usize;
        let half = n / 2;
        let m = half * refine;
        let hf = l_rho / m as f64;

        let (fine_theta, residual, newton_iterations) = solve_half_line(potential, alpha, m, hf)?;
        let fine: Vec<[f64; 3]> = fine_theta
            .iter()
            .map(|&t| [t, slope(potential, t), potential.df(t)])
            .collect();

        let mut rho = Vec::with_capacity(n + 1);
        let mut theta = Vec::with_capacity(n + 1);
        let mut theta_p = Vec::with_capacity(n + 1);
        let mut theta_pp = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let k = i as isize - half as isize;
            let [t, tp, tpp] = fine[k.unsigned_abs() * refine];
            let sign = if k < 0 { -1.0 } else { 1.0 };
            rho.push(k as f64 * h);
            theta.push(sign * t);
            theta_p.push(tp);
            theta_pp.push(sign * tpp);
        }

        // Half-line Simpson on the solve grid, doubled by symmetry.
        let sq: Vec<f64> = fine.iter().map(|v| v[1] * v[1]).collect();
        let sigma = 2.0 * simpson(&sq, hf);

        Ok(Self {
            potential: potential.clone(),
            l_rho,
            h,
            rho,
            theta,
            theta_p,
            theta_pp,
            sigma,
            alpha,
            residual,
            newton_iterations,
            fine_h: hf,
            fine,
        })
    }

    pub fn potential(&self) -> &DoubleWell {
        &self.potential
    }

    pub fn l_rho(&self) -> f64 {
        self.l_rho
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_p(&self) -> &[f64] {
        &self.theta_p
    }

    pub fn theta_pp(&self) -> &[f64] {
        &self.theta_pp
    }

    /// Surface tension `∫ θ₀'² dρ`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Exponential decay rate of `θ₀ ∓ 1`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Max residual of the Numerov equations at the solution.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn newton_iterations(&self) -> usize {
        self.newton_iterations
    }

    /// Index of `ρ = 0`.
    pub fn center(&self) -> usize {
        self.rho.len() / 2
    }

    /// Smallest `C` with `|θ₀(ρ) ∓ 1| ≤ C e^{−α|ρ|}` on the grid.
    pub fn decay_constant(&self) -> f64 {
        self.rho
            .iter()
            .zip(&self.theta)
            .map(|(r, t)| (1.0 - t.abs()) * (self.alpha * r.abs()).exp())
            .fold(0.0, f64::max)
    }

    /// Largest violation of oddness of `θ₀` and evenness of `θ₀'`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len() - 1;
        (0..=n)
            .map(|i| {
                (self.theta[i] + self.theta[n - i])
                    .abs()
                    .max((self.theta_p[i] - self.theta_p[n - i]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// `(θ₀, θ₀')` at arbitrary `ρ`. Quintic Hermite interpolation on the
    /// solve grid, exponential tails beyond `±L_ρ`.
    pub fn eval_with_slope(&self, rho: f64) -> (f64, f64) {
        let sign = if rho < 0.0 { -1.0 } else { 1.0 };
        let x = rho.abs();
        let last = self.fine.len() - 1;
        let pos = x / self.fine_h;
        if pos >= last as f64 {
            let [t_end, _, _] = self.fine[last];
            let gap = (1.0 - t_end) * (-self.alpha * (x - self.l_rho)).exp();
            return (sign * (1.0 - gap), self.alpha * gap);
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let h = self.fine_h;
        let [y0, d0, s0] = self.fine[i];
        let [y1, d1, s1] = self.fine[i + 1];
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let value = (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5) * y0
            + h * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5) * d0
            + h * h * 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5) * s0
            + (10.0 * t3 - 15.0 * t4 + 6.0 * t5) * y1
            + h * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5) * d1
            + h * h * 0.5 * (t3 - 2.0 * t4 + t5) * s1;
        let slope = (-30.0 * t2 + 60.0 * t3 - 30.0 * t4) * y0 / h
            + (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4) * d0
            + h * 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4) * s0
            + (30.0 * t2 - 60.0 * t3 + 30.0 * t4) * y1 / h
            + (-12.0 * t2 + 28.0 * t3 - 15.0 * t4) * d1
            + h * 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4) * s1;
        (sign * value, slope)
    }

    /// `θ₀(ρ)` at arbitrary `ρ`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.eval_with_slope(rho).0
    }

    /// CSV with columns `rho, theta0, theta0p, theta0pp`.
    pub fn to_csv(&self) -> Result<String> {
        crate::io::csv::render(
            &["rho", "theta0", "theta0p", "theta0pp"],
            &[&self.rho, &self.theta, &self.theta_p, &self.theta_pp],
        )
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// `θ₀' = √(2 f(θ₀))` from the first integral of the profile equation.
fn slope(potential: &DoubleWell, theta: f64) -> f64 {
    (2.0 * potential.f(theta)).max(0.0).sqrt()
}

/// Newton iteration for the Numerov system on `[0, m·hf]`. Returns the
/// samples `θ_0 = 0, …, θ_m`, the final max residual and the iteration count.
fn solve_half_line(potential: &DoubleWell, alpha: f64, m: usize, hf: f64) -> Result<(Vec<f64>, f64, usize)> {
    // algebraic sigmoid with the right slope scale; not a solution for any well
    let mut theta: Vec<f64> = (0..=m)
        .map(|i| {
            let x = 0.5 * alpha * i as f64 * hf;
            x / (1.0 + x * x).sqrt()
        })
        .collect();
    let decay = (-alpha * hf).exp();
    let ih2 = 1.0 / (hf * hf);

    let residuals = |theta: &[f64]| -> Vec<f64> {
        let df: Vec<f64> = theta.iter().map(|&t| potential.df(t)).collect();
        let mut r = vec![0.0; m];
        for i in 1..m {
            r[i - 1] =
                (theta[i + 1] - 2.0 * theta[i] + theta[i - 1]) * ih2 - (df[i + 1] + 10.0 * df[i] + df[i - 1]) / 12.0;
        }
        r[m - 1] = theta[m] - 1.0 - (theta[m - 1] - 1.0) * decay;
        r
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut r = residuals(&theta);
    let mut res = norm(&r);
    for iter in 0..NEWTON_MAX_ITER {
        if res <= NEWTON_TOL {
            return Ok((theta, res, iter));
        }
        let d2f: Vec<f64> = theta.iter().map(|&t| potential.d2f(t)).collect();
        // Unknowns θ_1..θ_m map to indices 0..m-1.
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        for i in 1..m {
            let row = i - 1;
            diag[row] = -2.0 * ih2 - 10.0 * d2f[i] / 12.0;
            if i > 1 {
                sub[row] = ih2 - d2f[i - 1] / 12.0;
            }
            sup[row] = ih2 - d2f[i + 1] / 12.0;
        }
        sub[m - 1] = -decay;
        diag[m - 1] = 1.0;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = tridiag::solve(&sub, &diag, &sup, &rhs);

        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = std::iter::once(0.0)
                .chain(theta[1..].iter().zip(&delta).map(|(t, d)| t + step * d))
                .collect();
            let r_trial = residuals(&trial);
            let res_trial = norm(&r_trial);
            if res_trial < res || step < 1e-4 {
                theta = trial;
                r = r_trial;
                res = res_trial;
                break;
            }
            step *= 0.5;
        }
    }
    if res <= NEWTON_TOL {
        return Ok((theta, res, NEWTON_MAX_ITER));
    }
    Err(Error::NewtonDiverged {
        what: "optimal profile".into(),
        iterations: NEWTON_MAX_ITER,
        residual: res,
    })
}

/// Blending function `η`: the quintic smoothstep carried from `[−1, 1]` onto
/// `[0, 1]`, i.e. `η' = 15 (1 − ρ²)² / 16` on `[−1, 1]` and zero outside.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Blend;

impl Blend {
    pub fn eta(&self, rho: f64) -> f64 {
        let t = ((rho + 1.0) * 0.5).clamp(0.0, 1.0);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }

    pub fn eta_p(&self, rho: f64) -> f64 {
        if rho.abs() >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - rho * rho;
        15.0 / 16.0 * w * w
    }

    pub fn eta_pp(&self, rho: f64) -> f64 {
        if rho.abs() >= 1.0 {
            return 0.0;
        }
        -15.0 / 4.0 * rho * (1.0 - rho * rho)
    }

    /// `(η, η')` sampled on the profile grid.
    pub fn sample(&self, profile: &Profile) -> (Vec<f64>, Vec<f64>) {
        let eta = profile.rho().iter().map(|&r| self.eta(r)).collect();
        let eta_p = profile.rho().iter().map(|&r| self.eta_p(r)).collect();
        (eta, eta_p)
    }

    /// `∫ g(ρ) η'(ρ) dρ`. `η'` is a polynomial on its support `[−1, 1]` with
    /// a kink in its second derivative at the ends, so the integral is taken
    /// by Gauss-Legendre on the support rather than on the profile grid.
    fn weighted_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = gauss_legendre(48);
        x.iter().zip(&w).map(|(&r, &wi)| wi * g(r) * self.eta_p(r)).sum()
    }
}

/// `σ₁ = ∫ θ₀' η' dρ`.
pub fn compute_sigma1(profile: &Profile, blend: &Blend) -> f64 {
    blend.weighted_integral(|r| profile.eval_with_slope(r).1)
}

/// `∫ ν(θ₀) η' dρ`, equal to `(ν⁺ + ν⁻)/2` for a viscosity with
/// `ν − ν(0)` odd.
pub fn mean_viscosity(model: &ViscosityModel, profile: &Profile, blend: &Blend) -> f64 {
    blend.weighted_integral(|r| model.eval(profile.eval(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_profile_matches_tanh() {
        let p = Profile::compute(&DoubleWell::Quartic, 15.0, 256).unwrap();
        let err = p
            .rho()
            .iter()
            .zip(p.theta())
            .map(|(r, t)| (t - (r / 2.0).tanh()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err}");
        assert!((p.sigma() - 2.0 / 3.0).abs() < 1e-6);
        assert_eq!(p.alpha(), 1.0);
        assert!((p.theta_p()[p.center()] - 0.5).abs() < 1e-6);
        assert_eq!(p.theta()[p.center()], 0.0);
        assert!(p.residual() <= 1e-8);
        assert!(p.symmetry_defect() <= 1e-14);
        assert!(p.theta().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn boundary_values_within_decay_envelope() {
        let p = Profile::compute(&DoubleWell::Quartic, 10.0, 256).unwrap();
        let gap = 1.0 - p.theta().last().unwrap();
        assert!(gap <= (-p.alpha() * p.l_rho() / 2.0).exp());
        let c = p.decay_constant();
        assert!(c > 1.5 && c <= 2.0 + 1e-6, "decay constant {c}");
    }

    #[test]
    fn off_grid_evaluation() {
        let p = Profile::quartic();
        for &r in &[0.0137, -0.5, 1.0, 3.3333, -14.9, 17.0, -40.0] {
            let (t, s) = p.eval_with_slope(r);
            let sech2 = 1.0 / (r / 2.0f64).cosh().powi(2);
            assert!((t - (r / 2.0).tanh()).abs() < 1e-9, "theta at {r}");
            assert!((s - 0.5 * sech2).abs() < 1e-8, "slope at {r}");
        }
    }

    #[test]
    fn sextic_profile_solves_its_equation() {
        let w = DoubleWell::sextic(1.0, 2.0).unwrap();
        let p = Profile::compute(&w, 15.0, 512).unwrap();
        assert!(p.residual() <= 1e-8);
        assert!((p.alpha() - 3.0f64.sqrt()).abs() < 1e-14);
        // equipartition: σ = ∫ √(2f) dθ over [−1, 1]
        let (x, wts) = gauss_legendre(64);
        let oracle: f64 = x.iter().zip(&wts).map(|(&t, &wi)| wi * (2.0 * w.f(t)).sqrt()).sum();
        assert!((p.sigma() - oracle).abs() < 1e-7);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(Profile::compute(&DoubleWell::Quartic, 5.0, 512).is_err());
        assert!(Profile::compute(&DoubleWell::Quartic, 15.0, 100).is_err());
        assert!(Profile::compute(&DoubleWell::Quartic, 15.0, 301).is_err());
    }

    #[test]
    fn blend_shape() {
        let b = Blend;
        assert_eq!(b.eta(-1.0), 0.0);
        assert_eq!(b.eta(1.0), 1.0);
        assert_eq!(b.eta(0.0), 0.5);
        for k in 0..=200 {
            let r = -1.5 + 3.0 * k as f64 / 200.0;
            assert!(b.eta_p(r) >= 0.0);
            assert!((b.eta(r) - 0.5 + b.eta(-r) - 0.5).abs() < 1e-14);
            let fd = (b.eta(r + 1e-6) - b.eta(r - 1e-6)) / 2e-6;
            assert!((fd - b.eta_p(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn sigma1_and_odd_moment() {
        let p = Profile::quartic();
        let b = Blend;
        let s1 = compute_sigma1(&p, &b);
        assert!(s1 > 0.0);
        let g: Vec<f64> = p
            .rho()
            .iter()
            .zip(p.theta_p())
            .map(|(&r, tp)| tp * (b.eta(r) - 0.5))
            .collect();
        let odd = simpson(&g, p.h());
        assert!(odd.abs() < 1e-8);
    }

    #[test]
    fn mean_viscosity_cases() {
        let p = Profile::quartic();
        let b = Blend;
        let cases = [(2.0, 1.0, 1.5), (1.0, 1.0, 1.0), (3.0, 1.0, 2.0)];
        for (np, nm, expect) in cases {
            let m = ViscosityModel::new(np, nm).unwrap();
            assert!((mean_viscosity(&m, &p, &b) - expect).abs() < 1e-6);
        }
    }
}
