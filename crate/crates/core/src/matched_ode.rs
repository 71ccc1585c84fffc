//! The two model ODEs on the real line that the inner expansion reduces to:
//!
//! * `w'' − f''(θ₀) w = A`, `w(0) = 0`, `w` bounded;
//! * `(ν(θ₀) w')' = B`, `w` bounded.
//!
//! Both are solvable only under an integral condition, checked before solving.

use std::path::Path;

use crate::numerics::max_abs;
use crate::numerics::quad::{cumulative, simpson};
use crate::potential::ViscosityModel;
use crate::profile::Profile;
use crate::{Error, Result};

/// Relative tolerance of the solvability conditions.
pub const SOLVABILITY_TOL: f64 = 1e-6;
/// Largest admissible `max |B| e^{α|ρ|}` over the outer quarter of the grid,
/// relative to `max |B|`.
const DECAY_RATIO_LIMIT: f64 = 1e3;

/// Right-hand side sampled on a profile grid, with optional limits
/// `(A⁻, A⁺)` at `∓∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsSample {
    pub values: Vec<f64>,
    pub limits: Option<(f64, f64)>,
}

impl RhsSample {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, limits: None }
    }

    pub fn with_limits(values: Vec<f64>, minus: f64, plus: f64) -> Self {
        Self {
            values,
            limits: Some((minus, plus)),
        }
    }

    pub fn zeros(profile: &Profile) -> Self {
        Self::new(vec![0.0; profile.len()])
    }

    /// Sample `g(ρ)` on the profile grid.
    pub fn from_fn(profile: &Profile, g: impl Fn(f64) -> f64) -> Self {
        Self::new(profile.rho().iter().map(|&r| g(r)).collect())
    }

    fn check_grid(&self, profile: &Profile) -> Result<()> {
        if self.values.len() != profile.len() {
            return Err(Error::GridMismatch {
                expected: profile.len(),
                found: self.values.len(),
            });
        }
        Ok(())
    }

    /// Limits at `∓∞`; the end samples when none were supplied.
    fn far_field(&self) -> (f64, f64) {
        self.limits
            .unwrap_or((self.values[0], self.values[self.values.len() - 1]))
    }
}

/// `∫ A θ₀' dρ`.
pub fn solvability_defect(a: &RhsSample, profile: &Profile) -> Result<f64> {
    a.check_grid(profile)?;
    let g: Vec<f64> = a.values.iter().zip(profile.theta_p()).map(|(x, t)| x * t).collect();
    Ok(simpson(&g, profile.h()))
}

/// Bounded solution of the linearised Allen-Cahn equation.
#[derive(Debug, Clone)]
pub struct LinearizedSolution {
    pub w: Vec<f64>,
    /// Limits `(w⁻, w⁺) = (−A⁻/f''(−1), −A⁺/f''(1))`.
    pub limits: (f64, f64),
    /// Max residual of the Numerov equations over all interior nodes.
    pub residual: f64,
    pub defect: f64,
}

impl LinearizedSolution {
    /// Smallest `(C⁻, C⁺)` with `|w(±ρ) − w^±| ≤ C e^{−αρ/2}` on the outer
    /// half of each side.
    pub fn decay_constants(&self, profile: &Profile) -> (f64, f64) {
        decay_constants(&self.w, self.limits, profile)
    }

    pub fn to_csv(&self, profile: &Profile) -> Result<String> {
        crate::io::csv::render(&["rho", "w"], &[profile.rho(), &self.w])
    }
}

fn decay_constants(w: &[f64], limits: (f64, f64), profile: &Profile) -> (f64, f64) {
    let half_rate = 0.5 * profile.alpha();
    let l = profile.l_rho();
    let mut c = (0.0f64, 0.0f64);
    for (&r, &v) in profile.rho().iter().zip(w) {
        if r <= -l / 2.0 {
            c.0 = c.0.max((v - limits.0).abs() * (half_rate * r.abs()).exp());
        } else if r >= l / 2.0 {
            c.1 = c.1.max((v - limits.1).abs() * (half_rate * r).exp());
        }
    }
    c
}

/// Solve `w'' − f''(θ₀) w = A` with `w(0) = 0` and `w` bounded.
///
/// Numerov discretisation on the profile grid. The row at `ρ = 0` is
/// replaced by `w = 0`, which splits the system into two well-posed half-line
/// problems; they join smoothly exactly when the solvability condition
/// holds. At `±L_ρ` the far field is closed by
/// `w_N − w⁺ = (w_{N−1} − w⁺) e^{−√f''(1) h}` (and its mirror), the discrete
/// form of the decaying exponential tail.
pub fn solve_linearized_ac(a: &RhsSample, profile: &Profile) -> Result<LinearizedSolution> {
    let defect = solvability_defect(a, profile)?;
    let tolerance = SOLVABILITY_TOL * max_abs(&a.values);
    if defect.abs() > tolerance {
        return Err(Error::SolvabilityViolated { defect, tolerance });
    }
    let pot = profile.potential();
    let n = profile.len();
    let h = profile.h();
    let ih2 = 1.0 / (h * h);
    let center = profile.center();
    let q: Vec<f64> = profile.theta().iter().map(|&t| pot.d2f(t)).collect();
    let (a_minus, a_plus) = a.far_field();
    let (fm, fp) = (pot.d2f(-1.0), pot.d2f(1.0));
    let limits = (-a_minus / fm, -a_plus / fp);
    let (decay_m, decay_p) = ((-fm.sqrt() * h).exp(), (-fp.sqrt() * h).exp());
    let av = &a.values;

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 1.0;
    sup[0] = -decay_m;
    rhs[0] = limits.0 * (1.0 - decay_m);
    diag[n - 1] = 1.0;
    sub[n - 1] = -decay_p;
    rhs[n - 1] = limits.1 * (1.0 - decay_p);
    for i in 1..n - 1 {
        if i == center {
            diag[i] = 1.0;
            continue;
        }
        sub[i] = ih2 - q[i - 1] / 12.0;
        diag[i] = -2.0 * ih2 - 10.0 * q[i] / 12.0;
        sup[i] = ih2 - q[i + 1] / 12.0;
        rhs[i] = (av[i - 1] + 10.0 * av[i] + av[i + 1]) / 12.0;
    }
    let w = crate::numerics::tridiag::solve(&sub, &diag, &sup, &rhs);
    let residual = (1..n - 1)
        .map(|i| {
            let lhs = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * ih2
                - (q[i + 1] * w[i + 1] + 10.0 * q[i] * w[i] + q[i - 1] * w[i - 1]) / 12.0;
            (lhs - (av[i - 1] + 10.0 * av[i] + av[i + 1]) / 12.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(LinearizedSolution {
        w,
        limits,
        residual,
        defect,
    })
}

/// Remove the `θ₀'` component that violates `w(0) = 0`:
/// `w − w(0) θ₀'/θ₀'(0)`.
pub fn pin_origin(w: &[f64], profile: &Profile) -> Vec<f64> {
    let c = profile.center();
    let k = w[c] / profile.theta_p()[c];
    w.iter().zip(profile.theta_p()).map(|(v, t)| v - k * t).collect()
}

/// Particular bounded solution of `(ν(θ₀) w')' = B`.
#[derive(Debug, Clone)]
pub struct WeightedSolution {
    /// `w*(ρ) = ∫₀^ρ ν(θ₀)⁻¹ ∫_{−∞}^r B ds dr`.
    pub w: Vec<f64>,
    /// Limits `(w⁻, w⁺)` estimated from the end samples.
    pub limits: (f64, f64),
    pub defect: f64,
}

impl WeightedSolution {
    pub fn to_csv(&self, profile: &Profile) -> Result<String> {
        crate::io::csv::render(&["rho", "w"], &[profile.rho(), &self.w])
    }
}

/// Nested-quadrature solution of `(ν(θ₀) w')' = B`, `w*(0) = 0`.
pub fn solve_weighted(b: &RhsSample, model: &ViscosityModel, profile: &Profile) -> Result<WeightedSolution> {
    b.check_grid(profile)?;
    let h = profile.h();
    let scale = max_abs(&b.values);
    let alpha = profile.alpha();
    let l = profile.l_rho();
    let tail = profile
        .rho()
        .iter()
        .zip(&b.values)
        .filter(|(r, _)| r.abs() >= 0.75 * l)
        .map(|(r, v)| v.abs() * (alpha * r.abs()).exp())
        .fold(0.0, f64::max);
    if tail > DECAY_RATIO_LIMIT * scale {
        return Err(Error::NonDecayingRhs {
            tail,
            tolerance: DECAY_RATIO_LIMIT * scale,
        });
    }
    let last = b.values.len() - 1;
    let defect = simpson(&b.values, h) + (b.values[0] + b.values[last]) / alpha;
    let tolerance = SOLVABILITY_TOL * scale;
    if defect.abs() > tolerance {
        return Err(Error::SolvabilityViolated { defect, tolerance });
    }
    // ∫_{−∞}^{−L} B ≈ B(−L)/α for an exponentially decaying tail.
    let left_tail = b.values[0] / alpha;
    let inner: Vec<f64> = cumulative(&b.values, h)
        .into_iter()
        .zip(profile.theta())
        .map(|(v, &t)| (v + left_tail) / model.eval(t))
        .collect();
    let outer = cumulative(&inner, h);
    let c = outer[profile.center()];
    let w: Vec<f64> = outer.iter().map(|v| v - c).collect();
    let limits = (w[0], w[w.len() - 1]);
    Ok(WeightedSolution { w, limits, defect })
}

pub fn write_csv(path: impl AsRef<Path>, profile: &Profile, w: &[f64]) -> Result<()> {
    crate::io::csv::write(path, &["rho", "w"], &[profile.rho(), w])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::DoubleWell;
    use crate::profile::Blend;

    fn profile() -> Profile {
        Profile::quartic()
    }

    #[test]
    fn defects() {
        let p = profile();
        let d = solvability_defect(&RhsSample::new(p.theta_p().to_vec()), &p).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-6);
        let d = solvability_defect(&RhsSample::new(p.theta_pp().to_vec()), &p).unwrap();
        assert!(d.abs() < 1e-8);
        assert_eq!(solvability_defect(&RhsSample::zeros(&p), &p).unwrap(), 0.0);
        assert!(matches!(
            solvability_defect(&RhsSample::new(vec![0.0; 3]), &p),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn translation_mode_rhs() {
        let p = profile();
        let sol = solve_linearized_ac(&RhsSample::new(p.theta_pp().to_vec()), &p).unwrap();
        let err = p
            .rho()
            .iter()
            .zip(p.theta_p())
            .zip(&sol.w)
            .map(|((r, tp), w)| (w - r * tp / 2.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "error {err}");
        assert!(sol.residual < 1e-6);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let p = profile();
        let sol = solve_linearized_ac(&RhsSample::zeros(&p), &p).unwrap();
        assert!(sol.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unsolvable_rhs_rejected() {
        let p = profile();
        match solve_linearized_ac(&RhsSample::new(p.theta_p().to_vec()), &p) {
            Err(Error::SolvabilityViolated { defect, .. }) => assert!((defect - 0.6667).abs() < 1e-4),
            other => panic!("expected rejection, got {other:?}"),
        }
        let m = ViscosityModel::constant(1.0);
        match solve_weighted(&RhsSample::new(p.theta_p().to_vec()), &m, &p) {
            Err(Error::SolvabilityViolated { defect, .. }) => assert!((defect - 2.0).abs() < 1e-6),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_limits_are_reached() {
        // A = θ₀ has limits ∓1 and is odd, so it is solvable; w → −A^±/f''(±1) = ∓1.
        let p = profile();
        let a = RhsSample::with_limits(p.theta().to_vec(), -1.0, 1.0);
        let sol = solve_linearized_ac(&a, &p).unwrap();
        assert_eq!(sol.limits, (1.0, -1.0));
        assert!((sol.w[0] - 1.0).abs() < 1e-5 && (sol.w[p.len() - 1] + 1.0).abs() < 1e-5);
        let (cm, cp) = sol.decay_constants(&p);
        assert!(cm < 1.0 && cp < 1.0, "decay constants {cm} {cp}");
    }

    #[test]
    fn uniqueness_modulo_translation_mode() {
        let p = profile();
        let sol = solve_linearized_ac(&RhsSample::new(p.theta_pp().to_vec()), &p).unwrap();
        let shifted: Vec<f64> = sol.w.iter().zip(p.theta_p()).map(|(w, t)| w + 0.37 * t).collect();
        let back = pin_origin(&shifted, &p);
        for (a, b) in back.iter().zip(&sol.w) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_solution_of_exact_derivative() {
        // B has kinks at ρ = ±1 (η is only C²), so grid quadrature is
        // second order there and needs a fine grid.
        let p = Profile::compute(&DoubleWell::Quartic, 15.0, 1 << 14).unwrap();
        let m = ViscosityModel::new(2.0, 1.0).unwrap();
        let eta = Blend;
        let b = RhsSample::from_fn(&p, |r| {
            let (t, tp) = p.eval_with_slope(r);
            m.derivative(t) * tp * eta.eta_p(r) + m.eval(t) * eta.eta_pp(r)
        });
        let sol = solve_weighted(&b, &m, &p).unwrap();
        let err = p
            .rho()
            .iter()
            .zip(&sol.w)
            .map(|(&r, w)| (w - (eta.eta(r) - 0.5)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "error {err}");
        let zero = solve_weighted(&RhsSample::zeros(&p), &m, &p).unwrap();
        assert!(zero.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slowly_decaying_rhs_rejected() {
        let p = profile();
        let b = RhsSample::from_fn(&p, |r| r.signum() * (-0.2 * r.abs()).exp());
        assert!(matches!(
            solve_weighted(&b, &ViscosityModel::constant(1.0), &p),
            Err(Error::NonDecayingRhs { .. })
        ));
    }
}
