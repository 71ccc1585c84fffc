//! Double-well potentials and the phase-dependent viscosity.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Even double-well potential with wells at `c = ±1`.
///
/// Every potential here has the form `f(c) = (c² − 1)² q(c²) / 8` where `q`
/// is a polynomial that is positive on `[0, 1]`. The quartic
/// `f = (c² − 1)² / 8` is `q ≡ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DoubleWell {
    #[default]
    Quartic,
    /// `q(u) = coeffs[0] + coeffs[1] u + coeffs[2] u² + ...`
    EvenPoly { coeffs: Vec<f64> },
}

impl DoubleWell {
    /// Potential from `q(u) = a + b u`, i.e. `f = (c² − 1)² (a + b c²) / 8`.
    pub fn sextic(a: f64, b: f64) -> Result<Self> {
        let w = DoubleWell::EvenPoly { coeffs: vec![a, b] };
        w.validate()?;
        Ok(w)
    }

    fn coeffs(&self) -> &[f64] {
        match self {
            DoubleWell::Quartic => &[1.0],
            DoubleWell::EvenPoly { coeffs } => coeffs,
        }
    }

    /// `q`, `q'`, `q''` at `u`.
    fn q(&self, u: f64) -> (f64, f64, f64) {
        let (mut q, mut dq, mut ddq) = (0.0, 0.0, 0.0);
        for &a in self.coeffs().iter().rev() {
            ddq = ddq * u + 2.0 * dq;
            dq = dq * u + q;
            q = q * u + a;
        }
        (q, dq, ddq)
    }

    /// Checks that `q > 0` on `[0, 1]`, which gives `f > 0` on `(−1, 1)` and
    /// `f''(±1) = q(1) > 0`.
    pub fn validate(&self) -> Result<()> {
        let coeffs = self.coeffs();
        if coeffs.is_empty() || coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("potential coefficients must be finite and non-empty"));
        }
        for k in 0..=1000 {
            let (q, _, _) = self.q(k as f64 / 1000.0);
            if q <= 0.0 {
                return Err(Error::invalid(format!(
                    "potential factor q(u) must be positive on [0, 1]; q({}) = {q}",
                    k as f64 / 1000.0
                )));
            }
        }
        Ok(())
    }

    /// `(f, f', f'')` at `c`.
    pub fn eval(&self, c: f64) -> (f64, f64, f64) {
        let u = c * c;
        let (q, dq, ddq) = self.q(u);
        let w = u - 1.0;
        let f = w * w * q / 8.0;
        let fu = (2.0 * w * q + w * w * dq) / 8.0;
        let fuu = (2.0 * q + 4.0 * w * dq + w * w * ddq) / 8.0;
        (f, 2.0 * c * fu, 4.0 * u * fuu + 2.0 * fu)
    }

    pub fn f(&self, c: f64) -> f64 {
        self.eval(c).0
    }

    pub fn df(&self, c: f64) -> f64 {
        self.eval(c).1
    }

    pub fn d2f(&self, c: f64) -> f64 {
        self.eval(c).2
    }

    /// Decay rate `min(√f''(−1), √f''(1))` of the optimal profile.
    pub fn alpha(&self) -> f64 {
        self.d2f(1.0).min(self.d2f(-1.0)).sqrt()
    }

    /// `max f''` over `|c| ≤ bound`, sampled on a fine grid.
    pub fn max_d2f(&self, bound: f64) -> f64 {
        let n = 2400;
        (0..=n)
            .map(|k| self.d2f(-bound + 2.0 * bound * k as f64 / n as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Where the linear viscosity law stops following `c`.
const CLAMP_START: f64 = 1.0;
const CLAMP_END: f64 = 1.2;

/// Phase-dependent viscosity `ν(c) = ν̄ + (ν⁺ − ν⁻)/2 · φ(c)`.
///
/// `φ(c) = c` on `[−1, 1]` and bends over smoothly (C¹) to a constant
/// `±1.1` at `|c| = 1.2`, so overshooting phase fields cannot drive the
/// viscosity to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscosityModel {
    pub nu_plus: f64,
    pub nu_minus: f64,
}

impl Default for ViscosityModel {
    fn default() -> Self {
        Self {
            nu_plus: 1.0,
            nu_minus: 1.0,
        }
    }
}

fn clamp_shape(c: f64) -> (f64, f64) {
    let a = c.abs();
    let w = CLAMP_END - CLAMP_START;
    if a <= CLAMP_START {
        (c, 1.0)
    } else if a < CLAMP_END {
        let x = a - CLAMP_START;
        (c.signum() * (a - x * x / (2.0 * w)), 1.0 - x / w)
    } else {
        (c.signum() * (CLAMP_END - w / 2.0), 0.0)
    }
}

impl ViscosityModel {
    pub fn new(nu_plus: f64, nu_minus: f64) -> Result<Self> {
        let m = Self { nu_plus, nu_minus };
        m.validate()?;
        Ok(m)
    }

    pub fn constant(nu: f64) -> Self {
        Self {
            nu_plus: nu,
            nu_minus: nu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu_plus > 0.0 && self.nu_minus > 0.0) || !self.nu_plus.is_finite() || !self.nu_minus.is_finite() {
            return Err(Error::invalid("viscosities must be positive and finite"));
        }
        if self.nu_min() <= 0.0 {
            return Err(Error::invalid(format!(
                "viscosity ratio too large: nu(c) would reach {} in the overshoot range",
                self.nu_min()
            )));
        }
        Ok(())
    }

    /// `(ν⁺ + ν⁻)/2`.
    pub fn mean(&self) -> f64 {
        0.5 * (self.nu_plus + self.nu_minus)
    }

    fn half_jump(&self) -> f64 {
        0.5 * (self.nu_plus - self.nu_minus)
    }

    pub fn eval(&self, c: f64) -> f64 {
        self.mean() + self.half_jump() * clamp_shape(c).0
    }

    pub fn derivative(&self, c: f64) -> f64 {
        self.half_jump() * clamp_shape(c).1
    }

    /// Lower bound of `ν` over all `c`.
    pub fn nu_min(&self) -> f64 {
        self.mean() - self.half_jump().abs() * clamp_shape(CLAMP_END).0
    }

    /// Upper bound of `ν` over all `c`.
    pub fn nu_max(&self) -> f64 {
        self.mean() + self.half_jump().abs() * clamp_shape(CLAMP_END).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quartic_values() {
        let w = DoubleWell::Quartic;
        let (f, df, d2f) = w.eval(0.0);
        assert!((f - 0.125).abs() < 1e-15);
        assert_eq!(df, 0.0);
        assert!((d2f + 0.5).abs() < 1e-15);
        assert_eq!(w.eval(1.0), (0.0, 0.0, 1.0));
        assert!((w.df(0.5) + 0.1875).abs() < 1e-15);
        assert_eq!(w.alpha(), 1.0);
        assert!((w.max_d2f(1.2) - 0.5 * (3.0 * 1.44 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sextic_wells() {
        let w = DoubleWell::sextic(1.0, 3.0).unwrap();
        let (f, df, d2f) = w.eval(-1.0);
        assert_eq!((f, df), (0.0, 0.0));
        assert!((d2f - 4.0).abs() < 1e-14);
        assert_eq!(w.alpha(), 2.0);
        assert!(DoubleWell::sextic(1.0, -2.0).is_err());
    }

    #[test]
    fn viscosity_limits() {
        let m = ViscosityModel::new(2.0, 1.0).unwrap();
        assert_eq!(m.eval(1.0), 2.0);
        assert_eq!(m.eval(-1.0), 1.0);
        assert_eq!(m.mean(), 1.5);
        assert!((m.eval(1.2) - (1.5 + 0.5 * 1.1)).abs() < 1e-14);
        assert_eq!(m.eval(5.0), m.eval(1.2));
        assert!(ViscosityModel::new(30.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn potential_derivatives_match_differences(
            a in 0.2f64..3.0, b in 0.0f64..3.0, c in -1.3f64..1.3
        ) {
            let w = DoubleWell::sextic(a, b).unwrap();
            let h = 1e-5;
            let fd1 = (w.f(c + h) - w.f(c - h)) / (2.0 * h);
            let fd2 = (w.df(c + h) - w.df(c - h)) / (2.0 * h);
            prop_assert!((fd1 - w.df(c)).abs() < 1e-7 * (1.0 + fd1.abs()));
            prop_assert!((fd2 - w.d2f(c)).abs() < 1e-7 * (1.0 + fd2.abs()));
            prop_assert!((w.f(c) - w.f(-c)).abs() < 1e-14);
            if c.abs() < 1.0 {
                prop_assert!(w.f(c) > 0.0);
            }
        }

        #[test]
        fn viscosity_is_bounded_and_odd_about_mean(
            np in 0.1f64..10.0, ratio in 0.06f64..15.0, c in -3.0f64..3.0
        ) {
            let m = ViscosityModel::new(np, np / ratio).unwrap();
            let v = m.eval(c);
            prop_assert!(v >= m.nu_min() - 1e-12 && v <= m.nu_max() + 1e-12);
            prop_assert!(m.nu_min() > 0.0);
            prop_assert!(((m.eval(c) - m.mean()) + (m.eval(-c) - m.mean())).abs() < 1e-12);
            prop_assert!((m.derivative(c) - m.derivative(-c)).abs() < 1e-12);
        }
    }
}
