use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::curve::Curve;
use super::tubular::{wrap, TubePoint, TubularCoords};
use super::{dot, norm, sub};
use crate::fit::{loglog_fit, OrderFit};
use crate::numerics::fourier::{Periodic1d, TrigInterpolant};
use crate::numerics::{linspace, quad};
use crate::{par, Error, Result, Vec2};

/// Newton tolerance on the `(d_ε, S_ε)` residual.
const INVERSION_TOL: f64 = 1e-13;
const INVERSION_MAX_ITER: usize = 60;
/// Radial lattice nodes used by [`make_eps_coords`].
const LATTICE_NR: usize = 13;
/// Defects below this count as exactly zero in the order fit.
const DEFECT_FLOOR: f64 = 1e-13;
pub const MIN_ORTHOGONALITY_ORDER: f64 = 1.8;

/// A scalar field on the tube, given in tubular coordinates `(r, s) = (d₀, S₀)`.
pub trait TubePerturbation: Send + Sync + std::fmt::Debug {
    /// `[value, ∂_r, ∂_s]` at `(r, s)`.
    fn eval(&self, r: f64, s: f64) -> [f64; 3];
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl TubePerturbation for Zero {
    fn eval(&self, _r: f64, _s: f64) -> [f64; 3] {
        [0.0; 3]
    }
}

/// `exp(1 − 1/(1 − t²))` for `|t| < 1`, else 0; returns value and d/dt.
fn bump(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    let b = (1.0 - 1.0 / q).exp();
    (b, -2.0 * t / (q * q) * b)
}

/// Radial bump `amplitude · b(r / width)`, depending on `d₀` only.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub amplitude: f64,
    pub width: f64,
}

impl TubePerturbation for Bump {
    fn eval(&self, r: f64, _s: f64) -> [f64; 3] {
        let (b, db) = bump(r / self.width);
        [self.amplitude * b, self.amplitude * db / self.width, 0.0]
    }
}

/// `amplitude · b(r / width) · cos(mode · s + phase)`.
#[derive(Debug, Clone, Copy)]
pub struct ModalBump {
    pub amplitude: f64,
    pub width: f64,
    pub mode: u32,
    pub phase: f64,
}

impl TubePerturbation for ModalBump {
    fn eval(&self, r: f64, s: f64) -> [f64; 3] {
        let (b, db) = bump(r / self.width);
        let k = self.mode as f64;
        let (sn, cs) = (k * s + self.phase).sin_cos();
        let a = self.amplitude;
        [a * b * cs, a * db / self.width * cs, -a * k * b * sn]
    }
}

/// Field tabulated on a uniform `r` grid times the curve's `s` grid, with
/// its `r`-derivative. Cubic Hermite in `r`, trigonometric in `s`.
#[derive(Debug, Clone)]
pub struct LatticeField {
    r: Vec<f64>,
    ns: usize,
    values: Vec<f64>,
    dr: Vec<f64>,
    rows: Vec<(TrigInterpolant, TrigInterpolant)>,
}

impl LatticeField {
    /// `values` and `dr` are stored row by row (one row per `r` node).
    pub fn new(r: Vec<f64>, ns: usize, values: Vec<f64>, dr: Vec<f64>) -> Result<Self> {
        let nr = r.len();
        if nr < 2 || values.len() != nr * ns || dr.len() != nr * ns {
            return Err(Error::GridMismatch {
                expected: nr * ns,
                found: values.len().min(dr.len()),
            });
        }
        let rows = (0..nr)
            .map(|i| {
                let row = i * ns..(i + 1) * ns;
                (
                    TrigInterpolant::new(&values[row.clone()], 2.0 * PI),
                    TrigInterpolant::new(&dr[row], 2.0 * PI),
                )
            })
            .collect();
        Ok(Self {
            r,
            ns,
            values,
            dr,
            rows,
        })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dr(&self) -> &[f64] {
        &self.dr
    }

    /// `Σ c_k F_k` over fields on the same lattice.
    pub fn combine(terms: &[(f64, &LatticeField)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("empty lattice combination"))?
            .1;
        let len = first.values.len();
        let mut values = vec![0.0; len];
        let mut dr = vec![0.0; len];
        for (c, f) in terms {
            if f.values.len() != len || f.ns != first.ns {
                return Err(Error::GridMismatch {
                    expected: len,
                    found: f.values.len(),
                });
            }
            for k in 0..len {
                values[k] += c * f.values[k];
                dr[k] += c * f.dr[k];
            }
        }
        Self::new(first.r.clone(), first.ns, values, dr)
    }
}

impl TubePerturbation for LatticeField {
    fn eval(&self, r: f64, s: f64) -> [f64; 3] {
        let nr = self.r.len();
        let h = self.r[1] - self.r[0];
        let r = r.clamp(self.r[0], self.r[nr - 1]);
        let i = (((r - self.r[0]) / h).floor() as usize).min(nr - 2);
        let t = (r - self.r[i]) / h;
        let [v0, v0s, _] = self.rows[i].0.eval(s);
        let [m0, m0s, _] = self.rows[i].1.eval(s);
        let [v1, v1s, _] = self.rows[i + 1].0.eval(s);
        let [m1, m1s, _] = self.rows[i + 1].1.eval(s);
        let (t2, t3) = (t * t, t * t * t);
        let b = [
            2.0 * t3 - 3.0 * t2 + 1.0,
            t3 - 2.0 * t2 + t,
            -2.0 * t3 + 3.0 * t2,
            t3 - t2,
        ];
        let db = [
            6.0 * t2 - 6.0 * t,
            3.0 * t2 - 4.0 * t + 1.0,
            -6.0 * t2 + 6.0 * t,
            3.0 * t2 - 2.0 * t,
        ];
        let mix =
            |w: &[f64; 4], a0: f64, d0: f64, a1: f64, d1: f64| w[0] * a0 + w[1] * h * d0 + w[2] * a1 + w[3] * h * d1;
        [
            mix(&b, v0, m0, v1, m1),
            mix(&db, v0, m0, v1, m1) / h,
            mix(&b, v0s, m0s, v1s, m1s),
        ]
    }
}

/// `(d_ε, S_ε)` and their gradients at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsPoint {
    pub d: f64,
    /// `S_ε` wrapped into `[0, 2π)`.
    pub s: f64,
    pub grad_d: Vec2,
    pub grad_s: Vec2,
    pub tube: TubePoint,
}

impl EpsPoint {
    /// `J_ε = (|∇d_ε|²|∇S_ε|² − (∇d_ε·∇S_ε)²)^{-1/2}`.
    pub fn jacobian(&self) -> f64 {
        let (a, b) = (self.grad_d, self.grad_s);
        let g = dot(a, a) * dot(b, b) - dot(a, b).powi(2);
        1.0 / g.max(0.0).sqrt()
    }

    /// `∇d_ε · ∇S_ε`.
    pub fn orthogonality(&self) -> f64 {
        dot(self.grad_d, self.grad_s)
    }
}

/// Perturbed tubular coordinates `d_ε = d₀ + ε^η d̃`, `S_ε = S₀ + ε^η S̃/2π`.
#[derive(Debug, Clone)]
pub struct EpsCoords<'a> {
    tube: TubularCoords<'a>,
    eps: f64,
    eta: f64,
    scale: f64,
    d_tilde: Arc<dyn TubePerturbation>,
    s_tilde: Arc<dyn TubePerturbation>,
    lattice_r: Vec<f64>,
    lattice_s: Vec<f64>,
    /// `X_ε` on the lattice, row per `r` node.
    lattice: Vec<Vec2>,
}

fn wrap_pm(v: f64) -> f64 {
    let w = v.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Support radius `δ′` of the `d̃` perturbation.
pub fn support_radius(delta: f64) -> f64 {
    2.0 * delta
}

/// Build `ε`-coordinates and invert them on an `(r, s)` lattice.
pub fn make_eps_coords<'a>(
    curve: &'a Curve,
    d_tilde: Arc<dyn TubePerturbation>,
    s_tilde: Arc<dyn TubePerturbation>,
    eps: f64,
    eta: f64,
) -> Result<EpsCoords<'a>> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be non-negative, got {eps}")));
    }
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    let tube = TubularCoords::new(curve);
    let delta = tube.delta();
    let dp = support_radius(delta);
    for &r in &linspace(dp, 3.0 * delta, 9) {
        for &s in curve.s().iter().step_by(8) {
            for sign in [-1.0, 1.0] {
                if d_tilde.eval(sign * r, s)[0].abs() > 1e-14 {
                    return Err(Error::invalid(format!(
                        "d-perturbation does not vanish at r = {}, s = {s}",
                        sign * r
                    )));
                }
            }
        }
    }
    let stride = (curve.len() / 128).max(1);
    let mut coords = EpsCoords {
        tube,
        eps,
        eta,
        scale: eps.powf(eta),
        d_tilde,
        s_tilde,
        lattice_r: linspace(-1.5 * delta, 1.5 * delta, LATTICE_NR),
        lattice_s: curve.s().iter().step_by(stride).copied().collect(),
        lattice: Vec::new(),
    };
    // X_ε can only exist if d_ε increases along every normal ray.
    for &r in &linspace(-3.0 * delta, 3.0 * delta, 4 * LATTICE_NR + 1) {
        for &s in &coords.lattice_s {
            let dr = 1.0 + coords.scale * coords.d_tilde.eval(r, s)[1];
            if dr <= 0.0 {
                return Err(Error::InversionFailed { r, s, eps });
            }
        }
    }
    let nodes: Vec<(f64, f64)> = coords
        .lattice_r
        .iter()
        .flat_map(|&r| coords.lattice_s.iter().map(move |&s| (r, s)))
        .collect();
    let mapped = par::map(&nodes, |&(r, s)| coords.forward(r, s));
    coords.lattice = mapped.into_iter().collect::<Result<_>>()?;
    Ok(coords)
}

impl<'a> EpsCoords<'a> {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tube(&self) -> &TubularCoords<'a> {
        &self.tube
    }

    pub fn lattice_r(&self) -> &[f64] {
        &self.lattice_r
    }

    pub fn lattice_s(&self) -> &[f64] {
        &self.lattice_s
    }

    /// Precomputed `X_ε(r_i, s_j)`.
    pub fn lattice_point(&self, i: usize, j: usize) -> Vec2 {
        self.lattice[i * self.lattice_s.len() + j]
    }

    /// `(d_ε, S_ε)` and gradients at the tube point `tp`.
    pub fn at_tube_point(&self, tp: TubePoint) -> EpsPoint {
        let n = tp.grad_d();
        let gs0 = tp.grad_s();
        let [dv, dr, ds] = self.d_tilde.eval(tp.d, tp.s);
        let [sv, sr, ss] = self.s_tilde.eval(tp.d, tp.s);
        let k = self.scale;
        let q = k / (2.0 * PI);
        EpsPoint {
            d: tp.d + k * dv,
            s: wrap(tp.s + q * sv),
            grad_d: [
                n[0] + k * (dr * n[0] + ds * gs0[0]),
                n[1] + k * (dr * n[1] + ds * gs0[1]),
            ],
            grad_s: [
                gs0[0] + q * (sr * n[0] + ss * gs0[0]),
                gs0[1] + q * (sr * n[1] + ss * gs0[1]),
            ],
            tube: tp,
        }
    }

    /// `(d_ε, S_ε)` at the tubular point `(d₀, S₀) = (r, s)`.
    pub fn at_tube(&self, r: f64, s: f64) -> EpsPoint {
        let frame = self.tube.curve().frame(s);
        self.at_tube_point(TubePoint {
            d: r,
            s: wrap(s),
            frame,
        })
    }

    /// `(d_ε, S_ε)` at a physical point.
    pub fn eval(&self, x: Vec2) -> Result<EpsPoint> {
        Ok(self.at_tube_point(self.tube.project(x)?))
    }

    fn eval_near(&self, x: Vec2, s_hint: f64) -> Result<EpsPoint> {
        Ok(self.at_tube_point(self.tube.project_near(x, s_hint)?))
    }

    /// `X_ε(r, s)` by damped Newton on `(d_ε, S_ε)(x) = (r, s)`.
    pub fn forward(&self, r: f64, s: f64) -> Result<Vec2> {
        let fail = || Error::InversionFailed { r, s, eps: self.eps };
        let mut x = self.tube.point(r, s);
        let mut p = self.eval_near(x, s).map_err(|_| fail())?;
        let resid = |p: &EpsPoint| [p.d - r, wrap_pm(p.s - s)];
        let mut f = resid(&p);
        for _ in 0..INVERSION_MAX_ITER {
            let size = f[0].abs().max(f[1].abs() * p.tube.frame.speed);
            if size < INVERSION_TOL {
                return Ok(x);
            }
            let (a, b) = (p.grad_d, p.grad_s);
            let det = a[0] * b[1] - a[1] * b[0];
            if det == 0.0 || !det.is_finite() {
                return Err(fail());
            }
            let dx = [-(b[1] * f[0] - a[1] * f[1]) / det, -(-b[0] * f[0] + a[0] * f[1]) / det];
            let mut lambda = 1.0;
            loop {
                let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
                if let Ok(q) = self.eval_near(trial, p.tube.s) {
                    let g = resid(&q);
                    let old = f[0].hypot(f[1] * p.tube.frame.speed);
                    if g[0].hypot(g[1] * q.tube.frame.speed) < old || lambda < 1e-3 {
                        x = trial;
                        p = q;
                        f = g;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-4 {
                    return Err(fail());
                }
            }
        }
        Err(fail())
    }

    /// Central-difference `DX_ε` at `(r, s)`; columns `∂_r X_ε`, `∂_s X_ε`.
    pub fn forward_derivative(&self, r: f64, s: f64) -> Result<[Vec2; 2]> {
        let delta = self.tube.delta();
        let (hr, hs) = (1e-4 * delta, 1e-4);
        let (rp, rm) = (self.forward(r + hr, s)?, self.forward(r - hr, s)?);
        let (sp, sm) = (self.forward(r, s + hs)?, self.forward(r, s - hs)?);
        Ok([
            [(rp[0] - rm[0]) / (2.0 * hr), (rp[1] - rm[1]) / (2.0 * hr)],
            [(sp[0] - sm[0]) / (2.0 * hs), (sp[1] - sm[1]) / (2.0 * hs)],
        ])
    }

    /// Relative gap between the closed-form `J_ε` and `|det DX_ε|` by differences.
    pub fn jacobian_defect(&self, r: f64, s: f64) -> Result<f64> {
        let [xr, xs] = self.forward_derivative(r, s)?;
        let fd = (xr[0] * xs[1] - xr[1] * xs[0]).abs();
        let p = self.eval(self.forward(r, s)?)?;
        let j = p.jacobian();
        Ok((fd - j).abs() / j)
    }

    /// `max |∂_r X_ε ⊗ n_ε + ∂_s X_ε ⊗ ∇S_ε − I|` at `(r, s)`.
    pub fn identity_residual(&self, r: f64, s: f64) -> Result<f64> {
        let [xr, xs] = self.forward_derivative(r, s)?;
        let p = self.eval(self.forward(r, s)?)?;
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let m = xr[i] * p.grad_d[j] + xs[i] * p.grad_s[j];
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m - id).abs());
            }
        }
        Ok(worst)
    }

    /// Round trips in both directions over the lattice:
    /// `(d_ε, S_ε) ∘ X_ε` and `X_ε ∘ (d_ε, S_ε)` on points of `Γ(δ)`.
    pub fn round_trip_defect(&self) -> Result<f64> {
        let ns = self.lattice_s.len();
        let idx: Vec<usize> = (0..self.lattice.len()).collect();
        let forward = par::map(&idx, |&k| -> Result<f64> {
            let (r, s) = (self.lattice_r[k / ns], self.lattice_s[k % ns]);
            let p = self.eval(self.lattice[k])?;
            Ok((p.d - r).abs().max(wrap_pm(p.s - s).abs()))
        });
        let delta = self.tube.delta();
        let backward = par::map(&idx, |&k| -> Result<f64> {
            let r = self.lattice_r[k / ns] / 1.5;
            let x = self.tube.point(r.clamp(-delta, delta), self.lattice_s[k % ns]);
            let p = self.eval(x)?;
            let y = self.forward(p.d, p.s)?;
            Ok(norm(sub(x, y)))
        });
        let mut worst = 0.0f64;
        for v in forward.into_iter().chain(backward) {
            worst = worst.max(v?);
        }
        Ok(worst)
    }

    /// Sampled check of `Γ(δ) ⊆ Γ^ε(3δ/2) ⊆ Γ(2δ)`.
    pub fn nesting_holds(&self) -> Result<bool> {
        let delta = self.tube.delta();
        for &s in &self.lattice_s {
            for &r in &linspace(-delta, delta, 9) {
                if self.at_tube(r, s).d.abs() >= 1.5 * delta {
                    return Ok(false);
                }
            }
        }
        for x in &self.lattice {
            if self.tube.project(*x)?.d.abs() > 2.0 * delta {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimum of the closed-form `J_ε` over the lattice.
    pub fn min_jacobian(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for x in &self.lattice {
            m = m.min(self.eval(*x)?.jacobian());
        }
        Ok(m)
    }

    /// Coordinate-check CSV over the lattice.
    pub fn report_csv(&self) -> Result<String> {
        let ns = self.lattice_s.len();
        let mut cols: [Vec<f64>; 7] = Default::default();
        for (k, x) in self.lattice.iter().enumerate() {
            let (r, s) = (self.lattice_r[k / ns], self.lattice_s[k % ns]);
            let p = self.eval(*x)?;
            cols[0].push(r);
            cols[1].push(s);
            cols[2].push(x[0]);
            cols[3].push(x[1]);
            cols[4].push(p.jacobian());
            cols[5].push((p.d - r).abs().max(wrap_pm(p.s - s).abs()));
            cols[6].push(p.orthogonality());
        }
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        crate::io::csv::render(&["r", "s", "x", "y", "jacobian", "round_trip", "orthogonality"], &refs)
    }
}

/// Largest `ε` in `ε₀, ε₀/2, …` for which the lattice inversion converges
/// and the nesting holds.
pub fn detect_eps1(
    curve: &Curve,
    d_tilde: Arc<dyn TubePerturbation>,
    s_tilde: Arc<dyn TubePerturbation>,
    eps0: f64,
    eta: f64,
    max_halvings: usize,
) -> Result<f64> {
    let mut eps = eps0;
    for _ in 0..=max_halvings {
        if let Ok(c) = make_eps_coords(curve, d_tilde.clone(), s_tilde.clone(), eps, eta) {
            if c.nesting_holds().unwrap_or(false) {
                return Ok(eps);
            }
        }
        eps *= 0.5;
    }
    Err(Error::InversionFailed { r: 0.0, s: 0.0, eps })
}

/// A `d̃` perturbation with the `S̃` corrections that make
/// `∇d_ε·∇S_ε = O(ε^{4η})`.
///
/// With `e = ε^η` and `S̃/2π = S_½ + e S_1 + e² S_{3/2}`, each correction
/// vanishes on the curve and solves, in the metric `g = |∇S₀|²`,
/// `∂_r S_½ = −g ∂_s d̃`, `∂_r S_1 = −(∂_r d̃ ∂_r S_½ + g ∂_s d̃ ∂_s S_½)` and
/// likewise for `S_{3/2}` from `S_1`.
#[derive(Debug, Clone)]
pub struct OrthogonalFamily<'a> {
    curve: &'a Curve,
    d_tilde: Arc<dyn TubePerturbation>,
    corrections: [LatticeField; 3],
}

impl<'a> OrthogonalFamily<'a> {
    /// Tabulate the corrections on `nr` (odd) radial nodes over `[−3δ, 3δ]`.
    pub fn new(curve: &'a Curve, d_tilde: Arc<dyn TubePerturbation>, nr: usize) -> Result<Self> {
        if nr < 5 || nr % 2 == 0 {
            return Err(Error::invalid(format!(
                "radial node count must be odd and ≥ 5, got {nr}"
            )));
        }
        let delta = curve.delta();
        let r = linspace(-3.0 * delta, 3.0 * delta, nr);
        let hr = r[1] - r[0];
        let ns = curve.len();
        let op = Periodic1d::new(ns, 2.0 * PI);
        let mid = nr / 2;
        // d̃ and the metric on the lattice.
        let mut dr = vec![0.0; nr * ns];
        let mut ds = vec![0.0; nr * ns];
        let mut g = vec![0.0; nr * ns];
        for i in 0..nr {
            for j in 0..ns {
                let s = curve.s()[j];
                let [_, a, b] = d_tilde.eval(r[i], s);
                let k = i * ns + j;
                dr[k] = a;
                ds[k] = b;
                let stretch = curve.speed()[j] * (1.0 - r[i] * curve.curvature()[j]);
                g[k] = 1.0 / (stretch * stretch);
            }
        }
        let integrate = |rate: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; nr * ns];
            for j in 0..ns {
                let up: Vec<f64> = (mid..nr).map(|i| rate[i * ns + j]).collect();
                let down: Vec<f64> = (0..=mid).rev().map(|i| rate[i * ns + j]).collect();
                let fu = quad::cumulative(&up, hr);
                let fd = quad::cumulative(&down, hr);
                for (k, v) in fu.iter().enumerate() {
                    out[(mid + k) * ns + j] = *v;
                }
                for (k, v) in fd.iter().enumerate() {
                    out[(mid - k) * ns + j] = -v;
                }
            }
            out
        };
        let s_derivative = |vals: &[f64]| -> Vec<f64> {
            let mut out = Vec::with_capacity(nr * ns);
            for i in 0..nr {
                out.extend(op.derivative(&vals[i * ns..(i + 1) * ns], 1));
            }
            out
        };
        let mut rate: Vec<f64> = (0..nr * ns).map(|k| -g[k] * ds[k]).collect();
        let mut fields = Vec::with_capacity(3);
        for _ in 0..3 {
            let vals = integrate(&rate);
            let vs = s_derivative(&vals);
            let next: Vec<f64> = (0..nr * ns)
                .map(|k| -(dr[k] * rate[k] + g[k] * ds[k] * vs[k]))
                .collect();
            fields.push(LatticeField::new(r.clone(), ns, vals, rate)?);
            rate = next;
        }
        let corrections: [LatticeField; 3] = fields.try_into().map_err(|_| Error::invalid("correction count"))?;
        Ok(Self {
            curve,
            d_tilde,
            corrections,
        })
    }

    pub fn d_tilde(&self) -> Arc<dyn TubePerturbation> {
        self.d_tilde.clone()
    }

    /// `S_½`, `S_1`, `S_{3/2}`.
    pub fn corrections(&self) -> &[LatticeField; 3] {
        &self.corrections
    }

    /// The tabulated `S̃` for `ε^η = e`.
    pub fn s_tilde(&self, eps: f64, eta: f64) -> Result<LatticeField> {
        let e = eps.powf(eta);
        let [a, b, c] = &self.corrections;
        LatticeField::combine(&[(2.0 * PI, a), (2.0 * PI * e, b), (2.0 * PI * e * e, c)])
    }

    pub fn coords(&self, eps: f64, eta: f64) -> Result<EpsCoords<'a>> {
        let s_tilde = Arc::new(self.s_tilde(eps, eta)?);
        make_eps_coords(self.curve, self.d_tilde.clone(), s_tilde, eps, eta)
    }

    /// Coordinates without the `S̃` correction.
    pub fn uncorrected(&self, eps: f64, eta: f64) -> Result<EpsCoords<'a>> {
        make_eps_coords(self.curve, self.d_tilde.clone(), Arc::new(Zero), eps, eta)
    }

    /// `max |∇d_ε·∇S_ε|` over the lattice nodes of `Γ(2δ)`.
    pub fn orthogonality_defect(&self, coords: &EpsCoords<'_>) -> f64 {
        let delta = self.curve.delta();
        let r = self.corrections[0].r();
        let mut worst = 0.0f64;
        for &ri in r.iter().filter(|v| v.abs() <= 2.0 * delta + 1e-12) {
            for &s in self.curve.s() {
                worst = worst.max(coords.at_tube(ri, s).orthogonality().abs());
            }
        }
        worst
    }
}

/// Observed orthogonality defects and their fitted order in `ε`.
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub eps: Vec<f64>,
    pub defect: Vec<f64>,
    /// `None` when every defect is below the round-off floor.
    pub fit: Option<OrderFit>,
    pub passes: bool,
}

impl OrthogonalityReport {
    pub fn to_csv(&self) -> Result<String> {
        crate::io::csv::render(&["eps", "defect"], &[&self.eps, &self.defect])
    }
}

/// Fit `max|∇d_ε·∇S_ε|` against `ε` for the corrected family (`η = ½`).
pub fn verify_orthogonality_asymptotics(
    eps_list: &[f64],
    family: &OrthogonalFamily<'_>,
) -> Result<OrthogonalityReport> {
    let mut defect = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let c = family.coords(eps, 0.5)?;
        defect.push(family.orthogonality_defect(&c));
    }
    if defect.iter().all(|d| *d <= DEFECT_FLOOR) {
        return Ok(OrthogonalityReport {
            eps: eps_list.to_vec(),
            defect,
            fit: None,
            passes: true,
        });
    }
    let fit = loglog_fit(eps_list, &defect)?;
    Ok(OrthogonalityReport {
        eps: eps_list.to_vec(),
        defect,
        passes: fit.slope >= MIN_ORTHOGONALITY_ORDER,
        fit: Some(fit),
    })
}
