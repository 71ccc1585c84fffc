//! Degenerate parabolic equation on the circle,
//! `∂_t h + a ∂_s h + b h − κ c ∂_s² h = g`, and its κ-uniform estimates.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::fit::loglog_fit;
use crate::numerics::fourier::Periodic1d;
use crate::{par, Error, Result};

const BLOW_UP: f64 = 1e6;
/// Accepted deviation of the fitted log-ratio slope from zero.
pub const SLOPE_BAND: f64 = 0.15;
/// Accepted max/min ratio spread across κ.
pub const SPREAD_LIMIT: f64 = 2.0;

/// A coefficient or forcing `F(s, t)` on `T¹ × [0, T]`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Field {
    Constant {
        value: f64,
    },
    /// `mean + amplitude · cos(mode (s − speed t) + phase) · exp(rate t)`.
    Wave {
        #[serde(default)]
        mean: f64,
        amplitude: f64,
        mode: u32,
        #[serde(default)]
        speed: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        rate: f64,
    },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { value } => write!(f, "Constant({value})"),
            Self::Wave {
                mean,
                amplitude,
                mode,
                speed,
                phase,
                rate,
            } => write!(
                f,
                "Wave({mean} + {amplitude} cos({mode}(s - {speed} t) + {phase}) e^({rate} t))"
            ),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Field {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    /// `sin(s − phase_shift)`-style single mode with zero mean.
    pub fn mode(amplitude: f64, mode: u32, phase: f64) -> Self {
        Self::Wave {
            mean: 0.0,
            amplitude,
            mode,
            speed: 0.0,
            phase,
            rate: 0.0,
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Wave {
                mean,
                amplitude,
                mode,
                speed,
                phase,
                rate,
            } => mean + amplitude * (*mode as f64 * (s - speed * t) + phase).cos() * (rate * t).exp(),
            Self::Custom(f) => f(s, t),
        }
    }

    pub fn sample(&self, s: &[f64], t: f64) -> Vec<f64> {
        s.iter().map(|&x| self.eval(x, t)).collect()
    }

    fn is_zero(&self) -> bool {
        match self {
            Self::Constant { value } => *value == 0.0,
            Self::Wave { mean, amplitude, .. } => *mean == 0.0 && *amplitude == 0.0,
            Self::Custom(_) => false,
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Wave { amplitude, .. } => *amplitude == 0.0,
            Self::Custom(_) => false,
        }
    }
}

fn default_save_every() -> usize {
    1
}

/// Problem data and discretisation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfPdeProblem {
    pub a: Field,
    pub b: Field,
    pub c: Field,
    pub kappa: f64,
    pub g: Field,
    /// Initial datum; evaluated at `t = 0`.
    pub h0: Field,
    pub t_end: f64,
    pub n: usize,
    pub dt: f64,
    /// Keep every `save_every`-th step in the trajectory (norms use all steps).
    #[serde(default = "default_save_every")]
    pub save_every: usize,
}

impl SurfPdeProblem {
    /// `a = 1, b = 0, c = 1, g = 0, h₀ = sin s`.
    pub fn constant_coefficient(kappa: f64, t_end: f64, n: usize, dt: f64) -> Self {
        Self {
            a: Field::constant(1.0),
            b: Field::constant(0.0),
            c: Field::constant(1.0),
            kappa,
            g: Field::constant(0.0),
            h0: Field::mode(1.0, 1, -PI / 2.0),
            t_end,
            n,
            dt,
            save_every: 1,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|j| 2.0 * PI * j as f64 / self.n as f64).collect()
    }

    fn sample_times(&self) -> [f64; 3] {
        [0.0, 0.5 * self.t_end, self.t_end]
    }

    /// Time-step bound `0.5 · min(h_s / max|a|, 1 / max|b|)`.
    pub fn stable_dt(&self) -> f64 {
        let s = self.grid();
        let hs = 2.0 * PI / self.n as f64;
        let (mut amax, mut bmax) = (0.0f64, 0.0f64);
        for t in self.sample_times() {
            for &x in &s {
                amax = amax.max(self.a.eval(x, t).abs());
                bmax = bmax.max(self.b.eval(x, t).abs());
            }
        }
        let lim_a = if amax > 0.0 { hs / amax } else { f64::INFINITY };
        let lim_b = if bmax > 0.0 { 1.0 / bmax } else { f64::INFINITY };
        0.5 * lim_a.min(lim_b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::invalid(format!("kappa must lie in (0, 1], got {}", self.kappa)));
        }
        if self.n < 8 {
            return Err(Error::invalid(format!("need at least 8 grid points, got {}", self.n)));
        }
        if !(self.t_end > 0.0 && self.dt > 0.0) {
            return Err(Error::invalid("t_end and dt must be positive"));
        }
        if self.save_every == 0 {
            return Err(Error::invalid("save_every must be at least 1"));
        }
        let s = self.grid();
        for t in self.sample_times() {
            for &x in &s {
                let c = self.c.eval(x, t);
                if !(c > 0.0) {
                    return Err(Error::invalid(format!(
                        "diffusion coefficient must be positive, c({x}, {t}) = {c}"
                    )));
                }
            }
        }
        let bound = self.stable_dt();
        if self.dt > bound * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "dt = {} exceeds the stability bound {bound}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Norms of a computed solution (`r = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfNorms {
    /// `sup_t ‖h‖_{L²}`
    pub sup_l2: f64,
    /// `√κ ‖∂_s h‖_{L²L²}`
    pub sqrt_kappa_l2_ds: f64,
    /// `√κ sup_t ‖∂_s h‖_{L²}`
    pub sqrt_kappa_sup_ds: f64,
    /// `κ ‖∂_s² h‖_{L²L²}`
    pub kappa_l2_dss: f64,
    /// `sup_t ‖h‖_{L²} + √κ ‖h‖_{L²H¹}`
    pub lhs27: f64,
    /// `‖g‖_{L¹L²} + ‖h₀‖_{L²}`
    pub rhs27: f64,
    /// `√κ sup_t ‖h‖_{H¹} + κ ‖h‖_{L²H²}`
    pub lhs28: f64,
    /// `‖g‖_{L²L²} + ‖h₀‖_{H¹}`
    pub rhs28: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

impl SurfNorms {
    pub fn ratio27(&self) -> f64 {
        ratio(self.lhs27, self.rhs27)
    }

    pub fn ratio28(&self) -> f64 {
        ratio(self.lhs28, self.rhs28)
    }
}

#[derive(Debug, Clone)]
pub struct SurfPdeSolution {
    pub s: Vec<f64>,
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
    pub norms: SurfNorms,
    /// `∫ h(s, T) ds`
    pub final_mass: f64,
    /// `‖h(t_n)‖_{L²}` at every step.
    pub l2_history: Vec<f64>,
}

impl SurfPdeSolution {
    pub fn final_state(&self) -> &[f64] {
        self.trajectory.last().expect("trajectory holds the initial state")
    }
}

/// `(‖v‖_{L²}, ‖∂_s v‖_{L²}, ‖∂_s² v‖_{L²})` by Parseval.
fn sobolev_parts(op: &Periodic1d, v: &[f64]) -> [f64; 3] {
    let spec = op.transform(v);
    let n = v.len() as f64;
    let scale = 2.0 * PI / (n * n);
    let mut out = [0.0; 3];
    for (k, c) in spec.iter().enumerate() {
        let w = op.wavenumber(k);
        let p = c.norm_sqr() * scale;
        out[0] += p;
        out[1] += w * w * p;
        out[2] += w.powi(4) * p;
    }
    out.map(f64::sqrt)
}

/// Trapezoid rule in time with uniform spacing.
fn time_integral(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// IMEX Euler: `κ c_ref ∂_s²` implicit with `c_ref = max c`, the rest explicit.
pub fn solve_surface_pde(problem: &SurfPdeProblem) -> Result<SurfPdeSolution> {
    problem.validate()?;
    let n = problem.n;
    let s = problem.grid();
    let op = Periodic1d::new(n, 2.0 * PI);
    let steps = (problem.t_end / problem.dt).round().max(1.0) as usize;
    let dt = problem.t_end / steps as f64;
    let kappa = problem.kappa;
    let c_const = problem.c.is_constant();
    let mut c_ref = 0.0f64;
    for t in problem.sample_times() {
        for &x in &s {
            c_ref = c_ref.max(problem.c.eval(x, t));
        }
    }
    let symbols: Vec<f64> = (0..n)
        .map(|k| 1.0 / (1.0 + dt * kappa * c_ref * op.wavenumber(k).powi(2)))
        .collect();
    let g_zero = problem.g.is_zero();

    let mut h = problem.h0.sample(&s, 0.0);
    let mut times = vec![0.0];
    let mut trajectory = vec![h.clone()];
    let mut parts = vec![sobolev_parts(&op, &h)];
    let mut g_norms = vec![if g_zero {
        0.0
    } else {
        sobolev_parts(&op, &problem.g.sample(&s, 0.0))[0]
    }];
    let mut hs_spec: Vec<Complex<f64>>;
    for step in 0..steps {
        let t = step as f64 * dt;
        let spec = op.transform(&h);
        hs_spec = spec.clone();
        op.apply_derivative(&mut hs_spec, 1);
        let hs = op.inverse_real(hs_spec);
        let hss = if c_const {
            None
        } else {
            let mut sp = spec.clone();
            op.apply_derivative(&mut sp, 2);
            Some(op.inverse_real(sp))
        };
        let mut rhs = vec![0.0; n];
        for j in 0..n {
            let x = s[j];
            let mut f = -problem.a.eval(x, t) * hs[j] - problem.b.eval(x, t) * h[j];
            if !g_zero {
                f += problem.g.eval(x, t);
            }
            if let Some(hss) = &hss {
                f += kappa * (problem.c.eval(x, t) - c_ref) * hss[j];
            }
            rhs[j] = h[j] + dt * f;
        }
        let mut rs = op.transform(&rhs);
        for (c, k) in rs.iter_mut().zip(&symbols) {
            *c *= *k;
        }
        h = op.inverse_real(rs);
        let t1 = (step + 1) as f64 * dt;
        let peak = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !peak.is_finite() {
            return Err(Error::NotFinite {
                t: t1,
                field: "h".into(),
            });
        }
        if peak > BLOW_UP {
            return Err(Error::BlowUp { t: t1, norm: peak });
        }
        parts.push(sobolev_parts(&op, &h));
        g_norms.push(if g_zero {
            0.0
        } else {
            sobolev_parts(&op, &problem.g.sample(&s, t1))[0]
        });
        if (step + 1) % problem.save_every == 0 || step + 1 == steps {
            times.push(t1);
            trajectory.push(h.clone());
        }
    }

    let col = |i: usize| -> Vec<f64> { parts.iter().map(|p| p[i]).collect() };
    let (l2, d1, d2) = (col(0), col(1), col(2));
    let sq = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x * x).collect() };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    let l2_l2 = time_integral(&sq(&l2), dt).sqrt();
    let l2_d1 = time_integral(&sq(&d1), dt).sqrt();
    let l2_d2 = time_integral(&sq(&d2), dt).sqrt();
    let h1: Vec<f64> = l2.iter().zip(&d1).map(|(a, b)| a.hypot(*b)).collect();
    let sk = kappa.sqrt();
    let norms = SurfNorms {
        sup_l2: sup(&l2),
        sqrt_kappa_l2_ds: sk * l2_d1,
        sqrt_kappa_sup_ds: sk * sup(&d1),
        kappa_l2_dss: kappa * l2_d2,
        lhs27: sup(&l2) + sk * l2_l2.hypot(l2_d1),
        rhs27: time_integral(&g_norms, dt) + l2[0],
        lhs28: sk * sup(&h1) + kappa * (l2_l2.powi(2) + l2_d1.powi(2) + l2_d2.powi(2)).sqrt(),
        rhs28: time_integral(&sq(&g_norms), dt).sqrt() + h1[0],
    };
    let final_mass = h.iter().sum::<f64>() * 2.0 * PI / n as f64;
    Ok(SurfPdeSolution {
        s,
        times,
        trajectory,
        dt,
        steps,
        norms,
        final_mass,
        l2_history: l2,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KappaRow {
    pub kappa: f64,
    pub norms: SurfNorms,
}

/// Summary of one estimate over the κ sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Flatness {
    /// `max / min` of the positive ratios (1 when all vanish).
    pub spread: f64,
    /// Slope of `log ratio` against `log κ` (0 when all vanish).
    pub slope: f64,
    pub flat: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaReport {
    pub rows: Vec<KappaRow>,
    pub est27: Flatness,
    pub est28: Flatness,
}

fn flatness(kappa: &[f64], ratios: &[f64]) -> Result<Flatness> {
    if ratios.iter().all(|r| *r == 0.0) {
        return Ok(Flatness {
            spread: 1.0,
            slope: 0.0,
            flat: true,
        });
    }
    if ratios.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Ok(Flatness {
            spread: f64::INFINITY,
            slope: f64::NAN,
            flat: false,
        });
    }
    let max = ratios.iter().fold(0.0f64, |m, r| m.max(*r));
    let min = ratios.iter().fold(f64::INFINITY, |m, r| m.min(*r));
    let slope = if kappa.len() >= 2 {
        loglog_fit(kappa, ratios)?.slope
    } else {
        0.0
    };
    let spread = max / min;
    Ok(Flatness {
        spread,
        slope,
        flat: spread <= SPREAD_LIMIT && slope.abs() <= SLOPE_BAND,
    })
}

impl KappaReport {
    pub fn to_csv(&self) -> Result<String> {
        let col = |f: &dyn Fn(&KappaRow) -> f64| -> Vec<f64> { self.rows.iter().map(f).collect() };
        crate::io::csv::render(
            &["kappa", "lhs27", "rhs27", "ratio27", "lhs28", "rhs28", "ratio28"],
            &[
                &col(&|r| r.kappa),
                &col(&|r| r.norms.lhs27),
                &col(&|r| r.norms.rhs27),
                &col(&|r| r.norms.ratio27()),
                &col(&|r| r.norms.lhs28),
                &col(&|r| r.norms.rhs28),
                &col(&|r| r.norms.ratio28()),
            ],
        )
    }
}

/// Solve `base` for each κ and compare the estimate ratios.
pub fn kappa_scaling_report(base: &SurfPdeProblem, kappas: &[f64]) -> Result<KappaReport> {
    if kappas.is_empty() {
        return Err(Error::invalid("empty kappa list"));
    }
    if let Some(k) = kappas.iter().find(|k| !(**k > 0.0 && **k <= 1.0)) {
        return Err(Error::invalid(format!("kappa must lie in (0, 1], got {k}")));
    }
    let solved = par::map(kappas, |&kappa| {
        let mut p = base.clone();
        p.kappa = kappa;
        p.save_every = usize::MAX;
        solve_surface_pde(&p).map(|sol| KappaRow {
            kappa,
            norms: sol.norms,
        })
    });
    let rows: Vec<KappaRow> = solved.into_iter().collect::<Result<_>>()?;
    let r27: Vec<f64> = rows.iter().map(|r| r.norms.ratio27()).collect();
    let r28: Vec<f64> = rows.iter().map(|r| r.norms.ratio28()).collect();
    Ok(KappaReport {
        est27: flatness(kappas, &r27)?,
        est28: flatness(kappas, &r28)?,
        rows,
    })
}
