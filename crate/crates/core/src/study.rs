//! ε-sweeps and mobility comparisons on a bubble in a periodic box, with
//! the error norms of the leading-order theory and log-log order fits.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fit::{loglog_fit, OrderFit};
use crate::geometry::{Curve, TubularCoords};
use crate::nsac::{self, Domain, Grid, RunOutput, SimConfig, Snapshot};
use crate::reference::{Cutoff, ReferenceScenario, ScenarioKind};
use crate::{Error, Profile, Result, Vec2, ViscosityModel};

/// Bubble set-up shared by every run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyScenario {
    /// Side of the square periodic box.
    pub box_size: f64,
    pub center: Vec2,
    pub r0: f64,
    /// Background flow.
    pub velocity: Vec2,
    /// Cutoff half-width `δ`.
    pub delta: f64,
    pub t_end: f64,
    /// Cells per `ε`; the study couples `h = ε / cells_per_eps`.
    pub cells_per_eps: f64,
    pub viscosity: ViscosityModel,
    /// Cap on `S Δt`.
    pub ac_cap: f64,
    /// Snapshots per run, evenly spaced in steps.
    pub snapshots: usize,
}

impl Default for StudyScenario {
    fn default() -> Self {
        Self {
            box_size: 2.0,
            center: [1.0, 1.0],
            r0: 0.5,
            velocity: [0.0, 0.0],
            delta: 0.15,
            t_end: 0.03,
            cells_per_eps: 2.0,
            viscosity: ViscosityModel::constant(0.1),
            ac_cap: 0.005,
            snapshots: 10,
        }
    }
}

impl StudyScenario {
    pub fn cells(&self, eps: f64) -> usize {
        (self.cells_per_eps * self.box_size / eps).round() as usize
    }

    pub fn sim_config(&self, eps: f64, alpha: f64) -> SimConfig {
        let domain = Domain {
            origin: [0.0, 0.0],
            size: [self.box_size, self.box_size],
        };
        let mut cfg = SimConfig::bubble(domain, self.cells(eps), eps, alpha, self.center, self.r0, self.t_end);
        cfg.viscosity = self.viscosity;
        cfg.initial.velocity = self.velocity;
        cfg.initial.cutoff = Some(self.delta);
        cfg.time.ac_cap = self.ac_cap;
        cfg
    }

    pub fn reference(&self, eps: f64, alpha: f64, kind: ScenarioKind) -> ReferenceScenario {
        ReferenceScenario {
            kind,
            center: self.center,
            r0: self.r0,
            velocity: self.velocity,
            eps,
            alpha,
            cutoff: Cutoff { delta: self.delta },
            periodic: Some(crate::reference::PeriodicBox {
                origin: [0.0, 0.0],
                size: [self.box_size, self.box_size],
            }),
        }
    }

    pub fn validate(&self, eps: f64, alpha: f64) -> Result<()> {
        let s = self.reference(eps, alpha, ScenarioKind::MobilityCorrectedBubble);
        s.validate(self.t_end, Some(([0.0, 0.0], [self.box_size, self.box_size])))?;
        if self.snapshots < 2 {
            return Err(Error::invalid("a study run needs at least two snapshots"));
        }
        self.sim_config(eps, alpha).validate()
    }
}

/// Error norms of one run against one reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub eps: f64,
    pub alpha: f64,
    /// `‖c − c_ref‖_{L^∞(0,T; L²)}`.
    pub linf_l2: f64,
    /// `ε^{1/4} ‖∇(c − c_ref)‖_{L²(0,T; L²(Ω \ Γ(δ)))}`.
    pub grad_off: f64,
    /// `ε^{1/4} ‖∇_τ (c − c_ref)‖_{L²(0,T; L²(Γ(2δ)))}`.
    pub grad_tangential: f64,
    /// `ε ‖∇(c − c_ref)‖_{L²(0,T; L²(Γ(2δ)))}`.
    pub grad_near: f64,
    /// `max_t |R_fit − R_ref|`.
    pub radius_error: f64,
}

impl NormRecord {
    pub const NAMES: [&'static str; 5] = ["linf_l2", "grad_off", "grad_tangential", "grad_near", "radius_error"];

    pub fn values(&self) -> [f64; 5] {
        [
            self.linf_l2,
            self.grad_off,
            self.grad_tangential,
            self.grad_near,
            self.radius_error,
        ]
    }
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

/// Norms of `c − c_ref` over the snapshots; the tangential direction comes
/// from tubular coordinates around the reference circle.
pub fn error_norms(
    snapshots: &[Snapshot],
    grid: &Grid,
    scenario: &ReferenceScenario,
    profile: &Profile,
    t_end: f64,
) -> Result<NormRecord> {
    if snapshots.len() < 2 {
        return Err(Error::MissingSnapshots(format!(
            "need at least 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    let tol = 1e-9 * t_end.max(1.0);
    if snapshots[0].t.abs() > tol || (snapshots.last().unwrap().t - t_end).abs() > tol {
        return Err(Error::MissingSnapshots(format!(
            "snapshots span [{}, {}], need [0, {t_end}]",
            snapshots[0].t,
            snapshots.last().unwrap().t
        )));
    }
    let eps = scenario.eps;
    let delta = scenario.cutoff.delta;
    let (nx, h) = (grid.nx, grid.h);
    let area = h * h;
    let mut times = Vec::new();
    let (mut l2, mut off, mut tang, mut near) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut radius_error = 0.0f64;
    for snap in snapshots {
        if snap.c.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                found: snap.c.len(),
            });
        }
        let t = snap.t;
        let center = scenario.center_at(t);
        let radius = scenario.radius_at(t)?;
        let curve = Curve::circle(center, radius, 64)?;
        if 2.0 * delta >= radius {
            return Err(Error::invalid(format!(
                "Γ(2δ) with δ = {delta} does not fit inside R = {radius}"
            )));
        }
        // 3 δ_tube = 0.997 R ≥ 2δ covers the band
        let tube = TubularCoords::with_delta(&curve, radius / 3.01)?;
        let mut d = vec![0.0; grid.len()];
        let mut err = vec![0.0; grid.len()];
        for k in 0..grid.len() {
            let x = grid.center(k % nx, k / nx);
            d[k] = scenario.signed_distance(x, t)?;
            err[k] = snap.c[k] - scenario.cutoff.blend(d[k], eps, profile);
        }
        let rows: Vec<usize> = (0..grid.ny).collect();
        let parts = crate::par::map(&rows, |&j| -> Result<[f64; 4]> {
            let mut acc = [0.0; 4];
            for i in 0..nx {
                let k = grid.idx(i, j);
                let (ii, jj) = (i as isize, j as isize);
                let g = [
                    (grid.cell_clamped(&err, ii + 1, jj) - grid.cell_clamped(&err, ii - 1, jj)) / (2.0 * h),
                    (grid.cell_clamped(&err, ii, jj + 1) - grid.cell_clamped(&err, ii, jj - 1)) / (2.0 * h),
                ];
                let g2 = g[0] * g[0] + g[1] * g[1];
                acc[0] += err[k] * err[k];
                if d[k].abs() > delta {
                    acc[1] += g2;
                }
                if d[k].abs() < 2.0 * delta {
                    acc[3] += g2;
                    // project the nearest periodic image of x
                    let x = grid.center(i, j);
                    let disp = scenario
                        .periodic
                        .map_or([x[0] - center[0], x[1] - center[1]], |b| b.displacement(x, center));
                    let tp = tube.project([center[0] + disp[0], center[1] + disp[1]])?;
                    let gs = tp.grad_s();
                    let n = gs[0].hypot(gs[1]);
                    let gt = (g[0] * gs[0] + g[1] * gs[1]) / n;
                    acc[2] += gt * gt;
                }
            }
            Ok(acc)
        });
        let mut acc = [0.0; 4];
        for p in parts {
            let p = p?;
            for q in 0..4 {
                acc[q] += p[q];
            }
        }
        times.push(t);
        l2.push((acc[0] * area).sqrt());
        off.push(acc[1] * area);
        tang.push(acc[2] * area);
        near.push(acc[3] * area);
        if let Some(fit) = nsac::extract_interface(&snap.c, grid).ok().and_then(|i| i.circle) {
            radius_error = radius_error.max((fit.radius - radius).abs());
        } else {
            radius_error = f64::NAN;
        }
    }
    let q = eps.powf(0.25);
    Ok(NormRecord {
        eps,
        alpha: scenario.alpha,
        linf_l2: l2.iter().copied().fold(0.0, f64::max),
        grad_off: q * trapezoid(&times, &off).sqrt(),
        grad_tangential: q * trapezoid(&times, &tang).sqrt(),
        grad_near: eps * trapezoid(&times, &near).sqrt(),
        radius_error,
    })
}

/// Runs one configuration keeping `count` snapshots spread over the run.
pub fn run_with_snapshots(config: &SimConfig, profile: &Profile, count: usize) -> Result<RunOutput> {
    let mut cfg = config.clone();
    let state = nsac::init_state(&cfg, profile)?;
    let stepper = nsac::Stepper::new(&cfg)?;
    let dt = stepper.stable_dt(&state);
    let steps = (cfg.t_end / dt).ceil().max(1.0) as usize;
    cfg.output.snapshot_every = (steps / count.max(1)).max(1);
    cfg.output.diagnostics_every = (steps / 100).max(1);
    let mut state = state;
    nsac::run_from(&cfg, &mut state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub eps: f64,
    pub cells: usize,
    pub steps: usize,
    pub seconds: f64,
    /// Against the drift-corrected reference.
    pub corrected: NormRecord,
    /// Against pure transport, radius fixed at `R₀`.
    pub transport: NormRecord,
    pub energy_excess: f64,
    pub max_divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFit {
    pub norm: String,
    pub reference: String,
    pub fit: OrderFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub alpha: f64,
    pub scenario: StudyScenario,
    pub records: Vec<RunRecord>,
    /// Orders against `ε` for each norm and reference (needs ≥ 3 runs).
    pub fits: Vec<NormFit>,
    /// Set when a run failed; `records` then holds the runs before it.
    pub failure: Option<String>,
}

impl ErrorReport {
    pub fn fit(&self, norm: &str, reference: &str) -> Option<&OrderFit> {
        self.fits
            .iter()
            .find(|f| f.norm == norm && f.reference == reference)
            .map(|f| &f.fit)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec!["eps".to_string(), "cells".into(), "steps".into()];
        for r in ["corrected", "transport"] {
            for n in NormRecord::NAMES {
                header.push(format!("{r}_{n}"));
            }
        }
        let mut cols: Vec<Vec<f64>> = vec![
            self.records.iter().map(|r| r.eps).collect(),
            self.records.iter().map(|r| r.cells as f64).collect(),
            self.records.iter().map(|r| r.steps as f64).collect(),
        ];
        for pick in [|r: &RunRecord| r.corrected, |r: &RunRecord| r.transport] {
            for q in 0..5 {
                cols.push(self.records.iter().map(|r| pick(r).values()[q]).collect());
            }
        }
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        crate::io::csv::render(&header, &refs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn fits_for(records: &[RunRecord]) -> Vec<NormFit> {
    if records.len() < 3 {
        return Vec::new();
    }
    let eps: Vec<f64> = records.iter().map(|r| r.eps).collect();
    let mut out = Vec::new();
    for (reference, pick) in [
        (
            "corrected",
            (|r: &RunRecord| r.corrected) as fn(&RunRecord) -> NormRecord,
        ),
        ("transport", |r: &RunRecord| r.transport),
    ] {
        for (q, name) in NormRecord::NAMES.iter().enumerate() {
            let y: Vec<f64> = records.iter().map(|r| pick(r).values()[q]).collect();
            if let Ok(fit) = loglog_fit(&eps, &y) {
                out.push(NormFit {
                    norm: name.to_string(),
                    reference: reference.into(),
                    fit,
                });
            }
        }
    }
    out
}

/// One full-model run per `ε` (in parallel), each compared against the
/// drift-corrected and the pure-transport reference.
pub fn convergence_study(
    alpha: f64,
    eps_list: &[f64],
    scenario: &StudyScenario,
    profile: &Profile,
) -> Result<ErrorReport> {
    for w in eps_list.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::invalid("eps list must be strictly decreasing"));
        }
    }
    for &eps in eps_list {
        scenario.validate(eps, alpha)?;
    }
    let results = crate::par::map(eps_list, |&eps| -> Result<RunRecord> {
        let cfg = scenario.sim_config(eps, alpha);
        let start = Instant::now();
        let out = run_with_snapshots(&cfg, profile, scenario.snapshots)?;
        let seconds = start.elapsed().as_secs_f64();
        let grid = out.final_state.grid;
        let corrected_ref = scenario.reference(eps, alpha, ScenarioKind::MobilityCorrectedBubble);
        let transport_ref = scenario.reference(eps, alpha, ScenarioKind::TransportedBubble);
        Ok(RunRecord {
            eps,
            cells: cfg.nx,
            steps: out.final_state.step,
            seconds,
            corrected: error_norms(&out.snapshots, &grid, &corrected_ref, profile, cfg.t_end)?,
            transport: error_norms(&out.snapshots, &grid, &transport_ref, profile, cfg.t_end)?,
            energy_excess: out.energy_excess(),
            max_divergence: out.max_divergence(),
        })
    });
    let mut records = Vec::new();
    let mut failure = None;
    for (eps, r) in eps_list.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failure = Some(format!("eps = {eps}: {e}"));
                break;
            }
        }
    }
    Ok(ErrorReport {
        alpha,
        scenario: scenario.clone(),
        fits: fits_for(&records),
        records,
        failure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityRow {
    pub alpha: f64,
    /// Least-squares `d(R²)/dt` of the fitted interface circle.
    pub measured: f64,
    /// `−2 ε^α`.
    pub predicted: f64,
    pub relative_error: f64,
    pub steps: usize,
    pub seconds: f64,
    pub energy_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityTable {
    pub eps: f64,
    pub rows: Vec<MobilityRow>,
}

impl MobilityTable {
    pub fn row(&self, alpha: f64) -> Option<&MobilityRow> {
        self.rows.iter().find(|r| r.alpha == alpha)
    }

    /// Measured rate ratio between `α = 0` and `α = ½` over `ε^{−1/2}`.
    pub fn ratio_check(&self) -> Option<f64> {
        let a = self.row(0.0)?.measured;
        let b = self.row(0.5)?.measured;
        Some(a / b / self.eps.powf(-0.5))
    }

    pub fn to_csv(&self) -> Result<String> {
        let col = |f: fn(&MobilityRow) -> f64| self.rows.iter().map(f).collect::<Vec<f64>>();
        let cols = [
            col(|r| r.alpha),
            col(|r| r.measured),
            col(|r| r.predicted),
            col(|r| r.relative_error),
            col(|r| r.steps as f64),
        ];
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        crate::io::csv::render(&["alpha", "measured", "predicted", "relative_error", "steps"], &refs)
    }
}

/// Fraction of the horizon skipped before fitting the drift rate, while
/// the initial profile relaxes.
pub const DRIFT_FIT_START: f64 = 0.2;

/// Slope of `R²` against `t` over `t ≥ DRIFT_FIT_START · T`.
pub fn drift_rate(out: &RunOutput) -> Result<f64> {
    let t_end = out.final_state.t;
    let pts: Vec<(f64, f64)> = out
        .diagnostics
        .iter()
        .filter(|d| d.t >= DRIFT_FIT_START * t_end && d.radius.is_finite())
        .map(|d| (d.t, d.radius * d.radius))
        .collect();
    if pts.len() < 3 {
        return Err(Error::MissingSnapshots(format!(
            "only {} radius samples after the transient",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Drift rate of the bubble radius for each mobility exponent.
pub fn mobility_comparison(
    eps: f64,
    alpha_list: &[f64],
    scenario: &StudyScenario,
    profile: &Profile,
) -> Result<MobilityTable> {
    for &a in alpha_list {
        if ![0.0, 0.5, 1.0].contains(&a) {
            return Err(Error::invalid(format!("alpha must be 0, 0.5 or 1, got {a}")));
        }
        scenario.validate(eps, a)?;
    }
    let rows = crate::par::map(alpha_list, |&alpha| -> Result<MobilityRow> {
        let cfg = scenario.sim_config(eps, alpha);
        let start = Instant::now();
        let out = run_with_snapshots(&cfg, profile, 0)?;
        let measured = drift_rate(&out)?;
        let predicted = -2.0 * eps.powf(alpha);
        Ok(MobilityRow {
            alpha,
            measured,
            predicted,
            relative_error: (measured - predicted).abs() / predicted.abs(),
            steps: out.final_state.step,
            seconds: start.elapsed().as_secs_f64(),
            energy_excess: out.energy_excess(),
        })
    });
    Ok(MobilityTable {
        eps,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::BoundaryMode;

    fn small() -> (StudyScenario, f64, Grid) {
        let sc = StudyScenario {
            box_size: 1.0,
            center: [0.5, 0.5],
            r0: 0.25,
            delta: 0.07,
            t_end: 0.01,
            ..StudyScenario::default()
        };
        let eps = 1.0 / 32.0;
        let n = sc.cells(eps) * 2;
        let grid = Grid {
            nx: n,
            ny: n,
            h: 1.0 / n as f64,
            origin: [0.0, 0.0],
            mode: BoundaryMode::Periodic,
        };
        (sc, eps, grid)
    }

    fn reference_snapshots(
        sc: &StudyScenario,
        s: &ReferenceScenario,
        grid: &Grid,
        shift: Vec2,
        dr: f64,
    ) -> Vec<Snapshot> {
        let p = Profile::quartic();
        [0.0, 0.5 * sc.t_end, sc.t_end]
            .iter()
            .map(|&t| {
                let c = (0..grid.len())
                    .map(|k| {
                        let x = grid.center(k % grid.nx, k / grid.nx);
                        let d = s.signed_distance([x[0] - shift[0], x[1] - shift[1]], t).unwrap() + dr;
                        s.cutoff.blend(d, s.eps, &p)
                    })
                    .collect();
                Snapshot { t, c }
            })
            .collect()
    }

    #[test]
    fn reference_fed_back_gives_zero() {
        let (sc, eps, grid) = small();
        let s = sc.reference(eps, 0.5, ScenarioKind::MobilityCorrectedBubble);
        let snaps = reference_snapshots(&sc, &s, &grid, [0.0, 0.0], 0.0);
        let r = error_norms(&snaps, &grid, &s, &Profile::quartic(), sc.t_end).unwrap();
        assert_eq!(r.linf_l2, 0.0);
        assert_eq!(r.grad_off, 0.0);
        assert_eq!(r.grad_tangential, 0.0);
        assert_eq!(r.grad_near, 0.0);
        assert!(r.radius_error < 1e-3);
    }

    #[test]
    fn displaced_profile_matches_the_displacement_formula() {
        let (sc, eps, grid) = small();
        let h = grid.h;
        let s = sc.reference(eps, 0.5, ScenarioKind::StationaryBubble);
        let sigma = 2.0 / 3.0;
        let perimeter = 2.0 * std::f64::consts::PI * sc.r0;
        let formula = h * eps.powf(-0.5) * (sigma * perimeter).sqrt();
        let p = Profile::quartic();
        // normal displacement by h
        let snaps = reference_snapshots(&sc, &s, &grid, [0.0, 0.0], h);
        let r = error_norms(&snaps, &grid, &s, &p, sc.t_end).unwrap();
        assert!((r.linf_l2 / formula - 1.0).abs() < 0.1, "{} {formula}", r.linf_l2);
        // one-cell translation: the normal component averages to h/√2
        let snaps = reference_snapshots(&sc, &s, &grid, [h, 0.0], 0.0);
        let r = error_norms(&snaps, &grid, &s, &p, sc.t_end).unwrap();
        assert!((r.linf_l2 / formula - 1.0).abs() < 0.3, "{} {formula}", r.linf_l2);
        assert!((r.linf_l2 * 2f64.sqrt() / formula - 1.0).abs() < 0.1);
        // a radial shift has no tangential component, a translation does
        assert!(r.grad_tangential > 0.0);
    }

    #[test]
    fn noise_norms_match_direct_quadrature() {
        use rand::{Rng, SeedableRng};
        let (sc, eps, grid) = small();
        let s = sc.reference(eps, 0.5, ScenarioKind::StationaryBubble);
        let mut snaps = reference_snapshots(&sc, &s, &grid, [0.0, 0.0], 0.0);
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let noise: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..grid.len()).map(|_| rng.random_range(-0.01..0.01)).collect())
            .collect();
        for (snap, n) in snaps.iter_mut().zip(&noise) {
            snap.c.iter_mut().zip(n).for_each(|(c, e)| *c += e);
        }
        let r = error_norms(&snaps, &grid, &s, &Profile::quartic(), sc.t_end).unwrap();
        let h = grid.h;
        let l2: Vec<f64> = noise
            .iter()
            .map(|n| (n.iter().map(|x| x * x).sum::<f64>() * h * h).sqrt())
            .collect();
        assert!((r.linf_l2 - l2.iter().copied().fold(0.0, f64::max)).abs() < 1e-12);
        // gradient away from the bubble, summed directly with periodic wrap
        let n = grid.nx;
        let grad_sq = |e: &Vec<f64>| {
            let mut acc = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let x = grid.center(i, j);
                    let d = 0.25 - (x[0] - 0.5).hypot(x[1] - 0.5);
                    if d.abs() > sc.delta {
                        let gx = (e[j * n + (i + 1) % n] - e[j * n + (i + n - 1) % n]) / (2.0 * h);
                        let gy = (e[((j + 1) % n) * n + i] - e[((j + n - 1) % n) * n + i]) / (2.0 * h);
                        acc += (gx * gx + gy * gy) * h * h;
                    }
                }
            }
            acc
        };
        let g: Vec<f64> = noise.iter().map(grad_sq).collect();
        let integral = 0.5 * 0.5 * sc.t_end * (g[0] + g[1]) + 0.5 * 0.5 * sc.t_end * (g[1] + g[2]);
        let expected = eps.powf(0.25) * integral.sqrt();
        assert!((r.grad_off / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn missing_snapshots_are_reported() {
        let (sc, eps, grid) = small();
        let s = sc.reference(eps, 0.5, ScenarioKind::StationaryBubble);
        let snaps = reference_snapshots(&sc, &s, &grid, [0.0, 0.0], 0.0);
        let p = Profile::quartic();
        assert!(matches!(
            error_norms(&snaps[..1], &grid, &s, &p, sc.t_end),
            Err(Error::MissingSnapshots(_))
        ));
        assert!(matches!(
            error_norms(&snaps[..2], &grid, &s, &p, sc.t_end),
            Err(Error::MissingSnapshots(_))
        ));
    }

    #[test]
    fn empty_sweep_gives_empty_report() {
        let r = convergence_study(0.5, &[], &StudyScenario::default(), &Profile::quartic()).unwrap();
        assert!(r.records.is_empty() && r.fits.is_empty() && r.failure.is_none());
        assert!(convergence_study(0.5, &[0.1, 0.2], &StudyScenario::default(), &Profile::quartic()).is_err());
    }

    #[test]
    fn mobility_rejects_other_exponents() {
        let r = mobility_comparison(1.0 / 16.0, &[0.25], &StudyScenario::default(), &Profile::quartic());
        assert!(r.is_err());
    }
}
