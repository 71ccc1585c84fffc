use serde::Serialize;

use super::config::{FlowMode, SimConfig};
use super::grid::Grid;
use super::ops;
use super::poisson::{Helmholtz, Projector};
use super::state::{grid_for, SimState};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepInfo {
    pub dt: f64,
    pub div_max: f64,
    pub cg_iterations: usize,
}

/// Reusable solver for one configuration; holds the FFT plans.
#[derive(Debug, Clone)]
pub struct Stepper {
    config: SimConfig,
    grid: Grid,
    helmholtz: Helmholtz,
    projector: Projector,
    mobility: f64,
    stabilization: f64,
}

impl Stepper {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let grid = grid_for(config);
        Ok(Self {
            config: config.clone(),
            grid,
            helmholtz: Helmholtz::new(&grid),
            projector: Projector::new(&grid),
            mobility: config.mobility(),
            stabilization: config.stabilization(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Largest step allowed by the policy for the current velocity.
    pub fn stable_dt(&self, state: &SimState) -> f64 {
        let tp = &self.config.time;
        let h = self.grid.h;
        let mut dt = tp.dt_max.unwrap_or(f64::INFINITY);
        let vmax = state.max_speed();
        if vmax > 0.0 {
            dt = dt.min(tp.cfl * h / vmax);
        }
        if self.config.flow == FlowMode::NavierStokes {
            let visc = &self.config.viscosity;
            dt = dt.min(tp.viscous_safety * h * h / (4.0 * visc.nu_max()));
            if vmax > 0.0 {
                // centred advection with explicit Euler needs Δt |v|² ≤ 2ν
                dt = dt.min(tp.viscous_safety * 2.0 * visc.nu_min() / (vmax * vmax));
            }
        }
        if self.stabilization > 0.0 {
            dt = dt.min(tp.ac_cap / self.stabilization);
        }
        if !dt.is_finite() {
            dt = h;
        }
        dt
    }

    /// Advances `state` by `dt`.
    pub fn advance(&self, state: &mut SimState, dt: f64) -> Result<StepInfo> {
        let g = &self.grid;
        let cfg = &self.config;
        let (m, s, eps) = (self.mobility, self.stabilization, cfg.eps);

        // Allen-Cahn: explicit advection and reaction, implicit mΔ and S.
        // The stabilisation is centred on the advected field c* so that it
        // does not slow down transport by 1/(1 + Δt S).
        let adv = ops::advection_c(g, &state.c, &state.u, &state.v);
        let rhs: Vec<f64> = state
            .c
            .iter()
            .zip(&adv)
            .map(|(&c, a)| {
                let advected = c - dt * a;
                (1.0 + dt * s) * advected - dt * m * cfg.potential.df(c) / (eps * eps)
            })
            .collect();
        let mut c_new = state.c.clone();
        let st = self.helmholtz.solve(&rhs, 1.0 + dt * s, dt * m, &mut c_new)?;
        let mut iterations = st.iterations;
        state.c = c_new;

        if cfg.flow == FlowMode::NavierStokes {
            let nu = ops::viscosity_field(&cfg.viscosity, &state.c);
            let (ru, rv) = ops::momentum_rhs(g, &state.u, &state.v, &nu);
            let (fu, fv) = ops::capillary_force(g, &state.c, eps);
            for k in 0..g.len() {
                state.u[k] += dt * (ru[k] + fu[k]);
                state.v[k] += dt * (rv[k] + fv[k]);
            }
            iterations += self.projector.project(state, dt)?.iterations;
        }

        state.t += dt;
        state.step += 1;
        state.check()?;
        Ok(StepInfo {
            dt,
            div_max: state.max_divergence(),
            cg_iterations: iterations,
        })
    }

    /// One step with the policy step size, not passing `t_end`.
    pub fn step(&self, state: &mut SimState) -> Result<StepInfo> {
        let mut dt = self.stable_dt(state);
        let left = self.config.t_end - state.t;
        if left > 0.0 && left < dt * (1.0 + 1e-9) {
            dt = left;
        }
        self.advance(state, dt)
    }
}

/// One step of `state` under `config`.
pub fn step(state: &SimState, config: &SimConfig) -> Result<SimState> {
    let mut next = state.clone();
    Stepper::new(config)?.step(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::config::{BoundaryMode, Domain, Shape, TimePolicy};
    use crate::nsac::energy::energy;
    use crate::nsac::interface::extract_interface;
    use crate::nsac::state::init_state;
    use crate::Profile;

    fn bubble(n: usize, eps: f64) -> SimConfig {
        SimConfig::bubble(Domain::default(), n, eps, 0.5, [0.5, 0.5], 0.25, 1.0)
    }

    #[test]
    fn zero_fields_stay_zero() {
        let mut cfg = bubble(16, 0.1);
        cfg.initial.shape = Shape::Constant { value: 0.0 };
        let s0 = init_state(&cfg, &Profile::quartic()).unwrap();
        let s1 = step(&s0, &cfg).unwrap();
        assert!(s1.c.iter().chain(&s1.u).chain(&s1.v).chain(&s1.p).all(|&x| x == 0.0));
        assert!(s1.t > 0.0);
    }

    #[test]
    fn relaxed_stripe_is_steady() {
        let eps = 1.0 / 16.0;
        let mut cfg = bubble(32, eps);
        cfg.initial.shape = Shape::Stripe {
            left: 0.25,
            right: 0.75,
        };
        cfg.initial.cutoff = Some(0.12);
        cfg.time.ac_cap = 1.0;
        cfg.alpha = 0.0;
        let stepper = Stepper::new(&cfg).unwrap();
        let mut s = init_state(&cfg, &Profile::quartic()).unwrap();
        let mut change = f64::INFINITY;
        for _ in 0..4000 {
            let before = s.c.clone();
            stepper.step(&mut s).unwrap();
            change = before.iter().zip(&s.c).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if change < 1e-10 {
                break;
            }
        }
        assert!(change <= 1e-8, "{change}");
        assert!(crate::numerics::max_abs(&s.v) < 1e-12);
    }

    #[test]
    fn ac_energy_decreases_monotonically() {
        let mut cfg = bubble(64, 1.0 / 32.0);
        cfg.alpha = 0.0;
        cfg.flow = FlowMode::Frozen;
        cfg.initial.shape = Shape::Ellipse {
            center: [0.5, 0.5],
            a: 0.3,
            b: 0.18,
        };
        let stepper = Stepper::new(&cfg).unwrap();
        let mut s = init_state(&cfg, &Profile::quartic()).unwrap();
        let e0 = energy(&s, &cfg).total;
        let mut prev = e0;
        for _ in 0..100 {
            stepper.step(&mut s).unwrap();
            let e = energy(&s, &cfg).total;
            assert!(e <= prev + 1e-8 * e0, "{e} > {prev}");
            prev = e;
        }
        assert!(prev < e0);
    }

    #[test]
    fn projection_holds_every_step_in_both_modes() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Walls] {
            let mut cfg = bubble(48, 1.0 / 24.0);
            cfg.boundary = mode;
            cfg.initial.shape = Shape::Ellipse {
                center: [0.5, 0.5],
                a: 0.25,
                b: 0.15,
            };
            let stepper = Stepper::new(&cfg).unwrap();
            let mut s = init_state(&cfg, &Profile::quartic()).unwrap();
            let e0 = energy(&s, &cfg).total;
            for _ in 0..30 {
                let info = stepper.step(&mut s).unwrap();
                assert!(info.div_max <= 1e-6, "{mode:?} {}", info.div_max);
            }
            assert!(crate::numerics::max_abs(&s.u) > 0.0);
            assert!(energy(&s, &cfg).total <= e0 * (1.0 + 1e-3));
            if mode == BoundaryMode::Walls {
                for j in 0..s.grid.ny {
                    assert_eq!(s.u[s.grid.idx(0, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn one_cell_shift_commutes_with_stepping() {
        let mut cfg = bubble(32, 1.0 / 16.0);
        cfg.initial.shape = Shape::Ellipse {
            center: [0.45, 0.5],
            a: 0.25,
            b: 0.15,
        };
        cfg.initial.velocity = [0.3, 0.1];
        let p = Profile::quartic();
        let a0 = init_state(&cfg, &p).unwrap();
        let mut shifted = cfg.clone();
        shifted.initial.shape = Shape::Ellipse {
            center: [0.45 + 1.0 / 32.0, 0.5],
            a: 0.25,
            b: 0.15,
        };
        let b0 = init_state(&shifted, &p).unwrap();
        let stepper = Stepper::new(&cfg).unwrap();
        let (mut a, mut b) = (a0, b0);
        for _ in 0..5 {
            let dt = stepper.stable_dt(&a);
            stepper.advance(&mut a, dt).unwrap();
            stepper.advance(&mut b, dt).unwrap();
        }
        let g = a.grid;
        let mut dev = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let ka = g.idx(i, j);
                let kb = g.idx((i + 1) % g.nx, j);
                dev = dev.max((a.c[ka] - b.c[kb]).abs()).max((a.u[ka] - b.u[kb]).abs());
            }
        }
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn pure_transport_moves_the_centroid() {
        let eps = 1.0 / 32.0;
        let mut cfg = bubble(128, eps);
        cfg.mobility = Some(0.0);
        cfg.flow = FlowMode::Frozen;
        cfg.initial.velocity = [1.0, 0.0];
        cfg.initial.shape = Shape::Circle {
            center: [0.4, 0.5],
            radius: 0.2,
        };
        cfg.time = TimePolicy {
            cfl: 0.25,
            ..TimePolicy::default()
        };
        cfg.t_end = 0.05;
        let stepper = Stepper::new(&cfg).unwrap();
        let mut s = init_state(&cfg, &Profile::quartic()).unwrap();
        while s.t < cfg.t_end - 1e-12 {
            stepper.step(&mut s).unwrap();
        }
        let fit = extract_interface(&s.c, &s.grid).unwrap().circle.unwrap();
        let h = s.grid.h;
        assert!((fit.center[0] - 0.45).abs() < h * h * 10.0 + 1e-4, "{:?}", fit.center);
        assert!((fit.center[1] - 0.5).abs() < 1e-9);
    }
}
