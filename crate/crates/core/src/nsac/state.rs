use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::config::{BoundaryMode, Shape, SimConfig, C_BOUND};
use super::grid::Grid;
use crate::reference::{Cutoff, PeriodicBox};
use crate::{Error, Profile, Result, Vec2};

/// Staggered fields at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub grid: Grid,
    pub c: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
    pub step: usize,
}

impl SimState {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            c: vec![0.0; n],
            u: vec![0.0; n],
            v: vec![0.0; n],
            p: vec![0.0; n],
            t: 0.0,
            step: 0,
        }
    }

    pub fn c_max(&self) -> f64 {
        crate::numerics::max_abs(&self.c)
    }

    pub fn max_divergence(&self) -> f64 {
        crate::numerics::max_abs(&self.grid.divergence(&self.u, &self.v))
    }

    pub fn max_speed(&self) -> f64 {
        crate::numerics::max_abs(&self.u).max(crate::numerics::max_abs(&self.v))
    }

    /// Checks the overshoot guard and finiteness.
    pub fn check(&self) -> Result<()> {
        for (name, f) in [("c", &self.c), ("u", &self.u), ("v", &self.v), ("p", &self.p)] {
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::NotFinite { t: self.t, field: name });
            }
        }
        let cmax = self.c_max();
        if cmax > C_BOUND {
            return Err(Error::BlowUp { t: self.t, norm: cmax });
        }
        Ok(())
    }
}

pub fn grid_for(config: &SimConfig) -> Grid {
    Grid {
        nx: config.nx,
        ny: config.ny,
        h: config.h(),
        origin: config.domain.origin,
        mode: config.boundary,
    }
}

/// Signed distance to the initial interface, positive in `Ω⁺`. The ellipse
/// uses the first-order estimate `(1 − F)/|∇F|`, exact on the curve.
pub fn shape_distance(shape: &Shape, x: Vec2, periodic: Option<&PeriodicBox>) -> f64 {
    let disp = |c: Vec2| match periodic {
        Some(b) => b.displacement(x, c),
        None => [x[0] - c[0], x[1] - c[1]],
    };
    match *shape {
        Shape::Circle { center, radius } => {
            let d = disp(center);
            radius - d[0].hypot(d[1])
        }
        Shape::Ellipse { center, a, b } => {
            let d = disp(center);
            let f = (d[0] / a).powi(2) + (d[1] / b).powi(2);
            let g = 2.0 * ((d[0] / (a * a)).powi(2) + (d[1] / (b * b)).powi(2)).sqrt();
            if g == 0.0 {
                return a.min(b);
            }
            (1.0 - f) / g
        }
        Shape::Stripe { left, right } => {
            let shifts: &[f64] = match periodic {
                Some(b) => &[-b.size[0], 0.0, b.size[0]],
                None => &[0.0],
            };
            let mut best = f64::NEG_INFINITY;
            for s in shifts {
                let xs = x[0] + s;
                best = best.max((xs - left).min(right - xs));
            }
            best
        }
        Shape::Constant { .. } => f64::INFINITY,
    }
}

/// Blended profile `ζ(d) θ₀(d/ε) ± (1 − ζ(d))`, the prescribed velocity on
/// every interior face and `p = 0`.
pub fn init_state(config: &SimConfig, profile: &Profile) -> Result<SimState> {
    config.validate()?;
    let grid = grid_for(config);
    let mut state = SimState::zeros(grid);
    let periodic = config.periodic_box();
    let cutoff = Cutoff::new(config.cutoff())?;
    let shape = config.initial.shape;
    let eps = config.eps;
    crate::par::for_each_row(&mut state.c, grid.nx, |j, row| {
        for (i, c) in row.iter_mut().enumerate() {
            *c = match shape {
                Shape::Constant { value } => value,
                _ => {
                    let d = shape_distance(&shape, grid.center(i, j), periodic.as_ref());
                    cutoff.blend(d, eps, profile)
                }
            };
        }
    });
    if let Some(noise) = config.initial.noise {
        let mut rng = StdRng::seed_from_u64(noise.seed);
        for c in state.c.iter_mut() {
            *c += noise.amplitude * rng.random_range(-1.0..1.0);
        }
    }
    let [ux, uy] = config.initial.velocity;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = grid.idx(i, j);
            if !grid.u_fixed(i) {
                state.u[k] = ux;
            }
            if !grid.v_fixed(j) {
                state.v[k] = uy;
            }
        }
    }
    if config.boundary == BoundaryMode::Walls && (ux != 0.0 || uy != 0.0) {
        // Make the wall-adjusted field discretely divergence free.
        super::poisson::Projector::new(&grid).project(&mut state, 1.0)?;
        state.p.iter_mut().for_each(|p| *p = 0.0);
    }
    state.check()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::config::Domain;

    fn bubble() -> SimConfig {
        SimConfig::bubble(Domain::default(), 64, 1.0 / 32.0, 0.5, [0.5, 0.5], 0.25, 0.0)
    }

    #[test]
    fn circle_values() {
        let cfg = bubble();
        let p = Profile::quartic();
        let s = init_state(&cfg, &p).unwrap();
        let g = s.grid;
        // The centre sits on a cell corner; all four neighbours are inside.
        assert!(s.c[g.idx(31, 31)] >= 0.999);
        assert!(s.c[g.idx(0, 0)] <= -0.999);
        // Cells whose centre lies within h/2 of the circle have |c| ≤ h/ε·½ + …
        let h = g.h;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let x = g.center(i, j);
                let r = (x[0] - 0.5).hypot(x[1] - 0.5);
                if (r - 0.25).abs() < 0.25 * h {
                    assert!(s.c[g.idx(i, j)].abs() <= h / cfg.eps, "{}", s.c[g.idx(i, j)]);
                }
            }
        }
        assert!(s.p.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn uniform_flow_on_every_face() {
        let mut cfg = bubble();
        cfg.initial.velocity = [1.0, 0.0];
        let s = init_state(&cfg, &Profile::quartic()).unwrap();
        assert!(s.u.iter().all(|&u| u == 1.0));
        assert!(s.v.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn under_resolved_is_rejected() {
        let mut cfg = bubble();
        cfg.nx = 16;
        cfg.ny = 16;
        assert!(matches!(
            init_state(&cfg, &Profile::quartic()),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn periodic_stripe_distance_wraps() {
        let b = PeriodicBox {
            origin: [0.0, 0.0],
            size: [1.0, 1.0],
        };
        let s = Shape::Stripe {
            left: 0.25,
            right: 0.75,
        };
        assert!((shape_distance(&s, [0.5, 0.3], Some(&b)) - 0.25).abs() < 1e-15);
        assert!((shape_distance(&s, [0.95, 0.3], Some(&b)) + 0.2).abs() < 1e-15);
        assert!((shape_distance(&s, [0.05, 0.3], Some(&b)) + 0.2).abs() < 1e-15);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let mut cfg = bubble();
        cfg.initial.noise = Some(super::super::config::Noise {
            amplitude: 0.01,
            seed: 7,
        });
        let p = Profile::quartic();
        let a = init_state(&cfg, &p).unwrap();
        let b = init_state(&cfg, &p).unwrap();
        assert_eq!(a.c, b.c);
        cfg.initial.noise = None;
        let clean = init_state(&cfg, &p).unwrap();
        let dev = a.c.iter().zip(&clean.c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(dev > 0.0 && dev <= 0.01);
    }
}
