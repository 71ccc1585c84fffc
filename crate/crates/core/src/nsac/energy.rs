use serde::Serialize;

use super::config::SimConfig;
use super::ops::corner_shear;
use super::state::SimState;

/// Energy `E = ∫ ½|v|² + ε/2 |∇c|² + f(c)/ε` and the dissipation integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyDiag {
    pub total: f64,
    pub kinetic: f64,
    pub gradient: f64,
    pub potential: f64,
    /// `∫ |Dv|²`.
    pub viscous_dissipation: f64,
    /// `ε⁻¹ ∫ μ²`.
    pub chemical_dissipation: f64,
    /// `μ = −ε Δc + f'(c)/ε` at the cell centres.
    #[serde(skip)]
    pub mu: Vec<f64>,
}

/// Discrete energy consistent with the five-point Laplacian: face
/// differences for `|∇c|²`, and on walls the half-cell difference to the
/// boundary value `−1`.
pub fn energy(state: &SimState, config: &SimConfig) -> EnergyDiag {
    let g = &state.grid;
    let (nx, ny, h) = (g.nx, g.ny, g.h);
    let eps = config.eps;
    let c = &state.c;
    let area = h * h;

    let kinetic = 0.5 * area * state.u.iter().chain(&state.v).map(|x| x * x).sum::<f64>();

    let mut grad_sq = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let c0 = c[g.idx(i, j)];
            let (ii, jj) = (i as isize, j as isize);
            // east and north faces; the west/south walls are added separately
            let east = g.cell(c, ii + 1, jj) - c0;
            let north = g.cell(c, ii, jj + 1) - c0;
            let mut e = east * east + north * north;
            if !g.periodic() {
                if i + 1 == nx {
                    e -= east * east;
                    e += 2.0 * (c0 + 1.0).powi(2);
                }
                if j + 1 == ny {
                    e -= north * north;
                    e += 2.0 * (c0 + 1.0).powi(2);
                }
                if i == 0 {
                    e += 2.0 * (c0 + 1.0).powi(2);
                }
                if j == 0 {
                    e += 2.0 * (c0 + 1.0).powi(2);
                }
            }
            grad_sq += e;
        }
    }
    // Σ (Δc/h)² h² = Σ (Δc)²
    let gradient = 0.5 * eps * grad_sq;

    let potential = area / eps * c.iter().map(|&x| config.potential.f(x)).sum::<f64>();

    let lap = g.laplacian(c);
    let mu: Vec<f64> = c
        .iter()
        .zip(&lap)
        .map(|(&x, l)| -eps * l + config.potential.df(x) / eps)
        .collect();
    let chemical_dissipation = area / eps * mu.iter().map(|m| m * m).sum::<f64>();

    let (u, v) = (&state.u, &state.v);
    let mut visc = 0.0;
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let ux = (g.u_at(u, i + 1, j) - g.u_at(u, i, j)) / h;
            let vy = (g.v_at(v, i, j + 1) - g.v_at(v, i, j)) / h;
            let s = corner_shear(g, u, v, i, j);
            // |Dv|² = u_x² + v_y² + ½(u_y + v_x)²
            visc += ux * ux + vy * vy + 0.5 * s * s;
        }
    }
    if !g.periodic() {
        // corners on the top and right walls
        for i in 0..=nx as isize {
            let s = corner_shear(g, u, v, i, ny as isize);
            visc += 0.5 * s * s;
        }
        for j in 0..ny as isize {
            let s = corner_shear(g, u, v, nx as isize, j);
            visc += 0.5 * s * s;
        }
    }

    EnergyDiag {
        total: kinetic + gradient + potential,
        kinetic,
        gradient,
        potential,
        viscous_dissipation: visc * area,
        chemical_dissipation,
        mu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::config::{BoundaryMode, Domain, Shape};
    use crate::nsac::state::init_state;
    use crate::Profile;

    fn config(n: usize, eps: f64, shape: Shape) -> SimConfig {
        let mut c = SimConfig::bubble(Domain::default(), n, eps, 0.5, [0.5, 0.5], 0.25, 0.0);
        c.initial.shape = shape;
        c.initial.cutoff = Some(0.1);
        c
    }

    #[test]
    fn pure_phase_at_rest_has_zero_energy() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Walls] {
            let mut cfg = config(16, 0.1, Shape::Constant { value: -1.0 });
            cfg.boundary = mode;
            let s = init_state(&cfg, &Profile::quartic()).unwrap();
            let e = energy(&s, &cfg);
            assert_eq!(e.total, 0.0);
            assert_eq!(e.viscous_dissipation, 0.0);
        }
    }

    #[test]
    fn stripe_energy_is_sigma_times_length() {
        let eps = 1.0 / 64.0;
        let cfg = config(
            256,
            eps,
            Shape::Stripe {
                left: 0.25,
                right: 0.75,
            },
        );
        let s = init_state(&cfg, &Profile::quartic()).unwrap();
        let e = energy(&s, &cfg);
        // two interfaces of unit length
        let target = 2.0 * 2.0 / 3.0;
        assert!((e.total / target - 1.0).abs() < 0.05, "{}", e.total);
        // equipartition
        assert!((e.gradient / e.potential - 1.0).abs() < 0.05);
        assert!(e.kinetic == 0.0);
    }

    #[test]
    fn chemical_potential_vanishes_on_the_profile() {
        // Where the cutoff is 1 the residual is the O(h²) truncation error
        // of the Laplacian.
        let eps = 1.0 / 32.0;
        let residual = |n: usize| {
            let cfg = config(
                n,
                eps,
                Shape::Stripe {
                    left: 0.25,
                    right: 0.75,
                },
            );
            let s = init_state(&cfg, &Profile::quartic()).unwrap();
            let e = energy(&s, &cfg);
            let g = s.grid;
            let mut mmax = 0.0f64;
            for k in 0..g.len() {
                let x = g.center(k % g.nx, k / g.nx)[0];
                if ((x - 0.5).abs() - 0.25).abs() <= 0.09 {
                    mmax = mmax.max(e.mu[k].abs());
                }
            }
            mmax
        };
        let (coarse, fine) = (residual(128), residual(256));
        assert!(fine < 0.02, "{fine}");
        assert!(coarse / fine > 3.5, "{coarse} {fine}");
    }

    #[test]
    fn shear_dissipation() {
        let cfg = config(32, 0.1, Shape::Constant { value: 1.0 });
        let mut s = init_state(&cfg, &Profile::quartic()).unwrap();
        let k = 2.0 * std::f64::consts::PI;
        let g = s.grid;
        for j in 0..32 {
            for i in 0..32 {
                s.u[g.idx(i, j)] = (k * g.u_position(i, j)[1]).sin();
            }
        }
        let e = energy(&s, &cfg);
        // ∫ ½ u_y² = ¼ k² for u = sin(k y); discrete factor from the stencil.
        let disc = (2.0 - 2.0 * (k * g.h).cos()) / (g.h * g.h);
        assert!((e.viscous_dissipation - 0.25 * disc).abs() < 1e-9);
        assert!((e.kinetic - 0.25).abs() < 1e-12);
    }
}
