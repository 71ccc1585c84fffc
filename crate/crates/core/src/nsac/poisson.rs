//! Pressure projection and the implicit Allen-Cahn solve. Periodic grids use
//! the FFT; wall grids use Jacobi-preconditioned CG.

use super::grid::Grid;
use super::state::SimState;
use crate::numerics::cg::{self, CgStats};
use crate::numerics::fourier::{second_difference_symbol, Periodic2d};
use crate::Result;

/// Target for `‖div v‖_∞` after a projection.
pub const DIV_TOL: f64 = 1e-9;
const CG_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone)]
struct Spectral {
    fft: Periodic2d,
    sx: Vec<f64>,
    sy: Vec<f64>,
}

impl Spectral {
    fn new(grid: &Grid) -> Self {
        Self {
            fft: Periodic2d::new(grid.nx, grid.ny),
            sx: second_difference_symbol(grid.nx, grid.h),
            sy: second_difference_symbol(grid.ny, grid.h),
        }
    }
}

/// Number of wall neighbours of cell `(i, j)`.
fn wall_count(grid: &Grid, i: usize, j: usize) -> usize {
    (i == 0) as usize + (i + 1 == grid.nx) as usize + (j == 0) as usize + (j + 1 == grid.ny) as usize
}

/// `out = Σ_nb (x − x_nb) / h²` over interior neighbours (Neumann `−Δ`),
/// plus `extra · n_walls · x / h²` on wall cells.
fn neg_laplacian(grid: &Grid, x: &[f64], out: &mut [f64], extra: f64) {
    let (nx, ny) = (grid.nx, grid.ny);
    let h2 = grid.h * grid.h;
    crate::par::for_each_row(out, nx, |j, row| {
        for (i, o) in row.iter_mut().enumerate() {
            let k = j * nx + i;
            let x0 = x[k];
            let mut acc = 0.0;
            if i > 0 {
                acc += x0 - x[k - 1];
            }
            if i + 1 < nx {
                acc += x0 - x[k + 1];
            }
            if j > 0 {
                acc += x0 - x[k - nx];
            }
            if j + 1 < ny {
                acc += x0 - x[k + nx];
            }
            acc += extra * wall_count(grid, i, j) as f64 * x0;
            *o = acc / h2;
        }
    });
}

/// Chorin projection `v ← v − Δt ∇φ` with `Δφ = div v / Δt`; `φ` is stored
/// as the pressure.
#[derive(Debug, Clone)]
pub struct Projector {
    grid: Grid,
    spectral: Option<Spectral>,
}

impl Projector {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            spectral: grid.periodic().then(|| Spectral::new(grid)),
        }
    }

    pub fn project(&self, state: &mut SimState, dt: f64) -> Result<CgStats> {
        let g = &self.grid;
        let mut rhs = g.divergence(&state.u, &state.v);
        rhs.iter_mut().for_each(|r| *r /= dt);
        let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
        rhs.iter_mut().for_each(|r| *r -= mean);
        let stats = match &self.spectral {
            Some(sp) => {
                state.p = sp.fft.solve(&rhs, |kx, ky| sp.sx[kx] + sp.sy[ky]);
                CgStats {
                    iterations: 0,
                    residual: 0.0,
                }
            }
            None => {
                // −Δ_N φ = −rhs, semidefinite with constants in the kernel.
                let b: Vec<f64> = rhs.iter().map(|r| -r).collect();
                let h2 = g.h * g.h;
                let diag: Vec<f64> = (0..g.len())
                    .map(|k| (4 - wall_count(g, k % g.nx, k / g.nx)) as f64 / h2)
                    .collect();
                let tol = DIV_TOL / dt;
                let st = cg::solve(
                    |x, out| neg_laplacian(g, x, out, 0.0),
                    &diag,
                    &b,
                    &mut state.p,
                    tol,
                    CG_MAX_ITER,
                )?;
                let pm = state.p.iter().sum::<f64>() / state.p.len() as f64;
                state.p.iter_mut().for_each(|p| *p -= pm);
                st
            }
        };
        let (nx, h) = (g.nx, g.h);
        let p = &state.p;
        crate::par::for_each_row(&mut state.u, nx, |j, row| {
            for (i, u) in row.iter_mut().enumerate() {
                if g.u_fixed(i) {
                    continue;
                }
                let pl = g.cell_clamped(p, i as isize - 1, j as isize);
                *u -= dt * (p[j * nx + i] - pl) / h;
            }
        });
        crate::par::for_each_row(&mut state.v, nx, |j, row| {
            if g.v_fixed(j) {
                return;
            }
            for (i, v) in row.iter_mut().enumerate() {
                let pb = g.cell_clamped(p, i as isize, j as isize - 1);
                *v -= dt * (p[j * nx + i] - pb) / h;
            }
        });
        Ok(stats)
    }
}

/// Solves `(1 + Δt S) c − Δt m Δc = rhs` with the boundary condition of the
/// grid (`c = −1` on walls).
#[derive(Debug, Clone)]
pub struct Helmholtz {
    grid: Grid,
    spectral: Option<Spectral>,
}

impl Helmholtz {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            spectral: grid.periodic().then(|| Spectral::new(grid)),
        }
    }

    /// `c` holds the initial guess on entry and the solution on exit.
    pub fn solve(&self, rhs: &[f64], shift: f64, diffusion: f64, c: &mut [f64]) -> Result<CgStats> {
        let g = &self.grid;
        match &self.spectral {
            Some(sp) => {
                let sol = sp.fft.solve(rhs, |kx, ky| shift - diffusion * (sp.sx[kx] + sp.sy[ky]));
                c.copy_from_slice(&sol);
                Ok(CgStats {
                    iterations: 0,
                    residual: 0.0,
                })
            }
            None => {
                let h2 = g.h * g.h;
                // Wall ghosts −2 − c: the affine part moves to the right side.
                let b: Vec<f64> = (0..g.len())
                    .map(|k| {
                        let nw = wall_count(g, k % g.nx, k / g.nx) as f64;
                        rhs[k] - diffusion * 2.0 * nw / h2
                    })
                    .collect();
                let diag: Vec<f64> = (0..g.len())
                    .map(|k| {
                        let nw = wall_count(g, k % g.nx, k / g.nx) as f64;
                        shift + diffusion * (4.0 + nw) / h2
                    })
                    .collect();
                let apply = |x: &[f64], out: &mut [f64]| {
                    neg_laplacian(g, x, out, 2.0);
                    for (o, xv) in out.iter_mut().zip(x) {
                        *o = shift * xv + diffusion * *o;
                    }
                };
                cg::solve(apply, &diag, &b, c, 1e-12, CG_MAX_ITER)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsac::config::BoundaryMode;

    fn grid(mode: BoundaryMode) -> Grid {
        Grid {
            nx: 24,
            ny: 16,
            h: 1.0 / 24.0,
            origin: [0.0, 0.0],
            mode,
        }
    }

    fn wavy(g: &Grid) -> SimState {
        let mut s = SimState::zeros(*g);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                let x = g.u_position(i, j);
                if !g.u_fixed(i) {
                    s.u[k] = (6.0 * x[0]).sin() + x[1] * x[1];
                }
                let y = g.v_position(i, j);
                if !g.v_fixed(j) {
                    s.v[k] = (5.0 * y[0] * y[1]).cos();
                }
            }
        }
        s
    }

    #[test]
    fn projection_removes_divergence() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Walls] {
            let g = grid(mode);
            let mut s = wavy(&g);
            Projector::new(&g).project(&mut s, 0.01).unwrap();
            assert!(s.max_divergence() < 1e-8, "{mode:?} {}", s.max_divergence());
            if mode == BoundaryMode::Walls {
                for j in 0..g.ny {
                    assert_eq!(s.u[g.idx(0, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let g = grid(BoundaryMode::Walls);
        let mut s = wavy(&g);
        let proj = Projector::new(&g);
        proj.project(&mut s, 1.0).unwrap();
        let before = s.u.clone();
        proj.project(&mut s, 1.0).unwrap();
        let dev = before.iter().zip(&s.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn helmholtz_solutions_satisfy_the_stencil() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Walls] {
            let g = grid(mode);
            let rhs: Vec<f64> = (0..g.len()).map(|k| ((k * 7919) % 13) as f64 / 13.0 - 0.5).collect();
            let (shift, diff) = (1.3, 0.002);
            let mut c = rhs.clone();
            Helmholtz::new(&g).solve(&rhs, shift, diff, &mut c).unwrap();
            let lap = g.laplacian(&c);
            for k in 0..g.len() {
                let r = shift * c[k] - diff * lap[k] - rhs[k];
                assert!(r.abs() < 1e-10, "{mode:?} {r}");
            }
        }
    }

    #[test]
    fn helmholtz_keeps_minus_one_on_walls() {
        let g = grid(BoundaryMode::Walls);
        let rhs = vec![-1.0; g.len()];
        let mut c = vec![0.0; g.len()];
        Helmholtz::new(&g).solve(&rhs, 1.0, 0.01, &mut c).unwrap();
        assert!(c.iter().all(|x| (x + 1.0).abs() < 1e-11));
    }
}
