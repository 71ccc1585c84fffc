//! Explicit stencil terms of the step.

use super::grid::Grid;
use crate::ViscosityModel;

/// `div(v c)` with second-order upwind face values.
pub fn advection_c(grid: &Grid, c: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
    let g = grid;
    let mut out = vec![0.0; g.len()];
    let upwind = |vel: f64, m2: f64, m1: f64, p0: f64, p1: f64| {
        if vel >= 0.0 {
            vel * (1.5 * m1 - 0.5 * m2)
        } else {
            vel * (1.5 * p0 - 0.5 * p1)
        }
    };
    crate::par::for_each_row(&mut out, g.nx, |j, row| {
        let j = j as isize;
        for (i, o) in row.iter_mut().enumerate() {
            let i = i as isize;
            let cc = |di: isize, dj: isize| g.cell(c, i + di, j + dj);
            let fw = upwind(g.u_at(u, i, j), cc(-2, 0), cc(-1, 0), cc(0, 0), cc(1, 0));
            let fe = upwind(g.u_at(u, i + 1, j), cc(-1, 0), cc(0, 0), cc(1, 0), cc(2, 0));
            let fs = upwind(g.v_at(v, i, j), cc(0, -2), cc(0, -1), cc(0, 0), cc(0, 1));
            let fn_ = upwind(g.v_at(v, i, j + 1), cc(0, -1), cc(0, 0), cc(0, 1), cc(0, 2));
            *o = (fe - fw + fn_ - fs) / g.h;
        }
    });
    out
}

/// Capillary force `−ε Δc ∇c` on the faces: `Δc` averaged from the two
/// adjacent cells, `∇c` the face difference. Wall faces get zero.
pub fn capillary_force(grid: &Grid, c: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
    let g = grid;
    let lap = g.laplacian(c);
    let mut fu = vec![0.0; g.len()];
    let mut fv = vec![0.0; g.len()];
    crate::par::for_each_row(&mut fu, g.nx, |j, row| {
        let j = j as isize;
        for (i, f) in row.iter_mut().enumerate() {
            if g.u_fixed(i) {
                continue;
            }
            let i = i as isize;
            let l = 0.5 * (g.cell_clamped(&lap, i - 1, j) + g.cell_clamped(&lap, i, j));
            *f = -eps * l * (g.cell(c, i, j) - g.cell(c, i - 1, j)) / g.h;
        }
    });
    crate::par::for_each_row(&mut fv, g.nx, |j, row| {
        if g.v_fixed(j) {
            return;
        }
        let j = j as isize;
        for (i, f) in row.iter_mut().enumerate() {
            let i = i as isize;
            let l = 0.5 * (g.cell_clamped(&lap, i, j - 1) + g.cell_clamped(&lap, i, j));
            *f = -eps * l * (g.cell(c, i, j) - g.cell(c, i, j - 1)) / g.h;
        }
    });
    (fu, fv)
}

/// Cell-centred viscosity `ν(c)`.
pub fn viscosity_field(model: &ViscosityModel, c: &[f64]) -> Vec<f64> {
    c.iter().map(|&x| model.eval(x)).collect()
}

/// Viscosity at the cell corner `(x₀ + i h, y₀ + j h)`: mean of the four
/// adjacent cells, clamped into the box for walls.
#[inline]
fn corner_nu(g: &Grid, nu: &[f64], i: isize, j: isize) -> f64 {
    0.25 * (g.cell_clamped(nu, i - 1, j - 1)
        + g.cell_clamped(nu, i, j - 1)
        + g.cell_clamped(nu, i - 1, j)
        + g.cell_clamped(nu, i, j))
}

/// Shear rate `u_y + v_x` at the corner `(i, j)`.
#[inline]
pub fn corner_shear(g: &Grid, u: &[f64], v: &[f64], i: isize, j: isize) -> f64 {
    (g.u_at(u, i, j) - g.u_at(u, i, j - 1) + g.v_at(v, i, j) - g.v_at(v, i - 1, j)) / g.h
}

/// Right-hand side `−(v·∇)v + div(2ν Dv)` of the momentum equation on the
/// faces: centred advection, stress with `ν` at cells and corners.
pub fn momentum_rhs(grid: &Grid, u: &[f64], v: &[f64], nu: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = grid;
    let h = g.h;
    let mut ru = vec![0.0; g.len()];
    let mut rv = vec![0.0; g.len()];
    crate::par::for_each_row(&mut ru, g.nx, |j, row| {
        let j = j as isize;
        for (i, r) in row.iter_mut().enumerate() {
            if g.u_fixed(i) {
                continue;
            }
            let i = i as isize;
            let uu = |di: isize, dj: isize| g.u_at(u, i + di, j + dj);
            let vbar = 0.25 * (g.v_at(v, i - 1, j) + g.v_at(v, i, j) + g.v_at(v, i - 1, j + 1) + g.v_at(v, i, j + 1));
            let adv = uu(0, 0) * (uu(1, 0) - uu(-1, 0)) / (2.0 * h) + vbar * (uu(0, 1) - uu(0, -1)) / (2.0 * h);
            let sxx_e = 2.0 * g.cell_clamped(nu, i, j) * (uu(1, 0) - uu(0, 0)) / h;
            let sxx_w = 2.0 * g.cell_clamped(nu, i - 1, j) * (uu(0, 0) - uu(-1, 0)) / h;
            let sxy_n = corner_nu(g, nu, i, j + 1) * corner_shear(g, u, v, i, j + 1);
            let sxy_s = corner_nu(g, nu, i, j) * corner_shear(g, u, v, i, j);
            *r = -adv + (sxx_e - sxx_w + sxy_n - sxy_s) / h;
        }
    });
    crate::par::for_each_row(&mut rv, g.nx, |j, row| {
        if g.v_fixed(j) {
            return;
        }
        let j = j as isize;
        for (i, r) in row.iter_mut().enumerate() {
            let i = i as isize;
            let vv = |di: isize, dj: isize| g.v_at(v, i + di, j + dj);
            let ubar = 0.25 * (g.u_at(u, i, j - 1) + g.u_at(u, i + 1, j - 1) + g.u_at(u, i, j) + g.u_at(u, i + 1, j));
            let adv = ubar * (vv(1, 0) - vv(-1, 0)) / (2.0 * h) + vv(0, 0) * (vv(0, 1) - vv(0, -1)) / (2.0 * h);
            let syy_n = 2.0 * g.cell_clamped(nu, i, j) * (vv(0, 1) - vv(0, 0)) / h;
            let syy_s = 2.0 * g.cell_clamped(nu, i, j - 1) * (vv(0, 0) - vv(0, -1)) / h;
            let sxy_e = corner_nu(g, nu, i + 1, j) * corner_shear(g, u, v, i + 1, j);
            let sxy_w = corner_nu(g, nu, i, j) * corner_shear(g, u, v, i, j);
            *r = -adv + (sxy_e - sxy_w + syy_n - syy_s) / h;
        }
    });
    (ru, rv)
}
