//! MAC grid: `c` and `p` at cell centres, `u` on x-faces, `v` on y-faces.
//!
//! All fields are `nx × ny` arrays stored x-fastest. Cell `(i, j)` has its
//! centre at `origin + ((i + ½) h, (j + ½) h)`; `u(i, j)` sits on the face
//! `x = x₀ + i h` and `v(i, j)` on `y = y₀ + j h`. With walls, `u(0, j)` and
//! `v(i, 0)` are the wall faces and stay zero; the opposite walls are
//! implicit.

use super::config::BoundaryMode;
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: Vec2,
    pub mode: BoundaryMode,
}

#[inline]
fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn periodic(&self) -> bool {
        self.mode == BoundaryMode::Periodic
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn u_position(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn v_position(&self, i: usize, j: usize) -> Vec2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + j as f64 * self.h,
        ]
    }

    /// Cell value with ghost cells: periodic images, or the reflection
    /// `−2 − c` that puts `c = −1` on the walls.
    #[inline]
    pub fn cell(&self, c: &[f64], i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if self.periodic() {
            return c[self.idx(wrap(i, self.nx), wrap(j, self.ny))];
        }
        if i < 0 {
            return -2.0 - self.cell(c, -1 - i, j);
        }
        if i >= nx {
            return -2.0 - self.cell(c, 2 * nx - 1 - i, j);
        }
        if j < 0 {
            return -2.0 - self.cell(c, i, -1 - j);
        }
        if j >= ny {
            return -2.0 - self.cell(c, i, 2 * ny - 1 - j);
        }
        c[self.idx(i as usize, j as usize)]
    }

    /// Cell value with indices clamped into the box (walls) or wrapped.
    #[inline]
    pub fn cell_clamped(&self, c: &[f64], i: isize, j: isize) -> f64 {
        if self.periodic() {
            return c[self.idx(wrap(i, self.nx), wrap(j, self.ny))];
        }
        let i = i.clamp(0, self.nx as isize - 1) as usize;
        let j = j.clamp(0, self.ny as isize - 1) as usize;
        c[self.idx(i, j)]
    }

    /// `u(i, j)` with no-slip ghosts.
    #[inline]
    pub fn u_at(&self, u: &[f64], i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if self.periodic() {
            return u[self.idx(wrap(i, self.nx), wrap(j, self.ny))];
        }
        if i <= 0 || i >= nx {
            if i == 0 || i == nx {
                return 0.0;
            }
            let m = if i < 0 { -i } else { 2 * nx - i };
            return -self.u_at(u, m, j);
        }
        if j < 0 {
            return -self.u_at(u, i, -1 - j);
        }
        if j >= ny {
            return -self.u_at(u, i, 2 * ny - 1 - j);
        }
        u[self.idx(i as usize, j as usize)]
    }

    /// `v(i, j)` with no-slip ghosts.
    #[inline]
    pub fn v_at(&self, v: &[f64], i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if self.periodic() {
            return v[self.idx(wrap(i, self.nx), wrap(j, self.ny))];
        }
        if j <= 0 || j >= ny {
            if j == 0 || j == ny {
                return 0.0;
            }
            let m = if j < 0 { -j } else { 2 * ny - j };
            return -self.v_at(v, i, m);
        }
        if i < 0 {
            return -self.v_at(v, -1 - i, j);
        }
        if i >= nx {
            return -self.v_at(v, 2 * nx - 1 - i, j);
        }
        v[self.idx(i as usize, j as usize)]
    }

    /// Whether `u(i, ·)` is a fixed wall face.
    #[inline]
    pub fn u_fixed(&self, i: usize) -> bool {
        !self.periodic() && i == 0
    }

    #[inline]
    pub fn v_fixed(&self, j: usize) -> bool {
        !self.periodic() && j == 0
    }

    /// Five-point Laplacian of a cell field (ghosts as in [`Self::cell`]).
    pub fn laplacian(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let h2 = self.h * self.h;
        crate::par::for_each_row(&mut out, self.nx, |j, row| {
            let j = j as isize;
            for (i, o) in row.iter_mut().enumerate() {
                let i = i as isize;
                let c0 = self.cell(c, i, j);
                *o =
                    (self.cell(c, i + 1, j) + self.cell(c, i - 1, j) + self.cell(c, i, j + 1) + self.cell(c, i, j - 1)
                        - 4.0 * c0)
                        / h2;
            }
        });
        out
    }

    /// Discrete divergence at cell centres.
    pub fn divergence(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let h = self.h;
        crate::par::for_each_row(&mut out, self.nx, |j, row| {
            let j = j as isize;
            for (i, o) in row.iter_mut().enumerate() {
                let i = i as isize;
                *o = (self.u_at(u, i + 1, j) - self.u_at(u, i, j) + self.v_at(v, i, j + 1) - self.v_at(v, i, j)) / h;
            }
        });
        out
    }

    /// Velocity interpolated to cell centres.
    pub fn center_velocity(&self, u: &[f64], v: &[f64], i: usize, j: usize) -> Vec2 {
        let (i, j) = (i as isize, j as isize);
        [
            0.5 * (self.u_at(u, i, j) + self.u_at(u, i + 1, j)),
            0.5 * (self.v_at(v, i, j) + self.v_at(v, i, j + 1)),
        ]
    }

    /// `∫ c` by the midpoint rule.
    pub fn integrate(&self, c: &[f64]) -> f64 {
        c.iter().sum::<f64>() * self.h * self.h
    }
}
