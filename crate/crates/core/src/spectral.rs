//! Eigenvalues of the 1D linearised Allen-Cahn operator
//! `−∂²ₓ + ε⁻² f''(θ₀(x/ε))` and the projection onto its translation mode.

use crate::numerics::quad::simpson;
use crate::profile::Profile;
use crate::{Error, Result};

/// Smallest admissible `L/ε`.
pub const MIN_STRETCHED_HALF_WIDTH: f64 = 10.0;
pub const MIN_GRID: usize = 1024;
/// Default lower-bound constant for the report.
pub const DEFAULT_C_L: f64 = 1.0;
/// Default stretched half-width and node count for the gap report. Second
/// differences bias `ε²λ₀` downward by `O((h/ε)²)`, so `λ₀` itself drifts like
/// `(h/ε)²/ε²`; 8192 nodes over `[−20, 20]` keep it above `−10⁻³` down to
/// `ε = 1/40`.
pub const DEFAULT_REPORT_HALF_WIDTH: f64 = 20.0;
pub const DEFAULT_REPORT_N: usize = 8192;

const INVERSE_ITERATIONS: usize = 20;

/// Lowest eigenpairs of the operator on `[−L, L]` with Dirichlet ends,
/// discretised by second differences on `n` interior nodes.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub half_width: f64,
    pub n: usize,
    pub eps: f64,
    /// Interior nodes.
    pub x: Vec<f64>,
    /// Potential `ε⁻² f''(θ₀(x/ε))` at the nodes.
    pub potential: Vec<f64>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors, normalised to `Σ v² h = 1` and positive at the node
    /// nearest the origin for the ground state.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectralProblem {
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n + 1) as f64
    }

    /// `max |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = self.h();
        let mut worst = 0.0f64;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Assemble and solve for the lowest `k` eigenpairs.
pub fn assemble_and_solve(half_width: f64, n: usize, eps: f64, k: usize, profile: &Profile) -> Result<SpectralProblem> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if n < MIN_GRID {
        return Err(Error::invalid(format!("spectral grid needs n >= {MIN_GRID}, got {n}")));
    }
    if !(half_width >= MIN_STRETCHED_HALF_WIDTH * eps) {
        return Err(Error::invalid(format!(
            "interval half-width {half_width} must be at least {MIN_STRETCHED_HALF_WIDTH} eps = {}",
            MIN_STRETCHED_HALF_WIDTH * eps
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "cannot compute {k} eigenpairs of a size-{n} matrix"
        )));
    }
    let h = 2.0 * half_width / (n + 1) as f64;
    let pot = profile.potential();
    let x: Vec<f64> = (1..=n).map(|i| -half_width + i as f64 * h).collect();
    let potential: Vec<f64> = x
        .iter()
        .map(|&xi| pot.d2f(profile.eval(xi / eps)) / (eps * eps))
        .collect();
    let off = -1.0 / (h * h);
    let diag: Vec<f64> = potential.iter().map(|v| 2.0 / (h * h) + v).collect();

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for index in 0..k {
        let lambda = kth_eigenvalue(&diag, off, index);
        let v = inverse_iteration(&diag, off, lambda, h, &eigenvectors).ok_or(Error::EigenNonConvergence {
            index,
            iterations: INVERSE_ITERATIONS,
        })?;
        eigenvalues.push(lambda);
        eigenvectors.push(v);
    }
    Ok(SpectralProblem {
        half_width,
        n,
        eps,
        x,
        potential,
        eigenvalues,
        eigenvectors,
    })
}

/// Number of eigenvalues below `lambda` (Sturm sequence count).
fn count_below(diag: &[f64], off: f64, lambda: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let b2 = if i == 0 { 0.0 } else { off * off };
        d = a - lambda - b2 / d;
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + off.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `index`-th smallest eigenvalue by bisection.
fn kth_eigenvalue(diag: &[f64], off: f64, index: usize) -> f64 {
    let r = 2.0 * off.abs();
    let mut lo = diag.iter().fold(f64::INFINITY, |m, &a| m.min(a - r));
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a + r));
    // Bisection on the count; stops when the bracket no longer shrinks.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse iteration for the eigenvector of `lambda`, orthogonalised against
/// `previous`.
fn inverse_iteration(diag: &[f64], off: f64, lambda: f64, h: f64, previous: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = diag.len();
    let scale = diag.iter().fold(0.0f64, |m, a| m.max(a.abs())) + 2.0 * off.abs();
    let shift = lambda + 1e-10 * scale.max(1.0) * f64::EPSILON.sqrt();
    let shifted: Vec<f64> = diag.iter().map(|a| a - shift).collect();
    // Smooth positive start vector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64 + 0.5) * 0.37).sin()).collect();
    for _ in 0..INVERSE_ITERATIONS {
        let mut next = solve_shifted(&shifted, off, &v);
        for p in previous {
            let dot: f64 = next.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() * h;
            for (a, b) in next.iter_mut().zip(p) {
                *a -= dot * b;
            }
        }
        let norm = (next.iter().map(|a| a * a).sum::<f64>() * h).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        next.iter_mut().for_each(|a| *a /= norm);
        let residual = (0..n)
            .map(|i| {
                let mut t = diag[i] * next[i] - lambda * next[i];
                if i > 0 {
                    t += off * next[i - 1];
                }
                if i + 1 < n {
                    t += off * next[i + 1];
                }
                t.abs()
            })
            .fold(0.0, f64::max);
        v = next;
        if residual <= 1e-9 * scale {
            // fix the sign: positive weighted sum against the centre node
            let c = n / 2;
            let pivot = if v[c].abs() > 1e-12 { v[c] } else { v[c + 1] - v[c - 1] };
            if pivot < 0.0 {
                v.iter_mut().for_each(|a| *a = -*a);
            }
            return Some(v);
        }
    }
    None
}

/// Gaussian elimination with partial pivoting for a symmetric tridiagonal
/// matrix with constant off-diagonal.
fn solve_shifted(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Row i after elimination: u0[i] x_i + u1[i] x_{i+1} + u2[i] x_{i+2} = y_i
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut y = rhs.to_vec();
    // current row being reduced: (a, b, c) at columns i, i+1, i+2
    let (mut a, mut b) = (diag[0], if n > 1 { off } else { 0.0 });
    let mut c = 0.0;
    let tiny = 1e-300;
    for i in 0..n {
        if i + 1 < n {
            let (na, nb, nc) = (off, diag[i + 1], if i + 2 < n { off } else { 0.0 });
            if na.abs() > a.abs() {
                // swap rows i and i+1
                u0[i] = na;
                u1[i] = nb;
                u2[i] = nc;
                y.swap(i, i + 1);
                let m = a / na;
                a = b - m * nb;
                b = c - m * nc;
                c = 0.0;
                y[i + 1] -= m * y[i];
            } else {
                let piv = if a.abs() < tiny { tiny } else { a };
                u0[i] = piv;
                u1[i] = b;
                u2[i] = c;
                let m = na / piv;
                y[i + 1] -= m * y[i];
                a = nb - m * b;
                b = nc - m * c;
                c = 0.0;
            }
        } else {
            u0[i] = if a.abs() < tiny { tiny } else { a };
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut t = y[i];
        if i + 1 < n {
            t -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            t -= u2[i] * x[i + 2];
        }
        x[i] = t / u0[i];
    }
    x
}

/// One row of the spectral-gap table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub eps: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub eps2_lambda1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub c_l: f64,
    /// Whether `λ₀(ε) ≥ −C_L` held for every row.
    pub lower_bound_holds: bool,
}

impl GapReport {
    pub fn to_csv(&self) -> Result<String> {
        let col = |f: fn(&GapRow) -> f64| self.rows.iter().map(f).collect::<Vec<_>>();
        crate::io::csv::render(
            &["epsilon", "lambda0", "lambda1", "eps2_lambda1"],
            &[
                &col(|r| r.eps),
                &col(|r| r.lambda0),
                &col(|r| r.lambda1),
                &col(|r| r.eps2_lambda1),
            ],
        )
    }
}

/// Solve at each `ε` on `[−L ε, L ε]` (`L = stretched_half_width`) with `n`
/// interior nodes, i.e. at matched resolution in the stretched variable.
pub fn spectral_gap_report(
    eps_list: &[f64],
    stretched_half_width: f64,
    n: usize,
    c_l: f64,
    profile: &Profile,
) -> Result<GapReport> {
    let rows: Vec<Result<GapRow>> = crate::par::map(eps_list, |&eps| {
        let p = assemble_and_solve(stretched_half_width * eps, n, eps, 2, profile)?;
        let (l0, l1) = (p.eigenvalues[0], p.eigenvalues[1]);
        Ok(GapRow {
            eps,
            lambda0: l0,
            lambda1: l1,
            eps2_lambda1: eps * eps * l1,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let lower_bound_holds = rows.iter().all(|r| r.lambda0 >= -c_l);
    Ok(GapReport {
        rows,
        c_l,
        lower_bound_holds,
    })
}

/// Split of `ψ(ρ, s)` into the translation mode and a remainder:
/// `ψ = ε^{−1/2} Z(s) β θ₀'(ρ) + ψ^R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub eps: f64,
    /// `‖θ₀'‖⁻¹` over the profile grid.
    pub beta: f64,
    pub z: Vec<f64>,
    /// `ψ^R[j][i]` at `(ρ_i, s_j)`.
    pub remainder: Vec<Vec<f64>>,
}

impl Decomposition {
    pub fn reconstruct(&self, profile: &Profile) -> Vec<Vec<f64>> {
        let amp = self.beta / self.eps.sqrt();
        self.z
            .iter()
            .zip(&self.remainder)
            .map(|(&z, rem)| {
                rem.iter()
                    .zip(profile.theta_p())
                    .map(|(r, t)| r + amp * z * t)
                    .collect()
            })
            .collect()
    }

    /// `max_j |∫ ψ^R(·, s_j) θ₀'| `.
    pub fn orthogonality_defect(&self, profile: &Profile) -> f64 {
        self.remainder
            .iter()
            .map(|rem| project(rem, profile).abs())
            .fold(0.0, f64::max)
    }
}

fn project(row: &[f64], profile: &Profile) -> f64 {
    let g: Vec<f64> = row.iter().zip(profile.theta_p()).map(|(a, b)| a * b).collect();
    simpson(&g, profile.h())
}

/// Project each column `ψ(·, s_j)` onto `θ₀'`.
pub fn decompose(psi: &[Vec<f64>], profile: &Profile, eps: f64) -> Result<Decomposition> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if let Some(bad) = psi.iter().find(|row| row.len() != profile.len()) {
        return Err(Error::GridMismatch {
            expected: profile.len(),
            found: bad.len(),
        });
    }
    let norm2 = project(profile.theta_p(), profile);
    let beta = 1.0 / norm2.sqrt();
    let amp = beta / eps.sqrt();
    let mut z = Vec::with_capacity(psi.len());
    let mut remainder = Vec::with_capacity(psi.len());
    for row in psi {
        let zj = eps.sqrt() * beta * project(row, profile);
        z.push(zj);
        remainder.push(
            row.iter()
                .zip(profile.theta_p())
                .map(|(p, t)| p - amp * zj * t)
                .collect(),
        );
    }
    Ok(Decomposition {
        eps,
        beta,
        z,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> Profile {
        Profile::quartic()
    }

    #[test]
    fn unit_scale_spectrum() {
        let p = profile();
        let sp = assemble_and_solve(20.0, 4096, 1.0, 3, &p).unwrap();
        let l = &sp.eigenvalues;
        assert!(l[0] >= -1e-4 && l[0] <= 1e-3, "lambda0 = {}", l[0]);
        assert!((l[1] - 0.75).abs() < 1e-2, "lambda1 = {}", l[1]);
        assert!(l[2] > l[1]);
        assert!(sp.orthonormality_defect() < 1e-8);
        // ground state is sign-definite and proportional to θ₀'
        let v0 = &sp.eigenvectors[0];
        assert!(v0.iter().all(|&v| v > -1e-12));
        let tp: Vec<f64> = sp.x.iter().map(|&x| p.eval_with_slope(x).1).collect();
        let nrm = (tp.iter().map(|t| t * t).sum::<f64>() * sp.h()).sqrt();
        let dev = v0.iter().zip(&tp).map(|(a, b)| (a - b / nrm).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-3, "eigenvector deviation {dev}");
    }

    #[test]
    fn small_eps_scaling() {
        let p = profile();
        let sp = assemble_and_solve(2.0, 4096, 0.1, 2, &p).unwrap();
        let e2 = 0.01;
        assert!((e2 * sp.eigenvalues[0]).abs() < 1e-3);
        assert!((e2 * sp.eigenvalues[1] - 0.75).abs() < 1e-2);
    }

    #[test]
    fn guards() {
        let p = profile();
        assert!(assemble_and_solve(20.0, 512, 1.0, 2, &p).is_err());
        assert!(assemble_and_solve(5.0, 2048, 1.0, 2, &p).is_err());
        assert!(assemble_and_solve(20.0, 2048, 0.0, 2, &p).is_err());
    }

    #[test]
    fn gap_report() {
        let p = profile();
        let r = spectral_gap_report(&[0.1, 0.05, 0.025], 20.0, DEFAULT_REPORT_N, DEFAULT_C_L, &p).unwrap();
        assert!(r.lower_bound_holds);
        assert!(r.rows.iter().all(|row| row.lambda0 >= -1e-3));
        assert!(r
            .to_csv()
            .unwrap()
            .starts_with("epsilon,lambda0,lambda1,eps2_lambda1\n"));
        let empty = spectral_gap_report(&[], 20.0, 2048, DEFAULT_C_L, &p).unwrap();
        assert!(empty.rows.is_empty());
        let single = spectral_gap_report(&[1.0], 20.0, 2048, DEFAULT_C_L, &p).unwrap();
        let direct = assemble_and_solve(20.0, 2048, 1.0, 2, &p).unwrap();
        assert_eq!(single.rows[0].lambda1, direct.eigenvalues[1]);
    }

    #[test]
    fn decomposition_cases() {
        let p = profile();
        let eps: f64 = 0.05;
        let ns = 16;
        let s: Vec<f64> = (0..ns)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / ns as f64)
            .collect();
        let beta = 1.0 / project(p.theta_p(), &p).sqrt();

        let psi: Vec<Vec<f64>> = s
            .iter()
            .map(|sj| p.theta_p().iter().map(|t| sj.sin() * beta * t / eps.sqrt()).collect())
            .collect();
        let d = decompose(&psi, &p, eps).unwrap();
        for (z, sj) in d.z.iter().zip(&s) {
            assert!((z - sj.sin()).abs() < 1e-6);
        }
        assert!(d.remainder.iter().flatten().all(|r| r.abs() < 1e-12));

        let psi: Vec<Vec<f64>> = s.iter().map(|_| p.theta_pp().to_vec()).collect();
        let d = decompose(&psi, &p, eps).unwrap();
        assert!(d.z.iter().all(|z| z.abs() < 1e-8));

        let psi: Vec<Vec<f64>> = s
            .iter()
            .map(|sj| {
                p.rho()
                    .iter()
                    .zip(p.theta_p())
                    .map(|(r, t)| beta * t / eps.sqrt() + 0.1 * sj.cos() * (-r * r).exp())
                    .collect()
            })
            .collect();
        let d = decompose(&psi, &p, eps).unwrap();
        // oracle: Gaussian's projection computed independently
        let g: Vec<f64> = p
            .rho()
            .iter()
            .zip(p.theta_p())
            .map(|(r, t)| (-r * r).exp() * t)
            .collect();
        let gp = simpson(&g, p.h());
        for (j, sj) in s.iter().enumerate() {
            let expect = 1.0 + eps.sqrt() * beta * 0.1 * sj.cos() * gp;
            assert!((d.z[j] - expect).abs() < 1e-6);
        }
        assert!(d.orthogonality_defect(&p) < 1e-12);
        let back = d.reconstruct(&p);
        for (a, b) in back.iter().flatten().zip(psi.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
        // idempotent
        let again = decompose(&back, &p, eps).unwrap();
        for (a, b) in again.z.iter().zip(&d.z) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(decompose(&[vec![0.0; 3]], &p, eps).is_err());
    }
}
