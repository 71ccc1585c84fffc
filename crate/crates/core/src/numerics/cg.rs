//! Jacobi-preconditioned conjugate gradients for symmetric positive
//! (semi-)definite operators.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    /// Final `‖r‖_∞`.
    pub residual: f64,
}

/// Solve `A x = b` starting from `x`. Stops when `‖b − A x‖_∞ ≤ tol`.
///
/// `apply(v, out)` writes `A v`; `diag` is the diagonal of `A`. For a
/// singular operator the right-hand side must lie in the range.
pub fn solve<F>(apply: F, diag: &[f64], b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<CgStats>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut res = inf(&r);
    if res <= tol {
        return Ok(CgStats {
            iterations: 0,
            residual: res,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        res = inf(&r);
        if res <= tol {
            return Ok(CgStats {
                iterations: it,
                residual: res,
            });
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::LinearSolver {
        solver: "conjugate gradients",
        iterations: max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_laplacian_1d() {
        // -u'' = 1 on (0,1), u(0) = u(1) = 0, exact at the nodes for the
        // three-point stencil.
        let n = 99;
        let h = 1.0 / (n + 1) as f64;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = (2.0 * v[i] - l - r) / (h * h);
            }
        };
        let diag = vec![2.0 / (h * h); n];
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let stats = solve(apply, &diag, &b, &mut x, 1e-10, 500).unwrap();
        assert!(stats.iterations <= n);
        for (i, v) in x.iter().enumerate() {
            let t = (i + 1) as f64 * h;
            assert!((v - 0.5 * t * (1.0 - t)).abs() < 1e-10);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let apply = |v: &[f64], out: &mut [f64]| {
            out[0] = v[0];
            out[1] = 1e-8 * v[1];
        };
        let mut x = [0.0, 0.0];
        let r = solve(apply, &[1.0, 1.0], &[1.0, 1.0], &mut x, 1e-30, 1);
        assert!(matches!(r, Err(Error::LinearSolver { .. })));
    }
}
