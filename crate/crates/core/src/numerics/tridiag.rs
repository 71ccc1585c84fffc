//! Tridiagonal linear systems.

/// Solve `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` (Thomas
/// algorithm, no pivoting). `sub[0]` and `sup[n-1]` are ignored.
pub fn solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(sub.len() == n && sup.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / beta;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    #[test]
    fn solves_small_system() {
        let sub = [0.0, 1.0, 1.0];
        let diag = [4.0, 4.0, 4.0];
        let sup = [1.0, 1.0, 0.0];
        let x_true = [1.0, -2.0, 3.0];
        let rhs = [
            4.0 * x_true[0] + x_true[1],
            x_true[0] + 4.0 * x_true[1] + x_true[2],
            x_true[1] + 4.0 * x_true[2],
        ];
        let x = super::solve(&sub, &diag, &sup, &rhs);
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
