//! Least-squares convergence-order fits in log-log space.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fit of `log y = intercept + slope · log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (NaN with two points).
    pub stderr: f64,
    /// Two-sided 95% confidence interval of the slope.
    pub ci95: (f64, f64),
    pub points: usize,
}

/// Two-sided 97.5% quantiles of Student's t for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
    2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
];

fn t_quantile(dof: usize) -> f64 {
    match dof {
        0 => f64::INFINITY,
        d if d <= T975.len() => T975[d - 1],
        _ => 1.96,
    }
}

/// Fit the slope of `log y` against `log x`. All values must be positive.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<OrderFit> {
    if x.len() != y.len() {
        return Err(Error::GridMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::invalid("an order fit needs at least two points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("order fits need positive finite values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("order fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = lx.len() - 2;
    let (stderr, ci95) = if dof == 0 {
        (f64::NAN, (f64::NEG_INFINITY, f64::INFINITY))
    } else {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        let se = (rss / dof as f64 / sxx).sqrt();
        let t = t_quantile(dof);
        (se, (slope - t * se, slope + t * se))
    };
    Ok(OrderFit {
        slope,
        intercept,
        stderr,
        ci95,
        points: lx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let x = [0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        let f = loglog_fit(&x, &y).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(f.stderr < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(loglog_fit(&[1.0], &[1.0]).is_err());
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(loglog_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        let two = loglog_fit(&[1.0, 2.0], &[1.0, 4.0]).unwrap();
        assert!((two.slope - 2.0).abs() < 1e-14 && two.stderr.is_nan());
    }

    proptest! {
        #[test]
        fn slope_invariant_under_rescaling(
            ys in proptest::collection::vec(1e-6f64..1e3, 3..6),
            k in 1e-3f64..1e3,
        ) {
            let x: Vec<f64> = (0..ys.len()).map(|i| 0.5f64.powi(i as i32)).collect();
            let a = loglog_fit(&x, &ys).unwrap();
            let scaled: Vec<f64> = ys.iter().map(|v| v * k).collect();
            let b = loglog_fit(&x, &scaled).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((a.stderr - b.stderr).abs() < 1e-9);
        }
    }
}
