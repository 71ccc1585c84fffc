use std::f64::consts::PI;
use std::path::Path;

use super::{norm, rot90};
use crate::numerics::fourier::{Periodic1d, TrigInterpolant};
use crate::{Error, Result, Vec2};

pub const MIN_SAMPLES: usize = 64;

/// Closed simple curve `X₀ : [0, 2π) → ℝ²` from uniform samples, with
/// derivatives from its trigonometric interpolant.
#[derive(Debug, Clone)]
pub struct Curve {
    s: Vec<f64>,
    points: Vec<Vec2>,
    speed: Vec<f64>,
    tangent: Vec<Vec2>,
    normal: Vec<Vec2>,
    curvature: Vec<f64>,
    normal_velocity: Vec<f64>,
    ix: TrigInterpolant,
    iy: TrigInterpolant,
    reversed: bool,
}

/// Point, unit frame and metric data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub point: Vec2,
    pub tangent: Vec2,
    pub normal: Vec2,
    /// `|X₀'(s)|`
    pub speed: f64,
    pub curvature: f64,
}

/// Build a curve from samples `X₀(2π j / n)`, `j = 0..n`.
///
/// Clockwise input is reversed (keeping sample 0 at `s = 0`) so that the
/// normal points inward.
pub fn build_curve(samples: &[Vec2]) -> Result<Curve> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "a curve needs at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("curve samples must be finite"));
    }
    check_simple(samples)?;
    let reversed = signed_area(samples) < 0.0;
    let points: Vec<Vec2> = if reversed {
        (0..n).map(|j| samples[(n - j) % n]).collect()
    } else {
        samples.to_vec()
    };
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    let op = Periodic1d::new(n, 2.0 * PI);
    let (x1, y1) = (op.derivative(&xs, 1), op.derivative(&ys, 1));
    let (x2, y2) = (op.derivative(&xs, 2), op.derivative(&ys, 2));
    let mut speed = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for j in 0..n {
        let v = x1[j].hypot(y1[j]);
        if v == 0.0 {
            return Err(Error::invalid("curve parametrisation is singular"));
        }
        let t = [x1[j] / v, y1[j] / v];
        speed.push(v);
        tangent.push(t);
        normal.push(rot90(t));
        curvature.push((x1[j] * y2[j] - y1[j] * x2[j]) / (v * v * v));
    }
    Ok(Curve {
        s: (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
        points,
        speed,
        tangent,
        normal,
        curvature,
        normal_velocity: vec![0.0; n],
        ix: TrigInterpolant::new(&xs, 2.0 * PI),
        iy: TrigInterpolant::new(&ys, 2.0 * PI),
        reversed,
    })
}

fn signed_area(p: &[Vec2]) -> f64 {
    let n = p.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Polygon self-intersection test over all non-adjacent segment pairs.
fn check_simple(p: &[Vec2]) -> Result<()> {
    let n = p.len();
    for i in 0..n {
        let (a, b) = (p[i], p[(i + 1) % n]);
        let (lo_x, hi_x) = (a[0].min(b[0]), a[0].max(b[0]));
        let (lo_y, hi_y) = (a[1].min(b[1]), a[1].max(b[1]));
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (p[j], p[(j + 1) % n]);
            if c[0].max(d[0]) < lo_x || c[0].min(d[0]) > hi_x {
                continue;
            }
            if c[1].max(d[1]) < lo_y || c[1].min(d[1]) > hi_y {
                continue;
            }
            if segments_cross(a, b, c, d) {
                return Err(Error::SelfIntersection { first: i, second: j });
            }
        }
    }
    Ok(())
}

impl Curve {
    /// Counter-clockwise circle sampled at `n` points.
    pub fn circle(center: Vec2, radius: f64, n: usize) -> Result<Self> {
        Self::ellipse(center, radius, radius, n)
    }

    /// Counter-clockwise axis-aligned ellipse `(a cos s, b sin s)`.
    pub fn ellipse(center: Vec2, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::invalid("ellipse semi-axes must be positive"));
        }
        let samples: Vec<Vec2> = (0..n)
            .map(|j| {
                let s = 2.0 * PI * j as f64 / n as f64;
                [center[0] + a * s.cos(), center[1] + b * s.sin()]
            })
            .collect();
        build_curve(&samples)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn tangent(&self) -> &[Vec2] {
        &self.tangent
    }

    pub fn normal(&self) -> &[Vec2] {
        &self.normal
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// `|X₀'|` at the samples.
    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// Whether the input samples were clockwise and have been reversed.
    pub fn was_reversed(&self) -> bool {
        self.reversed
    }

    pub fn normal_velocity(&self) -> &[f64] {
        &self.normal_velocity
    }

    /// Attach a normal velocity (positive towards `Ω⁺`) per sample.
    pub fn with_normal_velocity(mut self, v: Vec<f64>) -> Result<Self> {
        if v.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                found: v.len(),
            });
        }
        self.normal_velocity = v;
        Ok(self)
    }

    /// `X₀(s)`, `X₀'(s)`, `X₀''(s)` from the trigonometric interpolant.
    pub fn eval(&self, s: f64) -> (Vec2, Vec2, Vec2) {
        let [x, x1, x2] = self.ix.eval(s);
        let [y, y1, y2] = self.iy.eval(s);
        ([x, y], [x1, y1], [x2, y2])
    }

    pub fn point(&self, s: f64) -> Vec2 {
        [self.ix.value(s), self.iy.value(s)]
    }

    pub fn frame(&self, s: f64) -> Frame {
        let (p, d1, d2) = self.eval(s);
        let v = norm(d1);
        let t = [d1[0] / v, d1[1] / v];
        let cross = d1[0] * d2[1] - d1[1] * d2[0];
        let h = cross / (v * v * v);
        Frame {
            point: p,
            tangent: t,
            normal: rot90(t),
            speed: v,
            curvature: h,
        }
    }

    /// Largest `|H|` at the samples.
    pub fn max_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0f64, |m, h| m.max(h.abs()))
    }

    /// Reach estimated from the minimal radius of curvature.
    pub fn reach(&self) -> f64 {
        1.0 / self.max_curvature()
    }

    /// Tube half-width `δ = reach / 4`.
    pub fn delta(&self) -> f64 {
        self.reach() / 4.0
    }

    /// Length by spectral quadrature of `|X₀'|`.
    pub fn length(&self) -> f64 {
        self.speed.iter().sum::<f64>() * 2.0 * PI / self.len() as f64
    }

    /// Enclosed area (positive after orientation).
    pub fn area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// CSV with columns `s, x, y`.
    pub fn to_csv(&self) -> Result<String> {
        let xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p[1]).collect();
        crate::io::csv::render(&["s", "x", "y"], &[&self.s, &xs, &ys])
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Read `s, x, y` samples; the `s` column must be the uniform grid.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, cols) = crate::io::csv::parse(text)?;
        let idx = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid(format!("curve CSV lacks column `{name}`")))
        };
        let (xi, yi) = (idx("x")?, idx("y")?);
        let n = cols[xi].len();
        if let Ok(si) = idx("s") {
            for (j, s) in cols[si].iter().enumerate() {
                if (s - 2.0 * PI * j as f64 / n as f64).abs() > 1e-9 {
                    return Err(Error::invalid("curve CSV `s` column is not the uniform grid"));
                }
            }
        }
        let samples: Vec<Vec2> = cols[xi].iter().zip(&cols[yi]).map(|(&x, &y)| [x, y]).collect();
        build_curve(&samples)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;

    #[test]
    fn circle_frame() {
        let c = Curve::circle([0.1, -0.2], 0.25, 256).unwrap();
        for (j, h) in c.curvature().iter().enumerate() {
            assert!((h - 4.0).abs() < 1e-6);
            let (t, n) = (c.tangent()[j], c.normal()[j]);
            assert!((norm(t) - 1.0).abs() < 1e-10 && (norm(n) - 1.0).abs() < 1e-10);
            assert!(dot(t, n).abs() <= 1e-12);
            // interior normal points to the centre
            let p = c.points()[j];
            let inward = [0.1 - p[0], -0.2 - p[1]];
            assert!(dot(n, inward) > 0.0);
        }
        assert!((c.length() - 2.0 * PI * 0.25).abs() < 1e-12);
        assert!((c.delta() - 0.0625).abs() < 1e-6);
    }

    #[test]
    fn ellipse_curvature_extrema() {
        let c = Curve::ellipse([0.0, 0.0], 0.3, 0.2, 256).unwrap();
        assert!((c.max_curvature() - 0.3 / 0.04).abs() < 1e-3);
        let min = c.curvature().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.2 / 0.09).abs() < 1e-3);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let samples: Vec<Vec2> = (0..128)
            .map(|j| {
                let s = -2.0 * PI * j as f64 / 128.0;
                [0.5 * s.cos(), 0.5 * s.sin()]
            })
            .collect();
        let c = build_curve(&samples).unwrap();
        assert!(c.was_reversed());
        assert!(c.curvature().iter().all(|h| (h - 2.0).abs() < 1e-8));
        assert!(c.area() > 0.0);
    }

    #[test]
    fn figure_eight_rejected() {
        let samples: Vec<Vec2> = (0..128)
            .map(|j| {
                let s = 2.0 * PI * j as f64 / 128.0;
                [s.sin(), (2.0 * s).sin() / 2.0]
            })
            .collect();
        assert!(matches!(build_curve(&samples), Err(Error::SelfIntersection { .. })));
        assert!(build_curve(&samples[..10]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = Curve::ellipse([0.5, 0.5], 0.3, 0.2, 64).unwrap();
        let back = Curve::from_csv(&c.to_csv().unwrap()).unwrap();
        assert_eq!(back.points(), c.points());
    }

    #[test]
    fn off_grid_evaluation_matches_closed_form() {
        let c = Curve::ellipse([0.0, 0.0], 0.3, 0.2, 128).unwrap();
        let s = 1.2345;
        let (p, d1, d2) = c.eval(s);
        assert!((p[0] - 0.3 * s.cos()).abs() < 1e-13 && (p[1] - 0.2 * s.sin()).abs() < 1e-13);
        assert!((d1[0] + 0.3 * s.sin()).abs() < 1e-12 && (d2[1] + 0.2 * s.sin()).abs() < 1e-12);
        let f = c.frame(s);
        let exact_h = 0.06 / (0.09 * s.sin().powi(2) + 0.04 * s.cos().powi(2)).powf(1.5);
        assert!((f.curvature - exact_h).abs() < 1e-10);
    }
}
