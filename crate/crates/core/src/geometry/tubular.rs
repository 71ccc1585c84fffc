use std::f64::consts::PI;

use super::curve::{Curve, Frame};
use super::{dot, norm, sub};
use crate::{Error, Result, Vec2};

const NEWTON_MAX_ITER: usize = 60;
const PARAM_TOL: f64 = 1e-12;

/// Tubular coordinates `(d₀, S₀)` around a curve, valid in `Γ(3δ)`.
#[derive(Debug, Clone, Copy)]
pub struct TubularCoords<'a> {
    curve: &'a Curve,
    delta: f64,
}

/// Closest-point projection of a point onto the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubePoint {
    /// Signed distance, positive inside.
    pub d: f64,
    /// Projection parameter in `[0, 2π)`.
    pub s: f64,
    pub frame: Frame,
}

impl TubePoint {
    /// `∇d₀ = n(S₀)`.
    pub fn grad_d(&self) -> Vec2 {
        self.frame.normal
    }

    /// `1 − d H`, the relative length of the parallel curve.
    pub fn stretch(&self) -> f64 {
        1.0 - self.d * self.frame.curvature
    }

    /// `∇S₀ = τ / (|X₀'| (1 − d H))`.
    pub fn grad_s(&self) -> Vec2 {
        let k = 1.0 / (self.frame.speed * self.stretch());
        [self.frame.tangent[0] * k, self.frame.tangent[1] * k]
    }

    /// `|∇S₀|²`.
    pub fn metric(&self) -> f64 {
        let k = 1.0 / (self.frame.speed * self.stretch());
        k * k
    }
}

pub(crate) fn wrap(s: f64) -> f64 {
    s.rem_euclid(2.0 * PI)
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

impl<'a> TubularCoords<'a> {
    /// Tube with the default half-width `δ = reach/4`.
    pub fn new(curve: &'a Curve) -> Self {
        Self {
            curve,
            delta: curve.delta(),
        }
    }

    /// Tube with a custom half-width; must stay below `reach/3`.
    pub fn with_delta(curve: &'a Curve, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < curve.reach() / 3.0) {
            return Err(Error::invalid(format!(
                "tube half-width {delta} must lie in (0, reach/3 = {})",
                curve.reach() / 3.0
            )));
        }
        Ok(Self { curve, delta })
    }

    pub fn curve(&self) -> &'a Curve {
        self.curve
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `X₀(s) + r n(s)`.
    pub fn point(&self, r: f64, s: f64) -> Vec2 {
        let f = self.curve.frame(s);
        [f.point[0] + r * f.normal[0], f.point[1] + r * f.normal[1]]
    }

    /// Newton iteration on `(X₀(s) − x)·X₀'(s) = 0` from `s0`.
    fn newton(&self, x: Vec2, s0: f64) -> Option<f64> {
        let h = 2.0 * PI / self.curve.len() as f64;
        let mut s = s0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d1, d2) = self.curve.eval(s);
            let r = sub(p, x);
            let phi = dot(r, d1);
            let dphi = dot(d1, d1) + dot(r, d2);
            let mut step = if dphi > 0.0 { -phi / dphi } else { -phi.signum() * h };
            step = step.clamp(-4.0 * h, 4.0 * h);
            s += step;
            if step.abs() < PARAM_TOL {
                return Some(wrap(s));
            }
        }
        None
    }

    fn finish(&self, x: Vec2, s: f64) -> TubePoint {
        let frame = self.curve.frame(s);
        let d = dot(sub(x, frame.point), frame.normal);
        TubePoint { d, s, frame }
    }

    /// Closest-point projection: coarse scan over the samples, then Newton.
    ///
    /// Fails with [`Error::AmbiguousProjection`] when two distinct
    /// parameters are equally close and with [`Error::OutsideTube`] when
    /// `|d₀| > 3δ`.
    pub fn project(&self, x: Vec2) -> Result<TubePoint> {
        let pts = self.curve.points();
        let n = pts.len();
        let dist: Vec<f64> = pts.iter().map(|p| norm(sub(*p, x))).collect();
        let best = (0..n)
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .expect("curve has samples");
        let s_grid = self.curve.s();
        let s1 = self.newton(x, s_grid[best]).ok_or(Error::NewtonDiverged {
            what: "closest-point projection".into(),
            iterations: NEWTON_MAX_ITER,
            residual: f64::NAN,
        })?;
        let tp = self.finish(x, s1);
        let d1 = tp.d.abs();
        let slack = 1e-9 * (1.0 + d1);
        // Other local minima of the sampled distance that could compete.
        let h = 2.0 * PI / n as f64;
        let spread = norm(sub(pts[1], pts[0])).max(self.curve.length() / n as f64);
        for j in 0..n {
            if j == best {
                continue;
            }
            let (prev, next) = (dist[(j + n - 1) % n], dist[(j + 1) % n]);
            if dist[j] > prev || dist[j] > next || dist[j] > dist[best] + spread {
                continue;
            }
            if circular_gap(s_grid[j], s1) <= 2.0 * h {
                continue;
            }
            if let Some(s2) = self.newton(x, s_grid[j]) {
                let other = self.finish(x, s2);
                if circular_gap(s2, s1) > 1e-6 && (other.d.abs() - d1).abs() <= slack {
                    return Err(Error::AmbiguousProjection {
                        x: x[0],
                        y: x[1],
                        s1,
                        s2,
                    });
                }
                if other.d.abs() < d1 - slack {
                    return self.check_tube(x, other);
                }
            }
        }
        self.check_tube(x, tp)
    }

    fn check_tube(&self, x: Vec2, tp: TubePoint) -> Result<TubePoint> {
        let limit = 3.0 * self.delta;
        if tp.d.abs() > limit * (1.0 + 1e-12) {
            return Err(Error::OutsideTube {
                x: x[0],
                y: x[1],
                dist: tp.d.abs(),
                limit,
            });
        }
        Ok(tp)
    }

    /// Projection by Newton from a nearby parameter, without the global scan.
    /// Falls back to [`Self::project`] when Newton fails.
    pub fn project_near(&self, x: Vec2, s_hint: f64) -> Result<TubePoint> {
        match self.newton(x, s_hint) {
            Some(s) if circular_gap(s, s_hint) < 0.5 => self.check_tube(x, self.finish(x, s)),
            _ => self.project(x),
        }
    }
}

/// `(d₀, S₀)` of `x` relative to `curve`, using the default tube width.
pub fn signed_distance(x: Vec2, curve: &Curve) -> Result<(f64, f64)> {
    let tp = TubularCoords::new(curve).project(x)?;
    Ok((tp.d, tp.s))
}
