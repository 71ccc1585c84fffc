use serde::{Deserialize, Serialize};

use crate::reference::PeriodicBox;
use crate::{DoubleWell, Error, Result, Vec2, ViscosityModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub origin: Vec2,
    pub size: Vec2,
}

impl Default for Domain {
    fn default() -> Self {
        Self {
            origin: [0.0, 0.0],
            size: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    #[default]
    Periodic,
    /// No-slip walls with `c = −1` on the boundary.
    Walls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    /// Full Navier-Stokes update.
    #[default]
    NavierStokes,
    /// Velocity stays at its initial value (Allen-Cahn with prescribed flow).
    Frozen,
}

/// Time-step policy. The step is the smallest of `dt_max` and the
/// stability bounds scaled by their safety factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimePolicy {
    pub dt_max: Option<f64>,
    /// Advective CFL number `Δt max|v| / h`.
    pub cfl: f64,
    /// Safety factor on the explicit viscous bound `h² / (4 ν_max)`.
    pub viscous_safety: f64,
    /// Upper bound on `S Δt` for the stabilised Allen-Cahn step.
    pub ac_cap: f64,
}

impl Default for TimePolicy {
    fn default() -> Self {
        Self {
            dt_max: None,
            cfl: 0.5,
            viscous_safety: 0.9,
            ac_cap: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// `Ω⁺` is the disc.
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Axis-aligned ellipse with semi-axes `a`, `b`.
    Ellipse {
        center: Vec2,
        a: f64,
        b: f64,
    },
    /// `Ω⁺` is the vertical band `left < x < right`.
    Stripe {
        left: f64,
        right: f64,
    },
    Constant {
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub shape: Shape,
    #[serde(default)]
    pub velocity: Vec2,
    /// Half-width `δ` of the profile cutoff; defaults to a third of the
    /// smallest radius (or of the band half-width), capped at 0.15.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub noise: Option<Noise>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPolicy {
    /// Diagnostics every this many steps (the first and last step always).
    pub diagnostics_every: usize,
    /// Keep `c` snapshots every this many steps; 0 keeps none.
    pub snapshot_every: usize,
    /// Write binary snapshots of all fields when an output directory is given.
    pub write_fields: bool,
}

impl Default for OutputPolicy {
    fn default() -> Self {
        Self {
            diagnostics_every: 10,
            snapshot_every: 0,
            write_fields: false,
        }
    }
}

fn default_alpha() -> f64 {
    0.5
}

/// Full description of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub boundary: BoundaryMode,
    pub eps: f64,
    /// Mobility exponent, `m_ε = ε^α`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Replaces `ε^α` when set (e.g. 0 for pure transport).
    #[serde(default)]
    pub mobility: Option<f64>,
    #[serde(default)]
    pub viscosity: ViscosityModel,
    #[serde(default)]
    pub potential: DoubleWell,
    #[serde(default)]
    pub flow: FlowMode,
    #[serde(default)]
    pub time: TimePolicy,
    pub t_end: f64,
    pub initial: InitialCondition,
    #[serde(default)]
    pub output: OutputPolicy,
}

/// Overshoot guard on `|c|`.
pub const C_BOUND: f64 = 1.2;

impl SimConfig {
    /// Circular bubble at rest in a periodic box.
    pub fn bubble(domain: Domain, n: usize, eps: f64, alpha: f64, center: Vec2, radius: f64, t_end: f64) -> Self {
        let ny = ((n as f64) * domain.size[1] / domain.size[0]).round() as usize;
        Self {
            domain,
            nx: n,
            ny,
            boundary: BoundaryMode::Periodic,
            eps,
            alpha,
            mobility: None,
            viscosity: ViscosityModel::constant(0.1),
            potential: DoubleWell::Quartic,
            flow: FlowMode::NavierStokes,
            time: TimePolicy::default(),
            t_end,
            initial: InitialCondition {
                shape: Shape::Circle { center, radius },
                velocity: [0.0, 0.0],
                cutoff: None,
                noise: None,
            },
            output: OutputPolicy::default(),
        }
    }

    pub fn h(&self) -> f64 {
        self.domain.size[0] / self.nx as f64
    }

    pub fn mobility(&self) -> f64 {
        self.mobility.unwrap_or_else(|| self.eps.powf(self.alpha))
    }

    /// `S = max_{|c| ≤ 1.2} f''(c) · m_ε / ε²`.
    pub fn stabilization(&self) -> f64 {
        self.potential.max_d2f(C_BOUND) * self.mobility() / (self.eps * self.eps)
    }

    pub fn periodic_box(&self) -> Option<PeriodicBox> {
        (self.boundary == BoundaryMode::Periodic).then_some(PeriodicBox {
            origin: self.domain.origin,
            size: self.domain.size,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.initial.cutoff.unwrap_or_else(|| {
            let scale = match self.initial.shape {
                Shape::Circle { radius, .. } => radius,
                Shape::Ellipse { a, b, .. } => a.min(b),
                Shape::Stripe { left, right } => 0.5 * (right - left),
                Shape::Constant { .. } => 1.0,
            };
            (scale / 3.0).min(0.15)
        })
    }

    /// Schema-independent checks: positivity, square cells, `h ≤ ε`.
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| {
            Err(Error::Config {
                path: path.into(),
                message,
            })
        };
        if self.nx < 8 || self.ny < 8 {
            return bad("nx", format!("grid must be at least 8x8, got {}x{}", self.nx, self.ny));
        }
        if !(self.domain.size[0] > 0.0 && self.domain.size[1] > 0.0) {
            return bad("domain.size", "box size must be positive".into());
        }
        let hx = self.domain.size[0] / self.nx as f64;
        let hy = self.domain.size[1] / self.ny as f64;
        if (hx - hy).abs() > 1e-12 * hx {
            return bad("ny", format!("cells must be square, got hx = {hx}, hy = {hy}"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps", format!("eps must be positive, got {}", self.eps));
        }
        if !(self.alpha >= 0.0) {
            return bad("alpha", format!("alpha must be non-negative, got {}", self.alpha));
        }
        if let Some(m) = self.mobility {
            if !(m >= 0.0) {
                return bad("mobility", format!("mobility must be non-negative, got {m}"));
            }
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end", format!("t_end must be non-negative, got {}", self.t_end));
        }
        let tp = &self.time;
        if !(tp.cfl > 0.0 && tp.viscous_safety > 0.0 && tp.ac_cap > 0.0) {
            return bad("time", "safety factors must be positive".into());
        }
        if let Some(dt) = tp.dt_max {
            if !(dt > 0.0) {
                return bad("time.dt_max", format!("dt_max must be positive, got {dt}"));
            }
        }
        if self.output.diagnostics_every == 0 {
            return bad("output.diagnostics_every", "must be at least 1".into());
        }
        self.viscosity.validate().or_else(|e| bad("viscosity", e.to_string()))?;
        self.potential.validate().or_else(|e| bad("potential", e.to_string()))?;
        if hx > self.eps {
            return Err(Error::UnderResolved { h: hx, eps: self.eps });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_gets_defaults() {
        let text = r#"{
            "nx": 64, "ny": 64, "eps": 0.03125, "t_end": 0.01,
            "initial": {"shape": {"kind": "circle", "center": [0.5, 0.5], "radius": 0.25}}
        }"#;
        let c: SimConfig = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.boundary, BoundaryMode::Periodic);
        assert_eq!(c.time.ac_cap, 0.05);
        let back: SimConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn under_resolution_is_its_own_error() {
        let mut c = SimConfig::bubble(Domain::default(), 8, 1.0 / 16.0, 0.5, [0.5, 0.5], 0.25, 0.0);
        assert!(matches!(c.validate(), Err(Error::UnderResolved { .. })));
        c.nx = 16;
        c.ny = 16;
        c.validate().unwrap();
        c.ny = 20;
        assert!(matches!(c.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn stabilization_constant() {
        let c = SimConfig::bubble(Domain::default(), 64, 0.5, 0.0, [0.5, 0.5], 0.25, 0.0);
        // f'' = (3c² − 1)/2 at 1.2 is 1.66.
        assert!((c.stabilization() - 1.66 / 0.25).abs() < 1e-12);
    }
}
