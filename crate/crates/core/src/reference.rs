//! Semi-analytic sharp-interface references: equilibrium bubbles, rigidly
//! transported bubbles and bubbles shrinking by the curvature drift
//! `V = m_ε H`.
//!
//! Curvature is positive for a circle with `Ω⁺` inside, and `d > 0` in `Ω⁺`.

use serde::{Deserialize, Serialize};

use crate::{Error, Profile, Result, Vec2};

/// Cutoff `ζ` with `ζ = 1` on `[−δ, δ]`, `ζ = 0` outside `[−2δ, 2δ]` and a
/// quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub delta: f64,
}

impl Cutoff {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("cutoff delta must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn zeta(&self, d: f64) -> f64 {
        let x = (d.abs() - self.delta) / self.delta;
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
        }
    }

    /// `ζ(d) θ₀(d/ε) + sign(d) (1 − ζ(d))`.
    pub fn blend(&self, d: f64, eps: f64, profile: &Profile) -> f64 {
        let z = self.zeta(d);
        if z == 0.0 {
            return d.signum();
        }
        let outer = if z == 1.0 { 0.0 } else { d.signum() * (1.0 - z) };
        z * profile.eval(d / eps) + outer
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    StationaryBubble,
    /// Rigid transport with the background flow, radius fixed.
    TransportedBubble,
    /// Transport plus the curvature drift `R² = R₀² − 2 ε^α t`.
    MobilityCorrectedBubble,
}

/// Periodic box used to wrap centres and distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBox {
    pub origin: Vec2,
    pub size: Vec2,
}

impl PeriodicBox {
    pub fn wrap(&self, x: Vec2) -> Vec2 {
        [
            self.origin[0] + (x[0] - self.origin[0]).rem_euclid(self.size[0]),
            self.origin[1] + (x[1] - self.origin[1]).rem_euclid(self.size[1]),
        ]
    }

    /// Minimum-image displacement `x − y`.
    pub fn displacement(&self, x: Vec2, y: Vec2) -> Vec2 {
        let mut d = [x[0] - y[0], x[1] - y[1]];
        for k in 0..2 {
            d[k] -= self.size[k] * (d[k] / self.size[k]).round();
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScenario {
    pub kind: ScenarioKind,
    pub center: Vec2,
    pub r0: f64,
    #[serde(default)]
    pub velocity: Vec2,
    pub eps: f64,
    pub alpha: f64,
    pub cutoff: Cutoff,
    /// Periodic wrap-around for the centre; `None` for an unbounded plane.
    #[serde(default)]
    pub periodic: Option<PeriodicBox>,
}

impl ReferenceScenario {
    pub fn mobility(&self) -> f64 {
        self.eps.powf(self.alpha)
    }

    pub fn radius_at(&self, t: f64) -> Result<f64> {
        match self.kind {
            ScenarioKind::StationaryBubble | ScenarioKind::TransportedBubble => Ok(self.r0),
            ScenarioKind::MobilityCorrectedBubble => corrected_radius(self.r0, self.eps, self.alpha, t),
        }
    }

    pub fn center_at(&self, t: f64) -> Vec2 {
        match self.kind {
            ScenarioKind::StationaryBubble => self.center,
            _ => transported_center(self.center, self.velocity, t, self.periodic.as_ref()),
        }
    }

    /// `R(t) − |x − center(t)|`.
    pub fn signed_distance(&self, x: Vec2, t: f64) -> Result<f64> {
        let c = self.center_at(t);
        let d = match &self.periodic {
            Some(b) => b.displacement(x, c),
            None => [x[0] - c[0], x[1] - c[1]],
        };
        Ok(self.radius_at(t)? - d[0].hypot(d[1]))
    }

    /// Checks that the radius stays positive up to `t_end` and that the
    /// bubble keeps `3δ` away from the box boundary.
    pub fn validate(&self, t_end: f64, bounds: Option<(Vec2, Vec2)>) -> Result<()> {
        if !(self.r0 > 0.0 && self.eps > 0.0) {
            return Err(Error::invalid("radius and eps must be positive"));
        }
        let r_end = self.radius_at(t_end)?;
        if let Some((lo, hi)) = bounds {
            let margin = self.r0.max(r_end) + 3.0 * self.cutoff.delta;
            for t in [0.0, t_end] {
                let c = self.center_at(t);
                if self.periodic.is_none()
                    && (c[0] - margin < lo[0]
                        || c[0] + margin > hi[0]
                        || c[1] - margin < lo[1]
                        || c[1] + margin > hi[1])
                {
                    return Err(Error::invalid(format!(
                        "bubble at {c:?} comes closer than 3 delta to the boundary"
                    )));
                }
            }
            if 2.0 * margin > (hi[0] - lo[0]).min(hi[1] - lo[1]) {
                return Err(Error::invalid("bubble plus cutoff does not fit in the box"));
            }
        }
        Ok(())
    }
}

/// Leading-order phase field `ζ(d) θ₀(d/ε) ± (1 − ζ(d))` of the scenario.
pub fn leading_order_c(x: Vec2, t: f64, scenario: &ReferenceScenario, profile: &Profile) -> Result<f64> {
    let d = scenario.signed_distance(x, t)?;
    Ok(scenario.cutoff.blend(d, scenario.eps, profile))
}

/// Equilibrium pressure jump `p⁺ − p⁻ = σ H = σ / R`.
pub fn laplace_jump(scenario: &ReferenceScenario, profile: &Profile) -> f64 {
    laplace_jump_for(profile.sigma(), scenario.r0)
}

pub fn laplace_jump_for(sigma: f64, radius: f64) -> f64 {
    sigma / radius
}

/// `R(t) = √(R₀² − 2 ε^α t)`.
pub fn corrected_radius(r0: f64, eps: f64, alpha: f64, t: f64) -> Result<f64> {
    let value = r0 * r0 - 2.0 * eps.powf(alpha) * t;
    if value <= 0.0 {
        return Err(Error::Collapse { value });
    }
    Ok(value.sqrt())
}

/// `center₀ + U t`, wrapped into the periodic box when one is given.
pub fn transported_center(center: Vec2, velocity: Vec2, t: f64, periodic: Option<&PeriodicBox>) -> Vec2 {
    let x = [center[0] + velocity[0] * t, center[1] + velocity[1] * t];
    match periodic {
        Some(b) => b.wrap(x),
        None => x,
    }
}
