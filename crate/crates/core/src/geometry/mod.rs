//! Closed curves, tubular coordinates and their `ε`-perturbed variant.
//!
//! Orientation: curves are parametrised counter-clockwise over
//! `s ∈ [0, 2π)`, the normal is `n = rot90 · τ` and therefore points into
//! the enclosed region `Ω⁺`. The signed distance `d₀` is positive inside,
//! and a circle of radius `R` has curvature `H = 1/R`.

pub mod curve;
pub mod eps_coords;
pub mod tubular;

pub use curve::{build_curve, Curve};
pub use eps_coords::{
    detect_eps1, make_eps_coords, support_radius, verify_orthogonality_asymptotics, Bump, EpsCoords, EpsPoint,
    LatticeField, ModalBump, OrthogonalFamily, OrthogonalityReport, TubePerturbation, Zero,
};
pub use tubular::{signed_distance, TubePoint, TubularCoords};

use crate::Vec2;

pub(crate) fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Counter-clockwise rotation by a right angle.
pub(crate) fn rot90(a: Vec2) -> Vec2 {
    [-a[1], a[0]]
}
