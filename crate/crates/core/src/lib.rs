//! Numerical laboratory for the diffuse-interface Navier-Stokes/Allen-Cahn
//! system with mobility `m_eps = eps^alpha` and the building blocks of its
//! sharp-interface limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`potential`] and [`profile`]: double-well potential, optimal profile,
//!   blending function, viscosity model and the scalar constants derived from them.
//! * [`matched_ode`]: the two model ODE solvers on the real line used by the
//!   inner expansion, with solvability checks.
//! * [`spectral`]: eigenvalues of the 1D linearised Allen-Cahn operator and the
//!   projection onto the translation mode.
//! * [`geometry`]: closed curves, tubular coordinates and their
//!   `eps`-perturbed variant.
//! * [`surface_pde`]: the degenerate parabolic equation on the circle and its
//!   `kappa`-uniform estimates.
//! * [`nsac`]: the 2D staggered-grid solver.
//! * [`reference`]: semi-analytic sharp-interface references.
//! * [`study`]: convergence and mobility sweeps.
//! * [`io`]: configuration files, manifests and tabular output.

pub mod error;
pub mod fit;
pub mod geometry;
pub mod io;
pub mod matched_ode;
pub mod nsac;
pub mod numerics;
pub mod par;
pub mod potential;
pub mod profile;
pub mod reference;
pub mod spectral;
pub mod study;
pub mod surface_pde;

pub use error::{Error, ErrorClass, Result};
pub use potential::{DoubleWell, ViscosityModel};
pub use profile::{Blend, Profile};

/// Two-dimensional point or vector.
pub type Vec2 = [f64; 2];
