//! Staggered-grid solver for incompressible Navier-Stokes coupled to the
//! Allen-Cahn equation with mobility `m_ε = ε^α`.
//!
//! One step: explicit advection and reaction for `c` with implicit `m_ε Δ`
//! and a linear stabilisation `S`, then explicit momentum with `ν(c^{n+1})`
//! and the capillary force, then a Chorin projection.

pub mod config;
pub mod energy;
pub mod grid;
pub mod interface;
pub mod ops;
pub mod poisson;
pub mod run;
pub mod state;
pub mod step;

pub use config::{
    BoundaryMode, Domain, FlowMode, InitialCondition, Noise, OutputPolicy, Shape, SimConfig, TimePolicy, C_BOUND,
};
pub use energy::{energy, EnergyDiag};
pub use grid::Grid;
pub use interface::{extract_interface, fit_circle, CircleFit, Interface, Polyline};
pub use ops::capillary_force;
pub use run::{read_fields, run, run_from, DiagRow, FieldMeta, RunOutput, Snapshot};
pub use state::{init_state, SimState};
pub use step::{step, StepInfo, Stepper};
