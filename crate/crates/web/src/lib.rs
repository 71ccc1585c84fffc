//! Browser bindings: the optimal profile, the 1D spectrum and a small
//! bubble simulation that can be stepped from JavaScript.

use nsac_core::nsac::{init_state, Domain, SimConfig, SimState, Stepper};
use nsac_core::spectral::assemble_and_solve;
use nsac_core::{DoubleWell, Profile};
use wasm_bindgen::prelude::*;

fn js(e: nsac_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Optimal profile sampled on its grid.
#[wasm_bindgen]
pub struct ProfileView {
    rho: Vec<f64>,
    theta: Vec<f64>,
    sigma: f64,
    alpha: f64,
}

impl ProfileView {
    /// `b = 0` gives the quartic well, otherwise `q(u) = 1 + b u`.
    pub fn compute(b: f64) -> nsac_core::Result<Self> {
        let well = if b == 0.0 {
            DoubleWell::Quartic
        } else {
            DoubleWell::sextic(1.0, b)?
        };
        let p = Profile::compute(&well, 12.0, 512)?;
        Ok(Self {
            rho: p.rho().to_vec(),
            theta: p.theta().to_vec(),
            sigma: p.sigma(),
            alpha: p.alpha(),
        })
    }
}

#[wasm_bindgen]
impl ProfileView {
    #[wasm_bindgen(constructor)]
    pub fn new(b: f64) -> Result<ProfileView, JsError> {
        Self::compute(b).map_err(js)
    }

    pub fn rho(&self) -> Vec<f64> {
        self.rho.clone()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.theta.clone()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Lowest `count` eigenvalues of `−∂² + ε⁻² f''(θ₀(·/ε))`, times `ε²`.
pub fn scaled_eigenvalues(eps: f64, n: usize, count: usize) -> nsac_core::Result<Vec<f64>> {
    let p = Profile::quartic();
    let s = assemble_and_solve(20.0 * eps, n, eps, count, &p)?;
    Ok(s.eigenvalues.iter().map(|l| l * eps * eps).collect())
}

#[wasm_bindgen]
pub fn spectrum(eps: f64, n: usize, count: usize) -> Result<Vec<f64>, JsError> {
    scaled_eigenvalues(eps, n, count).map_err(js)
}

/// Bubble at rest in the periodic unit box.
#[wasm_bindgen]
pub struct Simulation {
    stepper: Stepper,
    state: SimState,
}

impl Simulation {
    pub fn create(n: usize, eps: f64, alpha: f64, radius: f64) -> nsac_core::Result<Self> {
        let mut cfg = SimConfig::bubble(Domain::default(), n, eps, alpha, [0.5, 0.5], radius, f64::INFINITY);
        cfg.initial.shape = nsac_core::nsac::Shape::Ellipse {
            center: [0.5, 0.5],
            a: radius * 1.3,
            b: radius / 1.3,
        };
        let state = init_state(&cfg, &Profile::quartic())?;
        Ok(Self {
            stepper: Stepper::new(&cfg)?,
            state,
        })
    }

    pub fn run(&mut self, steps: usize) -> nsac_core::Result<f64> {
        for _ in 0..steps {
            self.stepper.step(&mut self.state)?;
        }
        Ok(self.state.t)
    }

    pub fn energy_value(&self) -> f64 {
        nsac_core::nsac::energy(&self.state, self.stepper.config()).total
    }
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, eps: f64, alpha: f64, radius: f64) -> Result<Simulation, JsError> {
        Self::create(n, eps, alpha, radius).map_err(js)
    }

    /// Advances `steps` steps; returns the new time.
    pub fn advance(&mut self, steps: usize) -> Result<f64, JsError> {
        self.run(steps).map_err(js)
    }

    /// `c` at the cell centres, x fastest.
    pub fn field(&self) -> Vec<f64> {
        self.state.c.clone()
    }

    pub fn size(&self) -> usize {
        self.state.grid.nx
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn energy(&self) -> f64 {
        self.energy_value()
    }

    pub fn speed(&self) -> f64 {
        self.state.max_speed()
    }
}
