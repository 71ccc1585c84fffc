//! Run manifests: what was run, with which tolerances, and what it wrote.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Named tolerances with their defaults; `--tol-overrides` may replace any
/// of them but not add new names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let entries = [
            ("profile.max_error", 1e-6),
            ("profile.sigma", 1e-6),
            ("ode.max_error", 1e-5),
            ("spectrum.lambda0_low", -1e-4),
            ("spectrum.lambda0_high", 1e-3),
            ("spectrum.lambda1", 1e-2),
            ("spectrum.scaling", 0.01),
            ("coords.round_trip", 1e-8),
            ("coords.jacobian", 1e-4),
            ("coords.identity", 1e-6),
            ("coords.min_order", crate::geometry::eps_coords::MIN_ORTHOGONALITY_ORDER),
            ("surfpde.exact", 1e-3),
            ("surfpde.spread", crate::surface_pde::SPREAD_LIMIT),
            ("surfpde.slope_band", crate::surface_pde::SLOPE_BAND),
            ("nsac.divergence", 1e-6),
            ("nsac.energy", 1e-3),
            ("mobility.relative", 0.15),
            ("mobility.relative_alpha1", 0.20),
            ("mobility.ratio", 0.20),
            ("study.corrected_order", 0.4),
            ("study.transport_order", 0.1),
        ];
        Self(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        *self.0.get(key).unwrap_or_else(|| panic!("unknown tolerance `{key}`"))
    }

    /// Applies a JSON object of overrides.
    pub fn with_overrides(mut self, json: &str) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_str(json).map_err(|e| Error::Config {
            path: "tol-overrides".into(),
            message: e.to_string(),
        })?;
        for (k, v) in map {
            match self.0.get_mut(&k) {
                Some(slot) => *slot = v,
                None => {
                    return Err(Error::Config {
                        path: format!("tol-overrides.{k}"),
                        message: "unknown tolerance".into(),
                    })
                }
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical JSON of the effective configuration.
    pub config_hash: String,
    pub wall_seconds: f64,
    pub tolerances: Tolerances,
    pub outputs: Vec<String>,
}

pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let text = serde_json::to_string(config)?;
    Ok(Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

impl RunManifest {
    pub fn new<T: Serialize>(command: &str, config: &T, tolerances: &Tolerances) -> Result<Self> {
        Ok(Self {
            tool: "nsac".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: config_hash(config)?,
            wall_seconds: 0.0,
            tolerances: tolerances.clone(),
            outputs: Vec::new(),
        })
    }

    /// Writes `manifest.json` into `dir`, listing itself among the outputs.
    pub fn write(&mut self, dir: impl AsRef<Path>) -> Result<()> {
        let name = "manifest.json".to_string();
        if !self.outputs.contains(&name) {
            self.outputs.push(name.clone());
        }
        std::fs::write(dir.as_ref().join(name), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
