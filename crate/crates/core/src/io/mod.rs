//! Configuration files, run manifests and tabular output.

pub mod config;
pub mod csv;
pub mod manifest;

pub use config::{load_config, parse_config, ConfigFile, MobilityConfig, StudyConfig};
pub use manifest::{config_hash, RunManifest, Tolerances};
