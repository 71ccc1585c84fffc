//! JSON configuration files. Schema errors carry the path of the offending
//! field; physical checks run after parsing.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::nsac::SimConfig;
use crate::study::StudyScenario;
use crate::{Error, Result};

/// A configuration that can be checked after parsing.
pub trait ConfigFile: Serialize + DeserializeOwned {
    fn check(&self) -> Result<()>;
}

impl ConfigFile for SimConfig {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

/// `ε`-sweep at fixed mobility exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub alpha: f64,
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub scenario: StudyScenario,
}

impl ConfigFile for StudyConfig {
    fn check(&self) -> Result<()> {
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config {
                path: "eps_list".into(),
                message: "must be strictly decreasing".into(),
            });
        }
        for &eps in &self.eps_list {
            self.scenario.validate(eps, self.alpha)?;
        }
        Ok(())
    }
}

/// Drift-rate comparison across mobility exponents at fixed `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityConfig {
    pub eps: f64,
    #[serde(default = "default_alphas")]
    pub alpha_list: Vec<f64>,
    #[serde(default)]
    pub scenario: StudyScenario,
}

fn default_alphas() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

impl ConfigFile for MobilityConfig {
    fn check(&self) -> Result<()> {
        for (k, &a) in self.alpha_list.iter().enumerate() {
            if ![0.0, 0.5, 1.0].contains(&a) {
                return Err(Error::Config {
                    path: format!("alpha_list[{k}]"),
                    message: format!("alpha must be 0, 0.5 or 1, got {a}"),
                });
            }
            self.scenario.validate(self.eps, a)?;
        }
        Ok(())
    }
}

/// Parses and checks a configuration.
pub fn parse_config<T: ConfigFile>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    value.check()?;
    Ok(value)
}

pub fn load_config<T: ConfigFile>(path: impl AsRef<Path>) -> Result<T> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Serialises with every default written out.
pub fn to_json<T: ConfigFile>(config: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ErrorClass;

    const MINIMAL: &str = r#"{
        "nx": 64, "ny": 64, "eps": 0.03125, "t_end": 0.01,
        "initial": {"shape": {"kind": "circle", "center": [0.5, 0.5], "radius": 0.25}}
    }"#;

    #[test]
    fn minimal_bubble_round_trips() {
        let c: SimConfig = parse_config(MINIMAL).unwrap();
        let text = to_json(&c).unwrap();
        assert!(text.contains("\"ac_cap\""));
        let back: SimConfig = parse_config(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = MINIMAL.replace("\"initial\": {", "\"initial\": {\"cutoff\": \"wide\", ");
        match parse_config::<SimConfig>(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "initial.cutoff"),
            other => panic!("{other:?}"),
        }
        let unknown = MINIMAL.replace("\"nx\": 64", "\"nx\": 64, \"nz\": 3");
        assert!(matches!(parse_config::<SimConfig>(&unknown), Err(Error::Config { .. })));
    }

    #[test]
    fn under_resolution_is_a_physical_error() {
        let coarse = MINIMAL.replace(
            "\"nx\": 64, \"ny\": 64, \"eps\": 0.03125",
            "\"nx\": 8, \"ny\": 8, \"eps\": 0.0625",
        );
        let e = parse_config::<SimConfig>(&coarse).unwrap_err();
        assert!(matches!(e, Error::UnderResolved { .. }));
        assert_eq!(e.class(), ErrorClass::Physical);
        assert!(e.to_string().contains("exceeds eps"));
    }

    #[test]
    fn study_configs() {
        let s: StudyConfig = parse_config(r#"{"alpha": 0.5, "eps_list": [0.0625, 0.03125]}"#).unwrap();
        assert_eq!(s.scenario, StudyScenario::default());
        assert!(parse_config::<StudyConfig>(r#"{"alpha": 0.5, "eps_list": [0.03125, 0.0625]}"#).is_err());
        let m: MobilityConfig = parse_config(r#"{"eps": 0.03125}"#).unwrap();
        assert_eq!(m.alpha_list, vec![0.0, 0.5, 1.0]);
        match parse_config::<MobilityConfig>(r#"{"eps": 0.03125, "alpha_list": [0, 2]}"#) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "alpha_list[1]"),
            other => panic!("{other:?}"),
        }
    }
}
