//! Experiment configuration: a JSON file merged with command-line flags,
//! flags taking precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

/// A scalar or a list, so that `"dT_ratio": 1` and `"dT_ratio": [0, 1]` both
/// parse.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub n_states: Option<f64>,
    #[serde(rename = "dT_ratio")]
    pub dt_ratio: Option<OneOrMany>,
    pub p0: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub branch: Option<u32>,
    #[serde(rename = "M_max")]
    pub m_max: Option<u32>,
    pub strategy: Option<u8>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub j1: Option<u32>,
    pub j2: Option<u32>,
    pub r_grid: Option<OneOrMany>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    #[serde(rename = "fullsim_N")]
    pub fullsim_n: Option<usize>,
    pub cases: Option<usize>,
    pub w: Option<usize>,
    #[serde(rename = "P_target")]
    pub p_target: Option<f64>,
    pub output_path: Option<PathBuf>,
}

/// Rejected configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn field_error(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("invalid value for `{field}`: {msg}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path)
    }

    /// Fields set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: ExperimentConfig) -> ExperimentConfig {
        macro_rules! pick {
            ($($f:ident),*) => {
                ExperimentConfig { $($f: overrides.$f.or(self.$f)),* }
            };
        }
        pick!(
            n_states,
            dt_ratio,
            p0,
            gamma,
            delta,
            t,
            branch,
            m_max,
            strategy,
            delta1,
            delta2,
            j1,
            j2,
            r_grid,
            trials,
            seed,
            fullsim_n,
            cases,
            w,
            p_target,
            output_path
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalars_and_lists() {
        let c = ExperimentConfig::from_json(
            r#"{"N": 1e23, "dT_ratio": [0, 1], "M_max": 5, "r_grid": 0.1, "P_target": 0.9}"#,
            Path::new("cfg.json"),
        )
        .unwrap();
        assert_eq!(c.n_states, Some(1e23));
        assert_eq!(c.dt_ratio.unwrap().into_vec(), vec![0.0, 1.0]);
        assert_eq!(c.r_grid.unwrap().into_vec(), vec![0.1]);
        assert_eq!(c.m_max, Some(5));
    }

    #[test]
    fn unknown_fields_are_located() {
        let err =
            ExperimentConfig::from_json("{\n  \"N\": 16,\n  \"gama\": 0.1\n}", Path::new("x.json"))
                .unwrap_err();
        assert!(err.0.contains("gama"), "{err}");
        assert!(err.0.contains("line 3"), "{err}");
    }

    #[test]
    fn flags_win_over_file() {
        let file = ExperimentConfig {
            n_states: Some(16.0),
            seed: Some(1),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.merge(flags);
        assert_eq!(merged.n_states, Some(16.0));
        assert_eq!(merged.seed, Some(9));
    }
}
