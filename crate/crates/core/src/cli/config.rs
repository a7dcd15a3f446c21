//! Run configuration and scenario presets.
//!
//! A configuration file is a flat JSON object whose keys are the fields of
//! [`RunConfig`]; model parameters use their standard names (`n_functions`,
//! `tau`, `passing_scheme`, ...). Layers apply in order: defaults, preset,
//! file, command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::model::{GenerationMode, ModelParams, PassingScheme};
use crate::sweep::SweepGrid;
use crate::teamgen::TeamSpec;

/// Regressor values used in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressOn {
    /// Cell means of the IFD/DFD the generated teams actually have.
    Achieved,
    /// The grid targets.
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub params: ModelParams,
    pub preset: Option<String>,
    /// Number of evenly spaced IFD targets over [0, 1].
    pub ifd_steps: usize,
    /// Number of evenly spaced DFD targets from 0 to the largest reachable DFD.
    pub dfd_steps: usize,
    /// Explicit IFD targets; override `ifd_steps`.
    pub ifd_targets: Option<Vec<f64>>,
    /// Explicit DFD targets; override `dfd_steps`.
    pub dfd_targets: Option<Vec<f64>>,
    pub out_dir: PathBuf,
    pub csv: bool,
    pub heatmaps: bool,
    pub report: bool,
    pub regress_on: RegressOn,
    /// Performance is multiplied by this before regression.
    pub performance_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams::default(),
            preset: None,
            ifd_steps: 21,
            dfd_steps: 11,
            ifd_targets: None,
            dfd_targets: None,
            out_dir: PathBuf::from("divsim-out"),
            csv: true,
            heatmaps: true,
            report: false,
            regress_on: RegressOn::Achieved,
            performance_scale: 100.0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown preset '{0}'; valid presets: {list}", list = PRESETS.join(", "))]
    UnknownPreset(String),
    #[error("malformed config {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("cannot read config {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

pub const PRESETS: [&str; 7] = [
    "specgen-nocomm",
    "specgen-stuck",
    "specgen-always",
    "specgen-open",
    "diverse-always",
    "diverse-stuck",
    "missing-expertise",
];

/// Default configuration overridden for a named scenario.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    use GenerationMode::*;
    use PassingScheme::*;
    let (mode, tau, scheme, mix) = match name {
        // Similarity threshold below the specialist-generalist distance
        // ratio 2/3: no hybrid collaborations.
        "specgen-nocomm" => (SpecGen, 0.5, PassIfStuck, true),
        "specgen-stuck" => (SpecGen, 0.8, PassIfStuck, true),
        "specgen-always" => (SpecGen, 0.8, AlwaysPass, true),
        // Above the largest possible distance: everyone collaborates.
        "specgen-open" => (SpecGen, 1.01, PassIfStuck, true),
        "diverse-always" => (IfdsDistribution, 0.8, AlwaysPass, true),
        "diverse-stuck" => (IfdsDistribution, 0.8, PassIfStuck, true),
        "missing-expertise" => (IfdsDistribution, 0.8, AlwaysPass, false),
        _ => return Err(ConfigError::UnknownPreset(name.to_string())),
    };
    let mut cfg = RunConfig {
        preset: Some(name.to_string()),
        ..RunConfig::default()
    };
    cfg.params.generation_mode = mode;
    cfg.params.tau = tau;
    cfg.params.passing_scheme = scheme;
    cfg.params.mix_skills = mix;
    Ok(cfg)
}

impl RunConfig {
    /// Keys accepted in a configuration file.
    pub fn keys() -> Vec<String> {
        match serde_json::to_value(RunConfig::default()) {
            Ok(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Applies the keys of `overlay` on top of `self`.
    pub fn overlay(&self, overlay: &Map<String, Value>, origin: &str) -> Result<RunConfig, ConfigError> {
        let malformed = |reason: String| ConfigError::Malformed {
            path: origin.to_string(),
            reason,
        };
        let known = Self::keys();
        if let Some(k) = overlay.keys().find(|k| !known.contains(k)) {
            return Err(malformed(format!("unknown key '{k}'")));
        }
        let mut base = match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("RunConfig serializes to an object"),
        };
        for (k, v) in overlay {
            base.insert(k.clone(), v.clone());
        }
        serde_json::from_value(Value::Object(base)).map_err(|e| malformed(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.grid()?;
        if !(self.performance_scale > 0.0 && self.performance_scale.is_finite()) {
            return Err(ConfigError::Invalid("performance_scale must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<SweepGrid, ConfigError> {
        let even = SweepGrid::evenly_spaced(&self.params, self.ifd_steps, self.dfd_steps)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let ifd = self.ifd_targets.clone().unwrap_or_else(|| even.ifd_targets().to_vec());
        let dfd = self.dfd_targets.clone().unwrap_or_else(|| even.dfd_targets().to_vec());
        SweepGrid::new(ifd, dfd).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn team_spec(&self) -> TeamSpec {
        TeamSpec::from_params(&self.params, 0.0, 0.0)
    }
}

/// Parses a configuration file into a JSON object.
pub fn read_config_file(path: &std::path::Path) -> Result<Map<String, Value>, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
        path: shown.clone(),
        source,
    })?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ConfigError::Malformed {
            path: shown,
            reason: "expected a JSON object".into(),
        }),
        Err(e) => Err(ConfigError::Malformed {
            path: shown,
            reason: e.to_string(),
        }),
    }
}
