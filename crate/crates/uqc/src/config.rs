//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uqc_core::tol;
use uqc_core::universal::{JoinMethod, JoinOptions};

use crate::spec::{ChannelSpec, SourceSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sources: Vec<NamedSource>,
    /// Each source is also run through each of these channels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelSpec>,
    /// Target rate in bits per site.
    pub r: f64,
    pub n_range: NRange,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub seed: u64,
    /// CSV destination; the JSON mirror goes next to it with a `.json`
    /// extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Explicit block length (and block rate) instead of the paper schedule.
    #[serde(default, rename = "override", skip_serializing_if = "Option::is_none")]
    pub schedule_override: Option<ScheduleOverride>,
    #[serde(default)]
    pub context_order: usize,
    #[serde(default)]
    pub join: JoinConfig,
    /// Record wall-clock times (makes the CSV non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSource {
    pub id: String,
    pub source: SourceSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NRange {
    pub from: usize,
    pub to: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

impl NRange {
    pub fn values(&self) -> Vec<usize> {
        (self.from..=self.to).step_by(self.step.max(1)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    C1,
    C2,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::C1 => "c1",
            Scheme::C2 => "c2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverride {
    pub l: usize,
    /// Block rate `R`; defaults to `l·r`.
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinConfig {
    #[serde(default)]
    pub method: JoinKind,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_verify")]
    pub verify_samples: usize,
}

fn default_budget() -> usize {
    32
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_verify() -> usize {
    2
}

impl Default for JoinConfig {
    fn default() -> Self {
        Self {
            method: JoinKind::default(),
            budget: default_budget(),
            tolerance: default_tolerance(),
            verify_samples: default_verify(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JoinKind {
    #[default]
    Lie,
    Haar,
}

impl JoinConfig {
    pub fn options(&self) -> JoinOptions {
        JoinOptions {
            method: match self.method {
                JoinKind::Lie => JoinMethod::LieClosure,
                JoinKind::Haar => JoinMethod::HaarSaturation {
                    budget: self.budget,
                },
            },
            tolerance: self.tolerance,
            verify_samples: self.verify_samples,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks what can be checked without building sources: the rate range
    /// for every source's site dimension and the size cap.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.n_range.from == 0 || self.n_range.from > self.n_range.to || self.n_range.step == 0 {
            return bad(format!("n_range {:?} is empty or starts at 0", self.n_range));
        }
        if self.r.is_nan() || self.r <= 0.0 {
            return bad(format!("r = {} must be positive", self.r));
        }
        if let Some(o) = self.schedule_override {
            if o.l == 0 {
                return bad("override.l must be at least 1".into());
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for s in &self.sources {
            if !ids.insert(&s.id) {
                return bad(format!("duplicate source id {:?}", s.id));
            }
            let src = s
                .source
                .build()
                .map_err(|e| ConfigError::Invalid(format!("source {:?}: {e:#}", s.id)))?;
            let d = src.site_dim();
            if self.r > (d as f64).log2() + 1e-12 {
                return bad(format!("r = {} exceeds log₂ d = {} for source {:?}", self.r, (d as f64).log2(), s.id));
            }
            let mut dim: usize = 1;
            for _ in 0..self.n_range.to {
                dim = dim.saturating_mul(d);
            }
            if dim > tol::DIM_CAP {
                return bad(format!(
                    "n = {} on source {:?} exceeds the dimension cap {}",
                    self.n_range.to,
                    s.id,
                    tol::DIM_CAP
                ));
            }
        }
        for c in &self.channels {
            c.build()
                .map_err(|e| ConfigError::Invalid(format!("channel {}: {e:#}", c.label())))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "sources": [{"id": "iid", "source": {"kind": "iid", "diag": [0.9, 0.1]}}],
        "r": 0.7,
        "n_range": {"from": 4, "to": 6}
    }"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.scheme, Scheme::C1);
        assert_eq!(c.n_range.values(), vec![4, 5, 6]);
        assert_eq!(c.join, JoinConfig::default());
        assert!(!c.timing);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let extra = MINIMAL.replace("\"r\": 0.7", "\"r\": 0.7, \"rate\": 1");
        assert!(matches!(ExperimentConfig::from_json(&extra), Err(ConfigError::Parse(_))));
        let high = MINIMAL.replace("0.7", "1.5");
        assert!(matches!(ExperimentConfig::from_json(&high), Err(ConfigError::Invalid(_))));
        let big = MINIMAL.replace("\"to\": 6", "\"to\": 20");
        assert!(matches!(ExperimentConfig::from_json(&big), Err(ConfigError::Invalid(_))));
    }
}
