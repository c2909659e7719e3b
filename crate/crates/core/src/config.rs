//! JSON run configuration read by the command-line tool.

use std::path::Path;

use serde::Deserialize;

use crate::error::{ConfigRule, Error, Result};
use crate::harness::{StudySpec, DEFAULT_EPS};
use crate::model::{multi_indices, validate_config, ModelConfig, Multi, Oscillator, Vec3};
use crate::oracle::TubeGrid;
use crate::quad::QuadSpec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Single-run scale; defaults to the largest entry of `eps_list`.
    pub epsilon: Option<f64>,
    /// Scales of the studies.
    pub eps_list: Option<Vec<f64>>,
    pub v0: f64,
    pub oscillators: Vec<[f64; 3]>,
    #[serde(default = "one")]
    pub potential_width: f64,
    pub t_final: f64,
    #[serde(default = "two")]
    pub n_max: usize,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub x_grid: TubeGrid,
    /// Channels of the studies; every `|n| <= n_max` when absent.
    pub n_set: Option<Vec<Multi>>,
    /// One-based oscillator index.
    pub oscillator: Option<usize>,
    /// Evaluation time; `t_final` when absent.
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub quadrature: QuadSpec,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses JSON text; `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
        cfg.model()?;
        cfg.study_spec()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn eps_list(&self) -> Vec<f64> {
        self.model.eps_list.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec())
    }

    /// The validated model at the single-run scale.
    pub fn model(&self) -> Result<ModelConfig> {
        let m = &self.model;
        let epsilon = match (m.epsilon, &m.eps_list) {
            (Some(e), _) => e,
            (None, Some(list)) if !list.is_empty() => list.iter().copied().fold(f64::MIN, f64::max),
            _ => {
                return Err(Error::Parse("model: one of `epsilon` or a non-empty `eps_list` is required".into()))
            }
        };
        let cfg = ModelConfig {
            epsilon,
            v0: m.v0,
            oscillators: m
                .oscillators
                .iter()
                .map(|p| Oscillator { position: Vec3::from(*p) })
                .collect(),
            potential_width: m.potential_width,
            t_final: m.t_final,
            n_max: m.n_max,
            quad: self.quadrature,
        };
        validate_config(&cfg)?;
        Ok(cfg)
    }

    pub fn study_spec(&self) -> Result<StudySpec> {
        let s = &self.study;
        let oscillator = s.oscillator.unwrap_or(1);
        if oscillator == 0 || oscillator > self.model.oscillators.len() {
            return Err(Error::config(
                ConfigRule::Field,
                format!("study.oscillator = {oscillator} is not in 1..={}", self.model.oscillators.len()),
            ));
        }
        s.x_grid.validate()?;
        Ok(StudySpec {
            oscillator: oscillator - 1,
            t: s.t.unwrap_or(self.model.t_final),
            grid: s.x_grid,
            channels: s.n_set.clone().unwrap_or_else(|| multi_indices(self.model.n_max)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
  "model": {
    "epsilon": 0.2,
    "v0": 1.0,
    "oscillators": [[0, 0, 2]],
    "t_final": 3.0
  }
}"#;

    #[test]
    fn minimal_file() {
        let c = RunConfig::parse(BASE, "base").unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.n_max, 2);
        assert_eq!(m.potential_width, 1.0);
        assert_eq!(c.study_spec().unwrap().channels.len(), 10);
        assert_eq!(c.eps_list(), DEFAULT_EPS.to_vec());
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn missing_key_named() {
        let text = BASE.replace("\"v0\": 1.0,", "");
        let e = RunConfig::parse(&text, "cfg.json").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("v0") && msg.contains("line"), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = BASE.replace("\"v0\": 1.0,", "\"v0\": 1.0, \"speed\": 2,");
        let msg = RunConfig::parse(&text, "cfg.json").unwrap_err().to_string();
        assert!(msg.contains("speed") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn same_ray_rejected() {
        let text = BASE.replace("[[0, 0, 2]]", "[[0, 0, 1], [0, 0, 2]]");
        match RunConfig::parse(&text, "cfg.json").unwrap_err() {
            Error::Config { rule, .. } => assert_eq!(rule, ConfigRule::Alignment),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn epsilon_from_list() {
        let text = BASE.replace("\"epsilon\": 0.2,", "\"eps_list\": [0.2, 0.4, 0.3],");
        assert_eq!(RunConfig::parse(&text, "x").unwrap().model().unwrap().epsilon, 0.4);
        let text = BASE.replace("\"epsilon\": 0.2,", "");
        assert!(matches!(RunConfig::parse(&text, "x"), Err(Error::Parse(_))));
    }

    #[test]
    fn study_oscillator_is_one_based() {
        let text = BASE.replace("\n  }\n}", "\n  },\n  \"study\": {\"oscillator\": 2}\n}");
        assert!(RunConfig::parse(&text, "x").is_err());
    }
}
