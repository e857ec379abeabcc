use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::DEFAULT_HOPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    NodeClassification,
    Imputation,
    GraphClassification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    #[default]
    Mean,
    Sum,
}

/// Run configuration. Every key except `task` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub task: TaskKind,
    #[serde(rename = "P", default = "defaults::orders")]
    pub orders: usize,
    #[serde(rename = "K", default = "defaults::hops")]
    pub hops: usize,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::lr")]
    pub lr: f64,
    /// `coeff` of the `coeff/2 · ‖θ‖²` penalty; 1e-3, or 0 for imputation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_decay: Option<f64>,
    #[serde(default = "defaults::hidden")]
    pub hidden: usize,
    /// Training epochs (iterations for imputation); 1000, or 500 for imputation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(default = "defaults::patience")]
    pub patience: usize,
    #[serde(default = "defaults::seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub readout: Readout,
    #[serde(default = "defaults::known_fraction")]
    pub known_fraction: f64,
    /// Linear maps per petal transform (1 or 2).
    #[serde(default = "defaults::layers")]
    pub layers: usize,
    /// Also apply weight decay to the filter weights.
    #[serde(default)]
    pub decay_gamma: bool,
}

mod defaults {
    pub fn orders() -> usize {
        2
    }
    pub fn hops() -> usize {
        super::DEFAULT_HOPS
    }
    pub fn alpha() -> f64 {
        0.1
    }
    pub fn lr() -> f64 {
        0.01
    }
    pub fn hidden() -> usize {
        32
    }
    pub fn patience() -> usize {
        200
    }
    pub fn seeds() -> Vec<u64> {
        vec![0]
    }
    pub fn known_fraction() -> f64 {
        0.5
    }
    pub fn layers() -> usize {
        2
    }
}

impl TaskConfig {
    /// Defaults for `task`.
    pub fn new(task: TaskKind) -> Self {
        serde_json::from_value(serde_json::json!({ "task": task })).expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: TaskConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn weight_decay(&self) -> f64 {
        self.weight_decay.unwrap_or(match self.task {
            TaskKind::Imputation => 0.0,
            _ => 1e-3,
        })
    }

    pub fn epochs(&self) -> usize {
        self.epochs.unwrap_or(match self.task {
            TaskKind::Imputation => 500,
            _ => 1000,
        })
    }

    /// Range checks; the message names the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| Err(Error::Config(format!("`{key}` {msg}")));
        if self.orders == 0 {
            return bad("P", "must be >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", "must be in (0, 1]");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr", "must be positive");
        }
        if !(self.weight_decay() >= 0.0 && self.weight_decay().is_finite()) {
            return bad("weight_decay", "must be non-negative");
        }
        if self.hidden == 0 {
            return bad("hidden", "must be >= 1");
        }
        if self.epochs == Some(0) {
            return bad("epochs", "must be >= 1");
        }
        if self.seeds.is_empty() {
            return bad("seeds", "must list at least one seed");
        }
        if !(self.known_fraction > 0.0 && self.known_fraction < 1.0) {
            return bad("known_fraction", "must be in (0, 1)");
        }
        if !matches!(self.layers, 1 | 2) {
            return bad("layers", "must be 1 or 2");
        }
        Ok(())
    }
}
