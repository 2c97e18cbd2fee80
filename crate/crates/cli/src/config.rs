//! Run configuration: defaults, JSON files, and the hash stamped on every
//! output file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lpcocycle::measures::Schedule;
use lpcocycle::space::{ModelSpec, DEFAULT_MEMORY_BUDGET};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Acceptance thresholds for the measure checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max relative error of the Radon-Nikodym formula.
    pub rn: f64,
    /// Max relative change of Bowen-Margulis pair masses under the action.
    pub bm: f64,
    /// Max refinement-consistency defect of a cell measure.
    pub refinement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rn: 1e-3,
            bm: 1e-6,
            refinement: 1e-6,
        }
    }
}

/// Every field has a default; a config file may set any subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Generators of a subgroup of a free group; `None` means the whole group.
    pub subgroup: Option<Vec<String>>,
    pub epsilon0: f64,
    /// Cell depth; `None` picks the per-command default.
    pub depth: Option<usize>,
    /// Group element; `None` picks the per-command default.
    pub element: Option<String>,
    /// Exponent `p`; `None` means `max(3, ceil(2δ/ε₀))`.
    pub p: Option<f64>,
    pub powers: Vec<u32>,
    /// Ball radius; `None` picks the per-command default.
    pub radius: Option<usize>,
    pub schedule: Schedule,
    pub tolerances: Tolerances,
    pub memory_budget: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    /// Measure cache; `None` means `<out>/cache`.
    pub cache_dir: Option<PathBuf>,
    /// Fill the `runtime_ms` columns. Off by default so reruns are
    /// byte-identical.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSpec::default(),
            subgroup: None,
            epsilon0: 1.0,
            depth: None,
            element: None,
            p: None,
            powers: vec![1, 2, 4, 8, 16],
            radius: None,
            schedule: Schedule::default(),
            tolerances: Tolerances::default(),
            memory_budget: DEFAULT_MEMORY_BUDGET,
            seed: 0,
            threads: None,
            out: PathBuf::from("out"),
            cache_dir: None,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| {
            format!(
                "malformed config {}; run `lpcocycle --print-config` for every field with its default",
                path.display()
            )
        })
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.schedule.validate()?;
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            bail!("epsilon0 must be positive, got {}", self.epsilon0);
        }
        let t = &self.tolerances;
        for (name, v) in [("rn", t.rn), ("bm", t.bm), ("refinement", t.refinement)] {
            if v.is_nan() || v <= 0.0 {
                bail!("tolerance {name} must be positive, got {v}");
            }
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p.is_finite()) {
                bail!("p must be positive, got {p}");
            }
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        Ok(())
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .unwrap_or_else(|| self.out.join("cache"))
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form, leaving
    /// out fields that cannot change any computed value.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            for k in ["out", "threads", "cache_dir", "timings"] {
                obj.remove(k);
            }
        }
        let bytes = serde_json::to_vec(&v).expect("JSON values serialize");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }
}
