//! Run configuration shared by the CLI commands: one JSON document, every
//! field overridable from the command line, hashed into output files for
//! reproducibility.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub tau_inc: f64,
    pub tau_eig: f64,
    /// relative modulus-gap tolerance
    pub tau_gap: f64,
    /// general-position determinant tolerance
    pub tau_gp: f64,
    pub tau_det: f64,
    /// angle deduplication tolerance on the boundary circle
    pub dedup_angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_inc: 1e-9,
            tau_eig: 1e-8,
            tau_gap: 1e-6,
            tau_gp: 1e-8,
            tau_det: 1e-10,
            dedup_angle: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub rep_path: PathBuf,
    pub max_word_len: usize,
    pub leaf_samples: usize,
    /// boundary angles of the four frame base points (snapped to the table)
    pub base_angles: [f64; 4],
    /// boundary angles of the leaves to extract; empty = the 8 generator axes
    pub leaf_angles: Vec<f64>,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rep_path: PathBuf::from("rep.json"),
            max_word_len: 4,
            leaf_samples: 128,
            // attracting axes of short mixed words, pairwise distinct and
            // away from the generator axes
            base_angles: [1.75, 3.672, 3.914, 4.891],
            leaf_angles: Vec::new(),
            tolerances: Tolerances::default(),
            output_dir: PathBuf::from("out"),
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("tau_inc", t.tau_inc),
            ("tau_eig", t.tau_eig),
            ("tau_gap", t.tau_gap),
            ("tau_gp", t.tau_gp),
            ("tau_det", t.tau_det),
            ("dedup_angle", t.dedup_angle),
        ] {
            if v <= 0.0 {
                return Err(GeomError::Precondition(format!(
                    "tolerance {name} must be positive"
                )));
            }
        }
        if self.leaf_samples < 16 {
            return Err(GeomError::Precondition(
                "leaf_samples must be at least 16".into(),
            ));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (self.base_angles[i] - self.base_angles[j]).abs() < 1e-9 {
                    return Err(GeomError::Precondition(
                        "base angles must be pairwise distinct".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Hash of the canonical JSON form, stamped into every output file.
    pub fn hash(&self) -> u64 {
        let json = serde_json::to_string(self).expect("config serializes");
        crate::numeric::fnv1a64(json.as_bytes())
    }
}
