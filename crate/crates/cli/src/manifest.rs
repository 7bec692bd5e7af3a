//! Run metadata written next to the exports.

use std::fs;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use eagga_core::data::Dataset;
use eagga_core::eagga::RunConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataFingerprint {
    pub path: String,
    pub target: String,
    pub rows: usize,
    pub cols: usize,
    pub sha256: String,
}

impl DataFingerprint {
    pub fn new(path: &Path, target: &str, ds: &Dataset, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            target: target.to_string(),
            rows: ds.n(),
            cols: ds.p() + 1,
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Written before the run with `status = "running"` and rewritten at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub seed: u64,
    pub config: RunConfig,
    pub data: DataFingerprint,
    pub started: String,
    pub finished: Option<String>,
    pub n_evals: Option<usize>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn start(cfg: &RunConfig, path: &Path, target: &str, ds: &Dataset, bytes: &[u8]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: "running".to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            data: DataFingerprint::new(path, target, ds, bytes),
            started: now(),
            finished: None,
            n_evals: None,
        }
    }

    pub fn finish(&mut self, n_evals: usize) {
        self.status = "complete".to_string();
        self.finished = Some(now());
        self.n_evals = Some(n_evals);
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
