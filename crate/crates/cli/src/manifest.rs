use anyhow::{Context, Result};
use chrono::{DateTime, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one command invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub started: DateTime<Utc>,
    pub finished: Option<DateTime<Utc>>,
    pub outputs: Vec<PathBuf>,
    /// Command-specific details (fitness reference, scenario summary, ...).
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn start<A: Serialize>(command: &str, args: &A, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            args: serde_json::to_value(args).unwrap_or(serde_json::Value::Null),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            started: Utc::now(),
            finished: None,
            outputs: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    pub fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    /// Stamps the end time and writes the manifest into `dir`.
    pub fn finish(mut self, dir: &Path, stem: &str) -> Result<PathBuf> {
        self.finished = Some(Utc::now());
        let path = dir.join(format!("{stem}.manifest.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
