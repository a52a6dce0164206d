//! Run manifest: enough to reproduce any output file bitwise.
//!
//! The hash covers `(command, seed, version, config)`, which fully
//! determines the data bytes; every emitted data file carries it, so
//! outputs can be traced back to the run that produced them.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::errors::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub created_utc: String,
    pub config: serde_json::Value,
    pub hash: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        let hashed = serde_json::json!({
            "command": command,
            "seed": seed,
            "version": version,
            "config": config,
        });
        let mut hasher = Sha256::new();
        hasher.update(hashed.to_string().as_bytes());
        let hash = hex::encode(hasher.finalize());
        Self {
            command: command.to_string(),
            argv: std::env::args().collect(),
            seed,
            version,
            created_utc: chrono::Utc::now().to_rfc3339(),
            config,
            hash,
        }
    }

    /// Short hash for file headers.
    pub fn tag(&self) -> &str {
        &self.hash[..16]
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(dir.join("manifest.json"), body + "\n")?;
        Ok(())
    }
}
