//! Run manifests: every command leaves a `manifest.json` next to its
//! outputs with the full invocation, effective configuration, and SHA-256
//! checksums, enough to reproduce the run byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<String>,
    pub config: serde_json::Value,
    pub tool_version: String,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path], config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_owned(),
            argv: std::env::args().skip(1).collect(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, out_dir: &Path, path: &Path) -> std::io::Result<()> {
        let bytes = fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let relative = path.strip_prefix(out_dir).unwrap_or(path);
        self.outputs.push(OutputEntry {
            path: relative.display().to_string(),
            sha256: hex::encode(digest),
        });
        Ok(())
    }

    /// Write `manifest.json` atomically (temp file + rename).
    pub fn write(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        let target = out_dir.join("manifest.json");
        let tmp = out_dir.join("manifest.json.tmp");
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        fs::write(&tmp, body)?;
        fs::rename(&tmp, &target)?;
        Ok(target)
    }
}
