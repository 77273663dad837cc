use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, Result, RunConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// sha256 of `config`.
    pub config_sha256: String,
    /// Effective configuration, canonical TOML.
    pub config: String,
    pub artifacts: Vec<Artifact>,
}

/// Files written by one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputBundle {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects artifacts for a command, then writes the manifest.
pub(crate) struct BundleWriter {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl BundleWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        log::info!("wrote {}", path.display());
        self.artifacts.push(Artifact {
            file: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn finish(self, command: &str, cfg: &RunConfig) -> Result<OutputBundle> {
        let config = cfg.canonical_toml();
        let manifest = Manifest {
            tool: "chansim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: cfg.seed,
            config_sha256: sha256_hex(config.as_bytes()),
            config,
            artifacts: self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(OutputBundle {
            dir: self.dir,
            manifest,
        })
    }
}
