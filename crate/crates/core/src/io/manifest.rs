//! Run manifest, written last by every command that produces files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub tolerances: BTreeMap<String, f64>,
    /// Artifact paths relative to the manifest's directory.
    pub files: Vec<String>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            tolerances: BTreeMap::new(),
            files: Vec::new(),
            timings: BTreeMap::new(),
            config,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is always representable")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { line: 0, message: e.message().to_string() })
    }

    /// Writes the manifest into `dir` after checking that every listed
    /// artifact exists there.
    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        for f in &self.files {
            if !dir.join(f).is_file() {
                return Err(Error::Io(format!("manifest lists missing artifact {f}")));
            }
        }
        let path = dir.join(name);
        std::fs::write(&path, self.to_toml())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_missing_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("construct", RunConfig::default());
        m.files.push("table_a.txt".into());
        assert!(m.write(dir.path(), "manifest.toml").is_err());
        std::fs::write(dir.path().join("table_a.txt"), "x").unwrap();
        let path = m.write(dir.path(), "manifest.toml").unwrap();
        let back = RunManifest::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
