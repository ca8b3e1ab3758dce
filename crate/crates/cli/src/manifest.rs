use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use locc_lab::Family;

use crate::{param, Failure};

#[derive(Debug, Serialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    /// Family tag, or `custom` for hand-made sets.
    pub family: String,
}

/// Record of one invocation, written as `<out>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub params: Option<Params>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub artifacts: BTreeMap<String, PathBuf>,
    pub verdicts: BTreeMap<String, Value>,
    pub elapsed_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn new(command: &str, started: Instant) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            params: None,
            input: None,
            output: None,
            artifacts: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            elapsed_ms: 0,
            started: Some(started),
        }
    }

    pub fn params(mut self, n: usize, m: usize, family: Option<Family>) -> Self {
        self.params = Some(Params {
            n,
            m,
            family: family.map_or("custom".to_string(), |f| f.tag().to_string()),
        });
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.input = Some(path.to_path_buf());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.output = Some(path.to_path_buf());
        self
    }

    pub fn artifact(mut self, name: &str, path: &Path) -> Self {
        self.artifacts.insert(name.to_string(), path.to_path_buf());
        self
    }

    pub fn verdict(mut self, key: &str, value: Value) -> Self {
        self.verdicts.insert(key.to_string(), value);
        self
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn write_beside(mut self, out: &Path) -> Result<PathBuf, Failure> {
        if let Some(t) = self.started {
            self.elapsed_ms = t.elapsed().as_millis();
        }
        let path = Self::path_for(out);
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes") + "\n";
        std::fs::write(&path, text)
            .map_err(|e| param(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
