//! Flag values merged over an optional JSON configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use bianchi_core::algebra::{parse_rational, render_rational};

use crate::{CliError, GlobalOpts};

/// Resolves each setting as flag, then config file, then default, and keeps
/// the resolved values for the output metadata.
pub struct Resolver {
    command: String,
    file: Map<String, Value>,
    source: Option<PathBuf>,
    resolved: BTreeMap<String, Value>,
}

fn as_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Resolver {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self, CliError> {
        let mut file = Map::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => file = m,
                Ok(_) => return Err(CliError::Usage(format!("{}: config must be a JSON object", p.display()))),
                Err(e) => return Err(CliError::Usage(format!("{}: {e}", p.display()))),
            }
        }
        Ok(Resolver { command: command.to_string(), file, source: path.map(Path::to_path_buf), resolved: BTreeMap::new() })
    }

    /// Flag value, else the config entry (hyphens and underscores both accepted).
    pub fn pick(&mut self, key: &str, flag: Option<String>) -> Result<Option<String>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file.get(key).or_else(|| self.file.get(&key.replace('_', "-"))).map(as_text),
        };
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), json!(v));
        }
        Ok(v)
    }

    pub fn require(&mut self, key: &str, flag: Option<String>) -> Result<String, CliError> {
        self.pick(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("{}: missing required --{}", self.command, key.replace('_', "-"))))
    }

    pub fn require_rational(&mut self, key: &str, flag: Option<String>) -> Result<BigRational, CliError> {
        let text = self.require(key, flag)?;
        let q = parse_rational(&text).map_err(|e| CliError::Usage(format!("--{key} {text:?}: {e}")))?;
        self.resolved.insert(key.to_string(), json!(render_rational(&q)));
        Ok(q)
    }

    pub fn number(&mut self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        match self.pick(key, flag.map(|v| v.to_string()))? {
            None => Ok(None),
            Some(t) => {
                let v: f64 = t.parse().map_err(|_| CliError::Usage(format!("--{}: not a number: {t}", key.replace('_', "-"))))?;
                self.resolved.insert(key.to_string(), json!(v));
                Ok(Some(v))
            }
        }
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let v = if flag {
            true
        } else {
            match self.file.get(key) {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(other) => return Err(CliError::Usage(format!("config {key}: expected a boolean, got {other}"))),
            }
        };
        self.resolved.insert(key.to_string(), json!(v));
        Ok(v)
    }

    pub fn path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
        Ok(self.pick(key, flag.map(|p| p.display().to_string()))?.map(PathBuf::from))
    }

    pub fn record(&mut self, key: &str, v: Value) {
        self.resolved.insert(key.to_string(), v);
    }

    pub fn globals(&mut self, g: &GlobalOpts) {
        let threads = g.threads.or_else(|| self.file.get("threads").and_then(Value::as_u64).map(|v| v as usize));
        let seed = g.seed.or_else(|| self.file.get("seed").and_then(Value::as_u64));
        self.resolved.insert("threads".into(), json!(threads.unwrap_or_else(rayon::current_num_threads)));
        self.resolved.insert("seed".into(), json!(seed));
    }

    pub fn metadata(&self) -> Value {
        json!({
            "command": self.command,
            "config_file": self.source.as_ref().map(|p| p.display().to_string()),
            "resolved": self.resolved,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}
