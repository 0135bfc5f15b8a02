use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ltcg_core::{Extended, Scalar};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "v1";

/// JSON report printed on stdout.
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: Map<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: Map::new(),
            pass: true,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    /// Read a file and record its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.insert(path.display().to_string(), format!("sha256:{digest:x}"));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "pass": self.pass,
        })
    }
}

/// Exact scalars as `p/q` strings, floats as numbers.
pub fn scalar<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(x.render())
    } else {
        float(x.to_f64())
    }
}

pub fn extended<S: Scalar>(x: &Extended<S>) -> Value {
    match x {
        Extended::Finite(s) => scalar(s),
        Extended::Infinite => Value::String("inf".into()),
    }
}

pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{x}")))
}

/// Resolve a path named inside `from` relative to that file's directory.
pub fn sibling(from: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    match from.parent() {
        Some(dir) => dir.join(p),
        None => p.to_path_buf(),
    }
}
