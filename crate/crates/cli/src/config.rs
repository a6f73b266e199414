//! Experiment files: a flat JSON object whose keys are the long flag names.
//! Flags given on the command line win over file values.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: Map<String, Value>,
}

impl ConfigFile {
    /// Load `path`, rejecting keys that are not flags of the running command.
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(values) = value else {
            return Err(CliError::Input(format!("config {} must be a JSON object", path.display())));
        };
        if let Some(bad) = values.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::Input(format!(
                "unknown key '{bad}' in config {} (expected one of: {})",
                path.display(),
                allowed.join(", ")
            )));
        }
        Ok(ConfigFile { values })
    }

    pub fn f64(&self, flag: Option<f64>, key: &str) -> CliResult<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Input(format!("config key '{key}' must be a number"))),
        }
    }

    pub fn usize(&self, flag: Option<usize>, key: &str) -> CliResult<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| CliError::Input(format!("config key '{key}' must be a non-negative integer"))),
        }
    }

    pub fn string(&self, flag: Option<String>, key: &str) -> CliResult<Option<String>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(CliError::Input(format!("config key '{key}' must be a string"))),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> CliResult<Option<PathBuf>> {
        Ok(self.string(flag.map(|p| p.to_string_lossy().into_owned()), key)?.map(PathBuf::from))
    }

    /// Boolean switches can only be turned on by the flag.
    pub fn switch(&self, flag: bool, key: &str) -> CliResult<bool> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(CliError::Input(format!("config key '{key}' must be a boolean"))),
        }
    }
}

pub fn required(v: Option<f64>, key: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Input(format!("missing --{key} (flag or config key)")))
}
