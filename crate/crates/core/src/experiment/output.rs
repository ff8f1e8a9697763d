use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FitResult;
use crate::error::Result;

/// Writes `rows` as CSV with a header from the row type's field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Fitted constants and provenance of one run. Fields a command did not
/// compute stay `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub alpha_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub beta_shot_hat: Option<f64>,
    pub c_p: Option<f64>,
    pub sigma2: Option<f64>,
    pub eps_star: Option<f64>,
    pub seed: u64,
    pub fits: Vec<FitResult>,
    pub diagnostics: serde_json::Map<String, serde_json::Value>,
    pub notes: Vec<String>,
    pub config: serde_json::Value,
}

impl Summary {
    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
    }
}
