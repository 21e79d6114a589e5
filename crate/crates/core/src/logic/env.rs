use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variable bindings: name to finite value, ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Env(BTreeMap<String, f64>);

/// Failure while loading an environment from JSON.
#[derive(Debug, Error)]
pub enum EnvError {
    #[error("environment is not a JSON object of numbers: {0}")]
    Json(#[from] serde_json::Error),
    #[error("environment value for `{name}` is not finite")]
    NonFinite { name: String },
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    /// Builder-style insertion, handy in tests.
    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Parses a JSON object of numbers, rejecting non-finite values.
    pub fn from_json_str(text: &str) -> Result<Env, EnvError> {
        let map: BTreeMap<String, f64> = serde_json::from_str(text)?;
        for (name, value) in &map {
            if !value.is_finite() {
                return Err(EnvError::NonFinite { name: name.clone() });
            }
        }
        Ok(Env(map))
    }
}

impl FromIterator<(String, f64)> for Env {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Env(iter.into_iter().collect())
    }
}
