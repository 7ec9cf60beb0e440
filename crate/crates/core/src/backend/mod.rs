//! Completion backends and response parsing.

pub mod offline;
pub mod remote;
pub mod response;
pub mod stub;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompting::Prompt;

pub use offline::OfflineBackend;
pub use remote::RemoteBackend;
pub use response::{parse_response, Clause, Construct, PragmaPlan, ResponseError, ScheduleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Remote,
    #[default]
    Offline,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remote" => Ok(BackendKind::Remote),
            "offline" => Ok(BackendKind::Offline),
            other => Err(format!("unknown backend `{other}` (expected offline or remote)")),
        }
    }
}

/// Backend settings. Holds the *name* of the key variable, never its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint_url: Option<String>,
    pub model_name: String,
    pub temperature: f64,
    pub timeout_s: u64,
    pub max_retries: u32,
    pub api_key_env: String,
    /// First retry delay; later delays double.
    pub backoff_base_ms: u64,
    pub max_in_flight: usize,
}

pub const DEFAULT_API_KEY_ENV: &str = "OMPAR_API_KEY";

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Offline,
            endpoint_url: None,
            model_name: "gpt-4o-mini".to_string(),
            temperature: 0.0,
            timeout_s: 60,
            max_retries: 2,
            api_key_env: DEFAULT_API_KEY_ENV.to_string(),
            backoff_base_ms: 1000,
            max_in_flight: 4,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err("temperature must be >= 0".into());
        }
        if self.max_in_flight == 0 {
            return Err("max_in_flight must be >= 1".into());
        }
        if self.kind == BackendKind::Remote && self.endpoint_url.as_deref().is_none_or(str::is_empty) {
            return Err("remote backend needs an endpoint URL".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum BackendError {
    #[error("authentication failed: {0}")]
    AuthError(String),
    #[error("transport failure: {0}")]
    TransportError(String),
    #[error("provider budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed provider response: {0}")]
    MalformedProviderResponse(String),
    #[error("prompt has no suggested clauses: {0}")]
    InvalidPrompt(String),
}

pub trait Backend: Send + Sync {
    fn complete(&self, prompt: &Prompt) -> Result<String, BackendError>;
}

/// Build the backend described by `config`.
pub fn make_backend(config: &BackendConfig) -> Result<Box<dyn Backend>, BackendError> {
    match config.kind {
        BackendKind::Offline => Ok(Box::new(OfflineBackend)),
        BackendKind::Remote => Ok(Box::new(RemoteBackend::new(config.clone())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let c = BackendConfig::default();
        assert_eq!(c.temperature, 0.0);
        assert_eq!(c.timeout_s, 60);
        assert_eq!(c.max_retries, 2);
        assert!(c.validate().is_ok());
        let r = BackendConfig {
            kind: BackendKind::Remote,
            ..BackendConfig::default()
        };
        assert!(r.validate().is_err());
        let neg = BackendConfig {
            temperature: -1.0,
            ..BackendConfig::default()
        };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn serialized_config_names_the_variable_only() {
        let c = BackendConfig::default();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"api_key_env\":\"OMPAR_API_KEY\""));
    }
}
