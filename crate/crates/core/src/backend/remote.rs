//! Chat-completion HTTP client.

use serde_json::{json, Value};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use super::{Backend, BackendConfig, BackendError};
use crate::prompting::Prompt;

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct Limiter {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Limiter);

impl Limiter {
    fn new(n: usize) -> Limiter {
        Limiter {
            free: Mutex::new(n),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

pub struct RemoteBackend {
    config: BackendConfig,
    agent: ureq::Agent,
    limiter: Limiter,
}

/// One failed attempt, and whether another attempt may help.
struct Failure {
    error: BackendError,
    retryable: bool,
}

impl RemoteBackend {
    pub fn new(config: BackendConfig) -> Result<RemoteBackend, BackendError> {
        if config.endpoint_url.as_deref().is_none_or(str::is_empty) {
            return Err(BackendError::TransportError("no endpoint URL configured".into()));
        }
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(config.timeout_s.max(1)))
            .build();
        Ok(RemoteBackend {
            limiter: Limiter::new(config.max_in_flight.max(1)),
            config,
            agent,
        })
    }

    pub fn request_body(&self, prompt: &Prompt) -> Value {
        json!({
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": prompt.system_preamble},
                {"role": "user", "content": prompt.render_user()},
            ],
        })
    }

    fn attempt(&self, url: &str, key: &str, body: &str) -> Result<String, Failure> {
        let _permit = self.limiter.acquire();
        let resp = self
            .agent
            .post(url)
            .set("Authorization", &format!("Bearer {key}"))
            .set("Content-Type", "application/json")
            .send_string(body);
        match resp {
            Ok(r) => {
                let text = r.into_string().map_err(|e| Failure {
                    error: BackendError::TransportError(format!("reading response: {e}")),
                    retryable: true,
                })?;
                extract_content(&text).map_err(|error| Failure {
                    error,
                    retryable: false,
                })
            }
            Err(ureq::Error::Status(code, r)) => {
                let text = r.into_string().unwrap_or_default();
                Err(classify_status(code, &text))
            }
            Err(ureq::Error::Transport(t)) => Err(Failure {
                error: BackendError::TransportError(t.to_string()),
                retryable: true,
            }),
        }
    }
}

fn classify_status(code: u16, body: &str) -> Failure {
    let budget = body.contains("context_length") || body.contains("insufficient_quota");
    let (error, retryable) = match code {
        401 | 403 => (BackendError::AuthError(format!("HTTP {code}")), false),
        413 => (BackendError::BudgetExceeded(format!("HTTP {code}")), false),
        _ if budget => (BackendError::BudgetExceeded(format!("HTTP {code}")), false),
        429 | 500..=599 => (BackendError::TransportError(format!("HTTP {code}")), true),
        _ => (BackendError::TransportError(format!("HTTP {code}")), false),
    };
    Failure { error, retryable }
}

/// First choice's message content from a chat-completion response body.
pub fn extract_content(body: &str) -> Result<String, BackendError> {
    let v: Value =
        serde_json::from_str(body).map_err(|e| BackendError::MalformedProviderResponse(format!("not JSON: {e}")))?;
    let choices = v
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| BackendError::MalformedProviderResponse("missing `choices`".into()))?;
    let first = choices
        .first()
        .ok_or_else(|| BackendError::MalformedProviderResponse("empty `choices`".into()))?;
    first
        .pointer("/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::MalformedProviderResponse("first choice has no message content".into()))
}

impl Backend for RemoteBackend {
    fn complete(&self, prompt: &Prompt) -> Result<String, BackendError> {
        let key = std::env::var(&self.config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                BackendError::AuthError(format!("environment variable {} is not set", self.config.api_key_env))
            })?;
        let url = self.config.endpoint_url.as_deref().unwrap_or_default();
        let body = self.request_body(prompt).to_string();
        let mut delay = self.config.backoff_base_ms;
        let mut attempt = 0;
        loop {
            match self.attempt(url, &key, &body) {
                Ok(text) => return Ok(text),
                Err(f) if f.retryable && attempt < self.config.max_retries => {
                    std::thread::sleep(Duration::from_millis(delay));
                    delay = delay.saturating_mul(2);
                    attempt += 1;
                }
                Err(f) => return Err(f.error),
            }
        }
    }
}
