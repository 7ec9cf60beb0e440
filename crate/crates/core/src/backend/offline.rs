//! Deterministic rule backend.

use super::{Backend, BackendError};
use crate::prompting::{suggested_clauses, Prompt};

/// Renders the directive straight from the prompt's suggested clauses.
#[derive(Debug, Clone, Copy, Default)]
pub struct OfflineBackend;

/// Directive text for a clause string as rendered in FACTS.
pub fn render_directive(clauses: &str) -> String {
    if clauses.is_empty() {
        "#pragma omp parallel for".to_string()
    } else {
        format!("#pragma omp parallel for {clauses}")
    }
}

impl OfflineBackend {
    pub fn complete_text(&self, rendered_prompt: &str) -> Result<String, BackendError> {
        let clauses = suggested_clauses(rendered_prompt)
            .ok_or_else(|| BackendError::InvalidPrompt("no FACTS section with suggested clauses".into()))?;
        Ok(render_directive(clauses))
    }
}

impl Backend for OfflineBackend {
    fn complete(&self, prompt: &Prompt) -> Result<String, BackendError> {
        self.complete_text(&prompt.render())
    }
}
