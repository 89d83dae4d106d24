//! Single choke point for model calls.
//!
//! Every request goes through [`Gateway::complete`], which builds the prompt,
//! checks the reply against the request's [`OutputContract`] and reissues the
//! request with a corrective suffix until a reply passes or the retry budget
//! runs out. Nothing unvalidated leaves this module.

mod contract;
mod http;
mod mock;
mod prompt;

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use contract::{parse_candidate_output, parse_option_list, CandidateOutput, OutputContract};
pub use http::{HttpProvider, HttpProviderConfig, API_KEY_ENV, ENDPOINT_ENV, MODEL_ENV};
pub use mock::{MockProvider, ScriptStep, MALFORMED_OUTPUT};
pub use prompt::{build_prompt, ContextBlock, PromptSpec, CONTRACT_HEADER, CORRECTION_HEADER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("provider timed out")]
    Timeout,
    #[error("provider transport error: {0}")]
    Transport(String),
    #[error("provider returned an unusable response: {0}")]
    BadResponse(String),
}

/// Text-in, text-out completion backend.
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, prompt: &str, timeout: Duration) -> Result<String, ProviderError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    /// Total attempts including the first one.
    pub max_attempts: u32,
    pub per_attempt_timeout: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            per_attempt_timeout: Duration::from_secs(60),
        }
    }
}

impl RetryPolicy {
    pub fn new(max_attempts: u32, per_attempt_timeout: Duration) -> Result<Self, GatewayError> {
        if max_attempts == 0 {
            return Err(GatewayError::InvalidSpec("max_attempts must be at least 1".into()));
        }
        Ok(RetryPolicy {
            max_attempts,
            per_attempt_timeout,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderResult {
    pub raw_text: String,
    pub attempts: u32,
    pub validated: bool,
    pub provider_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("provider failed after {attempts} attempts: {last_violation}")]
    ProviderFailure { attempts: u32, last_violation: String },
    #[error("invalid prompt spec: {0}")]
    InvalidSpec(String),
}

#[derive(Clone)]
pub struct Gateway {
    provider: Arc<dyn Provider>,
    policy: RetryPolicy,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("provider", &self.provider.name())
            .field("policy", &self.policy)
            .finish()
    }
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>, policy: RetryPolicy) -> Self {
        Gateway { provider, policy }
    }

    /// Gateway over the deterministic mock with the default policy.
    pub fn mock(seed: u64) -> Self {
        Gateway::new(Arc::new(MockProvider::new(seed)), RetryPolicy::default())
    }

    pub fn policy(&self) -> RetryPolicy {
        self.policy
    }

    pub fn provider_name(&self) -> &str {
        self.provider.name()
    }

    pub fn complete(&self, spec: &PromptSpec) -> Result<ProviderResult, GatewayError> {
        self.complete_with(spec, |_| Ok(()))
    }

    /// Like [`Gateway::complete`], with an extra domain check run after the
    /// contract validator. A failing check counts as a violation and retries.
    pub fn complete_with<F>(&self, spec: &PromptSpec, extra: F) -> Result<ProviderResult, GatewayError>
    where
        F: Fn(&str) -> Result<(), String>,
    {
        let base = build_prompt(spec);
        let max = self.policy.max_attempts.max(1);
        let mut prompt = base.clone();
        let mut last_violation = String::new();
        for attempt in 1..=max {
            let started = Instant::now();
            let outcome = self.provider.complete(&prompt, self.policy.per_attempt_timeout);
            let violation = match outcome {
                Ok(_) if started.elapsed() > self.policy.per_attempt_timeout => ProviderError::Timeout.to_string(),
                Ok(text) => match spec.output_contract().validate(&text).and_then(|()| extra(&text)) {
                    Ok(()) => {
                        return Ok(ProviderResult {
                            raw_text: text,
                            attempts: attempt,
                            validated: true,
                            provider_name: self.provider.name().to_string(),
                        })
                    }
                    Err(v) => v,
                },
                Err(e) => e.to_string(),
            };
            last_violation = violation;
            if attempt < max {
                prompt = prompt::with_correction(&base, attempt + 1, max, &last_violation);
            }
        }
        Err(GatewayError::ProviderFailure {
            attempts: max,
            last_violation,
        })
    }
}
