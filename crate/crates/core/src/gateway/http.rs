//! Chat-completion provider over HTTPS.
//!
//! Request body:
//!
//! ```json
//! {"model": "<model>", "messages": [
//!   {"role": "system", "content": "<system text>"},
//!   {"role": "user", "content": "<prompt>"}
//! ]}
//! ```
//!
//! The reply text is read from `choices[0].message.content`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Provider, ProviderError};

pub const API_KEY_ENV: &str = "PEDFORGE_LLM_API_KEY";
pub const ENDPOINT_ENV: &str = "PEDFORGE_LLM_ENDPOINT";
pub const MODEL_ENV: &str = "PEDFORGE_LLM_MODEL";

const SYSTEM_TEXT: &str = "You assist an instructor designing an educational game. \
Follow the OUTPUT CONTRACT at the end of each message exactly.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpProviderConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key: String,
}

impl HttpProviderConfig {
    /// Reads endpoint, model and key from the environment.
    pub fn from_env() -> Result<Self, String> {
        let var = |name: &str| {
            std::env::var(name)
                .ok()
                .filter(|v| !v.trim().is_empty())
                .ok_or_else(|| format!("environment variable {name} is not set"))
        };
        Ok(HttpProviderConfig {
            endpoint: var(ENDPOINT_ENV)?,
            model: var(MODEL_ENV)?,
            api_key: var(API_KEY_ENV)?,
        })
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 2],
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReply,
}

#[derive(Deserialize)]
struct ChatReply {
    content: Option<String>,
}

pub struct HttpProvider {
    config: HttpProviderConfig,
}

impl HttpProvider {
    pub fn new(config: HttpProviderConfig) -> Self {
        HttpProvider { config }
    }
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        &self.config.model
    }

    fn complete(&self, prompt: &str, timeout: Duration) -> Result<String, ProviderError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let body = ChatRequest {
            model: &self.config.model,
            messages: [
                ChatMessage {
                    role: "system",
                    content: SYSTEM_TEXT,
                },
                ChatMessage {
                    role: "user",
                    content: prompt,
                },
            ],
        };
        let mut response = agent
            .post(&self.config.endpoint)
            .header("Authorization", &format!("Bearer {}", self.config.api_key))
            .send_json(&body)
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => ProviderError::Timeout,
                other => ProviderError::Transport(other.to_string()),
            })?;
        let parsed: ChatResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::BadResponse(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ProviderError::BadResponse("no choices in reply".into()))
    }
}
