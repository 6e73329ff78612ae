//! OpenAI-compatible HTTP backend for chat completions and embeddings.

use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::{CompletionProvider, CompletionRecord, RuleTokenizer, Tokenizer};

pub const API_KEY_ENV: &str = "LEANCTX_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenAiConfig {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_concurrent")]
    pub max_concurrent: usize,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

fn default_timeout() -> u64 {
    60
}
fn default_max_concurrent() -> usize {
    4
}
fn default_max_retries() -> u32 {
    3
}
fn default_backoff() -> u64 {
    500
}

impl OpenAiConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            timeout_secs: default_timeout(),
            max_concurrent: default_max_concurrent(),
            max_retries: default_max_retries(),
            backoff_ms: default_backoff(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_url.trim().is_empty() || self.model.trim().is_empty() {
            return Err(Error::InvalidConfig(
                "base_url and model must be set".into(),
            ));
        }
        if self.max_concurrent == 0 || self.timeout_secs == 0 {
            return Err(Error::InvalidConfig(
                "max_concurrent and timeout_secs must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Counting semaphore capping in-flight requests.
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.limit {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Shared request plumbing: bearer auth, concurrency cap, retry with
/// exponential backoff on transport errors, 429 and 5xx.
pub struct OpenAiClient {
    config: OpenAiConfig,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
    gate: Gate,
}

impl OpenAiClient {
    /// Reads the API key from `LEANCTX_API_KEY` when it is set.
    pub fn new(config: OpenAiConfig) -> Result<Self> {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::with_api_key(config, key)
    }

    pub fn with_api_key(config: OpenAiConfig, api_key: Option<String>) -> Result<Self> {
        config.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("http client: {e}")))?;
        let gate = Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            limit: config.max_concurrent,
        };
        Ok(Self {
            config,
            api_key,
            http,
            gate,
        })
    }

    pub fn config(&self) -> &OpenAiConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.config.base_url.trim_end_matches('/'), path)
    }

    pub fn post_json(&self, path: &str, body: &Value) -> Result<Value> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let result = {
                let _permit = self.gate.acquire();
                self.post_once(path, body)
            };
            match result {
                Err(Error::Provider {
                    message,
                    status,
                    retryable,
                    ..
                }) => {
                    if retryable && attempt <= self.config.max_retries {
                        let wait = self
                            .config
                            .backoff_ms
                            .saturating_mul(1 << (attempt - 1).min(16));
                        thread::sleep(Duration::from_millis(wait));
                        continue;
                    }
                    return Err(Error::Provider {
                        message,
                        status,
                        retryable,
                        attempts: attempt,
                    });
                }
                other => return other,
            }
        }
    }

    fn post_once(&self, path: &str, body: &Value) -> Result<Value> {
        let mut request = self.http.post(self.url(path)).json(body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| Error::provider(format!("transport: {e}"), None, true))?;
        let status = response.status();
        let text = response.text().map_err(|e| {
            Error::provider(format!("reading body: {e}"), Some(status.as_u16()), true)
        })?;
        if !status.is_success() {
            if text.contains("context_length_exceeded") {
                return Err(Error::ContextTooLarge(error_message(&text)));
            }
            let retryable = status.as_u16() == 429 || status.is_server_error();
            return Err(Error::provider(
                error_message(&text),
                Some(status.as_u16()),
                retryable,
            ));
        }
        serde_json::from_str(&text).map_err(|e| {
            Error::provider(
                format!("malformed response: {e}"),
                Some(status.as_u16()),
                false,
            )
        })
    }
}

fn error_message(body: &str) -> String {
    serde_json::from_str::<Value>(body)
        .ok()
        .and_then(|v| {
            v.pointer("/error/message")
                .and_then(Value::as_str)
                .map(str::to_string)
        })
        .unwrap_or_else(|| body.chars().take(200).collect())
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: usize,
    completion_tokens: usize,
}

/// Chat-completion provider. Token counts come from the response `usage`
/// block, falling back to the local tokenizer when the server omits it.
pub struct OpenAiProvider {
    client: Arc<OpenAiClient>,
    tokenizer: Arc<dyn Tokenizer>,
}

impl OpenAiProvider {
    pub fn new(client: Arc<OpenAiClient>) -> Self {
        Self {
            client,
            tokenizer: Arc::new(RuleTokenizer),
        }
    }

    pub fn with_tokenizer(mut self, tokenizer: Arc<dyn Tokenizer>) -> Self {
        self.tokenizer = tokenizer;
        self
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.client.config().model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0.0,
        })
    }
}

impl CompletionProvider for OpenAiProvider {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord> {
        if prompt.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let value = self
            .client
            .post_json("/v1/chat/completions", &self.request_body(prompt))?;
        let response: ChatResponse = serde_json::from_value(value)
            .map_err(|e| Error::provider(format!("malformed chat response: {e}"), None, false))?;
        let answer = response
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Error::provider("response has no choices", None, false))?;
        let (prompt_tokens, completion_tokens) = match response.usage {
            Some(u) => (u.prompt_tokens, u.completion_tokens),
            None => (
                self.tokenizer.count_tokens(prompt),
                self.tokenizer.count_tokens(&answer),
            ),
        };
        Ok(CompletionRecord {
            prompt_tokens,
            completion_tokens,
            summary_tokens: 0,
            answer,
        })
    }
}
