//! Chat-completion transports: a real HTTP client, a replay transport fed
//! from recorded candidates, and a closure-backed one for tests.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("endpoint unavailable after {attempts} attempts: {detail}")]
    EndpointUnavailable { attempts: u32, detail: String },
    #[error("api error (status {status}): {detail}")]
    ApiError { status: u16, detail: String },
    #[error("no recorded candidates for {id}")]
    ReplayMiss { id: String },
    #[error("invalid sampling parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Candidates requested per prompt.
    pub n: usize,
    pub temperature: f64,
    pub top_k: usize,
    pub top_p: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            n: 10,
            temperature: 1.0,
            top_k: 50,
            top_p: 0.95,
        }
    }
}

impl SamplingParams {
    pub fn validate(&self) -> Result<(), TransportError> {
        if self.n == 0 {
            return Err(TransportError::InvalidParams("n must be at least 1".into()));
        }
        if !(self.temperature > 0.0) {
            return Err(TransportError::InvalidParams(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.top_k == 0 {
            return Err(TransportError::InvalidParams("top_k must be at least 1".into()));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(TransportError::InvalidParams(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ChatRequest {
    /// Instance id; replay transports key their lookups on it.
    pub id: String,
    pub system: String,
    pub user: String,
    pub params: SamplingParams,
}

pub trait ChatTransport: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<String>, TransportError>;
}

/// Validate parameters, then ask the transport for candidates.
pub fn llm_complete(
    transport: &dyn ChatTransport,
    request: &ChatRequest,
) -> Result<Vec<String>, TransportError> {
    request.params.validate()?;
    transport.complete(request)
}

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub url: String,
    pub model: Option<String>,
    /// Bearer token. Callers read it from the environment; it is sent in the
    /// Authorization header and must never appear in logs or errors.
    pub api_key: Option<String>,
    /// Retries after the first attempt, for transient failures only.
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub request_timeout: Duration,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            model: None,
            api_key: None,
            max_retries: 3,
            initial_backoff: Duration::from_millis(500),
            request_timeout: Duration::from_secs(120),
        }
    }
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    messages: [WireMessage<'a>; 2],
    n: usize,
    temperature: f64,
    top_k: usize,
    top_p: f64,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    content: String,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

pub struct HttpTransport {
    config: EndpointConfig,
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(config: EndpointConfig) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|err| TransportError::EndpointUnavailable {
                attempts: 0,
                detail: err.to_string(),
            })?;
        Ok(Self { config, client })
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u32 << attempt.min(4);
        (self.config.initial_backoff * factor).min(Duration::from_secs(8))
    }
}

fn retryable(status: reqwest::StatusCode) -> bool {
    status.as_u16() == 408 || status.as_u16() == 429 || status.is_server_error()
}

impl ChatTransport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<String>, TransportError> {
        let wire = WireRequest {
            model: self.config.model.as_deref(),
            messages: [
                WireMessage {
                    role: "system",
                    content: &request.system,
                },
                WireMessage {
                    role: "user",
                    content: &request.user,
                },
            ],
            n: request.params.n,
            temperature: request.params.temperature,
            top_k: request.params.top_k,
            top_p: request.params.top_p,
        };

        let mut attempt = 0;
        loop {
            attempt += 1;
            let mut req = self.client.post(&self.config.url).json(&wire);
            if let Some(key) = &self.config.api_key {
                req = req.bearer_auth(key);
            }
            let response = match req.send() {
                Ok(response) => response,
                Err(err) => {
                    if attempt <= self.config.max_retries {
                        std::thread::sleep(self.backoff(attempt - 1));
                        continue;
                    }
                    return Err(TransportError::EndpointUnavailable {
                        attempts: attempt,
                        detail: err.to_string(),
                    });
                }
            };

            let status = response.status();
            if status.is_success() {
                let parsed: WireResponse =
                    response.json().map_err(|err| TransportError::ApiError {
                        status: status.as_u16(),
                        detail: format!("unparseable response body: {err}"),
                    })?;
                let texts: Vec<String> = parsed
                    .choices
                    .into_iter()
                    .map(|c| c.message.content)
                    .collect();
                if texts.len() != request.params.n {
                    return Err(TransportError::ApiError {
                        status: status.as_u16(),
                        detail: format!(
                            "requested {} candidates, got {}",
                            request.params.n,
                            texts.len()
                        ),
                    });
                }
                return Ok(texts);
            }

            if retryable(status) {
                if attempt <= self.config.max_retries {
                    std::thread::sleep(self.backoff(attempt - 1));
                    continue;
                }
                return Err(TransportError::EndpointUnavailable {
                    attempts: attempt,
                    detail: format!("last status {status}"),
                });
            }
            // Client errors are not retried: the request itself is wrong.
            let body = response.text().unwrap_or_default();
            return Err(TransportError::ApiError {
                status: status.as_u16(),
                detail: body.chars().take(500).collect(),
            });
        }
    }
}

#[derive(Debug, Deserialize)]
struct ReplayRecord {
    id: String,
    candidates: Vec<String>,
}

/// Serves recorded candidate lists keyed by instance id, for reproducing an
/// evaluation without the model. Returns exactly what was recorded, however
/// many candidates that is.
pub struct ReplayTransport {
    map: HashMap<String, Vec<String>>,
}

impl ReplayTransport {
    pub fn new(map: HashMap<String, Vec<String>>) -> Self {
        Self { map }
    }

    /// Load JSONL lines of `{"id": ..., "candidates": [...]}`.
    pub fn from_jsonl(path: &Path) -> anyhow::Result<Self> {
        let file = File::open(path)?;
        let mut map = HashMap::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ReplayRecord = serde_json::from_str(&line)
                .map_err(|err| anyhow::anyhow!("line {}: {err}", lineno + 1))?;
            map.insert(record.id, record.candidates);
        }
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl ChatTransport for ReplayTransport {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<String>, TransportError> {
        self.map
            .get(&request.id)
            .cloned()
            .ok_or_else(|| TransportError::ReplayMiss {
                id: request.id.clone(),
            })
    }
}

/// Closure-backed transport for tests.
pub struct FnTransport<F>(pub F);

impl<F> ChatTransport for FnTransport<F>
where
    F: Fn(&ChatRequest) -> Result<Vec<String>, TransportError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<Vec<String>, TransportError> {
        (self.0)(request)
    }
}
