//! JSON-over-HTTP transport with the retry policy shared by the LLM
//! gateway and the external embedding client.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles on each further attempt.
    #[serde(with = "millis")]
    pub backoff_base: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            backoff_base: Duration::from_millis(500),
        }
    }
}

impl RetryPolicy {
    /// Sleep before attempt number `attempt` (1-based; attempt 1 has none).
    pub fn delay_before(&self, attempt: u32) -> Duration {
        if attempt <= 1 {
            return Duration::ZERO;
        }
        self.backoff_base.saturating_mul(1u32 << (attempt - 2).min(16))
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("timed out: {0}")]
    Timeout(String),
    #[error("connection failed: {0}")]
    Connect(String),
    #[error("{0}")]
    Other(String),
}

/// Something that can POST a JSON body and hand back status + body.
pub trait Transport: Send + Sync {
    fn post_json(&self, url: &str, body: &str, bearer: Option<&str>) -> Result<HttpReply, TransportError>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(timeout: Duration) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| TransportError::Other(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for ReqwestTransport {
    fn post_json(&self, url: &str, body: &str, bearer: Option<&str>) -> Result<HttpReply, TransportError> {
        let mut req = self
            .client
            .post(url)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_string());
        if let Some(token) = bearer {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(classify)?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(classify)?;
        Ok(HttpReply { status, body })
    }
}

fn classify(e: reqwest::Error) -> TransportError {
    if e.is_timeout() {
        TransportError::Timeout(e.to_string())
    } else if e.is_connect() {
        TransportError::Connect(e.to_string())
    } else {
        TransportError::Other(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HttpError {
    #[error("authentication rejected with status {status}")]
    Auth { status: u16, attempts: u32 },
    #[error("request rejected with status {status}: {body}")]
    Client { status: u16, body: String, attempts: u32 },
    #[error("gave up after {attempts} attempts (last status {last_status:?}): {message}")]
    Exhausted {
        last_status: Option<u16>,
        message: String,
        attempts: u32,
    },
}

impl HttpError {
    pub fn attempts(&self) -> u32 {
        match self {
            HttpError::Auth { attempts, .. }
            | HttpError::Client { attempts, .. }
            | HttpError::Exhausted { attempts, .. } => *attempts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivered {
    pub reply: HttpReply,
    pub attempts: u32,
}

pub fn is_retryable_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

/// POST the same body until a 2xx arrives, retrying 429, 5xx and transport
/// failures with exponential backoff. 401/403 fail immediately.
pub fn post_with_retry(
    transport: &dyn Transport,
    url: &str,
    body: &str,
    bearer: Option<&str>,
    policy: &RetryPolicy,
) -> Result<Delivered, HttpError> {
    let max = policy.max_attempts.max(1);
    let mut last_status = None;
    let mut message = String::new();
    for attempt in 1..=max {
        let wait = policy.delay_before(attempt);
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
        match transport.post_json(url, body, bearer) {
            Ok(reply) if (200..300).contains(&reply.status) => {
                return Ok(Delivered { reply, attempts: attempt });
            }
            Ok(reply) if reply.status == 401 || reply.status == 403 => {
                return Err(HttpError::Auth {
                    status: reply.status,
                    attempts: attempt,
                });
            }
            Ok(reply) if is_retryable_status(reply.status) => {
                log::info!("retryable status={} attempt={attempt} url={url}", reply.status);
                last_status = Some(reply.status);
                message = reply.body;
            }
            Ok(reply) => {
                return Err(HttpError::Client {
                    status: reply.status,
                    body: reply.body,
                    attempts: attempt,
                });
            }
            Err(e) => {
                log::info!("transport failure attempt={attempt} url={url}: {e}");
                message = e.to_string();
            }
        }
    }
    Err(HttpError::Exhausted {
        last_status,
        message,
        attempts: max,
    })
}
