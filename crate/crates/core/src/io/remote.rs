use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// Client settings for a JSON-over-HTTP scorer.
///
/// Wire contract: `POST endpoint` with body `{"texts": ["...", ...]}` and,
/// when a credential is configured, `Authorization: Bearer <credential>`. A
/// 2xx reply must be `{"scores": [s0, s1, ...]}` with one number in `[0, 1]`
/// per text, in request order. 401/403 fail the batch; 429, 5xx and
/// transport failures are retried with exponential backoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteScorerConfig {
    pub endpoint: String,
    /// Environment variable holding the credential. The credential itself is
    /// never read from config files or flags.
    #[serde(default)]
    pub credential_env: Option<String>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles per retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    /// Batches in flight at once.
    #[serde(default = "default_max_concurrency")]
    pub max_concurrency: usize,
}

fn default_batch_size() -> usize {
    100
}
fn default_timeout_secs() -> f64 {
    30.0
}
fn default_max_attempts() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    500
}
fn default_max_concurrency() -> usize {
    4
}

impl RemoteScorerConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            credential_env: None,
            batch_size: default_batch_size(),
            timeout_secs: default_timeout_secs(),
            max_attempts: default_max_attempts(),
            backoff_ms: default_backoff_ms(),
            max_concurrency: default_max_concurrency(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("remote scorer: {m}")));
        if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            return bad("endpoint must be an http(s) URL");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return bad("timeout_secs must be positive");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        if self.max_concurrency == 0 {
            return bad("max_concurrency must be at least 1");
        }
        if matches!(&self.credential_env, Some(v) if v.is_empty()) {
            return bad("credential_env must name a variable");
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    fn credential(&self) -> Result<Option<String>> {
        match &self.credential_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| Error::Remote(format!("credential variable `{var}` is not set"))),
        }
    }
}

/// Why one text has no score.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RemoteError {
    #[error("authentication failed (HTTP {status})")]
    Auth { status: u16 },
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("server error HTTP {status} after {attempts} attempts")]
    Server { status: u16, attempts: u32 },
    #[error("request rejected (HTTP {status})")]
    Rejected { status: u16 },
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { message: String, attempts: u32 },
    #[error("malformed response: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// One JSON POST. `Err` means no HTTP response was received.
pub trait Transport: Sync {
    fn post_json(
        &self,
        url: &str,
        body: &str,
        credential: Option<&str>,
    ) -> std::result::Result<HttpResponse, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        Self {
            agent: ureq::Agent::new_with_config(config),
        }
    }
}

impl Transport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        body: &str,
        credential: Option<&str>,
    ) -> std::result::Result<HttpResponse, String> {
        let mut req = self
            .agent
            .post(url)
            .header("Content-Type", "application/json");
        if let Some(c) = credential {
            req = req.header("Authorization", format!("Bearer {c}"));
        }
        let mut resp = req.send(body).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

/// Scores `texts` over HTTP. Results are in input order, one per text.
///
/// `Err` is returned only for an invalid config or a missing credential;
/// failed batches surface as per-item errors.
pub fn score_remote<S: AsRef<str> + Sync>(
    texts: &[S],
    config: &RemoteScorerConfig,
) -> Result<Vec<std::result::Result<f64, RemoteError>>> {
    config.validate()?;
    let credential = config.credential()?;
    let transport = UreqTransport::new(config.timeout());
    Ok(score_remote_with(
        texts,
        config,
        &transport,
        credential.as_deref(),
    ))
}

/// [`score_remote`] over a caller-supplied transport. The config is assumed valid.
pub fn score_remote_with<S: AsRef<str> + Sync>(
    texts: &[S],
    config: &RemoteScorerConfig,
    transport: &dyn Transport,
    credential: Option<&str>,
) -> Vec<std::result::Result<f64, RemoteError>> {
    let batches: Vec<&[S]> = texts.chunks(config.batch_size.max(1)).collect();
    let slots: Mutex<Vec<Option<Vec<_>>>> = Mutex::new(vec![None; batches.len()]);
    let next = AtomicUsize::new(0);
    let workers = config.max_concurrency.clamp(1, batches.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(batch) = batches.get(i) else { break };
                let scored = score_batch(batch, config, transport, credential);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(scored);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .flat_map(|s| s.expect("every batch is scored"))
        .collect()
}

fn score_batch<S: AsRef<str>>(
    batch: &[S],
    config: &RemoteScorerConfig,
    transport: &dyn Transport,
    credential: Option<&str>,
) -> Vec<std::result::Result<f64, RemoteError>> {
    let texts: Vec<&str> = batch.iter().map(AsRef::as_ref).collect();
    let body = serde_json::json!({ "texts": texts }).to_string();
    let fail = |e: RemoteError| vec![Err(e); batch.len()];
    let mut last = None;
    for attempt in 1..=config.max_attempts {
        let error = match transport.post_json(&config.endpoint, &body, credential) {
            Ok(r) if (200..300).contains(&r.status) => return parse_scores(&r.body, batch.len()),
            Ok(r) if r.status == 401 || r.status == 403 => {
                return fail(RemoteError::Auth { status: r.status })
            }
            Ok(r) if r.status == 429 => RemoteError::RateLimited { attempts: attempt },
            Ok(r) if r.status >= 500 => RemoteError::Server {
                status: r.status,
                attempts: attempt,
            },
            Ok(r) => return fail(RemoteError::Rejected { status: r.status }),
            Err(message) => RemoteError::Transport {
                message,
                attempts: attempt,
            },
        };
        if attempt < config.max_attempts {
            let delay = config.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
            log::warn!("scoring batch failed ({error}); retrying in {delay} ms");
            std::thread::sleep(Duration::from_millis(delay));
        }
        last = Some(error);
    }
    fail(last.expect("at least one attempt"))
}

fn parse_scores(body: &str, expected: usize) -> Vec<std::result::Result<f64, RemoteError>> {
    let fail = |m: String| vec![Err(RemoteError::Malformed(m)); expected];
    let value: Value = match serde_json::from_str(body) {
        Ok(v) => v,
        Err(e) => return fail(format!("body is not JSON: {e}")),
    };
    let Some(scores) = value.get("scores").and_then(Value::as_array) else {
        return fail("missing `scores` array".into());
    };
    if scores.len() != expected {
        return fail(format!("{} scores for {expected} texts", scores.len()));
    }
    scores
        .iter()
        .map(|s| match s.as_f64() {
            Some(x) if (0.0..=1.0).contains(&x) => Ok(x),
            _ => Err(RemoteError::Malformed(format!(
                "score {s} is not a number in [0, 1]"
            ))),
        })
        .collect()
}
