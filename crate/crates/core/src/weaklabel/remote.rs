//! HTTP client for a served classifier.
//!
//! Wire protocol: `POST {endpoint}/classify` with body
//! `{"texts": ["...", ...]}`; the service answers
//! `{"labels": ["HATE"|"NONE", ...], "scores": [0.97, ...]}` where
//! `scores` is optional (1.0 assumed). Non-200 responses, transport
//! errors, and length mismatches are retried with exponential backoff;
//! after the attempts are exhausted the batch fails with
//! `RemoteUnavailable`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Annotator, AnnotatorError};
use crate::normalize::CleanText;
use crate::task::{Alphabet, ClassLabel};

/// Environment variable holding the annotator endpoint URL.
pub const ENDPOINT_ENV: &str = "HSD_ANNOTATOR_URL";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    pub endpoint: String,
    /// Per-request timeout.
    pub timeout: Duration,
    /// Total attempts per batch (first try included).
    pub attempts: u32,
    /// First backoff delay; doubles per retry.
    pub backoff: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: String::new(),
            timeout: Duration::from_secs(30),
            attempts: 3,
            backoff: Duration::from_millis(200),
        }
    }
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<String>,
    #[serde(default)]
    scores: Option<Vec<f64>>,
}

pub struct RemoteAnnotator {
    config: RemoteConfig,
    url: String,
    agent: ureq::Agent,
    id: String,
}

impl RemoteAnnotator {
    pub fn new(config: RemoteConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let url = if config.endpoint.ends_with("/classify") {
            config.endpoint.clone()
        } else {
            format!("{}/classify", config.endpoint.trim_end_matches('/'))
        };
        let id = format!("remote:{url}");
        RemoteAnnotator {
            config,
            url,
            agent,
            id,
        }
    }

    /// Builds an annotator from `HSD_ANNOTATOR_URL`.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV).ok()?;
        if endpoint.is_empty() {
            return None;
        }
        Some(Self::new(RemoteConfig {
            endpoint,
            ..RemoteConfig::default()
        }))
    }

    fn try_batch(&self, texts: &[CleanText]) -> Result<Vec<(ClassLabel, f64)>, String> {
        let request = ClassifyRequest {
            texts: texts.iter().map(CleanText::text).collect(),
        };
        let mut response = self
            .agent
            .post(&self.url)
            .send_json(&request)
            .map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        if status != 200 {
            return Err(format!("HTTP {status}"));
        }
        let parsed: ClassifyResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| format!("bad response body: {e}"))?;
        if parsed.labels.len() != texts.len() {
            return Err(format!(
                "length mismatch: sent {} texts, got {} labels",
                texts.len(),
                parsed.labels.len()
            ));
        }
        if let Some(scores) = &parsed.scores {
            if scores.len() != texts.len() {
                return Err(format!(
                    "length mismatch: sent {} texts, got {} scores",
                    texts.len(),
                    scores.len()
                ));
            }
        }
        let mut out = Vec::with_capacity(texts.len());
        for (i, name) in parsed.labels.iter().enumerate() {
            let label = Alphabet::Binary
                .parse(name)
                .map_err(|_| format!("unknown label {name:?} at index {i}"))?;
            let score = parsed.scores.as_ref().map_or(1.0, |s| s[i]);
            out.push((label, score));
        }
        Ok(out)
    }
}

impl Annotator for RemoteAnnotator {
    fn classify_batch(
        &self,
        texts: &[CleanText],
    ) -> Result<Vec<(ClassLabel, f64)>, AnnotatorError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let mut last_error = String::new();
        for attempt in 0..self.config.attempts {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff * 2u32.pow(attempt - 1));
            }
            match self.try_batch(texts) {
                Ok(out) => return Ok(out),
                Err(reason) => last_error = reason,
            }
        }
        Err(AnnotatorError::RemoteUnavailable {
            attempts: self.config.attempts,
            reason: last_error,
        })
    }

    fn id(&self) -> &str {
        &self.id
    }
}
