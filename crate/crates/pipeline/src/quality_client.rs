//! Source-quality scoring: the remote model service with a local
//! heuristic fallback.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wikicite_core::quality::{apply_thresholds, heuristic_score, QualityThresholds};
use wikicite_core::{Article, QualityLabel};

pub const TRUNCATE_CHARS: usize = 2000;
pub const BATCH_SIZE: usize = 32;

#[derive(Debug, Error)]
pub enum QualityClientError {
    /// The service answered, but not in the agreed format.
    #[error("quality service protocol error: {0}")]
    Protocol(String),
}

#[derive(Debug, Serialize)]
struct ScoreRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Debug, Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub pairs: Vec<(f64, QualityLabel)>,
    pub fallback: bool,
}

pub fn truncate_chars(text: &str, n: usize) -> &str {
    match text.char_indices().nth(n) {
        Some((byte, _)) => &text[..byte],
        None => text,
    }
}

pub fn score_local(texts: &[&str], thresholds: &QualityThresholds) -> Vec<(f64, QualityLabel)> {
    texts
        .iter()
        .map(|t| {
            let raw = heuristic_score(t);
            (raw, apply_thresholds(raw, thresholds))
        })
        .collect()
}

/// Where raw scores come from.
#[derive(Debug, Clone)]
pub enum Scorer {
    Heuristic,
    Remote { endpoint: String, truncate_chars: usize, timeout: Duration },
}

impl Scorer {
    pub fn remote(endpoint: impl Into<String>) -> Self {
        Scorer::Remote { endpoint: endpoint.into(), truncate_chars: TRUNCATE_CHARS, timeout: Duration::from_secs(60) }
    }

    pub fn score(&self, texts: &[&str], thresholds: &QualityThresholds) -> Result<Scored, QualityClientError> {
        match self {
            Scorer::Heuristic => Ok(Scored { pairs: score_local(texts, thresholds), fallback: false }),
            Scorer::Remote { endpoint, truncate_chars, timeout } => {
                score_remote(texts, endpoint, *truncate_chars, *timeout, thresholds)
            }
        }
    }
}

/// POST `{"texts": [...]}` to the service. Transport failures and 5xx
/// answers fall back to the heuristic scorer; anything else that does not
/// match the contract is a protocol error.
pub fn score_remote(
    texts: &[&str],
    endpoint: &str,
    truncate: usize,
    timeout: Duration,
    thresholds: &QualityThresholds,
) -> Result<Scored, QualityClientError> {
    let body = ScoreRequest { texts: texts.iter().map(|t| truncate_chars(t, truncate)).collect() };
    let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().new_agent();
    let fallback = |why: String| {
        log::warn!("quality service unavailable ({why}); scoring batch of {} with the heuristic", texts.len());
        Ok(Scored { pairs: score_local(texts, thresholds), fallback: true })
    };
    let payload = serde_json::to_vec(&body).expect("request serializes");
    let response = match agent.post(endpoint).header("content-type", "application/json").send(&payload[..]) {
        Ok(r) => r,
        Err(e) => return fallback(e.to_string()),
    };
    let status = response.status().as_u16();
    if status >= 500 {
        return fallback(format!("HTTP {status}"));
    }
    let text = match response.into_body().read_to_string() {
        Ok(t) => t,
        Err(e) => return fallback(e.to_string()),
    };
    if status != 200 {
        return Err(QualityClientError::Protocol(format!("HTTP {status}: {text}")));
    }
    let parsed: ScoreResponse =
        serde_json::from_str(&text).map_err(|e| QualityClientError::Protocol(format!("bad response body: {e}")))?;
    if parsed.scores.len() != texts.len() || parsed.labels.len() != texts.len() {
        return Err(QualityClientError::Protocol(format!(
            "sent {} texts, got {} scores and {} labels",
            texts.len(),
            parsed.scores.len(),
            parsed.labels.len()
        )));
    }
    let mut pairs = Vec::with_capacity(texts.len());
    for (score, label) in parsed.scores.into_iter().zip(parsed.labels) {
        let label = QualityLabel::new(label).ok_or_else(|| QualityClientError::Protocol(format!("label {label} out of range")))?;
        if !score.is_finite() {
            return Err(QualityClientError::Protocol("non-finite score".into()));
        }
        pairs.push((score, label));
    }
    Ok(Scored { pairs, fallback: false })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityReport {
    pub scored: u64,
    pub fallback_scored: u64,
}

/// Label every citation that has source text but no raw score yet.
pub fn score_articles(
    articles: &mut [Article],
    scorer: &Scorer,
    thresholds: &QualityThresholds,
) -> Result<QualityReport, QualityClientError> {
    let pending = |c: &wikicite_core::Citation| c.source_text.is_some() && c.source_quality_raw_score.is_none();
    let texts: Vec<String> =
        articles.iter().flat_map(|a| a.citations()).filter(|c| pending(c)).filter_map(|c| c.source_text.clone()).collect();
    let mut report = QualityReport::default();
    let mut results = Vec::with_capacity(texts.len());
    for batch in texts.chunks(BATCH_SIZE) {
        let refs: Vec<&str> = batch.iter().map(String::as_str).collect();
        let scored = scorer.score(&refs, thresholds)?;
        if scored.fallback {
            report.fallback_scored += batch.len() as u64;
        }
        results.extend(scored.pairs);
    }
    report.scored = results.len() as u64;
    let mut it = results.into_iter();
    for a in articles.iter_mut() {
        let mut touched = false;
        for c in a.citations_mut().filter(|c| pending(c)) {
            if let Some((raw, label)) = it.next() {
                c.source_quality_raw_score = Some(raw);
                c.source_quality_label = Some(label);
                touched = true;
            }
        }
        if touched {
            wikicite_core::article::refresh_excerpts(a);
        }
    }
    Ok(report)
}
