//! Cross-lingual links and creation dates from the MediaWiki Action API.

use std::collections::BTreeMap;
use std::path::Path;
use std::thread::sleep;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use wikicite_core::Article;

use crate::chunk::{encode_chunk, read_chunk, write_chunk, ChunkError};
use crate::now_iso;

pub const USER_AGENT: &str = "wikicite-enrich/0.1 (corpus metadata collection)";

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("HTTP {0} from the Action API")]
    Http(u16),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("API error: {0}")]
    Api(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: Box<EnrichError> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnrichConfig {
    pub endpoint: String,
    /// Requests per second.
    pub rate: f64,
    pub backoff_base_ms: u64,
    pub backoff_cap_ms: u64,
    pub max_attempts: u32,
    pub timeout_seconds: f64,
}

impl Default for EnrichConfig {
    fn default() -> Self {
        EnrichConfig {
            endpoint: String::new(),
            rate: 1.0,
            backoff_base_ms: 1000,
            backoff_cap_ms: 60_000,
            max_attempts: 5,
            timeout_seconds: 30.0,
        }
    }
}

impl EnrichConfig {
    pub fn for_language(language: &str) -> Self {
        EnrichConfig { endpoint: format!("https://{language}.wikipedia.org/w/api.php"), ..Default::default() }
    }

    /// Wait before retry number `retry` (0-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let ms = self.backoff_base_ms.saturating_mul(1u64 << retry.min(32)).min(self.backoff_cap_ms);
        Duration::from_millis(ms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangLinkSet {
    pub links: BTreeMap<String, String>,
    pub access_date: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionInfo {
    pub first_revision: String,
    pub access_date: String,
}

/// Keeps at least `1 / rate` seconds between the end of one request and the
/// start of the next, so the server never sees two arrivals closer than that.
#[derive(Debug)]
pub struct RatePacer {
    interval: Duration,
    last: Option<Instant>,
}

impl RatePacer {
    pub fn new(rate: f64) -> Self {
        let interval = if rate > 0.0 && rate.is_finite() { Duration::from_secs_f64(1.0 / rate) } else { Duration::ZERO };
        RatePacer { interval, last: None }
    }

    pub fn wait(&mut self) {
        if let Some(last) = self.last {
            let ready = last + self.interval;
            let now = Instant::now();
            if ready > now {
                sleep(ready - now);
            }
        }
    }

    pub fn done(&mut self) {
        self.last = Some(Instant::now());
    }
}

/// What one page lookup found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PageInfo {
    pub langlinks: BTreeMap<String, String>,
    pub first_revision: Option<String>,
}

pub struct ActionApiClient {
    agent: ureq::Agent,
    config: EnrichConfig,
    language: String,
    pacer: RatePacer,
    pub requests: u64,
    pub retries: u64,
}

impl ActionApiClient {
    pub fn new(config: EnrichConfig, language: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_seconds.max(0.001))))
            .http_status_as_error(false)
            .user_agent(USER_AGENT)
            .build()
            .new_agent();
        ActionApiClient { agent, pacer: RatePacer::new(config.rate), config, language: language.to_string(), requests: 0, retries: 0 }
    }

    fn get_once(&mut self, params: &[(String, String)]) -> Result<Value, EnrichError> {
        self.pacer.wait();
        self.requests += 1;
        let result = self.request(params);
        self.pacer.done();
        result
    }

    fn request(&self, params: &[(String, String)]) -> Result<Value, EnrichError> {
        let response = self
            .agent
            .get(&self.config.endpoint)
            .query_pairs(params.iter().map(|(k, v)| (k.as_str(), v.as_str())))
            .call()
            .map_err(|e| EnrichError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        if status != 200 {
            return Err(EnrichError::Http(status));
        }
        let text = response.into_body().read_to_string().map_err(|e| EnrichError::Transport(e.to_string()))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| EnrichError::Protocol(format!("invalid JSON: {e}")))?;
        if let Some(err) = value.get("error") {
            let code = err.get("code").and_then(Value::as_str).unwrap_or("unknown");
            return Err(EnrichError::Api(code.to_string()));
        }
        Ok(value)
    }

    /// One logical request with exponential backoff on rate limiting,
    /// server errors and transport failures.
    pub fn get(&mut self, params: &[(String, String)]) -> Result<Value, EnrichError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let err = match self.get_once(params) {
                Ok(v) => return Ok(v),
                Err(e) => e,
            };
            let retryable = match &err {
                EnrichError::Http(s) => *s == 429 || *s >= 500,
                EnrichError::Transport(_) => true,
                EnrichError::Api(code) => code == "ratelimited" || code == "maxlag",
                _ => false,
            };
            if !retryable {
                return Err(err);
            }
            if attempt >= self.config.max_attempts {
                return Err(EnrichError::Exhausted { attempts: attempt, last: Box::new(err) });
            }
            log::debug!("Action API retry {attempt} after {err}");
            self.retries += 1;
            sleep(self.config.backoff(attempt - 1));
        }
    }

    /// Langlinks and/or the earliest revision for `title`, following
    /// langlink continuation. Redirects are not resolved. `None` when the
    /// page does not exist.
    pub fn page_info(&mut self, title: &str, links: bool, revision: bool) -> Result<Option<PageInfo>, EnrichError> {
        let mut props = Vec::new();
        let mut base: Vec<(String, String)> = [("action", "query"), ("format", "json"), ("formatversion", "2")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        base.push(("titles".into(), title.to_string()));
        if links {
            props.push("langlinks");
            base.push(("lllimit".into(), "max".into()));
        }
        if revision {
            props.push("revisions");
            base.extend([("rvlimit", "1"), ("rvdir", "newer"), ("rvprop", "timestamp")].map(|(k, v)| (k.into(), v.into())));
        }
        base.push(("prop".into(), props.join("|")));

        let mut info = PageInfo::default();
        let mut cont: Vec<(String, String)> = Vec::new();
        loop {
            let mut params = base.clone();
            params.extend(cont.iter().cloned());
            let value = self.get(&params)?;
            let page = match parse_page(&value, &self.language)? {
                Some(p) => p,
                None => return Ok(None),
            };
            info.langlinks.extend(page.langlinks);
            if info.first_revision.is_none() {
                info.first_revision = page.first_revision;
            }
            cont = continuation(&value);
            // Revisions with rvlimit=1 never need another page; stop once
            // only revision continuation is left.
            if cont.is_empty() || !cont.iter().any(|(k, _)| k == "llcontinue") {
                return Ok(Some(info));
            }
        }
    }

    pub fn fetch_langlinks(&mut self, title: &str) -> Result<Option<LangLinkSet>, EnrichError> {
        let info = self.page_info(title, true, false)?;
        Ok(info.map(|i| LangLinkSet { links: i.langlinks, access_date: now_iso() }))
    }

    pub fn fetch_first_revision(&mut self, title: &str) -> Result<Option<RevisionInfo>, EnrichError> {
        let info = self.page_info(title, false, true)?;
        Ok(info.and_then(|i| i.first_revision).map(|first_revision| RevisionInfo { first_revision, access_date: now_iso() }))
    }
}

fn continuation(value: &Value) -> Vec<(String, String)> {
    value
        .get("continue")
        .and_then(Value::as_object)
        .map(|m| m.iter().filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string()))).collect())
        .unwrap_or_default()
}

/// The single page of a `query` response. `Ok(None)` for missing or
/// invalid titles.
pub fn parse_page(value: &Value, self_language: &str) -> Result<Option<PageInfo>, EnrichError> {
    let pages = value
        .pointer("/query/pages")
        .ok_or_else(|| EnrichError::Protocol("response has no query.pages".into()))?;
    // formatversion=2 gives an array, the legacy format an object keyed by page id.
    let page = match pages {
        Value::Array(a) => a.first(),
        Value::Object(m) => m.values().next(),
        _ => None,
    }
    .ok_or_else(|| EnrichError::Protocol("query.pages is empty".into()))?;
    let flag = |k: &str| page.get(k).is_some_and(|v| !matches!(v, Value::Bool(false)));
    if flag("missing") || flag("invalid") {
        return Ok(None);
    }
    let mut info = PageInfo::default();
    if let Some(links) = page.get("langlinks") {
        let links = links.as_array().ok_or_else(|| EnrichError::Protocol("langlinks is not a list".into()))?;
        for link in links {
            let lang = link.get("lang").and_then(Value::as_str);
            let title = link.get("title").or_else(|| link.get("*")).and_then(Value::as_str);
            match (lang, title) {
                (Some(l), Some(t)) if l != self_language => {
                    info.langlinks.insert(l.to_string(), t.to_string());
                }
                (Some(_), Some(_)) => {}
                _ => return Err(EnrichError::Protocol(format!("malformed langlink {link}"))),
            }
        }
    }
    if let Some(revs) = page.get("revisions") {
        let ts = revs
            .pointer("/0/timestamp")
            .and_then(Value::as_str)
            .ok_or_else(|| EnrichError::Protocol("revision without timestamp".into()))?;
        chrono::DateTime::parse_from_rfc3339(ts)
            .map_err(|e| EnrichError::Protocol(format!("malformed timestamp {ts:?}: {e}")))?;
        info.first_revision = Some(ts.to_string());
    }
    Ok(Some(info))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichReport {
    pub enriched: u64,
    pub missing: u64,
    pub skipped: u64,
    pub failed: u64,
}

fn is_stamped(a: &Article) -> bool {
    a.cross_lingual_links_access_date.is_some() && a.first_revision_access_date.is_some()
}

/// Enrich articles one at a time. Already-stamped articles are skipped;
/// missing pages get access dates but no data; failures leave the article
/// untouched.
pub fn enrich_articles(articles: &mut [Article], client: &mut ActionApiClient) -> EnrichReport {
    let mut report = EnrichReport::default();
    for a in articles.iter_mut() {
        if is_stamped(a) {
            report.skipped += 1;
            continue;
        }
        match client.page_info(&a.title, true, true) {
            Ok(found) => {
                let access = now_iso();
                match found {
                    Some(info) => {
                        a.cross_lingual_links = Some(info.langlinks);
                        a.first_revision = info.first_revision;
                        report.enriched += 1;
                    }
                    None => report.missing += 1,
                }
                a.cross_lingual_links_access_date = Some(access.clone());
                a.first_revision_access_date = Some(access);
            }
            Err(e) => {
                log::warn!("enrich {:?}: {e}", a.title);
                report.failed += 1;
            }
        }
    }
    report
}

/// Enrich a chunk file in place (atomic replace). Unchanged chunks are not
/// rewritten.
pub fn enrich_chunk(path: &Path, client: &mut ActionApiClient) -> Result<EnrichReport, ChunkError> {
    let mut articles = read_chunk(path)?;
    let before = encode_chunk(&articles);
    let report = enrich_articles(&mut articles, client);
    if encode_chunk(&articles) != before {
        write_chunk(path, &articles)?;
    }
    Ok(report)
}
