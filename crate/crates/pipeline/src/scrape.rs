//! Source download, extraction and filtering for web citations.
//!
//! Download failures are reported in the wording of the Python `requests`
//! stack the published corpus was built with, so the stored messages fall
//! into the same taxonomy buckets.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use ureq::http::{StatusCode, Uri};
use wikicite_core::article::refresh_excerpts;
use wikicite_core::stats::{classify_scrape, ScrapeCategory};
use wikicite_core::{Article, Citation};

use crate::extract::extract_text;
use crate::now_iso;

pub const USER_AGENT: &str = "wikicite-scraper/0.1 (citation source collection for a research corpus)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScrapePolicy {
    pub timeout_seconds: f64,
    /// Limit on decoded characters, not bytes.
    pub max_chars: usize,
    pub min_tokens: usize,
    pub max_concurrent: usize,
    pub per_host_delay_ms: u64,
    /// Extra attempts after a download error.
    pub retries: u32,
    pub max_redirects: u32,
}

impl Default for ScrapePolicy {
    fn default() -> Self {
        ScrapePolicy {
            timeout_seconds: 10.0,
            max_chars: 1_000_000,
            min_tokens: 100,
            max_concurrent: 16,
            per_host_delay_ms: 1000,
            retries: 0,
            max_redirects: 5,
        }
    }
}

impl ScrapePolicy {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.timeout_seconds.is_finite() && self.timeout_seconds > 0.0) {
            return Err("timeout_seconds must be positive".into());
        }
        if self.max_chars == 0 || self.min_tokens == 0 || self.max_concurrent == 0 {
            return Err("max_chars, min_tokens and max_concurrent must be positive".into());
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_seconds)
    }

    /// Bodies above this many bytes cannot decode to `max_chars` or fewer.
    pub fn byte_limit(&self) -> u64 {
        self.max_chars as u64 * 4
    }
}

/// A received HTTP response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedBody {
    pub status: u16,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

/// Transport for source downloads. `Err` carries a download-error message.
pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &str, policy: &ScrapePolicy) -> Result<FetchedBody, String>;
}

pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(policy: &ScrapePolicy) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(policy.timeout()))
            .http_status_as_error(false)
            .max_redirects(policy.max_redirects)
            .user_agent(USER_AGENT)
            .build()
            .new_agent();
        HttpFetcher { agent }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str, policy: &ScrapePolicy) -> Result<FetchedBody, String> {
        let target = Target::parse(url)?;
        let response = self.agent.get(url).call().map_err(|e| target.describe(&e, policy))?;
        let status = response.status().as_u16();
        let content_type =
            response.headers().get("content-type").and_then(|v| v.to_str().ok()).map(|s| s.trim().to_string());
        let body = response
            .into_body()
            .with_config()
            .limit(policy.byte_limit())
            .read_to_vec()
            .map_err(|e| target.describe(&e, policy))?;
        Ok(FetchedBody { status, content_type, body })
    }
}

struct Target {
    scheme: String,
    host: String,
    port: u16,
    path: String,
}

impl Target {
    fn parse(url: &str) -> Result<Target, String> {
        let uri: Uri = url.parse().map_err(|_| format!("InvalidURL: Failed to parse: {url}"))?;
        let scheme = uri.scheme_str().unwrap_or("").to_ascii_lowercase();
        if scheme != "http" && scheme != "https" {
            return Err(format!("InvalidSchema: No connection adapters were found for '{url}'"));
        }
        let host = uri.host().ok_or_else(|| format!("InvalidURL: No host supplied: {url}"))?.to_string();
        let port = uri.port_u16().unwrap_or(if scheme == "https" { 443 } else { 80 });
        let path = uri.path_and_query().map_or("/".to_string(), |p| p.to_string());
        Ok(Target { scheme, host, port, path })
    }

    fn pool(&self) -> String {
        let kind = if self.scheme == "https" { "HTTPSConnectionPool" } else { "HTTPConnectionPool" };
        format!("{kind}(host='{}', port={})", self.host, self.port)
    }

    fn max_retries(&self, cause: &str) -> String {
        format!("{}: Max retries exceeded with url: {} (Caused by {cause})", self.pool(), self.path)
    }

    fn read_timeout(&self, policy: &ScrapePolicy) -> String {
        format!("ReadTimeout: {}: Read timed out. (read timeout={})", self.pool(), policy.timeout_seconds)
    }

    fn describe(&self, err: &ureq::Error, policy: &ScrapePolicy) -> String {
        use ureq::Error as E;
        match err {
            E::Timeout(ureq::Timeout::Connect) | E::Timeout(ureq::Timeout::Resolve) => self.max_retries(&format!(
                "ConnectTimeoutError('Connection to {} timed out. (connect timeout={})')",
                self.host, policy.timeout_seconds
            )),
            E::Timeout(_) => self.read_timeout(policy),
            E::HostNotFound => {
                self.max_retries(&format!("NameResolutionError(\"Failed to resolve '{}'\")", self.host))
            }
            E::ConnectionFailed => {
                self.max_retries("NewConnectionError('Failed to establish a new connection: Connection refused')")
            }
            E::Io(e) => match e.kind() {
                io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => self.read_timeout(policy),
                io::ErrorKind::ConnectionRefused
                | io::ErrorKind::ConnectionReset
                | io::ErrorKind::ConnectionAborted
                | io::ErrorKind::NotConnected
                | io::ErrorKind::AddrNotAvailable => {
                    self.max_retries(&format!("NewConnectionError('Failed to establish a new connection: {e}')"))
                }
                _ => format!("ConnectionError: {e}"),
            },
            E::BodyExceedsLimit(_) => too_large_message(policy.byte_limit() + 1),
            E::TooManyRedirects => format!("TooManyRedirects: Exceeded {} redirects.", policy.max_redirects),
            E::Tls(m) => self.max_retries(&format!("SSLError({m})")),
            E::Rustls(e) => self.max_retries(&format!("SSLError({e})")),
            other => format!("ConnectionError: {other}"),
        }
    }
}

fn too_large_message(bytes: u64) -> String {
    format!("Download is too large ({:.1} MB)", bytes as f64 / 1_000_000.0)
}

/// Body decoded to text, with its Content-Type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Downloaded {
    pub status: u16,
    pub content_type: Option<String>,
    pub text: String,
    pub num_chars: u64,
}

/// Decode with the Content-Type charset when it names a known encoding,
/// otherwise UTF-8 with replacement characters.
pub fn decode_body(body: &[u8], content_type: Option<&str>) -> String {
    let label = content_type.and_then(|ct| {
        ct.split(';').skip(1).find_map(|param| {
            let (k, v) = param.split_once('=')?;
            k.trim().eq_ignore_ascii_case("charset").then(|| v.trim().trim_matches('"').to_string())
        })
    });
    let encoding = label
        .and_then(|l| encoding_rs::Encoding::for_label(l.as_bytes()))
        .unwrap_or(encoding_rs::UTF_8);
    encoding.decode(body).0.into_owned()
}

pub fn download(fetcher: &dyn Fetcher, url: &str, policy: &ScrapePolicy) -> Result<Downloaded, String> {
    let mut attempt = 0;
    let fetched = loop {
        match fetcher.fetch(url, policy) {
            Ok(f) => break f,
            Err(e) if attempt >= policy.retries => return Err(e),
            Err(_) => attempt += 1,
        }
    };
    let text = decode_body(&fetched.body, fetched.content_type.as_deref());
    let num_chars = text.chars().count() as u64;
    if num_chars > policy.max_chars as u64 {
        return Err(too_large_message(fetched.body.len() as u64));
    }
    Ok(Downloaded { status: fetched.status, content_type: fetched.content_type, text, num_chars })
}

/// Fewer than `min_tokens` whitespace-separated tokens fails.
pub fn token_filter(text: &str, policy: &ScrapePolicy) -> Result<(), String> {
    let n = text.split_whitespace().count();
    if n < policy.min_tokens {
        Err(format!("Text is too short ({n} words)"))
    } else {
        Ok(())
    }
}

pub fn http_error_message(status: u16) -> String {
    let reason = StatusCode::from_u16(status).ok().and_then(|s| s.canonical_reason()).unwrap_or("unknown status");
    format!("HTTP {status} ({})", reason.to_lowercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrapeStatus {
    Success,
    DownloadError,
    ExtractError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrapeOutcome {
    pub status: ScrapeStatus,
    pub content_type: Option<String>,
    pub num_chars: Option<u64>,
    pub text: Option<String>,
    pub error_message: Option<String>,
    pub download_date: String,
}

impl ScrapeOutcome {
    /// Overwrite the citation's source fields. Snippet, quality and
    /// identity fields are left alone.
    pub fn apply(&self, c: &mut Citation) {
        c.source_text = self.text.clone();
        c.source_code_content_type = self.content_type.clone();
        c.source_code_num_chars = self.num_chars;
        c.source_code_num_bytes = None;
        c.source_download_date = Some(self.download_date.clone());
        c.source_download_error = None;
        c.source_extract_error = None;
        match self.status {
            ScrapeStatus::DownloadError => c.source_download_error = self.error_message.clone(),
            ScrapeStatus::ExtractError => c.source_extract_error = self.error_message.clone(),
            ScrapeStatus::Success => {}
        }
    }
}

pub fn scrape_url(url: &str, fetcher: &dyn Fetcher, policy: &ScrapePolicy) -> ScrapeOutcome {
    let result = download(fetcher, url, policy);
    let download_date = now_iso();
    let d = match result {
        Ok(d) => d,
        Err(message) => {
            return ScrapeOutcome {
                status: ScrapeStatus::DownloadError,
                content_type: None,
                num_chars: None,
                text: None,
                error_message: Some(message),
                download_date,
            }
        }
    };
    let extract_error = |message: String| ScrapeOutcome {
        status: ScrapeStatus::ExtractError,
        content_type: d.content_type.clone(),
        num_chars: Some(d.num_chars),
        text: None,
        error_message: Some(message),
        download_date: download_date.clone(),
    };
    if !(200..300).contains(&d.status) {
        return extract_error(http_error_message(d.status));
    }
    let text = match extract_text(&d.text, d.content_type.as_deref().unwrap_or("")) {
        Ok(t) => t,
        Err(message) => return extract_error(message),
    };
    if let Err(message) = token_filter(&text, policy) {
        return extract_error(message);
    }
    ScrapeOutcome {
        status: ScrapeStatus::Success,
        content_type: d.content_type.clone(),
        num_chars: Some(d.num_chars),
        text: Some(text),
        error_message: None,
        download_date,
    }
}

/// Scrape one citation in place. Citations without a URL are untouched.
pub fn scrape_citation(citation: &mut Citation, fetcher: &dyn Fetcher, policy: &ScrapePolicy) {
    if let Some(url) = citation.url.clone() {
        scrape_url(&url, fetcher, policy).apply(citation);
    }
}

/// Serializes requests per host; each starts at least `delay` after the
/// previous one to that host finished.
pub struct HostPacer {
    delay: Duration,
    hosts: Mutex<HashMap<String, Arc<Mutex<Option<Instant>>>>>,
}

impl HostPacer {
    pub fn new(delay: Duration) -> Self {
        HostPacer { delay, hosts: Mutex::new(HashMap::new()) }
    }

    pub fn run<T>(&self, host: &str, f: impl FnOnce() -> T) -> T {
        let slot = {
            let mut hosts = self.hosts.lock().unwrap_or_else(|e| e.into_inner());
            hosts.entry(host.to_string()).or_default().clone()
        };
        let mut last = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(prev) = *last {
            let ready = prev + self.delay;
            let now = Instant::now();
            if ready > now {
                std::thread::sleep(ready - now);
            }
        }
        let out = f();
        *last = Some(Instant::now());
        out
    }
}

pub fn host_of(url: &str) -> String {
    url.parse::<Uri>().ok().and_then(|u| u.host().map(str::to_ascii_lowercase)).unwrap_or_default()
}

/// Order URLs round-robin across hosts so concurrent workers rarely wait
/// on the same host.
fn interleave_hosts(urls: Vec<String>) -> Vec<String> {
    let mut by_host: BTreeMap<String, VecDeque<String>> = BTreeMap::new();
    for u in urls {
        by_host.entry(host_of(&u)).or_default().push_back(u);
    }
    let mut out = Vec::new();
    while !by_host.is_empty() {
        by_host.retain(|_, q| {
            if let Some(u) = q.pop_front() {
                out.push(u);
            }
            !q.is_empty()
        });
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScrapeReport {
    pub urls_fetched: u64,
    pub citations_updated: u64,
    pub categories: BTreeMap<ScrapeCategory, u64>,
}

/// Scrape every not-yet-attempted web citation in `articles`. Each distinct
/// URL is fetched once; citations already carrying a download date keep
/// their fields.
pub fn scrape_articles(
    articles: &mut [Article],
    fetcher: &dyn Fetcher,
    policy: &ScrapePolicy,
    pacer: &HostPacer,
) -> ScrapeReport {
    let pending = |c: &Citation| c.url.is_some() && c.source_download_date.is_none();
    let mut urls: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for a in articles.iter() {
        for c in a.citations().filter(|c| pending(c)) {
            let url = c.url.clone().unwrap_or_default();
            if seen.insert(url.clone()) {
                urls.push(url);
            }
        }
    }
    let mut report = ScrapeReport::default();
    if urls.is_empty() {
        return report;
    }
    let urls = interleave_hosts(urls);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(policy.max_concurrent.max(1)).build().expect("thread pool");
    let outcomes: HashMap<String, ScrapeOutcome> = pool.install(|| {
        urls.par_iter()
            .with_max_len(1)
            .map(|u| (u.clone(), pacer.run(&host_of(u), || scrape_url(u, fetcher, policy))))
            .collect()
    });
    report.urls_fetched = outcomes.len() as u64;
    for a in articles.iter_mut() {
        let mut touched = false;
        for c in a.citations_mut().filter(|c| pending(c)) {
            if let Some(o) = c.url.as_ref().and_then(|u| outcomes.get(u)) {
                o.apply(c);
                touched = true;
                report.citations_updated += 1;
                if let Some(cat) = classify_scrape(c) {
                    *report.categories.entry(cat).or_insert(0) += 1;
                }
            }
        }
        if touched {
            refresh_excerpts(a);
        }
    }
    report
}
