#![allow(dead_code)]

use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use tiny_http::{Header, Response, Server};

#[derive(Debug, Clone)]
pub struct Logged {
    pub method: String,
    /// Path plus query string.
    pub url: String,
    pub body: String,
    pub at: Instant,
}

impl Logged {
    pub fn path(&self) -> &str {
        self.url.split('?').next().unwrap_or("")
    }

    /// Decoded query parameter.
    pub fn param(&self, key: &str) -> Option<String> {
        let query = self.url.split_once('?')?.1;
        query.split('&').find_map(|kv| {
            let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
            (percent_decode(k) == key).then(|| percent_decode(v))
        })
    }
}

pub fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'+' => out.push(b' '),
            b'%' if i + 2 < bytes.len() => {
                let hex = std::str::from_utf8(&bytes[i + 1..i + 3]).ok().and_then(|h| u8::from_str_radix(h, 16).ok());
                match hex {
                    Some(b) => {
                        out.push(b);
                        i += 2;
                    }
                    None => out.push(b'%'),
                }
            }
            b => out.push(b),
        }
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

#[derive(Debug, Clone)]
pub struct Reply {
    pub status: u16,
    pub content_type: Option<String>,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
    pub delay: Duration,
}

impl Reply {
    pub fn new(status: u16, content_type: &str, body: impl Into<Vec<u8>>) -> Self {
        Reply { status, content_type: Some(content_type.into()), headers: Vec::new(), body: body.into(), delay: Duration::ZERO }
    }

    pub fn html(body: impl Into<String>) -> Self {
        Reply::new(200, "text/html", body.into().into_bytes())
    }

    pub fn json(body: &serde_json::Value) -> Self {
        Reply::new(200, "application/json", body.to_string().into_bytes())
    }

    pub fn status(status: u16) -> Self {
        Reply::new(status, "text/html", format!("<html><body><h1>Error {status}</h1></body></html>").into_bytes())
    }

    pub fn after(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn header(mut self, k: &str, v: &str) -> Self {
        self.headers.push((k.into(), v.into()));
        self
    }
}

type Handler = dyn Fn(&Logged) -> Reply + Send + Sync;

/// Local HTTP server answering every request from `handler`, one thread
/// per request so slow replies do not block others.
pub struct MockServer {
    server: Arc<Server>,
    pub base: String,
    pub log: Arc<Mutex<Vec<Logged>>>,
    accept: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start(handler: impl Fn(&Logged) -> Reply + Send + Sync + 'static) -> Self {
        let server = Arc::new(Server::http("127.0.0.1:0").expect("bind mock server"));
        let port = server.server_addr().to_ip().expect("ip listener").port();
        let log = Arc::new(Mutex::new(Vec::new()));
        let handler: Arc<Handler> = Arc::new(handler);
        let accept = {
            let server = server.clone();
            let log = log.clone();
            thread::spawn(move || {
                for mut request in server.incoming_requests() {
                    let at = Instant::now();
                    let mut body = String::new();
                    let _ = request.as_reader().read_to_string(&mut body);
                    let entry = Logged { method: request.method().to_string(), url: request.url().to_string(), body, at };
                    log.lock().unwrap().push(entry.clone());
                    let handler = handler.clone();
                    thread::spawn(move || {
                        let reply = handler(&entry);
                        if !reply.delay.is_zero() {
                            thread::sleep(reply.delay);
                        }
                        let mut response = Response::from_data(reply.body).with_status_code(reply.status);
                        if let Some(ct) = reply.content_type {
                            response.add_header(Header::from_bytes("Content-Type", ct).unwrap());
                        }
                        for (k, v) in reply.headers {
                            response.add_header(Header::from_bytes(k, v).unwrap());
                        }
                        let _ = request.respond(response);
                    });
                }
            })
        };
        MockServer { server, base: format!("http://127.0.0.1:{port}"), log, accept: Some(accept) }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn requests(&self) -> Vec<Logged> {
        self.log.lock().unwrap().clone()
    }

    pub fn request_count(&self) -> usize {
        self.log.lock().unwrap().len()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

/// `n` distinct words of prose.
pub fn words(n: usize) -> String {
    (0..n).map(|i| format!("word{i}")).collect::<Vec<_>>().join(" ")
}

/// An HTML article page with `n` words of body text.
pub fn article_html(n: usize) -> String {
    format!(
        "<html><head><title>Source</title><script>var x = 1;</script></head><body><nav>Home About</nav><article><p>{}</p></article></body></html>",
        words(n)
    )
}

/// A localhost port with nothing listening on it.
pub fn closed_port() -> u16 {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    l.local_addr().unwrap().port()
}

pub fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn page_xml(title: &str, text: &str, timestamp: &str) -> String {
    format!(
        "  <page>\n    <title>{}</title>\n    <ns>0</ns>\n    <id>1</id>\n    <revision>\n      <id>2</id>\n      <timestamp>{timestamp}</timestamp>\n      <model>wikitext</model>\n      <text bytes=\"{}\" xml:space=\"preserve\">{}</text>\n    </revision>\n  </page>\n",
        xml_escape(title),
        text.len(),
        xml_escape(text)
    )
}

pub const DUMP_HEAD: &str = "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.11/\" version=\"0.11\" xml:lang=\"en\">\n  <siteinfo>\n    <sitename>Wikipedia</sitename>\n  </siteinfo>\n";
pub const DUMP_TAIL: &str = "</mediawiki>\n";

/// A dump document holding `(title, wikitext)` pages.
pub fn dump_xml<'a>(pages: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut out = DUMP_HEAD.to_string();
    for (title, text) in pages {
        out.push_str(&page_xml(title, text, "2024-05-01T12:00:00Z"));
    }
    out.push_str(DUMP_TAIL);
    out
}

/// In-process scraper backend. Paths ending in a number get an article
/// page; `/missing…` is a 404; anything else is a connection failure.
#[derive(Default)]
pub struct MockFetcher {
    pub calls: Mutex<Vec<String>>,
}

impl MockFetcher {
    pub fn call_count(&self) -> usize {
        self.calls.lock().unwrap().len()
    }
}

impl wikicite_pipeline::scrape::Fetcher for MockFetcher {
    fn fetch(
        &self,
        url: &str,
        _policy: &wikicite_pipeline::scrape::ScrapePolicy,
    ) -> Result<wikicite_pipeline::scrape::FetchedBody, String> {
        self.calls.lock().unwrap().push(url.to_string());
        let last = url.rsplit('/').next().unwrap_or("");
        let page = |status: u16, body: String| wikicite_pipeline::scrape::FetchedBody {
            status,
            content_type: Some("text/html; charset=utf-8".into()),
            body: body.into_bytes(),
        };
        if last.parse::<u64>().is_ok() {
            Ok(page(200, format!("<html><body><p>Source {last}. {}</p></body></html>", words(120))))
        } else if last.starts_with("missing") {
            Ok(page(404, "<html><body>Not found</body></html>".into()))
        } else {
            Err(format!("HTTPSConnectionPool(host='{}', port=443): Max retries exceeded with url: /{last} (Caused by NewConnectionError('Failed to establish a new connection'))", url.split('/').nth(2).unwrap_or("")))
        }
    }
}

/// 2500 ordinary articles with redirect, stub and category pages mixed in.
/// Returns the XML, the titles that survive filtering and those that do not.
pub fn filter_fixture_dump() -> (String, Vec<String>, Vec<String>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut body = DUMP_HEAD.to_string();
    for i in 0..2500 {
        let title = format!("Article {i}");
        body.push_str(&page_xml(&title, &format!("'''{title}''' is a topic.<ref>{{{{cite web|url=https://example.org/{i}}}}}</ref>"), "2024-01-01T00:00:00Z"));
        kept.push(title);
        if i % 100 == 7 {
            let fixtures = [
                (format!("Redirect {i}"), "#REDIRECT [[Article 1]]".to_string()),
                (format!("Lower redirect {i}"), "#redirect [[Article 2]] {{R from move}}".to_string()),
                (format!("Stub site {i}"), "Example.com is a website.\n\n{{website-stub}}".to_string()),
                (format!("Category:Things {i}"), "Pages about things.".to_string()),
            ];
            for (t, text) in fixtures {
                body.push_str(&page_xml(&t, &text, "2024-01-01T00:00:00Z"));
                dropped.push(t);
            }
        }
    }
    body.push_str(DUMP_TAIL);
    (body, kept, dropped)
}
