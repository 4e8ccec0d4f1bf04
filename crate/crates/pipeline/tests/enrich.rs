mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use common::{Logged, MockServer, Reply};
use serde_json::{json, Value};
use wikicite_core::Article;
use wikicite_pipeline::chunk::{read_chunk, write_chunk};
use wikicite_pipeline::enrich::{enrich_articles, enrich_chunk, ActionApiClient, EnrichConfig, EnrichError};

fn page(title: &str, links: &[(&str, &str)], first: Option<&str>) -> Value {
    let mut p = json!({ "pageid": 7, "ns": 0, "title": title });
    if !links.is_empty() {
        p["langlinks"] = links.iter().map(|(l, t)| json!({ "lang": l, "title": t })).collect();
    }
    if let Some(ts) = first {
        p["revisions"] = json!([{ "timestamp": ts }]);
    }
    json!({ "batchcomplete": true, "query": { "pages": [p] } })
}

fn wiki_api(req: &Logged) -> Reply {
    let title = req.param("titles").unwrap_or_default();
    match title.as_str() {
        "Les Hauts de Hurlevent" => Reply::json(&page(
            &title,
            &[("en", "Wuthering Heights"), ("es", "Cumbres Borrascosas"), ("de", "Sturmhöhe")],
            Some("2023-09-04T08:19:40Z"),
        )),
        "Absent" => Reply::json(&json!({ "query": { "pages": [{ "ns": 0, "title": "Absent", "missing": true }] } })),
        "Bad stamp" => Reply::json(&page(&title, &[], Some("yesterday"))),
        "Redirecting" => Reply::json(&page(&title, &[], Some("2020-01-01T00:00:00Z"))),
        "Many links" => match req.param("llcontinue").as_deref() {
            None => {
                let mut v = page(&title, &[("en", "Many"), ("it", "Molti")], Some("2011-05-05T05:05:05Z"));
                v["continue"] = json!({ "llcontinue": "7|it", "continue": "||" });
                Reply::json(&v)
            }
            Some("7|it") => Reply::json(&page(&title, &[("ja", "多く"), ("zh", "许多")], Some("2011-05-05T05:05:05Z"))),
            Some(other) => panic!("unexpected continuation {other}"),
        },
        t => Reply::json(&page(t, &[("en", &format!("{t} (en)"))], Some("2015-03-02T10:00:00Z"))),
    }
}

fn config(server: &MockServer, rate: f64) -> EnrichConfig {
    EnrichConfig { endpoint: server.url("/w/api.php"), rate, backoff_base_ms: 50, backoff_cap_ms: 200, ..Default::default() }
}

fn article(title: &str) -> Article {
    Article::skeleton(title, "Some text.", "2024-02-02T00:00:00Z")
}

#[test]
fn langlinks_and_first_revision_for_a_known_page() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let mut articles = vec![article("Les Hauts de Hurlevent")];
    let report = enrich_articles(&mut articles, &mut client);
    assert_eq!(report.enriched, 1);
    let a = &articles[0];
    let links = a.cross_lingual_links.as_ref().unwrap();
    assert_eq!(links["en"], "Wuthering Heights");
    assert_eq!(links["es"], "Cumbres Borrascosas");
    assert_eq!(links.len(), 3);
    assert_eq!(a.first_revision.as_deref(), Some("2023-09-04T08:19:40Z"));
    assert!(a.first_revision_access_date.is_some() && a.cross_lingual_links_access_date.is_some());

    let req = &server.requests()[0];
    assert_eq!(req.param("action").as_deref(), Some("query"));
    assert_eq!(req.param("formatversion").as_deref(), Some("2"));
    assert_eq!(req.param("rvdir").as_deref(), Some("newer"));
    assert_eq!(req.param("rvlimit").as_deref(), Some("1"));
}

#[test]
fn individual_lookups() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let links = client.fetch_langlinks("Les Hauts de Hurlevent").unwrap().unwrap();
    assert_eq!(links.links["en"], "Wuthering Heights");
    let rev = client.fetch_first_revision("Les Hauts de Hurlevent").unwrap().unwrap();
    assert_eq!(rev.first_revision, "2023-09-04T08:19:40Z");
    assert!(client.fetch_langlinks("Absent").unwrap().is_none());
}

#[test]
fn missing_page_is_stamped_without_data() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let mut articles = vec![article("Absent")];
    let report = enrich_articles(&mut articles, &mut client);
    assert_eq!((report.enriched, report.missing, report.failed), (0, 1, 0));
    assert_eq!(articles[0].cross_lingual_links, None);
    assert_eq!(articles[0].first_revision, None);
    assert!(articles[0].cross_lingual_links_access_date.is_some());
}

#[test]
fn rate_limit_is_retried_once() {
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    let server = MockServer::start(move |req| {
        if h.fetch_add(1, Ordering::SeqCst) == 0 {
            Reply::status(429).header("Retry-After", "0")
        } else {
            wiki_api(req)
        }
    });
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let mut articles = vec![article("Les Hauts de Hurlevent")];
    let report = enrich_articles(&mut articles, &mut client);
    assert_eq!(report.enriched, 1);
    assert_eq!(client.retries, 1);
    assert_eq!(client.requests, 2);
    assert_eq!(articles[0].first_revision.as_deref(), Some("2023-09-04T08:19:40Z"));
}

#[test]
fn persistent_errors_exhaust_attempts_and_leave_article_alone() {
    let server = MockServer::start(|_| Reply::status(503));
    let mut cfg = config(&server, 100.0);
    cfg.max_attempts = 3;
    let mut client = ActionApiClient::new(cfg, "fr");
    match client.page_info("X", true, true) {
        Err(EnrichError::Exhausted { attempts: 3, .. }) => {}
        other => panic!("{other:?}"),
    }
    let mut articles = vec![article("X")];
    let before = articles.clone();
    let report = enrich_articles(&mut articles, &mut client);
    assert_eq!(report.failed, 1);
    assert_eq!(articles, before);
}

#[test]
fn requests_are_paced() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 2.0), "fr");
    let mut articles: Vec<Article> = (0..10).map(|i| article(&format!("Page {i}"))).collect();
    let started = std::time::Instant::now();
    let report = enrich_articles(&mut articles, &mut client);
    assert!(started.elapsed() >= Duration::from_millis(4500));
    assert_eq!(report.enriched, 10);
    let times: Vec<_> = server.requests().iter().map(|r| r.at).collect();
    let span = *times.last().unwrap() - times[0];
    assert!(span >= Duration::from_millis(4500), "{span:?}");
    for (i, start) in times.iter().enumerate() {
        let in_window = times[i..].iter().take_while(|t| **t - *start < Duration::from_secs(1)).count();
        assert!(in_window <= 2, "{in_window} requests within one second");
    }
}

#[test]
fn rerun_makes_no_calls_and_keeps_bytes() {
    let server = MockServer::start(wiki_api);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chunk_00000.jsonl");
    let articles: Vec<Article> = ["Les Hauts de Hurlevent", "Absent", "Other"].iter().map(|t| article(t)).collect();
    write_chunk(&path, &articles).unwrap();

    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let first = enrich_chunk(&path, &mut client).unwrap();
    assert_eq!((first.enriched, first.missing), (2, 1));
    let bytes = std::fs::read(&path).unwrap();
    let calls = server.request_count();

    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let second = enrich_chunk(&path, &mut client).unwrap();
    assert_eq!(second.skipped, 3);
    assert_eq!(server.request_count(), calls);
    assert_eq!(client.requests, 0);
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn redirects_are_not_followed() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let mut articles = vec![article("Redirecting")];
    enrich_articles(&mut articles, &mut client);
    for req in server.requests() {
        assert_eq!(req.param("redirects"), None);
        assert!(!req.url.contains("redirects"));
    }
    assert_eq!(articles[0].first_revision.as_deref(), Some("2020-01-01T00:00:00Z"));
}

#[test]
fn malformed_timestamp_is_a_protocol_error() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    assert!(matches!(client.page_info("Bad stamp", true, true), Err(EnrichError::Protocol(_))));
    let mut articles = vec![article("Bad stamp")];
    let report = enrich_articles(&mut articles, &mut client);
    assert_eq!(report.failed, 1);
    assert_eq!(articles[0].first_revision_access_date, None);
}

#[test]
fn langlink_continuation_is_followed() {
    let server = MockServer::start(wiki_api);
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    let info = client.page_info("Many links", true, true).unwrap().unwrap();
    let langs: Vec<&str> = info.langlinks.keys().map(String::as_str).collect();
    assert_eq!(langs, ["en", "it", "ja", "zh"]);
    assert_eq!(info.first_revision.as_deref(), Some("2011-05-05T05:05:05Z"));
    assert_eq!(server.request_count(), 2);
}

#[test]
fn article_order_is_preserved() {
    let server = MockServer::start(wiki_api);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chunk_00000.jsonl");
    let titles: Vec<String> = (0..6).map(|i| format!("Page {i}")).collect();
    write_chunk(&path, &titles.iter().map(|t| article(t)).collect::<Vec<_>>()).unwrap();
    let mut client = ActionApiClient::new(config(&server, 100.0), "fr");
    enrich_chunk(&path, &mut client).unwrap();
    let after = read_chunk(&path).unwrap();
    assert_eq!(after.iter().map(|a| a.title.clone()).collect::<Vec<_>>(), titles);
    assert_eq!(after[3].cross_lingual_links.as_ref().unwrap()["en"], "Page 3 (en)");
}
