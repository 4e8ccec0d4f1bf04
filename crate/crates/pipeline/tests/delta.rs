mod common;

use std::collections::HashMap;
use std::io::Cursor;
use std::path::Path;
use std::sync::Arc;

use common::{dump_xml, MockFetcher, MockServer, Reply};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wikicite_core::{serialize_article, synth::fixture_wikicode};
use wikicite_pipeline::chunk::read_chunk;
use wikicite_pipeline::delta::{delta_select, load_previous, write_delta_chunks, DeltaState};
use wikicite_pipeline::ingest::{dump_digest, open_dump, save_manifest, stream_pages, RawPage};
use wikicite_pipeline::orchestrate::{run_pipeline_with, RunConfig, RunReport, Services, Stage};

fn api() -> MockServer {
    MockServer::start(|req| {
        let title = req.param("titles").unwrap_or_default();
        Reply::json(&json!({ "query": { "pages": [{
            "pageid": 1, "title": title,
            "langlinks": [{ "lang": "de", "title": format!("{title} (de)") }],
            "revisions": [{ "timestamp": "2010-10-10T10:10:10Z" }]
        }] } }))
    })
}

fn pages(n: usize) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..n).map(|i| (format!("Topic {i}"), fixture_wikicode(&mut rng, i))).collect()
}

fn write_dump(path: &Path, pages: &[(String, String)]) {
    std::fs::write(path, dump_xml(pages.iter().map(|(t, w)| (t.as_str(), w.as_str())))).unwrap();
}

fn config(dump: &Path, out: &Path, api: &MockServer) -> RunConfig {
    let mut c = RunConfig::new(dump, "en", out);
    c.scrape.per_host_delay_ms = 0;
    c.enrich.endpoint = api.url("/w/api.php");
    c.enrich.rate = 1000.0;
    c
}

fn final_articles(report: &RunReport) -> HashMap<String, String> {
    report
        .final_chunks
        .iter()
        .flat_map(|p| read_chunk(p).unwrap())
        .map(|a| (a.title.clone(), serialize_article(&a)))
        .collect()
}

#[test]
fn two_dump_delta() {
    let root = tempfile::tempdir().unwrap();
    let api = api();

    // First dump: 99 articles, fully processed.
    let first = pages(99);
    let dump1 = root.path().join("dump1.xml");
    write_dump(&dump1, &first);
    let out1 = root.path().join("run1");
    let fetcher = Arc::new(MockFetcher::default());
    let services = Services { fetcher: Some(fetcher.clone()) };
    let run1 = run_pipeline_with(&config(&dump1, &out1, &api), &services).unwrap();
    assert_eq!(run1.total_failures(), 0);
    assert_eq!(fetcher.call_count(), 99);
    let before = final_articles(&run1);
    assert_eq!(before.len(), 99);

    // Second dump: one article edited, one added, the rest untouched.
    let mut second = first.clone();
    second[40].1.push_str("\n\nAn added sentence.");
    second.push(("Topic 99".into(), pages(100).pop().unwrap().1));
    let dump2 = root.path().join("dump2.xml");
    write_dump(&dump2, &second);

    let previous = load_previous(&run1.final_chunks).unwrap();
    let out2 = root.path().join("run2");
    let ingest_dir = out2.join("en").join(Stage::Ingest.name());
    let delta = write_delta_chunks(stream_pages(open_dump(&dump2).unwrap()), &previous, &ingest_dir, "en").unwrap();
    let mut to_process = delta.selection.to_process.clone();
    to_process.sort();
    assert_eq!(to_process, ["Topic 40", "Topic 99"]);
    assert_eq!(delta.selection.carried_forward.len(), 98);
    let mut manifest = delta.manifest.unwrap();
    manifest.dump_sha256 = Some(dump_digest(&dump2).unwrap());
    save_manifest(&ingest_dir, &manifest).unwrap();

    let fetcher2 = Arc::new(MockFetcher::default());
    let services2 = Services { fetcher: Some(fetcher2.clone()) };
    let api_calls = api.request_count();
    let run2 = run_pipeline_with(&config(&dump2, &out2, &api), &services2).unwrap();
    assert_eq!(run2.total_failures(), 0);
    assert_eq!(fetcher2.call_count(), 2);
    assert_eq!(api.request_count() - api_calls, 2);
    let parse = run2.stages.iter().find(|s| s.stage == Stage::Parse).unwrap();
    assert_eq!(parse.work_items, 2);

    let after = final_articles(&run2);
    assert_eq!(after.len(), 100);
    for (title, line) in &before {
        if title != "Topic 40" {
            assert_eq!(&after[title], line, "{title} changed");
        }
    }
    assert_ne!(after["Topic 40"], before["Topic 40"]);
    let edited = read_chunk(&run2.final_chunks[0]).unwrap().into_iter().find(|a| a.title == "Topic 40").unwrap();
    assert!(edited.text.contains("An added sentence."));
    assert!(edited.citations().all(|c| c.source_download_date.is_some() && c.source_quality_label.is_some()));

    // Same dump again: nothing selected, nothing done.
    let state = DeltaState::from_articles(&load_previous(&run2.final_chunks).unwrap().into_values().collect::<Vec<_>>());
    let raw: Vec<RawPage> = stream_pages(Cursor::new(std::fs::read(&dump2).unwrap())).map(Result::unwrap).collect();
    assert!(delta_select(&state, &raw).to_process.is_empty());
    let calls = (fetcher2.call_count(), api.request_count());
    let run3 = run_pipeline_with(&config(&dump2, &out2, &api), &services2).unwrap();
    assert_eq!(run3.total_work(), 0);
    assert_eq!((fetcher2.call_count(), api.request_count()), calls);
    assert_eq!(final_articles(&run3), after);
}
