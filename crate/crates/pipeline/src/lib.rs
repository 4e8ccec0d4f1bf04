//! I/O side of the toolkit: dump ingest, chunk files, source scraping,
//! quality scoring, Action API enrichment, delta runs and translation
//! plumbing, plus the stage orchestrator behind the `wikicite` binary.

pub mod chunk;
pub mod delta;
pub mod enrich;
pub mod extract;
pub mod ingest;
pub mod orchestrate;
pub mod quality_client;
pub mod scrape;
pub mod translate;

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn now_iso() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}
