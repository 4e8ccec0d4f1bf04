//! Stage runner: ingest → parse → scrape → quality → enrich over chunk
//! files, with one durable target per (stage, chunk).
//!
//! Layout under `<out_dir>/<language>/`:
//! - `ingest/` holds `chunk_NNNNN.jsonl` plus `manifest.json`;
//! - every later stage writes `<stage>/chunk_NNNNN.<hash>.jsonl`, where the
//!   hash covers the stage settings and the input chunk's bytes, and keeps
//!   `<stage>/index.json` pointing each chunk id at its current target.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use wikicite_core::article::parse_into;
use wikicite_core::quality::QualityThresholds;
use wikicite_core::{Article, LanguageConfig};

use crate::chunk::{decode_chunk, encode_chunk, write_atomic};
use crate::enrich::{enrich_articles, ActionApiClient, EnrichConfig};
use crate::ingest::{dump_digest, open_dump, save_manifest, stream_pages, write_chunks, ChunkManifest, IngestError};
use crate::quality_client::{score_articles, Scorer};
use crate::scrape::{scrape_articles, Fetcher, HostPacer, HttpFetcher, ScrapePolicy};

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Parse,
    Scrape,
    Quality,
    Enrich,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Parse, Stage::Scrape, Stage::Quality, Stage::Enrich];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Parse => "parse",
            Stage::Scrape => "scrape",
            Stage::Quality => "quality",
            Stage::Enrich => "enrich",
        }
    }

    pub fn parse_list(list: &str) -> Result<Vec<Stage>, String> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage {s:?}")))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualitySettings {
    /// Model service URL (`.../score`). Absent means heuristic scoring.
    pub endpoint: Option<String>,
    pub thresholds: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dump: PathBuf,
    pub language: String,
    pub out_dir: PathBuf,
    #[serde(default = "all_stages")]
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub language_config: Option<PathBuf>,
    #[serde(default)]
    pub scrape: ScrapePolicy,
    #[serde(default)]
    pub quality: QualitySettings,
    #[serde(default)]
    pub enrich: EnrichConfig,
    /// Chunk-level worker count for parse and quality.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn all_stages() -> Vec<Stage> {
    Stage::ALL.to_vec()
}

impl RunConfig {
    pub fn new(dump: impl Into<PathBuf>, language: &str, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            dump: dump.into(),
            language: language.to_string(),
            out_dir: out_dir.into(),
            stages: all_stages(),
            language_config: None,
            scrape: ScrapePolicy::default(),
            quality: QualitySettings::default(),
            enrich: EnrichConfig::default(),
            workers: None,
        }
    }

    pub fn language_root(&self) -> PathBuf {
        self.out_dir.join(&self.language)
    }

    pub fn stage_dir(&self, stage: Stage) -> PathBuf {
        self.language_root().join(stage.name())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} holds chunks from a different dump; use a fresh output directory or delta mode")]
    DumpChanged(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkFailure {
    pub chunk: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub completed: u64,
    pub skipped: u64,
    pub failed: Vec<ChunkFailure>,
    pub warnings: u64,
    /// Articles parsed, URLs fetched, texts scored or API requests made.
    pub work_items: u64,
}

impl StageReport {
    fn new(stage: Stage) -> Self {
        StageReport { stage, completed: 0, skipped: 0, failed: Vec::new(), warnings: 0, work_items: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub language: String,
    pub stages: Vec<StageReport>,
    /// Outputs of the last stage that ran, in chunk order.
    pub final_chunks: Vec<PathBuf>,
}

impl RunReport {
    pub fn total_failures(&self) -> usize {
        self.stages.iter().map(|s| s.failed.len()).sum()
    }

    pub fn total_work(&self) -> u64 {
        self.stages.iter().map(|s| s.work_items + s.completed).sum()
    }
}

/// Pluggable transports; `None` means the real network client.
#[derive(Clone, Default)]
pub struct Services {
    pub fetcher: Option<Arc<dyn Fetcher>>,
}

pub fn run_pipeline(config: &RunConfig) -> Result<RunReport, RunError> {
    run_pipeline_with(config, &Services::default())
}

pub fn run_pipeline_with(config: &RunConfig, services: &Services) -> Result<RunReport, RunError> {
    config.scrape.validate().map_err(RunError::Config)?;
    let mut stages = config.stages.clone();
    stages.sort();
    stages.dedup();
    let mut report = RunReport { language: config.language.clone(), stages: Vec::new(), final_chunks: Vec::new() };
    // A chunk that fails is not handed to later stages of the same run.
    let mut failed: BTreeSet<String> = BTreeSet::new();
    for &stage in &stages {
        let r = match stage {
            Stage::Ingest => run_ingest(config)?,
            _ => run_chunk_stage(config, stage, services, &failed)?,
        };
        failed.extend(r.failed.iter().map(|f| f.chunk.clone()));
        log::info!(
            "{}: {} completed, {} skipped, {} failed, {} warnings",
            stage.name(),
            r.completed,
            r.skipped,
            r.failed.len(),
            r.warnings
        );
        report.stages.push(r);
    }
    if let Some(&last) = stages.last() {
        report.final_chunks = stage_outputs(&config.language_root(), last)?;
    }
    Ok(report)
}

/// Current targets of `stage` in chunk order.
pub fn stage_outputs(language_root: &Path, stage: Stage) -> Result<Vec<PathBuf>, RunError> {
    let dir = language_root.join(stage.name());
    Ok(load_index(&dir, stage)?.into_values().map(|f| dir.join(f)).collect())
}

fn run_ingest(config: &RunConfig) -> Result<StageReport, RunError> {
    let mut r = StageReport::new(Stage::Ingest);
    let dir = config.stage_dir(Stage::Ingest);
    let digest = dump_digest(&config.dump).map_err(io_err(&config.dump))?;
    if let Some(existing) = ChunkManifest::load(&dir)? {
        if existing.dump_sha256.as_deref() != Some(digest.as_str()) {
            return Err(RunError::DumpChanged(dir));
        }
        r.skipped = existing.chunk_paths.len() as u64;
        return Ok(r);
    }
    let input = open_dump(&config.dump).map_err(io_err(&config.dump))?;
    let mut manifest = write_chunks(stream_pages(input), &dir, &config.language)?;
    manifest.dump_sha256 = Some(digest);
    save_manifest(&dir, &manifest)?;
    r.completed = manifest.chunk_paths.len() as u64;
    r.work_items = manifest.article_count;
    Ok(r)
}

fn chunk_id(file_name: &str) -> String {
    file_name.split('.').next().unwrap_or(file_name).to_string()
}

/// chunk id → file name within the stage directory.
fn load_index(dir: &Path, stage: Stage) -> Result<BTreeMap<String, String>, RunError> {
    if stage == Stage::Ingest {
        return Ok(match ChunkManifest::load(dir)? {
            Some(m) => m.chunk_paths.iter().map(|p| (chunk_id(p), p.clone())).collect(),
            None => BTreeMap::new(),
        });
    }
    let path = dir.join(INDEX_FILE);
    match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| RunError::Io { path: path.clone(), source: io::Error::new(io::ErrorKind::InvalidData, e) }),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(BTreeMap::new()),
        Err(e) => Err(RunError::Io { path, source: e }),
    }
}

fn save_index(dir: &Path, index: &BTreeMap<String, String>) -> Result<(), RunError> {
    let path = dir.join(INDEX_FILE);
    let json = serde_json::to_string_pretty(index).expect("index serializes");
    write_atomic(&path, json.as_bytes()).map_err(io_err(&path))
}

/// Inputs for `stage`: the nearest earlier stage that has an index entry
/// for each chunk.
fn stage_inputs(config: &RunConfig, stage: Stage) -> Result<BTreeMap<String, PathBuf>, RunError> {
    let root = config.language_root();
    let mut out = BTreeMap::new();
    for &prev in Stage::ALL.iter().filter(|s| **s < stage).rev() {
        let dir = root.join(prev.name());
        for (id, file) in load_index(&dir, prev)? {
            out.entry(id).or_insert_with(|| dir.join(file));
        }
    }
    Ok(out)
}

struct StageContext {
    language_config: LanguageConfig,
    thresholds: QualityThresholds,
    scorer: Scorer,
    fetcher: Arc<dyn Fetcher>,
    pacer: HostPacer,
    enrich: Mutex<ActionApiClient>,
}

impl StageContext {
    fn build(config: &RunConfig, services: &Services) -> Result<Self, RunError> {
        let language_config = match &config.language_config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                LanguageConfig::from_json(&text).map_err(|e| RunError::Config(e.to_string()))?
            }
            None => LanguageConfig::for_language(&config.language),
        };
        let thresholds = match &config.quality.thresholds {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", p.display())))?
            }
            None => QualityThresholds::default(),
        };
        let scorer = match &config.quality.endpoint {
            Some(url) => Scorer::remote(url.clone()),
            None => Scorer::Heuristic,
        };
        let fetcher = services.fetcher.clone().unwrap_or_else(|| Arc::new(HttpFetcher::new(&config.scrape)));
        let mut enrich_config = config.enrich.clone();
        if enrich_config.endpoint.is_empty() {
            enrich_config.endpoint = EnrichConfig::for_language(&config.language).endpoint;
        }
        Ok(StageContext {
            language_config,
            thresholds,
            scorer,
            fetcher,
            pacer: HostPacer::new(Duration::from_millis(config.scrape.per_host_delay_ms)),
            enrich: Mutex::new(ActionApiClient::new(enrich_config, &config.language)),
        })
    }

    /// Settings that change a stage's output; part of the target hash.
    fn fingerprint(&self, config: &RunConfig, stage: Stage) -> String {
        match stage {
            Stage::Ingest => String::new(),
            Stage::Parse => serde_json::to_string(&self.language_config).unwrap_or_default(),
            Stage::Scrape => {
                let p = &config.scrape;
                format!("{}|{}|{}|{}|{}", p.timeout_seconds, p.max_chars, p.min_tokens, p.retries, p.max_redirects)
            }
            Stage::Quality => format!("{:?}|{:?}", self.thresholds.cuts(), config.quality.endpoint),
            Stage::Enrich => config.enrich.endpoint.clone(),
        }
    }

    /// Apply `stage` to one chunk's articles; returns (warnings, work items).
    fn apply(&self, config: &RunConfig, stage: Stage, articles: &mut [Article]) -> Result<(u64, u64), String> {
        match stage {
            Stage::Ingest => Ok((0, 0)),
            Stage::Parse => {
                let (mut warnings, mut parsed) = (0u64, 0u64);
                for a in articles.iter_mut().filter(|a| a.elements.is_empty() && a.text.is_empty()) {
                    warnings += parse_into(a, &self.language_config) as u64;
                    parsed += 1;
                }
                Ok((warnings, parsed))
            }
            Stage::Scrape => {
                let r = scrape_articles(articles, self.fetcher.as_ref(), &config.scrape, &self.pacer);
                Ok((0, r.urls_fetched))
            }
            Stage::Quality => {
                let r = score_articles(articles, &self.scorer, &self.thresholds).map_err(|e| e.to_string())?;
                Ok((r.fallback_scored, r.scored))
            }
            Stage::Enrich => {
                let mut client = self.enrich.lock().unwrap_or_else(|e| e.into_inner());
                let before = client.requests;
                let r = enrich_articles(articles, &mut client);
                Ok((r.failed, client.requests - before))
            }
        }
    }
}

enum ChunkResult {
    Done { file: String, warnings: u64, work: u64 },
    Skipped { file: String },
    Failed(String),
}

fn run_chunk_stage(
    config: &RunConfig,
    stage: Stage,
    services: &Services,
    exclude: &BTreeSet<String>,
) -> Result<StageReport, RunError> {
    let ctx = StageContext::build(config, services)?;
    let dir = config.stage_dir(stage);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let inputs: Vec<(String, PathBuf)> =
        stage_inputs(config, stage)?.into_iter().filter(|(id, _)| !exclude.contains(id)).collect();
    let fingerprint = ctx.fingerprint(config, stage);

    let process = |(id, input): &(String, PathBuf)| -> ChunkResult {
        let bytes = match fs::read(input) {
            Ok(b) => b,
            Err(e) => return ChunkResult::Failed(format!("{}: {e}", input.display())),
        };
        let mut hasher = Sha256::new();
        hasher.update(stage.name());
        hasher.update([0]);
        hasher.update(fingerprint.as_bytes());
        hasher.update([0]);
        hasher.update(&bytes);
        let file = format!("{id}.{}.jsonl", &hex::encode(hasher.finalize())[..16]);
        let target = dir.join(&file);
        if target.exists() {
            return ChunkResult::Skipped { file };
        }
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(e) => return ChunkResult::Failed(format!("{}: {e}", input.display())),
        };
        let mut articles = match decode_chunk(&text, input) {
            Ok(a) => a,
            Err(e) => return ChunkResult::Failed(e.to_string()),
        };
        let (warnings, work) = match ctx.apply(config, stage, &mut articles) {
            Ok(x) => x,
            Err(e) => return ChunkResult::Failed(e),
        };
        match write_atomic(&target, encode_chunk(&articles).as_bytes()) {
            Ok(()) => ChunkResult::Done { file, warnings, work },
            Err(e) => ChunkResult::Failed(format!("{}: {e}", target.display())),
        }
    };

    let results: Vec<ChunkResult> = match stage {
        Stage::Parse | Stage::Quality => {
            let threads = config.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(4, |n| n.get()));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool");
            pool.install(|| inputs.par_iter().map(process).collect())
        }
        // Scraping parallelizes inside a chunk; enrichment is strictly serial.
        _ => inputs.iter().map(process).collect(),
    };

    let mut report = StageReport::new(stage);
    let mut index = load_index(&dir, stage)?;
    for ((id, _), result) in inputs.iter().zip(results) {
        match result {
            ChunkResult::Done { file, warnings, work } => {
                report.completed += 1;
                report.warnings += warnings;
                report.work_items += work;
                index.insert(id.clone(), file);
            }
            ChunkResult::Skipped { file } => {
                report.skipped += 1;
                index.insert(id.clone(), file);
            }
            ChunkResult::Failed(error) => {
                log::error!("{} {id}: {error}", stage.name());
                index.remove(id);
                report.failed.push(ChunkFailure { chunk: id.clone(), error });
            }
        }
    }
    save_index(&dir, &index)?;
    Ok(report)
}
