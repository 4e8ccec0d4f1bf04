//! Delta runs: reuse processed articles whose title and wikicode are
//! unchanged since the previous dump.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wikicite_core::{compute_hash, Article};

use crate::chunk::{chunk_file_name, read_chunk, write_chunk, ChunkError, CHUNK_SIZE};
use crate::ingest::{save_manifest, should_filter, ChunkManifest, IngestError, RawPage};

/// Title → content hash of the previously processed dump.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaState {
    pub hashes: BTreeMap<String, String>,
}

impl DeltaState {
    pub fn from_articles<'a>(articles: impl IntoIterator<Item = &'a Article>) -> Self {
        DeltaState { hashes: articles.into_iter().map(|a| (a.title.clone(), a.hash.clone())).collect() }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        crate::chunk::write_atomic(path, serde_json::to_string(self).expect("state serializes").as_bytes())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSelection {
    pub to_process: Vec<String>,
    pub carried_forward: Vec<String>,
}

/// Split the new dump's retained pages into changed/new titles and titles
/// whose hash matches the previous run. Filtered pages appear in neither.
pub fn delta_select<'a>(prev: &DeltaState, new_pages: impl IntoIterator<Item = &'a RawPage>) -> DeltaSelection {
    let mut sel = DeltaSelection::default();
    for p in new_pages.into_iter().filter(|p| !should_filter(p)) {
        let hash = compute_hash(&p.title, &p.wikicode);
        if prev.hashes.get(&p.title) == Some(&hash) {
            sel.carried_forward.push(p.title.clone());
        } else {
            sel.to_process.push(p.title.clone());
        }
    }
    sel
}

/// Load every article of a previous run's final chunk files, by title.
pub fn load_previous(chunks: &[impl AsRef<Path>]) -> Result<HashMap<String, Article>, ChunkError> {
    let mut out = HashMap::new();
    for path in chunks {
        for a in read_chunk(path.as_ref())? {
            out.insert(a.title.clone(), a);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub manifest: Option<ChunkManifest>,
    pub selection: DeltaSelection,
}

/// Write the full new dump as chunks into `dir`: carried-forward titles
/// are copied verbatim from `previous`, everything else is a fresh
/// skeleton for the downstream stages.
pub fn write_delta_chunks<I>(
    pages: I,
    previous: &HashMap<String, Article>,
    dir: &Path,
    language: &str,
) -> Result<DeltaReport, IngestError>
where
    I: IntoIterator<Item = Result<RawPage, IngestError>>,
{
    if dir.join(crate::ingest::MANIFEST_FILE).exists() {
        return Err(IngestError::AlreadyIngested(dir.to_path_buf()));
    }
    let prev_state = DeltaState::from_articles(previous.values());
    let mut report = DeltaReport::default();
    let mut manifest = ChunkManifest {
        language: language.to_string(),
        chunk_paths: Vec::new(),
        article_count: 0,
        filtered_count: 0,
        dump_sha256: None,
    };
    let mut pending = Vec::with_capacity(CHUNK_SIZE);
    let flush = |pending: &mut Vec<Article>, manifest: &mut ChunkManifest| -> Result<(), IngestError> {
        let name = chunk_file_name(manifest.chunk_paths.len());
        write_chunk(&dir.join(&name), pending)?;
        manifest.article_count += pending.len() as u64;
        manifest.chunk_paths.push(name);
        pending.clear();
        Ok(())
    };
    for page in pages {
        let page = page?;
        if should_filter(&page) {
            manifest.filtered_count += 1;
            continue;
        }
        let sel = delta_select(&prev_state, [&page]);
        if sel.carried_forward.is_empty() {
            report.selection.to_process.push(page.title.clone());
            pending.push(Article::skeleton(page.title, page.wikicode, page.last_revision));
        } else {
            report.selection.carried_forward.push(page.title.clone());
            pending.push(previous[&page.title].clone());
        }
        if pending.len() == CHUNK_SIZE {
            flush(&mut pending, &mut manifest)?;
        }
    }
    if !pending.is_empty() {
        flush(&mut pending, &mut manifest)?;
    }
    save_manifest(dir, &manifest)?;
    report.manifest = Some(manifest);
    Ok(report)
}
