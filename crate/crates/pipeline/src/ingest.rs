//! Streaming MediaWiki XML dump reader and chunk writer.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use bzip2::read::MultiBzDecoder;
use flate2::read::MultiGzDecoder;
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wikicite_core::Article;

use crate::chunk::{chunk_file_name, write_chunk, ChunkError, CHUNK_SIZE};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub title: String,
    pub wikicode: String,
    pub last_revision: String,
    pub dump_position: u64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML at byte {offset}: {message}")]
    MalformedXml { offset: u64, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Chunk(#[from] ChunkError),
    #[error("{0} already holds ingested chunks (manifest present)")]
    AlreadyIngested(PathBuf),
    #[error("fetching dump failed: {0}")]
    Fetch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkManifest {
    pub language: String,
    /// File names relative to the manifest's directory.
    pub chunk_paths: Vec<String>,
    pub article_count: u64,
    #[serde(default)]
    pub filtered_count: u64,
    #[serde(default)]
    pub dump_sha256: Option<String>,
}

impl ChunkManifest {
    pub fn load(dir: &Path) -> Result<Option<Self>, IngestError> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| IngestError::Io(io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))))
    }

    pub fn chunk_files(&self, dir: &Path) -> Vec<PathBuf> {
        self.chunk_paths.iter().map(|p| dir.join(p)).collect()
    }
}

/// Wrap `inner` in a bzip2 or gzip decoder when its first bytes say so.
pub fn decompress<R: Read + Send + 'static>(inner: R) -> io::Result<Box<dyn BufRead + Send>> {
    let mut buffered = BufReader::with_capacity(1 << 16, inner);
    let head = buffered.fill_buf()?;
    Ok(if head.starts_with(b"BZh") {
        Box::new(BufReader::new(MultiBzDecoder::new(buffered)))
    } else if head.starts_with(&[0x1f, 0x8b]) {
        Box::new(BufReader::new(MultiGzDecoder::new(buffered)))
    } else {
        Box::new(buffered)
    })
}

/// Hex SHA-256 of a dump file's raw (possibly compressed) bytes.
pub fn dump_digest(path: &Path) -> io::Result<String> {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    io::copy(&mut File::open(path)?, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}

pub fn open_dump(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    decompress(File::open(path)?)
}

/// Download a dump to `dest` (e.g. a Wikimedia mirror URL).
pub fn fetch_dump(url: &str, dest: &Path) -> Result<u64, IngestError> {
    let response = ureq::get(url).call().map_err(|e| IngestError::Fetch(e.to_string()))?;
    let mut reader = response.into_body().into_reader();
    let tmp_dir = dest.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(tmp_dir)?;
    let n = io::copy(&mut reader, &mut tmp)?;
    tmp.persist(dest).map_err(|e| e.error)?;
    Ok(n)
}

/// Pages in document order. Only the last `<revision>` of each page is kept.
pub struct PageStream<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    stack: Vec<Vec<u8>>,
    next_position: u64,
    finished: bool,
}

#[derive(Default)]
struct PageState {
    title: String,
    timestamp: String,
    text: String,
    // Fields of the revision currently being read.
    rev_timestamp: String,
    rev_text: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Title,
    Timestamp,
    Text,
}

pub fn stream_pages<R: BufRead>(input: R) -> PageStream<R> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(false);
    PageStream { reader, buf: Vec::with_capacity(1 << 14), stack: Vec::new(), next_position: 0, finished: false }
}

impl<R: BufRead> PageStream<R> {
    fn malformed(&self, message: impl Into<String>) -> IngestError {
        IngestError::MalformedXml { offset: self.reader.buffer_position(), message: message.into() }
    }

    fn field(&self) -> Option<Field> {
        let n = self.stack.len();
        if n < 2 {
            return None;
        }
        match (self.stack[n - 2].as_slice(), self.stack[n - 1].as_slice()) {
            (b"page", b"title") => Some(Field::Title),
            (b"revision", b"timestamp") => Some(Field::Timestamp),
            (b"revision", b"text") => Some(Field::Text),
            _ => None,
        }
    }

    fn next_page(&mut self) -> Result<Option<RawPage>, IngestError> {
        let mut page: Option<PageState> = None;
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(e) => e.into_owned(),
                Err(e) => {
                    return Err(IngestError::MalformedXml { offset: self.reader.error_position(), message: e.to_string() })
                }
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    if name == b"page" {
                        page = Some(PageState::default());
                    } else if name == b"revision" {
                        if let Some(p) = page.as_mut() {
                            p.rev_timestamp.clear();
                            p.rev_text.clear();
                        }
                    }
                    self.stack.push(name);
                }
                Event::Empty(_) => {}
                Event::End(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    if self.stack.pop().as_deref() != Some(name.as_slice()) {
                        return Err(self.malformed(format!("unexpected </{}>", String::from_utf8_lossy(&name))));
                    }
                    match name.as_slice() {
                        b"revision" => {
                            if let Some(p) = page.as_mut() {
                                p.timestamp = std::mem::take(&mut p.rev_timestamp);
                                p.text = std::mem::take(&mut p.rev_text);
                            }
                        }
                        b"page" => {
                            if let Some(p) = page.take() {
                                let dump_position = self.next_position;
                                self.next_position += 1;
                                return Ok(Some(RawPage {
                                    title: p.title,
                                    wikicode: p.text,
                                    last_revision: p.timestamp.trim().to_string(),
                                    dump_position,
                                }));
                            }
                        }
                        _ => {}
                    }
                }
                Event::Text(t) => {
                    if let (Some(field), Some(p)) = (self.field(), page.as_mut()) {
                        let text = t.unescape().map_err(|e| self.malformed(e.to_string()))?;
                        push_field(p, field, &text);
                    }
                }
                Event::CData(t) => {
                    if let (Some(field), Some(p)) = (self.field(), page.as_mut()) {
                        let text = String::from_utf8_lossy(&t);
                        push_field(p, field, &text);
                    }
                }
                Event::Eof => {
                    if let Some(open) = self.stack.last() {
                        return Err(self.malformed(format!(
                            "unexpected end of input inside <{}>",
                            String::from_utf8_lossy(open)
                        )));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }
}

fn push_field(p: &mut PageState, field: Field, text: &str) {
    match field {
        Field::Title => p.title.push_str(text),
        Field::Timestamp => p.rev_timestamp.push_str(text),
        Field::Text => p.rev_text.push_str(text),
    }
}

impl<R: BufRead> Iterator for PageStream<R> {
    type Item = Result<RawPage, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.next_page() {
            Ok(Some(p)) => Some(Ok(p)),
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

/// Redirects, website stubs and category pages are dropped at ingest.
pub fn should_filter(page: &RawPage) -> bool {
    let lower = page.wikicode.to_lowercase();
    lower.contains("#redirect") || lower.contains("{{website-stub}}") || page.title.contains("Category:")
}

/// Write skeleton articles into `dir` in chunks of 1000, then the manifest.
/// Refuses to run when `dir` already has a manifest.
pub fn write_chunks<I>(pages: I, dir: &Path, language: &str) -> Result<ChunkManifest, IngestError>
where
    I: IntoIterator<Item = Result<RawPage, IngestError>>,
{
    write_chunks_sized(pages, dir, language, CHUNK_SIZE)
}

pub fn write_chunks_sized<I>(pages: I, dir: &Path, language: &str, chunk_size: usize) -> Result<ChunkManifest, IngestError>
where
    I: IntoIterator<Item = Result<RawPage, IngestError>>,
{
    if dir.join(MANIFEST_FILE).exists() {
        return Err(IngestError::AlreadyIngested(dir.to_path_buf()));
    }
    fs::create_dir_all(dir)?;
    let mut manifest = ChunkManifest {
        language: language.to_string(),
        chunk_paths: Vec::new(),
        article_count: 0,
        filtered_count: 0,
        dump_sha256: None,
    };
    let mut pending: Vec<Article> = Vec::with_capacity(chunk_size);
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
        pending.push(Article::skeleton(page.title, page.wikicode, page.last_revision));
        if pending.len() == chunk_size {
            flush(&mut pending, &mut manifest)?;
        }
    }
    if !pending.is_empty() {
        flush(&mut pending, &mut manifest)?;
    }
    save_manifest(dir, &manifest)?;
    Ok(manifest)
}

pub fn save_manifest(dir: &Path, manifest: &ChunkManifest) -> Result<(), IngestError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    crate::chunk::write_atomic(&dir.join(MANIFEST_FILE), json.as_bytes())?;
    Ok(())
}

/// Stream, filter and chunk a dump file into `out_root/<language>/`.
pub fn ingest_dump(dump: &Path, out_root: &Path, language: &str) -> Result<ChunkManifest, IngestError> {
    let input = open_dump(dump)?;
    write_chunks(stream_pages(input), &out_root.join(language), language)
}
