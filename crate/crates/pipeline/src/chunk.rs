//! Chunk files: one serialized article per line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;
use wikicite_core::{deserialize_article, serialize_article, Article, SchemaError};

pub const CHUNK_SIZE: usize = 1000;

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Schema { path: PathBuf, line: usize, source: SchemaError },
}

pub fn chunk_file_name(index: usize) -> String {
    format!("chunk_{index:05}.jsonl")
}

pub fn encode_chunk(articles: &[Article]) -> String {
    let mut out = String::new();
    for a in articles {
        out.push_str(&serialize_article(a));
        out.push('\n');
    }
    out
}

pub fn decode_chunk(text: &str, path: &Path) -> Result<Vec<Article>, ChunkError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            deserialize_article(l).map_err(|source| ChunkError::Schema { path: path.to_path_buf(), line: i + 1, source })
        })
        .collect()
}

pub fn read_chunk(path: &Path) -> Result<Vec<Article>, ChunkError> {
    let text = fs::read_to_string(path).map_err(|source| ChunkError::Io { path: path.to_path_buf(), source })?;
    decode_chunk(&text, path)
}

pub fn write_chunk(path: &Path, articles: &[Article]) -> Result<(), ChunkError> {
    write_atomic(path, encode_chunk(articles).as_bytes()).map_err(|source| ChunkError::Io { path: path.to_path_buf(), source })
}

/// Write through a temp file in the same directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
