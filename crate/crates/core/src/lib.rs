//! Data model, wikitext parser, segmenter and analysis math for building
//! citation-anchored corpora from Wikipedia dumps.
//!
//! Everything here is pure (no I/O), so it also compiles to WebAssembly.

pub mod analysis;
pub mod article;
pub mod config;
pub mod error;
pub mod excerpt;
pub mod quality;
pub mod schema;
pub mod segment;
pub mod stats;
pub mod synth;
pub mod wikitext;

pub use config::{LanguageConfig, SegmenterRules};
pub use error::{AnalysisError, QualityError, SchemaError};
pub use schema::{
    compute_hash, deserialize_article, serialize_article, Article, Citation, CitationNeeded, Code, Element,
    ExcerptWithCitations, Heading, HeadingLevel, Paragraph, QualityLabel, RawBlock, Sentence, TrailingWhitespace,
};
