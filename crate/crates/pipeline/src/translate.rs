//! Translation plumbing: pull headings and sentences out of chunks into a
//! light record format, run them through a translator, and put the
//! results back.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wikicite_core::article::refresh_excerpts;
use wikicite_core::{Article, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Heading,
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslatableRecord {
    pub chunk_id: String,
    pub article_index: usize,
    /// Element index, then sentence index for paragraphs.
    pub element_path: Vec<usize>,
    pub kind: RecordKind,
    pub text: String,
    #[serde(default)]
    pub translated_text: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("record {index} ({chunk_id} article {article_index} path {path:?}): {reason}")]
    PathMismatch { index: usize, chunk_id: String, article_index: usize, path: Vec<usize>, reason: String },
    #[error("translator returned {got} texts for a batch of {sent}")]
    BatchSize { sent: usize, got: usize },
}

pub trait Translator {
    fn translate(&self, batch: &[String], source_lang: &str) -> Vec<String>;
}

pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn translate(&self, batch: &[String], _: &str) -> Vec<String> {
        batch.to_vec()
    }
}

/// Reverses each string by characters. Handy for checking that
/// translations land in the right slots.
pub struct ReverseTranslator;

impl Translator for ReverseTranslator {
    fn translate(&self, batch: &[String], _: &str) -> Vec<String> {
        batch.iter().map(|s| s.chars().rev().collect()).collect()
    }
}

pub fn extract_translatables(chunk_id: &str, articles: &[Article]) -> Vec<TranslatableRecord> {
    let mut out = Vec::new();
    for (ai, a) in articles.iter().enumerate() {
        for (ei, e) in a.elements.iter().enumerate() {
            let mut push = |path: Vec<usize>, kind, text: &str| {
                out.push(TranslatableRecord {
                    chunk_id: chunk_id.to_string(),
                    article_index: ai,
                    element_path: path,
                    kind,
                    text: text.to_string(),
                    translated_text: None,
                })
            };
            match e {
                Element::Heading(h) => push(vec![ei], RecordKind::Heading, &h.text),
                Element::Paragraph(p) => {
                    for (si, s) in p.sentences.iter().enumerate() {
                        push(vec![ei, si], RecordKind::Sentence, &s.text);
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Fill `translated_text` on every record, `batch_size` texts per call.
pub fn translate_records(
    records: &mut [TranslatableRecord],
    translator: &dyn Translator,
    source_lang: &str,
    batch_size: usize,
) -> Result<(), TranslateError> {
    for batch in records.chunks_mut(batch_size.max(1)) {
        let texts: Vec<String> = batch.iter().map(|r| r.text.clone()).collect();
        let out = translator.translate(&texts, source_lang);
        if out.len() != texts.len() {
            return Err(TranslateError::BatchSize { sent: texts.len(), got: out.len() });
        }
        for (r, t) in batch.iter_mut().zip(out) {
            r.translated_text = Some(t);
        }
    }
    Ok(())
}

/// Write translations into the addressed headings and sentences, then
/// rebuild excerpts of the touched articles. Records for other chunks are
/// ignored; records without a translation are skipped. Nothing is written
/// unless every record resolves.
pub fn insert_translations(
    chunk_id: &str,
    articles: &mut [Article],
    records: &[TranslatableRecord],
) -> Result<usize, TranslateError> {
    let mismatch = |index: usize, r: &TranslatableRecord, reason: &str| TranslateError::PathMismatch {
        index,
        chunk_id: r.chunk_id.clone(),
        article_index: r.article_index,
        path: r.element_path.clone(),
        reason: reason.to_string(),
    };
    let relevant: Vec<(usize, &TranslatableRecord)> =
        records.iter().enumerate().filter(|(_, r)| r.chunk_id == chunk_id && r.translated_text.is_some()).collect();
    for &(index, r) in &relevant {
        let article = articles.get(r.article_index).ok_or_else(|| mismatch(index, r, "no such article"))?;
        let text = match (r.kind, r.element_path.as_slice(), r.element_path.first().and_then(|&i| article.elements.get(i))) {
            (RecordKind::Heading, [_], Some(Element::Heading(h))) => &h.text,
            (RecordKind::Sentence, [_, si], Some(Element::Paragraph(p))) => {
                &p.sentences.get(*si).ok_or_else(|| mismatch(index, r, "no such sentence"))?.text
            }
            _ => return Err(mismatch(index, r, "path does not address an element of this kind")),
        };
        if *text != r.text {
            return Err(mismatch(index, r, "source text differs"));
        }
    }
    let mut touched = vec![false; articles.len()];
    for (_, r) in &relevant {
        let a = &mut articles[r.article_index];
        let translated = r.translated_text.clone();
        match (&mut a.elements[r.element_path[0]], r.element_path.as_slice()) {
            (Element::Heading(h), _) => h.translated_text = translated,
            (Element::Paragraph(p), [_, si]) => p.sentences[*si].translated_text = translated,
            _ => unreachable!("validated above"),
        }
        touched[r.article_index] = true;
    }
    for (a, t) in articles.iter_mut().zip(touched) {
        if t {
            refresh_excerpts(a);
        }
    }
    Ok(relevant.len())
}

pub fn records_to_jsonl(records: &[TranslatableRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
}

pub fn records_from_jsonl(text: &str) -> Result<Vec<TranslatableRecord>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
