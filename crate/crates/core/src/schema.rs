//! Corpus record types and their JSON-lines encoding.
//!
//! Field names and ordering follow the published dataset schema exactly.
//! Every optional field is written as JSON `null` when absent, and unknown
//! fields are rejected on the way back in.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::SchemaError;

/// One Wikipedia page with its parsed structure and enrichments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Article {
    pub title: String,
    pub wikicode: String,
    pub hash: String,
    pub last_revision: String,
    pub first_revision: Option<String>,
    pub first_revision_access_date: Option<String>,
    pub cross_lingual_links: Option<BTreeMap<String, String>>,
    pub cross_lingual_links_access_date: Option<String>,
    pub text: String,
    pub elements: Vec<Element>,
    pub excerpts_with_citations: Vec<ExcerptWithCitations>,
}

impl Article {
    /// A freshly ingested article: metadata and hash set, structure empty.
    pub fn skeleton(title: impl Into<String>, wikicode: impl Into<String>, last_revision: impl Into<String>) -> Self {
        let title = title.into();
        let wikicode = wikicode.into();
        let hash = compute_hash(&title, &wikicode);
        Article {
            title,
            wikicode,
            hash,
            last_revision: last_revision.into(),
            first_revision: None,
            first_revision_access_date: None,
            cross_lingual_links: None,
            cross_lingual_links_access_date: None,
            text: String::new(),
            elements: Vec::new(),
            excerpts_with_citations: Vec::new(),
        }
    }

    /// Headings and paragraphs in element order, joined by newlines.
    pub fn natural_text(elements: &[Element]) -> String {
        let mut parts = Vec::new();
        for element in elements {
            match element {
                Element::Heading(h) => parts.push(h.text.clone()),
                Element::Paragraph(p) => parts.push(p.text()),
                _ => {}
            }
        }
        parts.join("\n")
    }

    /// All citations attached to headings and sentences, in document order.
    pub fn citations(&self) -> impl Iterator<Item = &Citation> {
        self.elements.iter().flat_map(|e| -> Box<dyn Iterator<Item = &Citation>> {
            match e {
                Element::Heading(h) => Box::new(h.citations.iter()),
                Element::Paragraph(p) => Box::new(p.sentences.iter().flat_map(|s| s.citations.iter())),
                _ => Box::new(std::iter::empty()),
            }
        })
    }

    pub fn citations_mut(&mut self) -> impl Iterator<Item = &mut Citation> {
        self.elements.iter_mut().flat_map(|e| -> Box<dyn Iterator<Item = &mut Citation>> {
            match e {
                Element::Heading(h) => Box::new(h.citations.iter_mut()),
                Element::Paragraph(p) => Box::new(p.sentences.iter_mut().flat_map(|s| s.citations.iter_mut())),
                _ => Box::new(std::iter::empty()),
            }
        })
    }
}

/// Block-level article element, discriminated by a lowercase `type` field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Element {
    Heading(Heading),
    Paragraph(Paragraph),
    Table(RawBlock),
    Infobox(RawBlock),
    Math(RawBlock),
    Code(Code),
    Preformatted(RawBlock),
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::Heading(_) => "heading",
            Element::Paragraph(_) => "paragraph",
            Element::Table(_) => "table",
            Element::Infobox(_) => "infobox",
            Element::Math(_) => "math",
            Element::Code(_) => "code",
            Element::Preformatted(_) => "preformatted",
        }
    }
}

// Hand-written so that errors inside an element keep their full field path;
// serde's internally tagged enums buffer the body and lose it.
impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut body = serde_json::Map::deserialize(deserializer)?;
        let kind = body.remove("type").ok_or_else(|| D::Error::missing_field("type"))?;
        let kind = kind.as_str().ok_or_else(|| D::Error::custom("element type must be a string"))?.to_string();
        let body = serde_json::Value::Object(body);
        let element = match kind.as_str() {
            "heading" => variant(body).map(Element::Heading),
            "paragraph" => variant(body).map(Element::Paragraph),
            "table" => variant(body).map(Element::Table),
            "infobox" => variant(body).map(Element::Infobox),
            "math" => variant(body).map(Element::Math),
            "code" => variant(body).map(Element::Code),
            "preformatted" => variant(body).map(Element::Preformatted),
            other => {
                return Err(D::Error::unknown_variant(
                    other,
                    &["heading", "paragraph", "table", "infobox", "math", "code", "preformatted"],
                ))
            }
        };
        element.map_err(D::Error::custom)
    }
}

/// Inner errors carry their relative path between `@` markers so that
/// `deserialize_article` can splice it onto the outer path.
fn variant<T: serde::de::DeserializeOwned>(body: serde_json::Value) -> Result<T, String> {
    serde_path_to_error::deserialize(body).map_err(|e| format!("@{}@{}", e.path(), e.inner()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Heading {
    pub text: String,
    pub translated_text: Option<String>,
    pub level: HeadingLevel,
    pub citations: Vec<Citation>,
    pub citations_needed: Vec<CitationNeeded>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paragraph {
    pub sentences: Vec<Sentence>,
}

impl Paragraph {
    /// The paragraph's cleaned text, rebuilt from its sentences.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&s.text);
            out.push_str(s.trailing_whitespace.as_str());
        }
        out
    }
}

/// Content-only element (table, infobox, math, preformatted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlock {
    pub content: String,
}

impl RawBlock {
    pub fn new(content: impl Into<String>) -> Self {
        RawBlock { content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Code {
    pub language: Option<String>,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sentence {
    pub text: String,
    pub translated_text: Option<String>,
    pub trailing_whitespace: TrailingWhitespace,
    pub citations: Vec<Citation>,
    pub citations_needed: Vec<CitationNeeded>,
}

impl Sentence {
    pub fn new(text: impl Into<String>, trailing_whitespace: TrailingWhitespace) -> Self {
        Sentence {
            text: text.into(),
            translated_text: None,
            trailing_whitespace,
            citations: Vec::new(),
            citations_needed: Vec::new(),
        }
    }
}

/// Either nothing or a single space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TrailingWhitespace {
    #[default]
    None,
    Space,
}

impl TrailingWhitespace {
    pub fn as_str(self) -> &'static str {
        match self {
            TrailingWhitespace::None => "",
            TrailingWhitespace::Space => " ",
        }
    }

    pub fn char_len(self) -> usize {
        match self {
            TrailingWhitespace::None => 0,
            TrailingWhitespace::Space => 1,
        }
    }
}

impl TryFrom<String> for TrailingWhitespace {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        match value.as_str() {
            "" => Ok(TrailingWhitespace::None),
            " " => Ok(TrailingWhitespace::Space),
            other => Err(format!("trailing_whitespace must be \"\" or \" \", got {other:?}")),
        }
    }
}

impl From<TrailingWhitespace> for String {
    fn from(value: TrailingWhitespace) -> Self {
        value.as_str().to_string()
    }
}

/// Heading depth, 1 (most general) through 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct HeadingLevel(u8);

impl HeadingLevel {
    pub fn new(level: u8) -> Option<Self> {
        (1..=6).contains(&level).then_some(HeadingLevel(level))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for HeadingLevel {
    type Error = String;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        u8::try_from(value)
            .ok()
            .and_then(HeadingLevel::new)
            .ok_or_else(|| format!("heading level must be in 1..=6, got {value}"))
    }
}

impl From<HeadingLevel> for u8 {
    fn from(value: HeadingLevel) -> Self {
        value.0
    }
}

/// Ordinal source quality label, 1 (irrelevant) through 5 (clean, relevant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct QualityLabel(u8);

impl QualityLabel {
    pub const ALL: [QualityLabel; 5] = [QualityLabel(1), QualityLabel(2), QualityLabel(3), QualityLabel(4), QualityLabel(5)];

    pub fn new(value: u8) -> Option<Self> {
        (1..=5).contains(&value).then_some(QualityLabel(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Rubric description of the class.
    pub fn description(self) -> &'static str {
        match self.0 {
            1 => "Irrelevant to the cited material: error pages, paywalls, captchas, menus, ads or link lists.",
            2 => "Probably irrelevant and hard to interpret, such as unrelated snippets or a table garbled during extraction.",
            3 => "Unclear whether this is the cited material, e.g. an abstract or an about page reached after a redirect.",
            4 => "The cited material, but with noticeable formatting or readability problems such as repeats or stray artifacts.",
            _ => "The cited material, clean and readable apart from minor leftover links or formatting.",
        }
    }
}

impl TryFrom<i64> for QualityLabel {
    type Error = String;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        u8::try_from(value)
            .ok()
            .and_then(QualityLabel::new)
            .ok_or_else(|| format!("quality label must be in 1..=5, got {value}"))
    }
}

impl From<QualityLabel> for u8 {
    fn from(value: QualityLabel) -> Self {
        value.0
    }
}

impl fmt::Display for QualityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A reference attached to a sentence or heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Citation {
    pub content: String,
    pub char_index: usize,
    pub name: Option<String>,
    pub url: Option<String>,
    pub source_text: Option<String>,
    pub source_code_content_type: Option<String>,
    pub source_code_num_bytes: Option<u64>,
    pub source_code_num_chars: Option<u64>,
    pub source_download_date: Option<String>,
    pub source_download_error: Option<String>,
    pub source_extract_error: Option<String>,
    pub source_snippet: Option<String>,
    pub source_quality_label: Option<QualityLabel>,
    pub source_quality_raw_score: Option<f64>,
}

impl Citation {
    pub fn new(content: impl Into<String>, char_index: usize) -> Self {
        Citation {
            content: content.into(),
            char_index,
            name: None,
            url: None,
            source_text: None,
            source_code_content_type: None,
            source_code_num_bytes: None,
            source_code_num_chars: None,
            source_download_date: None,
            source_download_error: None,
            source_extract_error: None,
            source_snippet: None,
            source_quality_label: None,
            source_quality_raw_score: None,
        }
    }

    pub fn is_web(&self) -> bool {
        self.url.is_some()
    }

    /// Web citation whose source text was extracted and is non-empty.
    pub fn has_source(&self) -> bool {
        self.url.is_some() && self.source_text.as_deref().is_some_and(|t| !t.is_empty())
    }

    /// Identity used when matching excerpt citations back to element citations.
    pub fn same_reference(&self, other: &Citation) -> bool {
        self.content == other.content && self.url == other.url
    }
}

/// Editorial "citation needed" marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CitationNeeded {
    #[serde(rename = "type")]
    pub kind: CitationNeededTag,
    pub content: String,
    pub char_index: usize,
}

impl CitationNeeded {
    pub fn new(content: impl Into<String>, char_index: usize) -> Self {
        CitationNeeded { kind: CitationNeededTag::CitationNeeded, content: content.into(), char_index }
    }
}

/// The constant `"citation-needed"` discriminator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CitationNeededTag {
    #[default]
    #[serde(rename = "citation-needed")]
    CitationNeeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcerptWithCitations {
    pub text: String,
    pub translated_text: Option<String>,
    pub citations: Vec<Citation>,
}

/// SHA-256 over `title`, a single `\n`, then `wikicode`, as lowercase hex.
pub fn compute_hash(title: &str, wikicode: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(title.as_bytes());
    hasher.update(b"\n");
    hasher.update(wikicode.as_bytes());
    hex::encode(hasher.finalize())
}

/// Encode an article as one JSON line (no trailing newline).
pub fn serialize_article(article: &Article) -> String {
    // serde_json escapes control characters, so the output never contains a raw newline.
    serde_json::to_string(article).expect("article serialization is infallible")
}

/// Decode one JSON line, reporting the offending field path on failure.
pub fn deserialize_article(line: &str) -> Result<Article, SchemaError> {
    let mut de = serde_json::Deserializer::from_str(line);
    let article: Article = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let outer = err.path().to_string();
        let message = err.inner().to_string();
        match message.strip_prefix('@').and_then(|m| m.split_once('@')) {
            Some((inner, rest)) => SchemaError { path: format!("{outer}.{inner}"), message: rest.to_string() },
            None => SchemaError { path: outer, message },
        }
    })?;
    de.end().map_err(|err| SchemaError { path: ".".into(), message: err.to_string() })?;
    Ok(article)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_of_empty_pair_is_hash_of_newline() {
        // printf '\n' | sha256sum
        assert_eq!(
            compute_hash("", ""),
            "01ba4719c80b6fe911b091a7c05124b64eeece964e09c058ef8f9805daca546b"
        );
        // printf 'A\nB' | sha256sum
        assert_eq!(
            compute_hash("A", "B"),
            "23519a43c66b4c342f25b32e09797ec5f3fc0be388cd8243fb3449afbdce4013"
        );
        assert_eq!(compute_hash("A", "B"), compute_hash("A", "B"));
    }

    #[test]
    fn minimal_article_serializes_nulls() {
        let article = Article::skeleton("T", "", "2023-12-03T10:50:40Z");
        let line = serialize_article(&article);
        assert!(!line.contains('\n'));
        assert!(line.contains(r#""excerpts_with_citations":[]"#));
        assert!(line.contains(r#""first_revision":null"#));
        assert_eq!(deserialize_article(&line).unwrap(), article);
    }

    #[test]
    fn citation_name_is_kept() {
        let mut article = Article::skeleton("T", "", "2023-12-03T10:50:40Z");
        let mut sentence = Sentence::new("Claim.", TrailingWhitespace::None);
        let mut citation = Citation::new("<ref name=\"Thomas2013\">{{Citation |last=Thomas}}</ref>", 6);
        citation.name = Some("Thomas2013".into());
        sentence.citations.push(citation);
        article.elements.push(Element::Paragraph(Paragraph { sentences: vec![sentence] }));
        let value: serde_json::Value = serde_json::from_str(&serialize_article(&article)).unwrap();
        assert_eq!(value["elements"][0]["sentences"][0]["citations"][0]["name"], "Thomas2013");
        assert_eq!(value["elements"][0]["type"], "paragraph");
    }

    #[test]
    fn label_out_of_range_names_the_field() {
        let mut article = Article::skeleton("T", "", "2023-12-03T10:50:40Z");
        let mut sentence = Sentence::new("x", TrailingWhitespace::None);
        sentence.citations.push(Citation::new("c", 1));
        article.elements.push(Element::Paragraph(Paragraph { sentences: vec![sentence] }));
        let line = serialize_article(&article).replace(r#""source_quality_label":null"#, r#""source_quality_label":6"#);
        let err = deserialize_article(&line).unwrap_err();
        assert!(err.path.contains("source_quality_label"), "{err}");
    }

    #[test]
    fn wrong_case_discriminator_rejected() {
        let line = r#"{"title":"T","wikicode":"","hash":"h","last_revision":"x","first_revision":null,"first_revision_access_date":null,"cross_lingual_links":null,"cross_lingual_links_access_date":null,"text":"","elements":[{"type":"Heading","text":"A","translated_text":null,"level":2,"citations":[],"citations_needed":[]}],"excerpts_with_citations":[]}"#;
        let err = deserialize_article(line).unwrap_err();
        assert!(err.path.starts_with("elements"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let article = Article::skeleton("T", "", "x");
        let line = serialize_article(&article).replacen('{', r#"{"extra":1,"#, 1);
        assert!(deserialize_article(&line).is_err());
    }

    #[test]
    fn trailing_whitespace_only_empty_or_space() {
        assert!(TrailingWhitespace::try_from("  ".to_string()).is_err());
        assert!(TrailingWhitespace::try_from("\n".to_string()).is_err());
        assert_eq!(TrailingWhitespace::try_from(" ".to_string()), Ok(TrailingWhitespace::Space));
    }

    #[test]
    fn citation_needed_has_constant_type() {
        let json = serde_json::to_string(&CitationNeeded::new("{{Citation needed|date=September 2015}}", 6)).unwrap();
        assert!(json.starts_with(r#"{"type":"citation-needed""#));
        let bad = json.replace("citation-needed", "citation_needed");
        assert!(serde_json::from_str::<CitationNeeded>(&bad).is_err());
    }
}
