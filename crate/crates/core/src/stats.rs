//! Corpus counts and the scrape outcome taxonomy.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::schema::{Article, Citation, Element};

/// Element counts for a set of articles. `sources` are web citations with
/// non-empty extracted text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsTable {
    pub articles: u64,
    pub headings: u64,
    pub paragraphs: u64,
    pub sentences: u64,
    pub citations: u64,
    pub web_citations: u64,
    pub sources: u64,
    /// Web citations pointing into the Wayback Machine.
    pub web_archive_citations: u64,
}

pub const WEB_ARCHIVE_MARKER: &str = "://web.archive.org/";

pub fn is_web_archive_url(url: &str) -> bool {
    url.to_ascii_lowercase().contains(WEB_ARCHIVE_MARKER)
}

impl StatsTable {
    /// Row labels in display order, paired with values.
    pub fn rows(&self) -> [(&'static str, u64); 8] {
        [
            ("Articles", self.articles),
            ("Headings", self.headings),
            ("Paragraphs", self.paragraphs),
            ("Sentences", self.sentences),
            ("Citations", self.citations),
            ("Web citations", self.web_citations),
            ("Sources", self.sources),
            ("web.archive.org citations", self.web_archive_citations),
        ]
    }

    pub fn add_article(&mut self, article: &Article) {
        self.articles += 1;
        let mut count_citation = |c: &Citation| {
            self.citations += 1;
            if let Some(url) = &c.url {
                self.web_citations += 1;
                if is_web_archive_url(url) {
                    self.web_archive_citations += 1;
                }
            }
            if c.has_source() {
                self.sources += 1;
            }
        };
        for element in &article.elements {
            match element {
                Element::Heading(h) => {
                    h.citations.iter().for_each(&mut count_citation);
                }
                Element::Paragraph(p) => {
                    for s in &p.sentences {
                        s.citations.iter().for_each(&mut count_citation);
                    }
                }
                _ => {}
            }
        }
        for element in &article.elements {
            match element {
                Element::Heading(_) => self.headings += 1,
                Element::Paragraph(p) => {
                    self.paragraphs += 1;
                    self.sentences += p.sentences.len() as u64;
                }
                _ => {}
            }
        }
    }

    pub fn of_articles<'a>(articles: impl IntoIterator<Item = &'a Article>) -> Self {
        let mut table = StatsTable::default();
        articles.into_iter().for_each(|a| table.add_article(a));
        table
    }
}

impl AddAssign for StatsTable {
    fn add_assign(&mut self, o: Self) {
        self.articles += o.articles;
        self.headings += o.headings;
        self.paragraphs += o.paragraphs;
        self.sentences += o.sentences;
        self.citations += o.citations;
        self.web_citations += o.web_citations;
        self.sources += o.sources;
        self.web_archive_citations += o.web_archive_citations;
    }
}

pub const CSV_HEADER: &str = "language,articles,headings,paragraphs,sentences,citations,web_citations,sources,web_archive_citations";

/// CSV with one row per language, header included.
pub fn stats_csv(tables: &BTreeMap<String, StatsTable>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (lang, t) in tables {
        let values: Vec<String> = t.rows().iter().map(|(_, v)| v.to_string()).collect();
        let _ = writeln!(out, "{lang},{}", values.join(","));
    }
    out
}

/// Right-aligned text table, one column per language.
pub fn stats_text_table(tables: &BTreeMap<String, StatsTable>) -> String {
    let label_width = StatsTable::default().rows().iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = tables
        .iter()
        .map(|(lang, t)| t.rows().iter().map(|(_, v)| v.to_string().len()).max().unwrap_or(0).max(lang.len()))
        .collect();
    let mut out = format!("{:label_width$}", "");
    for ((lang, _), w) in tables.iter().zip(&widths) {
        let _ = write!(out, "  {lang:>w$}");
    }
    out.push('\n');
    for row in 0..8 {
        let label = StatsTable::default().rows()[row].0;
        let _ = write!(out, "{label:label_width$}");
        for ((_, t), w) in tables.iter().zip(&widths) {
            let _ = write!(out, "  {:>w$}", t.rows()[row].1);
        }
        out.push('\n');
    }
    out
}

/// Outcome categories for a scraped web citation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrapeCategory {
    NotAttempted,
    Success,
    MaxRetries,
    ReadTimeout,
    OtherDownloadError,
    Http403,
    Http404,
    OtherHttpError,
    Skeleton,
    FewWords,
    OtherExtractError,
}

impl ScrapeCategory {
    pub fn is_download_error(self) -> bool {
        matches!(self, ScrapeCategory::MaxRetries | ScrapeCategory::ReadTimeout | ScrapeCategory::OtherDownloadError)
    }

    pub fn is_extract_error(self) -> bool {
        matches!(
            self,
            ScrapeCategory::Http403
                | ScrapeCategory::Http404
                | ScrapeCategory::OtherHttpError
                | ScrapeCategory::Skeleton
                | ScrapeCategory::FewWords
                | ScrapeCategory::OtherExtractError
        )
    }
}

pub const SKELETON_MESSAGE: &str = "Exception: HTML skeleton only (no text content)";

/// Classify a web citation by its stored scrape fields.
pub fn classify_scrape(c: &Citation) -> Option<ScrapeCategory> {
    c.url.as_ref()?;
    Some(if let Some(err) = &c.source_download_error {
        if err.contains("Max retries exceeded") {
            ScrapeCategory::MaxRetries
        } else if err.contains("Read timed out") || err.contains("ReadTimeout") {
            ScrapeCategory::ReadTimeout
        } else {
            ScrapeCategory::OtherDownloadError
        }
    } else if let Some(err) = &c.source_extract_error {
        if err.starts_with("HTTP 403") {
            ScrapeCategory::Http403
        } else if err.starts_with("HTTP 404") {
            ScrapeCategory::Http404
        } else if err.starts_with("HTTP ") {
            ScrapeCategory::OtherHttpError
        } else if err == SKELETON_MESSAGE {
            ScrapeCategory::Skeleton
        } else if err.starts_with("Text is too short") {
            ScrapeCategory::FewWords
        } else {
            ScrapeCategory::OtherExtractError
        }
    } else if c.source_text.is_some() {
        ScrapeCategory::Success
    } else {
        ScrapeCategory::NotAttempted
    })
}

/// Counts of each scrape category over a set of articles.
pub fn scrape_taxonomy<'a>(articles: impl IntoIterator<Item = &'a Article>) -> BTreeMap<ScrapeCategory, u64> {
    let mut counts = BTreeMap::new();
    for a in articles {
        for c in a.citations() {
            if let Some(cat) = classify_scrape(c) {
                *counts.entry(cat).or_insert(0) += 1;
            }
        }
    }
    counts
}
