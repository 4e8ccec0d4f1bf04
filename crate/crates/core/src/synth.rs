//! Seeded generators for synthetic articles, paragraphs and wikitext.
//! Used by the property suites and for building fixture dumps.

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};

use crate::excerpt::build_excerpts;
use crate::schema::{
    compute_hash, Article, Citation, CitationNeeded, Code, Element, Heading, HeadingLevel, Paragraph, QualityLabel,
    RawBlock, Sentence, TrailingWhitespace,
};

const WORDS: &[&str] = &[
    "the", "river", "castle", "Paris", "Brontë", "roman", "über", "Straße", "año", "niño", "город", "река",
    "東京", "首都", "北京", "城市", "résumé", "naïve", "ĳssel", "Ωmega", "data", "corpus", "wiki", "x",
    "\"quoted\"", "(aside)", "«guillemets»", "e.g.", "Dr.", "U.S.", "3.14", "1,000", "—", "–", "&", "<tag>",
];

const TERMINALS: &[&str] = &[".", "!", "?", "…", "。", "！", "？", ".\"", ".)", "?!"];

fn word<R: Rng + ?Sized>(rng: &mut R) -> &'static str {
    WORDS.choose(rng).copied().unwrap_or("x")
}

/// Arbitrary short text including awkward characters.
pub fn random_text<R: Rng + ?Sized>(rng: &mut R, max_words: usize) -> String {
    let n = rng.random_range(0..=max_words);
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(' ');
        }
        match rng.random_range(0..20) {
            0 => out.push_str("line\nbreak"),
            1 => out.push_str("tab\there"),
            2 => out.push('\u{0007}'),
            3 => out.push_str("\\u0000"),
            _ => out.push_str(word(rng)),
        }
    }
    out
}

/// Multilingual paragraph text: sentences separated by single spaces,
/// occasionally by no space, multiple spaces or other whitespace.
pub fn random_paragraph<R: Rng + ?Sized>(rng: &mut R) -> String {
    let sentences = rng.random_range(0..6);
    let mut out = String::new();
    for s in 0..sentences {
        if s > 0 {
            match rng.random_range(0..10) {
                0 => {}
                1 => out.push_str("  "),
                2 => out.push('\n'),
                3 => out.push('\u{3000}'),
                _ => out.push(' '),
            }
        }
        let words = rng.random_range(1..10);
        for w in 0..words {
            if w > 0 {
                out.push(' ');
            }
            out.push_str(word(rng));
        }
        if rng.random_bool(0.85) {
            out.push_str(TERMINALS.choose(rng).unwrap());
        }
    }
    out
}

fn opt<R: Rng + ?Sized, T>(rng: &mut R, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    if rng.random_bool(0.5) {
        Some(f(rng))
    } else {
        None
    }
}

fn datetime<R: Rng + ?Sized>(rng: &mut R) -> String {
    format!(
        "20{:02}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        rng.random_range(1..25),
        rng.random_range(1..13),
        rng.random_range(1..29),
        rng.random_range(0..24),
        rng.random_range(0..60),
        rng.random_range(0..60)
    )
}

/// A citation obeying the field-presence rules of the schema.
pub fn random_citation<R: Rng + ?Sized>(rng: &mut R, text_len: usize) -> Citation {
    let mut c = Citation::new(format!("<ref>{}</ref>", random_text(rng, 4)), rng.random_range(0..=text_len));
    c.name = opt(rng, |r| random_text(r, 1));
    c.source_snippet = opt(rng, |r| random_text(r, 5));
    if rng.random_bool(0.6) {
        c.url = Some(format!("https://site{}.example/{}", rng.random_range(0..50), rng.random_range(0..1000)));
        if rng.random_bool(0.7) {
            c.source_download_date = Some(datetime(rng));
            match rng.random_range(0..3) {
                0 => {
                    c.source_download_error = Some("ReadTimeout: Read timed out. (read timeout=10)".into());
                }
                1 => {
                    c.source_extract_error = Some(format!("Text is too short ({} words)", rng.random_range(0..100)));
                    c.source_code_content_type = Some("text/html".into());
                    c.source_code_num_chars = Some(rng.random_range(0..5000));
                }
                _ => {
                    let text = random_text(rng, 30);
                    c.source_code_num_chars = Some(text.chars().count() as u64);
                    c.source_code_content_type = Some("text/html; charset=utf-8".into());
                    c.source_text = Some(text);
                    if rng.random_bool(0.7) {
                        // Awkward but finite doubles exercise float round-tripping.
                        let raw = rng.random::<f64>() * 1.4 - 0.2;
                        c.source_quality_raw_score = Some(raw);
                        c.source_quality_label = QualityLabel::new(rng.random_range(1..=5));
                    }
                }
            }
        }
    }
    c
}

fn random_markers<R: Rng + ?Sized>(rng: &mut R, text: &str) -> (Vec<Citation>, Vec<CitationNeeded>) {
    let len = text.chars().count();
    let citations = (0..rng.random_range(0..3)).map(|_| random_citation(rng, len)).collect();
    let needed = (0..rng.random_range(0..2))
        .map(|_| CitationNeeded::new("{{Citation needed|date=September 2015}}", rng.random_range(0..=len)))
        .collect();
    (citations, needed)
}

pub fn random_sentence<R: Rng + ?Sized>(rng: &mut R) -> Sentence {
    let text = random_text(rng, 8);
    let ws = if rng.random_bool(0.7) { TrailingWhitespace::Space } else { TrailingWhitespace::None };
    let mut s = Sentence::new(text, ws);
    (s.citations, s.citations_needed) = random_markers(rng, &s.text);
    s.translated_text = opt(rng, |r| random_text(r, 8));
    s
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R) -> Element {
    match rng.random_range(0..10) {
        0..=1 => {
            let text = random_text(rng, 4);
            let (citations, citations_needed) = random_markers(rng, &text);
            Element::Heading(Heading {
                translated_text: opt(rng, |r| random_text(r, 4)),
                level: HeadingLevel::new(rng.random_range(1..=6)).unwrap(),
                text,
                citations,
                citations_needed,
            })
        }
        2..=6 => Element::Paragraph(Paragraph { sentences: (0..rng.random_range(0..6)).map(|_| random_sentence(rng)).collect() }),
        7 => Element::Table(RawBlock::new(format!("{{| class=\"wikitable\"\n| {}\n|}}", random_text(rng, 5)))),
        8 => Element::Infobox(RawBlock::new(format!("{{{{Infobox\n| a = {}\n}}}}", random_text(rng, 5)))),
        _ => match rng.random_range(0..3) {
            0 => Element::Math(RawBlock::new("\\sin 2\\pi x + \\ln e")),
            1 => Element::Code(Code { language: opt(rng, |_| "python".to_string()), content: random_text(rng, 6) }),
            _ => Element::Preformatted(RawBlock::new(random_text(rng, 6))),
        },
    }
}

/// A schema-valid article with every optional field randomly present or
/// absent. `text` and excerpts are derived from the elements.
pub fn random_article<R: Rng + ?Sized>(rng: &mut R) -> Article {
    let title = random_text(rng, 3);
    let wikicode = random_text(rng, 30);
    let elements: Vec<Element> = (0..rng.random_range(0..8)).map(|_| random_element(rng)).collect();
    Article {
        hash: compute_hash(&title, &wikicode),
        title,
        wikicode,
        last_revision: datetime(rng),
        first_revision: opt(rng, datetime),
        first_revision_access_date: opt(rng, datetime),
        cross_lingual_links: opt(rng, |r| {
            (0..r.random_range(0..4)).map(|i| (["en", "fr", "es", "de"][i].to_string(), random_text(r, 3))).collect()
        }),
        cross_lingual_links_access_date: opt(rng, datetime),
        text: Article::natural_text(&elements),
        excerpts_with_citations: build_excerpts(&elements),
        elements,
    }
}

/// Plain prose wikitext for fixture dumps: a lead paragraph with a web
/// citation, one section, and a category link.
pub fn fixture_wikicode(rng: &mut dyn RngCore, index: usize) -> String {
    let topic = format!("Topic {index}");
    let n = rng.random_range(1..4);
    let extra: Vec<String> = (0..n).map(|k| format!("Fact {k} about {topic} is recorded.")).collect();
    format!(
        "'''{topic}''' is a synthetic article.<ref>{{{{cite web|url=https://example.org/{index}|title=Source}}}}</ref> {}\n\n== History ==\nIt was generated for testing.\n\n[[Category:Synthetic]]",
        extra.join(" ")
    )
}
