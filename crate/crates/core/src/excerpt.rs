use crate::schema::{Element, ExcerptWithCitations};

/// Sentences per excerpt window, the cited sentence included.
pub const WINDOW: usize = 3;

/// One excerpt per cited paragraph sentence: the sentence plus up to two
/// predecessors from the same paragraph. Citation offsets are shifted so
/// they index into the excerpt text.
pub fn build_excerpts(elements: &[Element]) -> Vec<ExcerptWithCitations> {
    let mut out = Vec::new();
    for element in elements {
        let Element::Paragraph(paragraph) = element else { continue };
        let sentences = &paragraph.sentences;
        for (i, sentence) in sentences.iter().enumerate() {
            if sentence.citations.is_empty() {
                continue;
            }
            let window = &sentences[(i + 1).saturating_sub(WINDOW)..=i];
            let mut text = String::new();
            let mut translated = Some(String::new());
            for (k, s) in window.iter().enumerate() {
                text.push_str(&s.text);
                translated = match (translated, &s.translated_text) {
                    (Some(mut acc), Some(t)) => {
                        acc.push_str(t);
                        Some(acc)
                    }
                    _ => None,
                };
                if k + 1 < window.len() {
                    text.push_str(s.trailing_whitespace.as_str());
                    if let Some(acc) = translated.as_mut() {
                        acc.push_str(s.trailing_whitespace.as_str());
                    }
                }
            }
            let shift = text.chars().count() - sentence.text.chars().count();
            let citations = sentence
                .citations
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.char_index += shift;
                    c
                })
                .collect();
            out.push(ExcerptWithCitations { text, translated_text: translated, citations });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{Citation, Paragraph, Sentence, TrailingWhitespace};

    fn sentence(text: &str, cited: bool) -> Sentence {
        let mut s = Sentence::new(text, TrailingWhitespace::Space);
        if cited {
            s.citations.push(Citation::new(format!("<ref>{text}</ref>"), text.chars().count()));
        }
        s
    }

    fn texts(elements: &[Element]) -> Vec<String> {
        build_excerpts(elements).into_iter().map(|e| e.text).collect()
    }

    #[test]
    fn short_window_at_paragraph_start() {
        let p = Element::Paragraph(Paragraph { sentences: vec![sentence("s1", false), sentence("s2", true)] });
        let ex = build_excerpts(&[p]);
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].text, "s1 s2");
        assert_eq!(ex[0].citations[0].content, "<ref>s2</ref>");
        assert_eq!(ex[0].citations[0].char_index, 5);
    }

    #[test]
    fn overlapping_windows() {
        let p = Element::Paragraph(Paragraph {
            sentences: vec![sentence("s1", true), sentence("s2", true), sentence("s3", false), sentence("s4", true)],
        });
        assert_eq!(texts(&[p]), vec!["s1", "s1 s2", "s2 s3 s4"]);
    }

    #[test]
    fn windows_do_not_cross_paragraphs() {
        let a = Element::Paragraph(Paragraph { sentences: vec![sentence("a1", false), sentence("a2", false)] });
        let b = Element::Paragraph(Paragraph { sentences: vec![sentence("b1", true)] });
        assert_eq!(texts(&[a, b]), vec!["b1"]);
    }

    #[test]
    fn no_citations_no_excerpts() {
        let p = Element::Paragraph(Paragraph { sentences: vec![sentence("x", false)] });
        assert!(build_excerpts(&[p]).is_empty());
    }

    #[test]
    fn translated_text_only_when_complete() {
        let mut s1 = sentence("un", false);
        let mut s2 = sentence("deux", true);
        s2.translated_text = Some("two".into());
        let p = Element::Paragraph(Paragraph { sentences: vec![s1.clone(), s2.clone()] });
        assert_eq!(build_excerpts(&[p])[0].translated_text, None);
        s1.translated_text = Some("one".into());
        let p = Element::Paragraph(Paragraph { sentences: vec![s1, s2] });
        assert_eq!(build_excerpts(&[p])[0].translated_text.as_deref(), Some("one two"));
    }
}
