//! Wikitext to element list.

mod block;
mod cite;
mod inline;
mod links;
pub mod scan;
mod text;

use std::collections::HashMap;

pub use block::{parse_article, parse_article_report, ParseReport};
pub use cite::{extract_snippet, extract_url};
pub use inline::InlineContext;
pub use links::strip_wikilinks;
pub use text::{fix_mojibake, fix_text};

use crate::config::LanguageConfig;
use scan::{comment_end, find_close_tag, parse_tag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentCitation {
    pub content: String,
    pub name: Option<String>,
    pub char_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentCitationNeeded {
    pub content: String,
    pub char_index: usize,
}

/// Clean text of one prose fragment with its citation markers lifted out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedFragment {
    pub clean_text: String,
    pub citations: Vec<FragmentCitation>,
    pub citations_needed: Vec<FragmentCitationNeeded>,
    /// Recoverable problems such as an unterminated `<ref>`.
    pub warnings: usize,
}

/// Clean a single prose fragment. Named refs are resolved against
/// definitions inside the fragment itself.
pub fn extract_citations(fragment: &str, config: &LanguageConfig) -> ParsedFragment {
    let named_refs = collect_named_refs(fragment);
    inline::clean_fragment(fragment, &InlineContext { config, named_refs: &named_refs })
}

/// Clean a fragment with article-wide context.
pub fn clean_fragment(fragment: &str, ctx: &InlineContext<'_>) -> ParsedFragment {
    inline::clean_fragment(fragment, ctx)
}

/// Every `<ref name=…>…</ref>` definition in `wikicode`, name → full raw
/// ref. The first definition of a name wins.
pub fn collect_named_refs(wikicode: &str) -> HashMap<String, String> {
    let mut refs = HashMap::new();
    let mut i = 0;
    while let Some(p) = wikicode[i..].find('<') {
        let at = i + p;
        if wikicode[at..].starts_with("<!--") {
            i = comment_end(wikicode, at);
            continue;
        }
        match parse_tag(wikicode, at) {
            Some(tag) if tag.name == "nowiki" && !tag.closing && !tag.self_closing => {
                i = find_close_tag(wikicode, tag.end, "nowiki").map_or(tag.end, |(_, e)| e);
            }
            Some(tag) if tag.name == "ref" && !tag.closing && !tag.self_closing => {
                match find_close_tag(wikicode, tag.end, "ref") {
                    Some((_, end)) => {
                        if let Some(name) = tag.attr("name").filter(|n| !n.is_empty()) {
                            refs.entry(name).or_insert_with(|| wikicode[at..end].to_string());
                        }
                        i = end;
                    }
                    None => i = tag.end,
                }
            }
            Some(tag) => i = tag.end,
            None => i = at + 1,
        }
    }
    refs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_ref_definition_and_reuse() {
        let en = LanguageConfig::default();
        let text = r#"First.<ref name="Thomas2013">{{Citation |last=Thomas |first=Darcy |year=2013}}</ref> Second.<ref name="Thomas2013" />"#;
        let f = extract_citations(text, &en);
        assert_eq!(f.clean_text, "First. Second.");
        assert_eq!(f.citations.len(), 2);
        assert_eq!(f.citations[0].name.as_deref(), Some("Thomas2013"));
        assert_eq!(f.citations[1].content, f.citations[0].content);
        assert_eq!(f.citations[1].char_index, 14);
    }

    #[test]
    fn unresolved_name_keeps_empty_content() {
        let f = extract_citations("X.<ref name=nowhere/>", &LanguageConfig::default());
        assert_eq!(f.citations[0].content, "");
        assert_eq!(f.citations[0].name.as_deref(), Some("nowhere"));
    }

    #[test]
    fn refs_in_comments_are_not_definitions() {
        let refs = collect_named_refs("<!-- <ref name=a>x</ref> --><ref name=b>y</ref>");
        assert!(!refs.contains_key("a"));
        assert_eq!(refs["b"], "<ref name=b>y</ref>");
    }
}
