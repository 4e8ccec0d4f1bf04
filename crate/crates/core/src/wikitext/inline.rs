//! Prose-level cleaning: markup removal with citation offset tracking.
//!
//! The cleaner walks a fragment once, emitting natural-language text into an
//! output buffer. Citations and citation-needed markers are removed from the
//! text and recorded at the output position (in chars) where they stood.
//! Whitespace is collapsed to single spaces and trimmed as it is emitted, so
//! recorded offsets are already in final clean-text coordinates.

use std::collections::HashMap;

use super::scan::{
    comment_end, find_close_tag, link_end, parse_tag, starts_with_ci, template_end, template_params,
};
use super::text::fix_text;
use super::{FragmentCitation, FragmentCitationNeeded, ParsedFragment};
use crate::config::LanguageConfig;

/// Article-wide context for cleaning fragments.
#[derive(Debug, Clone)]
pub struct InlineContext<'a> {
    pub config: &'a LanguageConfig,
    /// Named `<ref name=…>` definitions, name → raw definition.
    pub named_refs: &'a HashMap<String, String>,
}

#[derive(Default)]
struct Out {
    text: String,
    chars: usize,
    pending_space: bool,
    citations: Vec<FragmentCitation>,
    citations_needed: Vec<FragmentCitationNeeded>,
    warnings: usize,
}

impl Out {
    fn push_text(&mut self, s: &str) {
        for c in s.chars() {
            if c.is_whitespace() {
                self.pending_space = self.chars > 0;
            } else {
                if self.pending_space {
                    self.text.push(' ');
                    self.chars += 1;
                    self.pending_space = false;
                }
                self.text.push(c);
                self.chars += 1;
            }
        }
    }

    fn space(&mut self) {
        self.pending_space = self.chars > 0;
    }
}

/// Clean one prose fragment.
pub fn clean_fragment(fragment: &str, ctx: &InlineContext<'_>) -> ParsedFragment {
    let mut out = Out::default();
    clean_into(fragment, ctx, &mut out, 0);
    ParsedFragment {
        clean_text: out.text,
        citations: out.citations,
        citations_needed: out.citations_needed,
        warnings: out.warnings,
    }
}

const MAX_DEPTH: usize = 32;

fn clean_into(s: &str, ctx: &InlineContext<'_>, out: &mut Out, depth: usize) {
    if depth > MAX_DEPTH {
        out.push_text(&fix_text(s));
        return;
    }
    let mut run_start = 0;
    let mut i = 0;
    let flush = |out: &mut Out, from: usize, to: usize| {
        if from < to {
            out.push_text(&fix_text(&s[from..to]));
        }
    };
    while i < s.len() {
        let rest = &s[i..];
        let consumed = if rest.starts_with("<!--") {
            flush(out, run_start, i);
            Some(comment_end(s, i))
        } else if rest.starts_with('<') {
            flush(out, run_start, i);
            handle_tag(s, i, ctx, out, depth)
        } else if rest.starts_with("{{") {
            flush(out, run_start, i);
            handle_template(s, i, ctx, out, depth)
        } else if rest.starts_with("[[") {
            flush(out, run_start, i);
            handle_wikilink(s, i, ctx, out, depth)
        } else if rest.starts_with('[') {
            flush(out, run_start, i);
            handle_external_link(s, i, ctx, out, depth)
        } else if rest.starts_with("''") {
            flush(out, run_start, i);
            let run = rest.bytes().take_while(|&b| b == b'\'').count();
            match run {
                4 => out.push_text("'"),
                n if n > 5 => out.push_text(&"'".repeat(n - 5)),
                _ => {}
            }
            Some(i + run)
        } else if rest.starts_with("__") {
            flush(out, run_start, i);
            magic_word_end(rest).map(|n| i + n)
        } else {
            None
        };
        match consumed {
            Some(next) => {
                i = next;
                run_start = i;
            }
            None => {
                // Not markup after all; keep it as literal text. If the run
                // was flushed above, it restarts here.
                if is_markup_start(rest) {
                    run_start = i;
                }
                i += rest.chars().next().map_or(1, char::len_utf8);
            }
        }
    }
    flush(out, run_start, s.len());
}

fn is_markup_start(rest: &str) -> bool {
    rest.starts_with('<') || rest.starts_with('[') || rest.starts_with("{{") || rest.starts_with("''") || rest.starts_with("__")
}

fn magic_word_end(rest: &str) -> Option<usize> {
    let body = &rest[2..];
    let len = body.bytes().take_while(|b| b.is_ascii_uppercase()).count();
    (len > 0 && body[len..].starts_with("__")).then_some(len + 4)
}

fn handle_tag(s: &str, at: usize, ctx: &InlineContext<'_>, out: &mut Out, depth: usize) -> Option<usize> {
    let tag = parse_tag(s, at)?;
    if tag.closing {
        // Stray closing tags (</span>, </div>, a lone </ref>) are dropped.
        return Some(tag.end);
    }
    match tag.name.as_str() {
        "ref" => {
            let name = tag.attr("name").filter(|n| !n.is_empty());
            let (content, end) = if tag.self_closing {
                let content = name
                    .as_ref()
                    .and_then(|n| ctx.named_refs.get(n).cloned())
                    .unwrap_or_default();
                (content, tag.end)
            } else {
                match find_close_tag(s, tag.end, "ref") {
                    Some((_, close_end)) => (s[at..close_end].to_string(), close_end),
                    None => {
                        out.warnings += 1;
                        (s[at..].to_string(), s.len())
                    }
                }
            };
            out.citations.push(FragmentCitation { content, name, char_index: out.chars });
            Some(end)
        }
        "references" => Some(skip_body(s, &tag)),
        "br" | "hr" => {
            out.space();
            Some(tag.end)
        }
        "nowiki" | "math" | "chem" | "ce" | "code" | "syntaxhighlight" | "source" | "pre" | "tt" | "kbd" | "samp"
            if !tag.self_closing =>
        {
            match find_close_tag(s, tag.end, &tag.name) {
                Some((close_start, close_end)) => {
                    out.push_text(&fix_text(&s[tag.end..close_start]));
                    Some(close_end)
                }
                None => Some(tag.end),
            }
        }
        "gallery" | "timeline" | "imagemap" | "score" | "graph" | "mapframe" | "maplink" | "templatedata"
        | "templatestyles" | "hiero" | "inputbox" | "categorytree" | "indicator" | "section" => {
            Some(skip_body(s, &tag))
        }
        _ => {
            let _ = depth;
            Some(tag.end)
        }
    }
}

fn skip_body(s: &str, tag: &super::scan::Tag<'_>) -> usize {
    if tag.self_closing {
        return tag.end;
    }
    find_close_tag(s, tag.end, &tag.name).map_or(tag.end, |(_, e)| e)
}

fn handle_template(s: &str, at: usize, ctx: &InlineContext<'_>, out: &mut Out, depth: usize) -> Option<usize> {
    let end = template_end(s, at)?;
    let raw = &s[at..end];
    let body = &s[at + 2..end - 2];
    let (name, params) = template_params(body);
    let config = ctx.config;

    if let Some(rest) = name.strip_prefix('#') {
        let lower = rest.to_lowercase();
        if lower.starts_with("tag:ref") || lower.starts_with("tag: ref") {
            let ref_name = params.iter().find(|(k, _)| k.as_deref() == Some("name")).map(|(_, v)| v.trim().to_string());
            out.citations.push(FragmentCitation { content: raw.to_string(), name: ref_name, char_index: out.chars });
        }
        return Some(end);
    }
    if config.is_citation_needed_template(&name) {
        out.citations_needed.push(FragmentCitationNeeded { content: raw.to_string(), char_index: out.chars });
        return Some(end);
    }
    if config.is_citation_template(&name) {
        out.citations.push(FragmentCitation { content: raw.to_string(), name: None, char_index: out.chars });
        return Some(end);
    }
    if let Some(rendered) = render_inline_template(&config.resolve_template_title(&name), &params) {
        clean_into(&rendered, ctx, out, depth + 1);
    }
    Some(end)
}

/// Whether a template renders as inline text rather than being dropped.
pub(crate) fn is_inline_template(name: &str) -> bool {
    render_inline_template(name, &[]).is_some()
}

/// Plain-text rendering for a handful of common formatting templates.
/// Everything else is dropped (templates are never expanded).
fn render_inline_template(name: &str, params: &[(Option<String>, String)]) -> Option<String> {
    let lower = name.to_lowercase();
    let positional: Vec<&str> = params.iter().filter(|(k, _)| k.is_none()).map(|(_, v)| v.trim()).collect();
    let pos = |i: usize| positional.get(i).copied().unwrap_or("");
    let rendered = match lower.as_str() {
        "lang" => pos(1).to_string(),
        l if l.starts_with("lang-") => pos(0).to_string(),
        "nowrap" | "nobr" | "small" | "big" | "nobold" | "noitalic" | "em" | "strong" | "abbr" | "sic" | "ill"
        | "interlanguage link" | "vanchor" | "visible anchor" | "date" | "nihongo" | "transl" | "transliteration"
        | "langue" | "lien" | "nobreak" | "sc" | "smallcaps" | "math" | "mvar" | "var" => {
            if lower == "transl" || lower == "transliteration" || lower == "langue" {
                positional.last().copied().unwrap_or("").to_string()
            } else {
                pos(0).to_string()
            }
        }
        "convert" | "cvt" => format!("{} {}", pos(0), pos(1)),
        "unité" | "nombre" => positional.join(" "),
        "s" => format!("{}e siècle", pos(0)),
        "s-" => format!("{}e", pos(0)),
        "siglo" => format!("siglo {}", pos(0)),
        "quote" | "blockquote" | "cquote" | "quotation" | "zitat" | "цитата" => params
            .iter()
            .find(|(k, _)| matches!(k.as_deref(), Some("text" | "quote" | "Text")))
            .map_or_else(|| pos(0).to_string(), |(_, v)| v.trim().to_string()),
        "ndash" | "–" => "–".to_string(),
        "mdash" | "—" => "—".to_string(),
        "snd" | "spaced ndash" => " – ".to_string(),
        "nbsp" | "sp" => " ".to_string(),
        "·" | "dot" | "middot" => " · ".to_string(),
        "'" => "'".to_string(),
        "frac" => match positional.len() {
            0 => String::new(),
            1 => format!("1/{}", pos(0)),
            2 => format!("{}/{}", pos(0), pos(1)),
            _ => format!("{} {}/{}", pos(0), pos(1), pos(2)),
        },
        "circa" | "c." => format!("c. {}", pos(0)),
        l if l.starts_with("formatnum:") => name["formatnum:".len()..].trim().to_string(),
        _ => return None,
    };
    Some(rendered)
}

fn handle_wikilink(s: &str, at: usize, ctx: &InlineContext<'_>, out: &mut Out, depth: usize) -> Option<usize> {
    let end = link_end(s, at)?;
    let inner = &s[at + 2..end - 2];
    if let Some(display) = link_display(inner, ctx.config) {
        clean_into(display, ctx, out, depth + 1);
    }
    Some(end)
}

/// What a `[[inner]]` link renders as, or `None` if it is removed.
pub(crate) fn link_display<'a>(inner: &'a str, config: &LanguageConfig) -> Option<&'a str> {
    let parts = super::scan::split_top_level_pipes(inner);
    let target = parts[0];
    // For ordinary links the display is everything after the first pipe.
    let piped = (parts.len() > 1).then(|| &inner[target.len() + 1..]).filter(|d| !d.trim().is_empty());
    let trimmed = target.trim();
    if let Some(explicit) = trimmed.strip_prefix(':') {
        // [[:File:X]] / [[:Category:X]] link to the page instead of embedding it.
        return Some(piped.unwrap_or(explicit.trim_start()));
    }
    if config.is_file_link(trimmed) || config.is_category_link(trimmed) {
        return None;
    }
    if config.is_interwiki_link(trimmed) {
        return piped;
    }
    Some(piped.unwrap_or(target))
}

fn handle_external_link(s: &str, at: usize, ctx: &InlineContext<'_>, out: &mut Out, depth: usize) -> Option<usize> {
    let rest = &s[at + 1..];
    let is_url = ["http://", "https://", "ftp://", "//"].iter().any(|p| starts_with_ci(rest, 0, p));
    if !is_url {
        return None;
    }
    let close = rest.find(|c| c == ']' || c == '\n')?;
    if rest.as_bytes()[close] != b']' {
        return None;
    }
    let body = &rest[..close];
    if let Some((_, label)) = body.split_once(char::is_whitespace) {
        clean_into(label, ctx, out, depth + 1);
    }
    Some(at + 1 + close + 1)
}
