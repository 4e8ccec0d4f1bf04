//! Block structure: headings, paragraphs and raw-content elements.

use super::cite::{extract_snippet, extract_url};
use super::inline::{clean_fragment, is_inline_template, InlineContext};
use super::scan::{comment_end, find_close_tag, link_end, parse_tag, template_end, template_params};
use super::{collect_named_refs, FragmentCitation, ParsedFragment};
use crate::config::LanguageConfig;
use crate::schema::{Citation, CitationNeeded, Code, Element, Heading, HeadingLevel, Paragraph, RawBlock, Sentence, TrailingWhitespace};
use crate::segment::{assign_offsets, RuleSegmenter, Segmenter};

/// Elements plus a count of recoverable problems met while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseReport {
    pub elements: Vec<Element>,
    pub warnings: usize,
    /// Clean text of each paragraph as assembled before segmentation.
    pub paragraph_texts: Vec<String>,
}

/// Parse article wikicode into its element list. Never fails.
pub fn parse_article(wikicode: &str, config: &LanguageConfig) -> Vec<Element> {
    parse_article_report(wikicode, config).elements
}

pub fn parse_article_report(wikicode: &str, config: &LanguageConfig) -> ParseReport {
    let named_refs = collect_named_refs(wikicode);
    let mut parser = Parser {
        s: wikicode,
        ctx: InlineContext { config, named_refs: &named_refs },
        segmenter: RuleSegmenter::new(config.segmenter_rules()),
        elements: Vec::new(),
        para: Vec::new(),
        pending: Vec::new(),
        warnings: 0,
        paragraph_texts: Vec::new(),
    };
    parser.run();
    ParseReport { elements: parser.elements, warnings: parser.warnings, paragraph_texts: parser.paragraph_texts }
}

struct Line {
    start: usize,
    end: usize,
    list: bool,
}

enum Marker {
    Cite(Citation),
    Needed(CitationNeeded),
}

struct Parser<'a> {
    s: &'a str,
    ctx: InlineContext<'a>,
    segmenter: RuleSegmenter,
    elements: Vec<Element>,
    para: Vec<Line>,
    /// Markers from text-less lines that precede the first paragraph.
    pending: Vec<Marker>,
    warnings: usize,
    paragraph_texts: Vec<String>,
}

/// End of the logical line starting at `pos`: the next newline that is not
/// inside a template, link, comment or opaque tag.
fn line_end(s: &str, pos: usize) -> usize {
    let mut i = pos;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with('\n') {
            return i;
        } else if rest.starts_with("{{") {
            i = template_end(s, i).unwrap_or(i + 2);
        } else if rest.starts_with("[[") {
            i = link_end(s, i).unwrap_or(i + 2);
        } else if rest.starts_with("<!--") {
            i = comment_end(s, i);
        } else if rest.starts_with('<') {
            i = match parse_tag(s, i) {
                Some(tag) if !tag.closing && !tag.self_closing && super::scan::is_opaque_tag(&tag.name) => {
                    find_close_tag(s, tag.end, &tag.name).map_or(tag.end, |(_, e)| e)
                }
                Some(tag) => tag.end,
                None => i + 1,
            };
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    s.len()
}

fn strip_comments(s: &str) -> String {
    let mut out = String::new();
    let mut i = 0;
    while let Some(p) = s[i..].find("<!--") {
        out.push_str(&s[i..i + p]);
        i = comment_end(s, i + p);
    }
    out.push_str(&s[i..]);
    out
}

fn is_blank(s: &str) -> bool {
    strip_comments(s).trim().is_empty()
}

fn heading_parts(body: &str) -> Option<(u8, &str)> {
    let mut t = body.trim_end();
    // Trailing comments after the closing '=' run are common.
    while t.ends_with("-->") {
        let open = t.rfind("<!--")?;
        t = t[..open].trim_end();
    }
    if !t.starts_with('=') || !t.ends_with('=') {
        return None;
    }
    let lead = t.bytes().take_while(|&b| b == b'=').count();
    if lead == t.len() {
        return None;
    }
    let trail = t.bytes().rev().take_while(|&b| b == b'=').count();
    let level = lead.min(trail).min(6);
    Some((level as u8, &t[level..t.len() - level]))
}

fn to_citation(f: FragmentCitation) -> Citation {
    let mut c = Citation::new(f.content, f.char_index);
    c.name = f.name;
    c.url = extract_url(&c.content);
    c.source_snippet = extract_snippet(&c.content);
    c
}

fn fragment_markers(f: &mut ParsedFragment) -> (Vec<Citation>, Vec<CitationNeeded>) {
    let citations = f.citations.drain(..).map(to_citation).collect();
    let needed = f.citations_needed.drain(..).map(|c| CitationNeeded::new(c.content, c.char_index)).collect();
    (citations, needed)
}

impl<'a> Parser<'a> {
    fn run(&mut self) {
        let s = self.s;
        let n = s.len();
        let mut pos = 0;
        while pos < n {
            let end = line_end(s, pos);
            let next = (end + 1).min(n);
            let line = &s[pos..end];
            if is_blank(line) {
                self.flush();
                pos = next;
                continue;
            }
            let lead_ws = line.len() - line.trim_start_matches([' ', '\t']).len();
            let body = &line[lead_ws..];
            let bpos = pos + lead_ws;
            if lead_ws > 0 && !["{{", "{|", "<", "[["].iter().any(|p| body.starts_with(p)) {
                pos = self.preformatted(pos);
                continue;
            }
            if body.starts_with('=') {
                if let Some((level, inner)) = heading_parts(body) {
                    self.flush();
                    self.heading(level, inner);
                    pos = next;
                    continue;
                }
            }
            if body.starts_with("{|") {
                self.flush();
                pos = self.table(bpos);
                continue;
            }
            if body.starts_with("{{") {
                if let Some(after) = self.block_template(bpos) {
                    pos = after;
                    continue;
                }
            }
            if body.starts_with("----") {
                self.flush();
                let rest = body.trim_start_matches('-');
                pos = if is_blank(rest) { next } else { end - rest.len() };
                continue;
            }
            let unindented = body.trim_start_matches(':').trim_start();
            if unindented.starts_with('<') {
                if let Some(after) = self.block_tag(end - unindented.len()) {
                    pos = after;
                    continue;
                }
            }
            let list = body.starts_with(['*', '#', ':', ';']);
            self.para.push(Line { start: bpos, end, list });
            pos = next;
        }
        self.flush();
        self.warnings += self.pending.len();
        self.pending.clear();
    }

    /// Skip spaces after a mid-line construct; if the rest of the line is
    /// blank, continue on the next line.
    fn resume_after(&self, at: usize) -> usize {
        let end = line_end(self.s, at);
        if is_blank(&self.s[at..end]) {
            (end + 1).min(self.s.len())
        } else {
            at + (self.s[at..].len() - self.s[at..].trim_start_matches([' ', '\t']).len())
        }
    }

    fn heading(&mut self, level: u8, inner: &str) {
        let mut fragment = clean_fragment(inner, &self.ctx);
        self.warnings += fragment.warnings;
        if fragment.clean_text.is_empty() {
            return;
        }
        let (citations, citations_needed) = fragment_markers(&mut fragment);
        self.elements.push(Element::Heading(Heading {
            text: fragment.clean_text,
            translated_text: None,
            level: HeadingLevel::new(level).expect("level clamped to 1..=6"),
            citations,
            citations_needed,
        }));
    }

    /// Consecutive space-indented lines. Returns the position after them.
    fn preformatted(&mut self, mut pos: usize) -> usize {
        self.flush();
        let s = self.s;
        let mut content = String::new();
        while pos < s.len() {
            let end = line_end(s, pos);
            let line = &s[pos..end];
            let body = line.trim_start_matches([' ', '\t']);
            if is_blank(line) || body.len() == line.len() || ["{{", "{|", "<", "[["].iter().any(|p| body.starts_with(p)) {
                break;
            }
            content.push_str(&line[1..]);
            content.push('\n');
            pos = (end + 1).min(s.len());
        }
        self.elements.push(Element::Preformatted(RawBlock::new(content)));
        pos
    }

    fn table(&mut self, start: usize) -> usize {
        let s = self.s;
        let mut depth = 0usize;
        let mut pos = start;
        while pos < s.len() {
            let end = line_end(s, pos);
            let line = &s[pos..end];
            let t = line.trim_start();
            let t_at = pos + (line.len() - t.len());
            if t.starts_with("{|") {
                depth += 1;
            } else if t.starts_with("|}") {
                depth -= 1;
                if depth == 0 {
                    let close = t_at + 2;
                    self.elements.push(Element::Table(RawBlock::new(&s[start..close])));
                    return self.resume_after(close);
                }
            }
            pos = end + 1;
        }
        // Never closed: keep the raw text rather than guess where it ends.
        self.warnings += 1;
        self.elements.push(Element::Preformatted(RawBlock::new(&s[start..])));
        s.len()
    }

    /// Handle a template at the start of a line. Returns `None` when the
    /// line should be treated as prose instead.
    fn block_template(&mut self, at: usize) -> Option<usize> {
        let s = self.s;
        let end = template_end(s, at)?;
        let (name, _) = template_params(&s[at + 2..end - 2]);
        let config = self.ctx.config;
        if config.is_infobox(&name) {
            self.flush();
            self.elements.push(Element::Infobox(RawBlock::new(&s[at..end])));
            return Some(self.resume_after(end));
        }
        let lower = name.to_lowercase();
        if lower.starts_with("#tag:ref")
            || config.is_citation_template(&name)
            || config.is_citation_needed_template(&name)
            || is_inline_template(&config.resolve_template_title(&name))
        {
            return None;
        }
        // Any other template owning its line is navigation or maintenance
        // furniture and is dropped.
        let rest_end = line_end(s, end);
        let rest = &s[end..rest_end];
        if is_blank(rest) {
            Some((rest_end + 1).min(s.len()))
        } else if rest.trim_start().starts_with("{{") {
            Some(self.resume_after(end))
        } else {
            None
        }
    }

    /// A block-level tag on its own line (math, code, pre, gallery, …).
    fn block_tag(&mut self, at: usize) -> Option<usize> {
        let s = self.s;
        let tag = parse_tag(s, at)?;
        if tag.closing {
            return None;
        }
        let kind = tag.name.as_str();
        let keeps = matches!(kind, "math" | "syntaxhighlight" | "source" | "pre" | "code");
        let drops = matches!(
            kind,
            "gallery" | "references" | "timeline" | "imagemap" | "graph" | "mapframe" | "score" | "templatestyles" | "categorytree"
        );
        if !keeps && !drops {
            return None;
        }
        let (inner, close_end) = if tag.self_closing {
            ("", tag.end)
        } else {
            let (close_start, close_end) = find_close_tag(s, tag.end, kind)?;
            (&s[tag.end..close_start], close_end)
        };
        let rest_end = line_end(s, close_end);
        let rest = strip_comments(&s[close_end..rest_end]);
        if !rest.chars().all(|c| c.is_whitespace() || matches!(c, '.' | ',' | ';' | ':')) {
            return None;
        }
        if kind == "math" && tag.attr("display").as_deref() == Some("inline") {
            return None;
        }
        self.flush();
        match kind {
            "math" => self.elements.push(Element::Math(RawBlock::new(inner.trim()))),
            "syntaxhighlight" | "source" => self.elements.push(Element::Code(Code {
                language: tag.attr("lang").filter(|l| !l.is_empty()),
                content: inner.to_string(),
            })),
            "code" => self.elements.push(Element::Code(Code { language: None, content: inner.to_string() })),
            "pre" => self.elements.push(Element::Preformatted(RawBlock::new(inner))),
            _ => {}
        }
        Some((rest_end + 1).min(s.len()))
    }

    /// Turn the buffered prose lines into a Paragraph. Runs of ordinary
    /// lines are one fragment (a single newline is a soft wrap); each list
    /// item is its own fragment and always ends a sentence.
    fn flush(&mut self) {
        if self.para.is_empty() {
            return;
        }
        let lines = std::mem::take(&mut self.para);
        let s = self.s;
        let mut sources: Vec<&str> = Vec::new();
        let mut run: Option<(usize, usize)> = None;
        for line in &lines {
            if line.list {
                if let Some((a, b)) = run.take() {
                    sources.push(&s[a..b]);
                }
                sources.push(s[line.start..line.end].trim_start_matches(['*', '#', ':', ';']));
            } else {
                run = Some(match run {
                    Some((a, _)) => (a, line.end),
                    None => (line.start, line.end),
                });
            }
        }
        if let Some((a, b)) = run {
            sources.push(&s[a..b]);
        }

        let mut pieces: Vec<(String, Vec<Marker>)> = Vec::new();
        for source in sources {
            let mut fragment = clean_fragment(source, &self.ctx);
            self.warnings += fragment.warnings;
            let (citations, needed) = fragment_markers(&mut fragment);
            let mut markers: Vec<Marker> = citations.into_iter().map(Marker::Cite).collect();
            markers.extend(needed.into_iter().map(Marker::Needed));
            if fragment.clean_text.is_empty() {
                // A line holding nothing but a ref: the marker belongs to
                // whatever text came just before it.
                match pieces.last_mut() {
                    Some((text, existing)) => {
                        let at = text.chars().count();
                        existing.extend(markers.into_iter().map(|m| with_index(m, at)));
                    }
                    None => self.attach_orphans(markers),
                }
                continue;
            }
            if pieces.is_empty() && !self.pending.is_empty() {
                let mut pending: Vec<Marker> = std::mem::take(&mut self.pending).into_iter().map(|m| with_index(m, 0)).collect();
                pending.extend(markers);
                markers = pending;
            }
            pieces.push((fragment.clean_text, markers));
        }
        if pieces.is_empty() {
            return;
        }

        let joined: Vec<&str> = pieces.iter().map(|(t, _)| t.as_str()).collect();
        self.paragraph_texts.push(joined.join(" "));
        let last = pieces.len() - 1;
        let mut sentences = Vec::new();
        for (k, (text, markers)) in pieces.into_iter().enumerate() {
            let mut group: Vec<Sentence> = self
                .segmenter
                .segment(&text)
                .into_iter()
                .map(|(t, w)| Sentence::new(t, w))
                .collect();
            if k < last {
                if let Some(s) = group.last_mut() {
                    s.trailing_whitespace = TrailingWhitespace::Space;
                }
            }
            let mut citations = Vec::new();
            let mut needed = Vec::new();
            for m in markers {
                match m {
                    Marker::Cite(c) => citations.push(c),
                    Marker::Needed(c) => needed.push(c),
                }
            }
            self.warnings += assign_offsets(&mut group, citations, needed);
            sentences.extend(group);
        }
        self.elements.push(Element::Paragraph(Paragraph { sentences }));
    }

    /// Markers with no text of their own attach to the end of the nearest
    /// preceding paragraph, or failing that the start of the next one.
    fn attach_orphans(&mut self, markers: Vec<Marker>) {
        let previous = self.elements.iter_mut().rev().find_map(|e| match e {
            Element::Paragraph(p) => p.sentences.last_mut(),
            _ => None,
        });
        match previous {
            Some(sentence) => {
                let at = sentence.text.chars().count();
                for m in markers {
                    match with_index(m, at) {
                        Marker::Cite(c) => sentence.citations.push(c),
                        Marker::Needed(c) => sentence.citations_needed.push(c),
                    }
                }
            }
            None => self.pending.extend(markers),
        }
    }
}

fn with_index(m: Marker, at: usize) -> Marker {
    match m {
        Marker::Cite(mut c) => {
            c.char_index = at;
            Marker::Cite(c)
        }
        Marker::Needed(mut c) => {
            c.char_index = at;
            Marker::Needed(c)
        }
    }
}
