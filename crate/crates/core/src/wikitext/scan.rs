//! Low-level scanning helpers over wikitext byte offsets.
//!
//! All offsets are byte indices into the source `&str` and always land on
//! char boundaries.

/// ASCII case-insensitive prefix test at byte offset `at`.
pub fn starts_with_ci(s: &str, at: usize, pat: &str) -> bool {
    s.as_bytes()
        .get(at..at + pat.len())
        .is_some_and(|b| b.eq_ignore_ascii_case(pat.as_bytes()))
}

/// ASCII case-insensitive search for `pat` starting at `from`.
pub fn find_ci(s: &str, from: usize, pat: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let pat = pat.as_bytes();
    if pat.is_empty() || from > bytes.len() {
        return None;
    }
    bytes[from..]
        .windows(pat.len())
        .position(|w| w.eq_ignore_ascii_case(pat))
        .map(|p| p + from)
}

fn next_char_len(s: &str, at: usize) -> usize {
    s[at..].chars().next().map_or(1, char::len_utf8)
}

/// End (exclusive) of an HTML comment starting at `at`; unterminated
/// comments run to the end of input.
pub fn comment_end(s: &str, at: usize) -> usize {
    match s[at + 4..].find("-->") {
        Some(p) => at + 4 + p + 3,
        None => s.len(),
    }
}

/// End (exclusive) of the balanced `{{ … }}` starting at `at`.
pub fn template_end(s: &str, at: usize) -> Option<usize> {
    debug_assert!(s[at..].starts_with("{{"));
    let mut depth = 0usize;
    let mut i = at;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with("{{") {
            depth += 1;
            i += 2;
        } else if rest.starts_with("}}") {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else if rest.starts_with("<!--") {
            i = comment_end(s, i);
        } else if starts_with_ci(s, i, "<nowiki>") {
            i = match find_ci(s, i, "</nowiki>") {
                Some(p) => p + "</nowiki>".len(),
                None => i + 1,
            };
        } else {
            i += next_char_len(s, i);
        }
    }
    None
}

/// End (exclusive) of the balanced `[[ … ]]` starting at `at`. Gives up at
/// a blank line, which MediaWiki never lets a link span.
pub fn link_end(s: &str, at: usize) -> Option<usize> {
    debug_assert!(s[at..].starts_with("[["));
    let mut depth = 0usize;
    let mut i = at;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with("[[") {
            depth += 1;
            i += 2;
        } else if rest.starts_with("]]") {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else if rest.starts_with("{{") {
            i = template_end(s, i).unwrap_or(i + 2);
        } else if rest.starts_with("\n\n") {
            return None;
        } else {
            i += next_char_len(s, i);
        }
    }
    None
}

/// A parsed `<tag …>` token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag<'a> {
    pub name: String,
    pub attrs: &'a str,
    pub closing: bool,
    pub self_closing: bool,
    /// Byte offset just past the `>`.
    pub end: usize,
}

impl Tag<'_> {
    /// Value of attribute `key`, with surrounding quotes removed.
    pub fn attr(&self, key: &str) -> Option<String> {
        attr_value(self.attrs, key)
    }
}

/// Parse an HTML-ish tag starting at `at` (which must be `<`).
pub fn parse_tag(s: &str, at: usize) -> Option<Tag<'_>> {
    let bytes = s.as_bytes();
    let mut i = at + 1;
    let closing = bytes.get(i) == Some(&b'/');
    if closing {
        i += 1;
    }
    let name_start = i;
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b'_') {
        i += 1;
    }
    if i == name_start || !bytes[name_start].is_ascii_alphabetic() {
        return None;
    }
    let name = s[name_start..i].to_ascii_lowercase();
    match bytes.get(i) {
        Some(b'>') | Some(b'/') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r') => {}
        _ => return None,
    }
    // Find the closing '>' outside quoted attribute values.
    let attrs_start = i;
    let mut quote: Option<u8> = None;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => break,
            None if b == b'<' => return None,
            None => {}
        }
        i += 1;
    }
    if i >= bytes.len() {
        return None;
    }
    let mut attrs = &s[attrs_start..i];
    let self_closing = attrs.trim_end().ends_with('/');
    if self_closing {
        attrs = attrs.trim_end().trim_end_matches('/');
    }
    Some(Tag { name, attrs: attrs.trim(), closing, self_closing, end: i + 1 })
}

/// Locate `</name>` (case-insensitive, optional whitespace before `>`).
/// Returns (start of the closing tag, end of the closing tag).
pub fn find_close_tag(s: &str, from: usize, name: &str) -> Option<(usize, usize)> {
    let pat = format!("</{name}");
    let mut from = from;
    while let Some(p) = find_ci(s, from, &pat) {
        let after = p + pat.len();
        let tail = &s[after..];
        let ws = tail.len() - tail.trim_start().len();
        if tail[ws..].starts_with('>') {
            return Some((p, after + ws + 1));
        }
        from = after;
    }
    None
}

/// Extract `key=value` from a tag attribute string. Values may be double-,
/// single-, or unquoted.
pub fn attr_value(attrs: &str, key: &str) -> Option<String> {
    let bytes = attrs.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let k_start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'=' {
            i += 1;
        }
        let k = &attrs[k_start..i];
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() || bytes[i] != b'=' {
            if k.eq_ignore_ascii_case(key) {
                return Some(String::new());
            }
            continue;
        }
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let value = match bytes.get(i) {
            Some(&q) if q == b'"' || q == b'\'' => {
                let start = i + 1;
                let end = attrs[start..].find(q as char).map_or(attrs.len(), |p| start + p);
                i = (end + 1).min(attrs.len());
                &attrs[start..end]
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                &attrs[start..i]
            }
        };
        if k.eq_ignore_ascii_case(key) {
            return Some(value.trim().to_string());
        }
    }
    None
}

/// Split a template or link body at top-level `|` separators.
pub fn split_top_level_pipes(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < body.len() {
        let rest = &body[i..];
        if rest.starts_with("{{") {
            i = template_end(body, i).unwrap_or(i + 2);
        } else if rest.starts_with("[[") {
            i = link_end(body, i).unwrap_or(i + 2);
        } else if rest.starts_with("<!--") {
            i = comment_end(body, i);
        } else if rest.starts_with('<') {
            // Skip bodies of tags like <ref>…</ref> so their pipes don't split.
            match parse_tag(body, i) {
                Some(tag) if !tag.closing && !tag.self_closing && is_opaque_tag(&tag.name) => {
                    i = find_close_tag(body, tag.end, &tag.name).map_or(tag.end, |(_, e)| e);
                }
                Some(tag) => i = tag.end,
                None => i += 1,
            }
        } else if rest.starts_with('|') {
            parts.push(&body[start..i]);
            i += 1;
            start = i;
        } else {
            i += next_char_len(body, i);
        }
    }
    parts.push(&body[start..]);
    parts
}

/// Tags whose body is not wikitext (or must be skipped as a unit).
pub fn is_opaque_tag(name: &str) -> bool {
    matches!(
        name,
        "ref"
            | "math"
            | "chem"
            | "ce"
            | "pre"
            | "nowiki"
            | "syntaxhighlight"
            | "source"
            | "code"
            | "gallery"
            | "timeline"
            | "imagemap"
            | "score"
            | "graph"
            | "mapframe"
            | "maplink"
            | "references"
            | "templatedata"
            | "templatestyles"
            | "hiero"
            | "inputbox"
            | "categorytree"
    )
}

/// Template parameters: `(Some(name), value)` for named, `(None, value)`
/// for positional. The first element of `parts` (the name) is skipped.
pub fn template_params(body: &str) -> (String, Vec<(Option<String>, String)>) {
    let parts = split_top_level_pipes(body);
    let name = parts.first().map(|s| s.trim().to_string()).unwrap_or_default();
    let params = parts
        .iter()
        .skip(1)
        .map(|part| match top_level_equals(part) {
            Some(eq) => (Some(part[..eq].trim().to_lowercase()), part[eq + 1..].to_string()),
            None => (None, part.to_string()),
        })
        .collect();
    (name, params)
}

fn top_level_equals(part: &str) -> Option<usize> {
    let mut i = 0;
    while i < part.len() {
        let rest = &part[i..];
        if rest.starts_with("{{") || rest.starts_with("[[") || rest.starts_with('<') {
            return None;
        }
        if rest.starts_with('=') {
            return Some(i);
        }
        i += next_char_len(part, i);
    }
    None
}
