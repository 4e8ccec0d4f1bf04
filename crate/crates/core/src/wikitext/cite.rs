//! Reading fields out of raw citation wikitext.

use super::scan::{comment_end, template_end, template_params};

/// URL of a citation: the `url=` parameter of a citation template, else the
/// first bare http(s) URL in the body.
pub fn extract_url(citation_content: &str) -> Option<String> {
    for body in templates(citation_content) {
        let (_, params) = template_params(body);
        if let Some(url) = param(&params, "url").and_then(|v| clean_url(&v)) {
            return Some(url);
        }
    }
    first_bare_url(citation_content)
}

/// Editor-provided quote stored in a `quote` template parameter.
pub fn extract_snippet(citation_content: &str) -> Option<String> {
    templates(citation_content).into_iter().find_map(|body| {
        let (_, params) = template_params(body);
        param(&params, "quote")
    })
}

/// Bodies (without braces) of every template in `s`, outermost first.
fn templates(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut i = 0;
    while let Some(p) = s[i..].find("{{") {
        let at = i + p;
        match template_end(s, at) {
            Some(end) => {
                let body = &s[at + 2..end - 2];
                out.push(body);
                out.extend(templates(body));
                i = end;
            }
            None => i = at + 2,
        }
    }
    out
}

fn param(params: &[(Option<String>, String)], key: &str) -> Option<String> {
    params
        .iter()
        .find(|(name, value)| name.as_deref() == Some(key) && !strip_comments(value).trim().is_empty())
        .map(|(_, value)| strip_comments(value).trim().to_string())
}

fn strip_comments(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while let Some(p) = s[i..].find("<!--") {
        out.push_str(&s[i..i + p]);
        i = comment_end(s, i + p);
    }
    out.push_str(&s[i..]);
    out
}

fn clean_url(raw: &str) -> Option<String> {
    let raw = raw.trim().trim_start_matches('[').trim();
    let token: &str = raw.split(|c: char| c.is_whitespace()).next()?;
    let token = token.trim_end_matches(']');
    let token = trim_trailing_punctuation(token);
    (!token.is_empty()).then(|| token.to_string())
}

fn first_bare_url(s: &str) -> Option<String> {
    let lower = s.to_ascii_lowercase();
    let start = [lower.find("http://"), lower.find("https://")].into_iter().flatten().min()?;
    let end = s[start..]
        .find(|c: char| c.is_whitespace() || matches!(c, ']' | '[' | '|' | '<' | '>' | '"' | '{' | '}'))
        .map_or(s.len(), |p| start + p);
    let url = trim_trailing_punctuation(&s[start..end]);
    let after_scheme = url.split_once("://").map_or("", |(_, rest)| rest);
    (!after_scheme.is_empty()).then(|| url.to_string())
}

fn trim_trailing_punctuation(url: &str) -> &str {
    let mut url = url;
    loop {
        let trimmed = url.trim_end_matches(['.', ',', ';', ':', '!', '?', '\'']);
        // A closing paren is only trailing punctuation when unbalanced.
        let trimmed = if trimmed.ends_with(')') && trimmed.matches('(').count() < trimmed.matches(')').count() {
            &trimmed[..trimmed.len() - 1]
        } else {
            trimmed
        };
        if trimmed.len() == url.len() {
            return url;
        }
        url = trimmed;
    }
}
