//! Rule-based sentence segmentation with exact reconstruction.

use crate::config::SegmenterRules;
use crate::schema::{Citation, CitationNeeded, Sentence, TrailingWhitespace};

/// Anything that can split clean paragraph text into sentences. The output
/// must reproduce the input exactly when each sentence is followed by its
/// trailing whitespace.
pub trait Segmenter {
    fn segment(&self, text: &str) -> Vec<(String, TrailingWhitespace)>;
}

/// Terminal punctuation plus abbreviation exceptions.
#[derive(Debug, Clone)]
pub struct RuleSegmenter {
    rules: SegmenterRules,
}

impl RuleSegmenter {
    pub fn new(rules: SegmenterRules) -> Self {
        let mut rules = rules;
        for abbr in &mut rules.abbreviation_exceptions {
            *abbr = abbr.to_lowercase();
        }
        RuleSegmenter { rules }
    }
}

impl Segmenter for RuleSegmenter {
    fn segment(&self, text: &str) -> Vec<(String, TrailingWhitespace)> {
        segment_paragraph(text, &self.rules)
    }
}

const CLOSERS: &[char] = &['"', '\'', '”', '’', '»', ')', ']', '}', '」', '』', '）', '】', '›', '“'];

/// Full-width terminals end a sentence even without following whitespace.
fn is_fullwidth_terminal(c: char) -> bool {
    matches!(c, '。' | '！' | '？' | '．')
}

pub fn segment_paragraph(text: &str, rules: &SegmenterRules) -> Vec<(String, TrailingWhitespace)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let byte_at = |i: usize| if i < n { chars[i].0 } else { text.len() };
    let is_terminal = |c: char| rules.terminal_punctuation.contains(&c);

    let mut out = Vec::new();
    let mut start = 0usize; // char index
    let mut i = 0usize;
    while i < n {
        let c = chars[i].1;
        if !is_terminal(c) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < n && (is_terminal(chars[j].1) || CLOSERS.contains(&chars[j].1)) {
            j += 1;
        }
        let fullwidth = chars[i..j].iter().any(|&(_, c)| is_fullwidth_terminal(c));
        let followed_by_space = j < n && chars[j].1.is_whitespace();
        if j >= n || !(followed_by_space || fullwidth) {
            i = j;
            continue;
        }
        let mut k = j;
        while k < n && chars[k].1.is_whitespace() {
            k += 1;
        }
        if k >= n {
            // Only whitespace left; it belongs to the final sentence.
            break;
        }
        if !fullwidth && suppressed(text, &chars, start, i, j, k, rules) {
            i = j;
            continue;
        }
        if k == j + 1 && chars[j].1 == ' ' {
            out.push((text[byte_at(start)..byte_at(j)].to_string(), TrailingWhitespace::Space));
        } else {
            out.push((text[byte_at(start)..byte_at(k)].to_string(), TrailingWhitespace::None));
        }
        start = k;
        i = k;
    }
    if start < n {
        out.push((text[byte_at(start)..].to_string(), TrailingWhitespace::None));
    }
    out
}

/// Should the candidate break after `chars[i..j]` be suppressed? `k` is the
/// first non-space char after the break.
fn suppressed(
    text: &str,
    chars: &[(usize, char)],
    start: usize,
    i: usize,
    j: usize,
    k: usize,
    rules: &SegmenterRules,
) -> bool {
    if chars[i].1 != '.' {
        return false;
    }
    if chars[k].1.is_lowercase() {
        return true;
    }
    // The token ending at the terminal: back to whitespace, '(' or sentence start.
    let mut w = i;
    while w > start && !chars[w - 1].1.is_whitespace() && chars[w - 1].1 != '(' {
        w -= 1;
    }
    let byte = |x: usize| chars.get(x).map_or(text.len(), |&(b, _)| b);
    let word = text[byte(w)..byte(i)].to_string();
    let token = text[byte(w)..byte(i + 1)].to_lowercase();
    let with_closers = text[byte(w)..byte(j)].to_lowercase();
    if rules
        .abbreviation_exceptions
        .iter()
        .any(|a| a.to_lowercase() == token || a.to_lowercase() == with_closers)
    {
        return true;
    }
    let mut letters = word.chars();
    // "J. R. R. Tolkien": single capital initials.
    if let (Some(first), None) = (letters.next(), letters.next()) {
        if first.is_uppercase() {
            return true;
        }
    }
    // "U.S.", "i.e.": alternating letter-dot tokens.
    let parts: Vec<&str> = token.split('.').collect();
    parts.len() >= 3
        && parts[parts.len() - 1].is_empty()
        && parts[..parts.len() - 1].iter().all(|p| p.chars().count() == 1 && p.chars().all(char::is_alphabetic))
}

/// Split paragraph-scope citations among `sentences`. A citation at offset
/// `o` goes to the first sentence whose end is at or after `o`, so a marker
/// sitting exactly on a boundary stays with the sentence it follows.
/// Returns the number of offsets that fell past the end of the paragraph.
pub fn assign_offsets(
    sentences: &mut [Sentence],
    citations: Vec<Citation>,
    citations_needed: Vec<CitationNeeded>,
) -> usize {
    if sentences.is_empty() {
        return citations.len() + citations_needed.len();
    }
    let mut spans = Vec::with_capacity(sentences.len());
    let mut pos = 0usize;
    for s in sentences.iter() {
        let len = s.text.chars().count();
        spans.push((pos, pos + len));
        pos += len + s.trailing_whitespace.char_len();
    }
    let mut warnings = 0;
    let mut locate = |offset: usize| -> (usize, usize) {
        match spans.iter().position(|&(_, end)| offset <= end) {
            Some(k) => (k, offset - spans[k].0),
            None => {
                warnings += 1;
                let last = spans.len() - 1;
                (last, spans[last].1 - spans[last].0)
            }
        }
    };
    for mut c in citations {
        let (k, local) = locate(c.char_index);
        c.char_index = local;
        sentences[k].citations.push(c);
    }
    for mut c in citations_needed {
        let (k, local) = locate(c.char_index);
        c.char_index = local;
        sentences[k].citations_needed.push(c);
    }
    warnings
}
