//! Independent reference implementations shared by the core tests and the
//! workspace acceptance target.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::Path;

use wikicite_core::quality::{apply_thresholds, macro_f1, QualityThresholds};
use wikicite_core::{Element, QualityLabel, Sentence};

/// Independent slicing: for each cited sentence i, sentences max(0, i-2)..=i.
pub fn excerpt_windows(elements: &[Element]) -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for e in elements {
        if let Element::Paragraph(p) = e {
            let s: &[Sentence] = &p.sentences;
            for i in 0..s.len() {
                if s[i].citations.is_empty() {
                    continue;
                }
                let lo = i.saturating_sub(2);
                let mut text = String::new();
                for k in lo..i {
                    text += &s[k].text;
                    text += s[k].trailing_whitespace.as_str();
                }
                text += &s[i].text;
                out.push((text, s[i].citations.iter().map(|c| c.content.clone()).collect()));
            }
        }
    }
    out
}

/// Exhaustive search written independently of the library: every
/// nondecreasing placement of four cuts into the gaps around the sorted
/// distinct scores, labels assigned by `apply_thresholds`, ties broken by
/// comparing cut vectors element by element.
pub fn brute_force_fit(scores: &[f64], labels: &[QualityLabel]) -> ([f64; 4], f64) {
    let mut unique = scores.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let m = unique.len();
    let lo = if unique[0] > 0.0 { 0.0 } else { unique[0] - 1.0 };
    let hi = if unique[m - 1] < 1.0 { 1.0 } else { unique[m - 1] + 1.0 };
    let interval = |g: usize| (if g == 0 { lo } else { unique[g - 1] }, if g == m { hi } else { unique[g] });
    let place = |gaps: [usize; 4]| -> [f64; 4] {
        let mut cuts = [0.0; 4];
        for i in 0..4 {
            let same: Vec<usize> = (0..4).filter(|&j| gaps[j] == gaps[i]).collect();
            let rank = same.iter().position(|&j| j == i).unwrap() as f64 + 1.0;
            let (a, b) = interval(gaps[i]);
            cuts[i] = a + (b - a) * rank / (same.len() as f64 + 1.0);
        }
        cuts
    };
    let mut best: Option<([f64; 4], f64)> = None;
    for a in 0..=m {
        for b in a..=m {
            for c in b..=m {
                for d in c..=m {
                    let cuts = place([a, b, c, d]);
                    let t = QualityThresholds::new(cuts).unwrap();
                    let pred: Vec<QualityLabel> = scores.iter().map(|&s| apply_thresholds(s, &t)).collect();
                    let f1 = macro_f1(labels, &pred);
                    let better = match best {
                        None => true,
                        Some((bc, bf)) => f1 > bf + 1e-12 || ((f1 - bf).abs() <= 1e-12 && cuts.partial_cmp(&bc) == Some(std::cmp::Ordering::Less)),
                    };
                    if better {
                        best = Some((cuts, f1));
                    }
                }
            }
        }
    }
    best.unwrap()
}

/// (name, language, wikitext) of every golden fixture, sorted by name.
pub fn golden_fixtures(dir: &Path) -> Vec<(String, String, String)> {
    let mut out: Vec<(String, String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "wiki"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().to_string();
            let lang = name.split('_').next().unwrap().to_string();
            (name, lang, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

const MARKUP: &[char] = &['[', ']', '{', '}', '|', '=', '\'', '<', '>', '*', '#', ':', ';', '!', '-', '/', '"'];

/// Drop syntax that addresses rather than displays: comments, tags, template
/// names, parameter names, piped link targets and namespace prefixes.
fn strip_pure_markup(s: &str) -> String {
    let s = strip_comments(s);
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    let upto = |from: usize, stop: &dyn Fn(char) -> bool| (from..chars.len()).find(|&k| stop(chars[k]));
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c == '<' && next.is_some_and(|n| n.is_alphabetic() || n == '/') {
            if let Some(close) = upto(i, &|c| c == '>' || c == '\n') {
                if chars[close] == '>' {
                    i = close + 1;
                    continue;
                }
            }
        }
        if c == '{' && next == Some('{') {
            i = upto(i + 2, &|c| c == '|' || c == '}').unwrap_or(chars.len());
            continue;
        }
        if c == '|' {
            if let Some(eq) = upto(i + 1, &|c| matches!(c, '=' | '|' | '[' | '{' | '}' | ']' | '\n')) {
                if chars[eq] == '=' && eq - i <= 30 {
                    i = eq + 1;
                    continue;
                }
            }
        }
        if c == '[' && next == Some('[') {
            let end = upto(i + 2, &|c| c == '|' || c == ']').unwrap_or(chars.len());
            if end < chars.len() && chars[end] == '|' {
                i = end + 1;
                continue;
            }
            let target: String = chars[i + 2..end].iter().collect();
            if let Some((_, rest)) = target.split_once(':') {
                out.push_str(rest);
                i = end;
                continue;
            }
        }
        out.push(c);
        i += 1;
    }
    out
}

pub fn content_chars(s: &str) -> usize {
    strip_pure_markup(s).chars().filter(|c| !c.is_whitespace() && !MARKUP.contains(c)).count()
}

fn strip_comments(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(p) = rest.find("<!--") {
        out.push_str(&rest[..p]);
        rest = rest[p..].find("-->").map_or("", |e| &rest[p + e + 3..]);
    }
    out.push_str(rest);
    out
}

/// Content characters carried by the elements: prose, raw block contents and
/// distinct citation contents.
pub fn retained(elements: &[Element]) -> usize {
    let mut seen = HashSet::new();
    let mut n = 0;
    let mut cite = |content: &str, n: &mut usize| {
        if seen.insert(content.to_string()) {
            *n += content_chars(content);
        }
    };
    for e in elements {
        match e {
            Element::Heading(h) => {
                n += content_chars(&h.text);
                h.citations.iter().for_each(|c| cite(&c.content, &mut n));
                h.citations_needed.iter().for_each(|c| cite(&c.content, &mut n));
            }
            Element::Paragraph(p) => {
                for s in &p.sentences {
                    n += content_chars(&s.text);
                    s.citations.iter().for_each(|c| cite(&c.content, &mut n));
                    s.citations_needed.iter().for_each(|c| cite(&c.content, &mut n));
                }
            }
            Element::Table(r) | Element::Infobox(r) | Element::Math(r) | Element::Preformatted(r) => {
                n += content_chars(&r.content)
            }
            Element::Code(c) => n += content_chars(&c.content),
        }
    }
    n
}
