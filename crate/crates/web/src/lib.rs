//! wasm-bindgen bindings behind `www/index.html`. Every export takes and
//! returns plain strings or numbers so the page needs no glue beyond the
//! generated module.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use wikicite_core::analysis::{filter_candidates, sample_passages};
use wikicite_core::article::parse_into;
use wikicite_core::quality::{apply_thresholds, HeuristicFeatures, QualityThresholds};
use wikicite_core::stats::StatsTable;
use wikicite_core::{Article, LanguageConfig};

/// Parse one article's wikitext. Returns the article record plus its counts.
#[wasm_bindgen]
pub fn parse_wikitext(title: &str, wikitext: &str, lang: &str) -> String {
    let mut article = Article::skeleton(title, wikitext, "1970-01-01T00:00:00Z");
    let warnings = parse_into(&mut article, &LanguageConfig::for_language(lang));
    let stats = StatsTable::of_articles(std::slice::from_ref(&article));
    json!({ "article": article, "stats": stats, "warnings": warnings }).to_string()
}

/// Heuristic quality score and its 1..=5 label under the given cuts
/// (`{"cuts":[..]}`, empty string for the defaults).
#[wasm_bindgen]
pub fn score_source(text: &str, thresholds_json: &str) -> String {
    let thresholds = if thresholds_json.trim().is_empty() {
        Ok(QualityThresholds::default())
    } else {
        serde_json::from_str::<QualityThresholds>(thresholds_json).map_err(|e| e.to_string())
    };
    let thresholds = match thresholds {
        Ok(t) => t,
        Err(e) => return json!({ "error": e }).to_string(),
    };
    let f = HeuristicFeatures::of(text);
    let score = f.score();
    json!({
        "score": score,
        "label": apply_thresholds(score, &thresholds).get(),
        "features": {
            "tokens": f.tokens,
            "lexicon_fraction": f.lexicon_fraction,
            "link_density": f.link_density,
            "repetition": f.repetition,
            "prose_fraction": f.prose_fraction,
            "line_entropy": f.line_entropy,
        }
    })
    .to_string()
}

/// Length-weighted passage sample over blank-line separated passages.
#[wasm_bindgen]
pub fn sample_text(passages: &str, n: usize, target: usize, seed: u64) -> String {
    let candidates = filter_candidates(passages.split("\n\n").map(str::trim).filter(|p| !p.is_empty()), target.max(1));
    let weights: Vec<Value> =
        candidates.iter().map(|c| json!({ "length_chars": c.length_chars, "weight": c.weight })).collect();
    match sample_passages(&candidates, n, seed) {
        Ok(drawn) => json!({ "candidates": weights, "sample": drawn }).to_string(),
        Err(e) => json!({ "candidates": weights, "error": e.to_string() }).to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reports_counts() {
        let out: Value = serde_json::from_str(&parse_wikitext(
            "Kestrel",
            "A falcon.<ref>{{cite web|url=https://example.org}}</ref> It hovers.\n\n== Diet ==\nVoles.",
            "en",
        ))
        .unwrap();
        assert_eq!(out["stats"]["sentences"], 3);
        assert_eq!(out["stats"]["web_citations"], 1);
        assert_eq!(out["article"]["title"], "Kestrel");
    }

    #[test]
    fn score_uses_given_cuts() {
        let text = "The kestrel hunts over open country. ".repeat(40);
        let low: Value = serde_json::from_str(&score_source(&text, r#"{"cuts":[0.96,0.97,0.98,0.99]}"#)).unwrap();
        assert_eq!(low["label"], 1);
        let bad: Value = serde_json::from_str(&score_source(&text, "{")).unwrap();
        assert!(bad["error"].is_string());
    }

    #[test]
    fn sample_is_seeded() {
        let text = "Short.\n\nA passage that is long enough to keep.\n\nAnother passage long enough to keep around.";
        assert_eq!(sample_text(text, 5, 40, 3), sample_text(text, 5, 40, 3));
        let out: Value = serde_json::from_str(&sample_text(text, 5, 40, 3)).unwrap();
        assert_eq!(out["candidates"].as_array().unwrap().len(), 2);
        assert_eq!(out["sample"].as_array().unwrap().len(), 5);
    }
}
