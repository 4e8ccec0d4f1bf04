//! Ordinal quality labels from raw scores.

use serde::{Deserialize, Serialize};

use crate::error::QualityError;
use crate::schema::QualityLabel;

/// Four strictly increasing cut points. Stored as `{"cuts": [c1, c2, c3, c4]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThresholds", into = "RawThresholds")]
pub struct QualityThresholds {
    cuts: [f64; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    cuts: Vec<f64>,
}

impl TryFrom<RawThresholds> for QualityThresholds {
    type Error = QualityError;

    fn try_from(raw: RawThresholds) -> Result<Self, Self::Error> {
        let cuts: [f64; 4] = raw.cuts.clone().try_into().map_err(|_| QualityError::InvalidCuts(raw.cuts))?;
        QualityThresholds::new(cuts)
    }
}

impl From<QualityThresholds> for RawThresholds {
    fn from(t: QualityThresholds) -> Self {
        RawThresholds { cuts: t.cuts.to_vec() }
    }
}

impl QualityThresholds {
    pub fn new(cuts: [f64; 4]) -> Result<Self, QualityError> {
        let ok = cuts.iter().all(|c| c.is_finite()) && cuts.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(QualityThresholds { cuts })
        } else {
            Err(QualityError::InvalidCuts(cuts.to_vec()))
        }
    }

    pub fn cuts(&self) -> [f64; 4] {
        self.cuts
    }
}

impl Default for QualityThresholds {
    /// Even split of the nominal [0, 1] range.
    fn default() -> Self {
        QualityThresholds { cuts: [0.2, 0.4, 0.6, 0.8] }
    }
}

/// `1 + |{i : raw > cut_i}|`. Values outside [0, 1] map by the same rule.
pub fn apply_thresholds(raw: f64, thresholds: &QualityThresholds) -> QualityLabel {
    let above = thresholds.cuts.iter().filter(|&&c| raw > c).count();
    QualityLabel::new(1 + above as u8).expect("1..=5 by construction")
}

/// Annotation scale 1–100 to label, in bins of twenty.
pub fn continuous_scale_to_label(score: i64) -> Result<QualityLabel, QualityError> {
    if !(1..=100).contains(&score) {
        return Err(QualityError::ScaleOutOfRange(score));
    }
    Ok(QualityLabel::new(((score - 1) / 20 + 1) as u8).expect("1..=5"))
}

/// Mean F1 over every class that occurs in either `truth` or `predicted`.
pub fn macro_f1(truth: &[QualityLabel], predicted: &[QualityLabel]) -> f64 {
    let mut tp = [0usize; 6];
    let mut n_true = [0usize; 6];
    let mut n_pred = [0usize; 6];
    for (t, p) in truth.iter().zip(predicted) {
        n_true[t.get() as usize] += 1;
        n_pred[p.get() as usize] += 1;
        if t == p {
            tp[t.get() as usize] += 1;
        }
    }
    f1_from_counts(&tp, &n_true, &n_pred)
}

fn f1_from_counts(tp: &[usize; 6], n_true: &[usize; 6], n_pred: &[usize; 6]) -> f64 {
    let mut sum = 0.0;
    let mut classes = 0;
    for k in 1..=5 {
        if n_true[k] + n_pred[k] == 0 {
            continue;
        }
        classes += 1;
        sum += 2.0 * tp[k] as f64 / (n_true[k] + n_pred[k]) as f64;
    }
    if classes == 0 {
        0.0
    } else {
        sum / classes as f64
    }
}

/// Above this many distinct scores the candidate gaps are thinned to
/// quantiles so the search stays polynomial in a small constant.
pub const MAX_FIT_GAPS: usize = 100;

/// Candidate cut positions for a sorted list of distinct scores: the gaps
/// between neighbours plus one open gap below the minimum and one above the
/// maximum. Gap `g` lies between `unique[g-1]` and `unique[g]`.
pub fn gap_bounds(unique: &[f64]) -> (f64, f64) {
    let first = unique[0];
    let last = unique[unique.len() - 1];
    let lo = if first > 0.0 { 0.0 } else { first - 1.0 };
    let hi = if last < 1.0 { 1.0 } else { last + 1.0 };
    (lo, hi)
}

/// Place cuts given the gap index of each. Cuts sharing a gap are spread
/// evenly across it; a lone cut sits at its midpoint.
pub fn cuts_for_gaps(unique: &[f64], gaps: [usize; 4]) -> [f64; 4] {
    let (lo, hi) = gap_bounds(unique);
    let bound = |g: usize| -> (f64, f64) {
        let a = if g == 0 { lo } else { unique[g - 1] };
        let b = if g == unique.len() { hi } else { unique[g] };
        (a, b)
    };
    let mut cuts = [0.0; 4];
    let mut i = 0;
    while i < 4 {
        let mut j = i;
        while j < 4 && gaps[j] == gaps[i] {
            j += 1;
        }
        let (a, b) = bound(gaps[i]);
        let k = (j - i) as f64;
        for (slot, cut) in cuts[i..j].iter_mut().enumerate() {
            *cut = a + (b - a) * (slot as f64 + 1.0) / (k + 1.0);
        }
        i = j;
    }
    cuts
}

/// Choose cuts maximising macro-F1 of `apply_thresholds` against `labels`.
/// Every nondecreasing assignment of the four cuts to gaps is tried; ties go
/// to the lexicographically smallest cut vector.
pub fn fit_thresholds(scores: &[f64], labels: &[QualityLabel]) -> Result<QualityThresholds, QualityError> {
    if scores.len() != labels.len() {
        return Err(QualityError::LengthMismatch { scores: scores.len(), labels: labels.len() });
    }
    let distinct = {
        let mut seen = [false; 6];
        labels.iter().for_each(|l| seen[l.get() as usize] = true);
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 || scores.iter().any(|s| !s.is_finite()) {
        return Err(QualityError::DegenerateLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut unique: Vec<f64> = Vec::new();
    // counts[u][k]: examples with the u-th distinct score and label k.
    let mut counts: Vec<[usize; 6]> = Vec::new();
    for &i in &order {
        if unique.last() != Some(&scores[i]) {
            unique.push(scores[i]);
            counts.push([0; 6]);
        }
        counts.last_mut().unwrap()[labels[i].get() as usize] += 1;
    }
    let m = unique.len();
    // prefix[g][k]: examples below gap g with label k.
    let mut prefix = vec![[0usize; 6]; m + 1];
    for u in 0..m {
        for k in 0..6 {
            prefix[u + 1][k] = prefix[u][k] + counts[u][k];
        }
    }
    let candidates: Vec<usize> = if m < MAX_FIT_GAPS {
        (0..=m).collect()
    } else {
        let mut c: Vec<usize> = (0..=MAX_FIT_GAPS).map(|q| (q * m + MAX_FIT_GAPS / 2) / MAX_FIT_GAPS).collect();
        c.dedup();
        c
    };
    let n_true = prefix[m];

    let mut best: Option<(f64, [usize; 4])> = None;
    let c = candidates.len();
    for a in 0..c {
        for b in a..c {
            for d in b..c {
                for e in d..c {
                    let gaps = [candidates[a], candidates[b], candidates[d], candidates[e]];
                    let bounds = [0, gaps[0], gaps[1], gaps[2], gaps[3], m];
                    let mut tp = [0usize; 6];
                    let mut n_pred = [0usize; 6];
                    for k in 1..=5 {
                        let (lo, hi) = (bounds[k - 1], bounds[k]);
                        tp[k] = prefix[hi][k] - prefix[lo][k];
                        n_pred[k] = (0..6).map(|j| prefix[hi][j] - prefix[lo][j]).sum();
                    }
                    let f1 = f1_from_counts(&tp, &n_true, &n_pred);
                    if best.is_none_or(|(score, _)| f1 > score) {
                        best = Some((f1, gaps));
                    }
                }
            }
        }
    }
    let (_, gaps) = best.expect("at least one candidate gap");
    QualityThresholds::new(cuts_for_gaps(&unique, gaps))
}

const LEXICON: &[&str] = &[
    "404",
    "403",
    "not found",
    "page not found",
    "access denied",
    "forbidden",
    "captcha",
    "are you a robot",
    "unusual traffic",
    "verify you are human",
    "subscribe to read",
    "subscribe to continue",
    "subscribers only",
    "paywall",
    "sign in to continue",
    "log in to continue",
    "enable javascript",
    "javascript is disabled",
    "accept cookies",
    "cookie policy",
    "error occurred",
    "service unavailable",
    "internal server error",
    "page has moved",
    "no longer available",
];

/// Deterministic raw quality in [0, 1] for when no model service is
/// available. Weighted sum of length, link sparsity, non-repetition,
/// prose-line share and line-length diversity, scaled down by the share of
/// tokens matching an error/paywall lexicon.
pub fn heuristic_score(text: &str) -> f64 {
    let features = HeuristicFeatures::of(text);
    features.score()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicFeatures {
    pub tokens: usize,
    pub lexicon_fraction: f64,
    pub link_density: f64,
    pub repetition: f64,
    pub prose_fraction: f64,
    pub line_entropy: f64,
}

impl HeuristicFeatures {
    pub fn of(text: &str) -> Self {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return HeuristicFeatures {
                tokens: 0,
                lexicon_fraction: 0.0,
                link_density: 0.0,
                repetition: 0.0,
                prose_fraction: 0.0,
                line_entropy: 0.0,
            };
        }
        let n = tokens.len() as f64;

        let lower: Vec<String> = tokens
            .iter()
            .map(|t| t.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric()).to_string())
            .collect();
        let mut covered = vec![false; lower.len()];
        for phrase in LEXICON {
            let words: Vec<&str> = phrase.split(' ').collect();
            for start in 0..lower.len().saturating_sub(words.len() - 1) {
                if words.iter().enumerate().all(|(k, w)| lower[start + k] == *w) {
                    covered[start..start + words.len()].iter_mut().for_each(|c| *c = true);
                }
            }
        }
        let lexicon_fraction = covered.iter().filter(|&&c| c).count() as f64 / n;

        let linky = tokens.iter().filter(|t| t.contains("](") || t.starts_with("http://") || t.starts_with("https://")).count();
        let link_density = linky as f64 / n;

        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let mut distinct: Vec<&str> = lines.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let repetition = 1.0 - distinct.len() as f64 / lines.len() as f64;

        let total_chars: usize = lines.iter().map(|l| l.chars().count()).sum();
        let prose_chars: usize = lines
            .iter()
            .filter(|l| l.split_whitespace().count() >= 8)
            .map(|l| l.chars().count())
            .sum();
        let prose_fraction = prose_chars as f64 / total_chars.max(1) as f64;

        const BUCKETS: usize = 12;
        let mut hist = [0usize; BUCKETS];
        for l in &lines {
            let bucket = (usize::BITS - l.chars().count().leading_zeros()) as usize;
            hist[bucket.min(BUCKETS - 1)] += 1;
        }
        let total = lines.len() as f64;
        let entropy: f64 = hist
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum();
        let line_entropy = entropy / (BUCKETS as f64).ln();

        HeuristicFeatures { tokens: tokens.len(), lexicon_fraction, link_density, repetition, prose_fraction, line_entropy }
    }

    pub fn score(&self) -> f64 {
        if self.tokens == 0 {
            return 0.0;
        }
        let length = (self.tokens as f64 / 300.0).min(1.0);
        let base = 0.40 * length
            + 0.20 * (1.0 - self.link_density)
            + 0.15 * (1.0 - self.repetition)
            + 0.15 * self.prose_fraction
            + 0.10 * self.line_entropy;
        (base * (1.0 - self.lexicon_fraction).powi(2)).clamp(0.0, 1.0)
    }
}
