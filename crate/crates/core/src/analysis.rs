//! Passage sampling and perplexity aggregation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

pub const DEFAULT_TARGET_LENGTH: usize = 150;
pub const MIN_PASSAGE_CHARS: usize = 15;
pub const MAX_PASSAGE_CHARS: usize = 2500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageCandidate {
    pub text: String,
    pub length_chars: usize,
    pub weight: f64,
}

impl PassageCandidate {
    pub fn new(text: impl Into<String>, target: usize) -> Self {
        let text = text.into();
        let length_chars = text.chars().count();
        PassageCandidate { weight: passage_weight(length_chars, target), text, length_chars }
    }
}

/// `exp(-|len - target| / target)`.
pub fn passage_weight(length_chars: usize, target: usize) -> f64 {
    let diff = (length_chars as f64 - target as f64).abs();
    (-diff / target as f64).exp()
}

/// Keep passages whose length lies in [15, 2500] characters.
pub fn filter_candidates<I, S>(texts: I, target: usize) -> Vec<PassageCandidate>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    texts
        .into_iter()
        .map(|t| PassageCandidate::new(t, target))
        .filter(|c| (MIN_PASSAGE_CHARS..=MAX_PASSAGE_CHARS).contains(&c.length_chars))
        .collect()
}

/// Draw `n` candidates with replacement, proportional to their weights.
/// The same seed always yields the same sequence.
pub fn sample_passages(candidates: &[PassageCandidate], n: usize, seed: u64) -> Result<Vec<PassageCandidate>, AnalysisError> {
    Ok(sample_indices(candidates, n, seed)?.into_iter().map(|i| candidates[i].clone()).collect())
}

pub fn sample_indices(candidates: &[PassageCandidate], n: usize, seed: u64) -> Result<Vec<usize>, AnalysisError> {
    if candidates.is_empty() {
        return Err(AnalysisError::NoCandidates);
    }
    let dist = WeightedIndex::new(candidates.iter().map(|c| c.weight)).map_err(|_| AnalysisError::NoCandidates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

/// Per-token perplexity of one passage: `exp(-mean log-likelihood)`.
pub fn passage_perplexity(log_likelihoods: &[f64]) -> Option<f64> {
    if log_likelihoods.is_empty() {
        return None;
    }
    let mean = log_likelihoods.iter().sum::<f64>() / log_likelihoods.len() as f64;
    Some((-mean).exp())
}

/// Geometric mean of passage perplexities, each passage weighted equally.
pub fn geometric_mean_perplexity(passages: &[Vec<f64>]) -> Result<f64, AnalysisError> {
    if passages.is_empty() {
        return Err(AnalysisError::NoPassages);
    }
    let mut total = 0.0;
    for (i, lls) in passages.iter().enumerate() {
        if lls.is_empty() {
            return Err(AnalysisError::EmptyPassage(i));
        }
        // ln(ppl) = -mean ll; averaging these avoids overflow in exp.
        total += -lls.iter().sum::<f64>() / lls.len() as f64;
    }
    Ok((total / passages.len() as f64).exp())
}
