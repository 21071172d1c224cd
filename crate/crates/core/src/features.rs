//! Acoustic-feature distance score.
//!
//! Every utterance carries a fixed-length descriptor vector (384 values for
//! the standard emotion-challenge feature set). Vectors are min/max
//! normalized per dimension, and a speaker's score for a word is the mean
//! scaled Euclidean distance to every healthy utterance of that word. Larger
//! values mean the speaker sounds less like the healthy references.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text_metrics::stable_mean;

/// Dimension of the descriptor set the distance scaling is designed for.
pub const FEATURE_DIM: usize = 384;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        FeatureVector(v)
    }
}

/// Per-dimension range of the fitting population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn is_constant(&self, dim: usize) -> bool {
        self.max[dim] == self.min[dim]
    }

    pub fn constant_dims(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_constant(i)).collect()
    }
}

pub fn fit_normalization<'a, I>(corpus: I) -> Result<NormalizationParams>
where
    I: IntoIterator<Item = &'a FeatureVector>,
{
    let mut iter = corpus.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::NoData("cannot fit normalization on an empty corpus".into()))?;
    let mut min = first.0.clone();
    let mut max = first.0.clone();
    for v in iter {
        if v.dim() != min.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: v.dim(),
            });
        }
        for (i, &x) in v.0.iter().enumerate() {
            min[i] = min[i].min(x);
            max[i] = max[i].max(x);
        }
    }
    Ok(NormalizationParams { min, max })
}

/// Map each component onto `[0, 1]`. Values outside the fitted range are
/// clamped; constant dimensions map to 0.
pub fn normalize(v: &FeatureVector, p: &NormalizationParams) -> Result<FeatureVector> {
    if v.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: v.dim(),
        });
    }
    let out =
        v.0.iter()
            .zip(p.min.iter().zip(&p.max))
            .map(|(&x, (&lo, &hi))| {
                if hi == lo {
                    0.0
                } else {
                    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
                }
            })
            .collect();
    Ok(FeatureVector(out))
}

/// `(1/|F|) * ||a - b||`, so normalized inputs give a value in `[0, 1/sqrt(|F|)]`.
pub fn feature_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.dim() == 0 {
        return Err(Error::NoData("zero-dimensional feature vectors".into()));
    }
    let ss: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(ss.sqrt() / a.dim() as f64)
}

/// Mean distance over every pairing of the speaker's repetitions with the
/// healthy references of the same word.
pub fn i_os_word(
    word: &str,
    speaker_reps: &[&FeatureVector],
    healthy: &[&FeatureVector],
) -> Result<f64> {
    if healthy.is_empty() {
        return Err(Error::NoHealthyReference(word.to_string()));
    }
    if speaker_reps.is_empty() {
        return Err(Error::NoData(format!("no utterances of `{word}` to score")));
    }
    let mut dists = Vec::with_capacity(speaker_reps.len() * healthy.len());
    for r in speaker_reps {
        for h in healthy {
            dists.push(feature_distance(r, h)?);
        }
    }
    Ok(stable_mean(&mut dists))
}

/// Normalized vectors of healthy utterances, grouped by word.
#[derive(Clone, Debug, Default)]
pub struct ReferencePool {
    by_word: BTreeMap<String, Vec<(String, FeatureVector)>>,
}

impl ReferencePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, speaker: &str, v: FeatureVector) {
        self.by_word
            .entry(word.to_string())
            .or_default()
            .push((speaker.to_string(), v));
    }

    /// Healthy references for `word`, leaving out `exclude_speaker`.
    pub fn references(&self, word: &str, exclude_speaker: &str) -> Vec<&FeatureVector> {
        self.by_word
            .get(word)
            .map(|refs| {
                refs.iter()
                    .filter(|(s, _)| s != exclude_speaker)
                    .map(|(_, v)| v)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn i_os_word(&self, speaker: &str, word: &str, reps: &[&FeatureVector]) -> Result<f64> {
        i_os_word(word, reps, &self.references(word, speaker))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeakerDistance {
    pub value: f64,
    pub per_word: BTreeMap<String, f64>,
    /// Words left out because the speaker or the healthy pool lacked them.
    pub excluded: Vec<String>,
}

/// Average of the per-word scores over `words`.
///
/// Words lacking either a speaker utterance or a healthy reference are an
/// error unless `allow_partial`, in which case they are listed in
/// `excluded`.
pub fn i_os_speaker(
    speaker: &str,
    words: &[String],
    speaker_reps: &BTreeMap<String, Vec<&FeatureVector>>,
    pool: &ReferencePool,
    allow_partial: bool,
) -> Result<SpeakerDistance> {
    let mut per_word = BTreeMap::new();
    let mut excluded = Vec::new();
    for w in words {
        let reps = speaker_reps.get(w).map(Vec::as_slice).unwrap_or(&[]);
        let refs = pool.references(w, speaker);
        if reps.is_empty() || refs.is_empty() {
            excluded.push(w.clone());
            continue;
        }
        per_word.insert(w.clone(), i_os_word(w, reps, &refs)?);
    }
    if !excluded.is_empty() && !allow_partial {
        return Err(Error::MissingUtterances {
            speaker: speaker.to_string(),
            words: excluded,
        });
    }
    if per_word.is_empty() {
        return Err(Error::NoData(format!(
            "speaker `{speaker}` has no scorable words"
        )));
    }
    let mut values: Vec<f64> = per_word.values().copied().collect();
    Ok(SpeakerDistance {
        value: stable_mean(&mut values),
        per_word,
        excluded,
    })
}
