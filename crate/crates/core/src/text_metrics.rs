//! Transcript-based intelligibility scores.
//!
//! A raw character stream is first normalized (runs collapsed, unknown and
//! separator tokens removed) and then compared against the spelled target
//! word with one of three scores, each on a 0..=100 scale:
//!
//! * sequence matching: `100 * 2m / (l1 + lg)` with `m` the recursive
//!   longest-common-substring match count,
//! * edit distance: `100 * (1 - d / (l1 + lg))`,
//! * unknown-token rate: `100 * (1 - min(unk / lg, 1))`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strops::{count_pattern, delete, squeeze, CharSeq, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedHypothesis {
    s1: CharSeq,
    unk_count: usize,
}

impl NormalizedHypothesis {
    /// The cleaned letter stream.
    pub fn s1(&self) -> &CharSeq {
        &self.s1
    }

    pub fn l1(&self) -> usize {
        self.s1.len()
    }

    /// Number of unknown-token runs in the collapsed stream.
    pub fn unk_count(&self) -> usize {
        self.unk_count
    }
}

/// Collapse runs, then drop unknown and separator tokens.
///
/// The unknown count is taken after collapsing, so one sustained unknown
/// region counts once.
pub fn normalize_hypothesis(c_star: &[Token]) -> NormalizedHypothesis {
    let squeezed = squeeze(c_star);
    let unk_count = count_pattern(&squeezed, Token::UNK);
    let s1 = delete(&delete(&squeezed, Token::UNK), Token::SPACE);
    NormalizedHypothesis { s1, unk_count }
}

/// Target spelling of a word. Never empty, never contains `<unk>` or `_`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth(CharSeq);

impl GroundTruth {
    pub fn new(seq: CharSeq) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::InvalidGroundTruth("empty target".into()));
        }
        if let Some(t) = seq
            .iter()
            .find(|t| !t.is_letter() && **t != Token::APOSTROPHE)
        {
            return Err(Error::InvalidGroundTruth(format!(
                "target `{seq}` contains `{t}`"
            )));
        }
        Ok(GroundTruth(seq))
    }

    pub fn from_word(word: &str) -> Result<Self> {
        Self::new(CharSeq::from_word(word).map_err(|e| Error::InvalidGroundTruth(e.to_string()))?)
    }

    pub fn seq(&self) -> &CharSeq {
        &self.0
    }

    pub fn lg(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextMetric {
    Sm,
    Ld,
    Unk,
}

impl TextMetric {
    pub const ALL: [TextMetric; 3] = [TextMetric::Sm, TextMetric::Ld, TextMetric::Unk];

    pub fn score(self, h: &NormalizedHypothesis, g: &GroundTruth) -> UtteranceScore {
        match self {
            TextMetric::Sm => score_sm(h, g),
            TextMetric::Ld => score_ld(h, g),
            TextMetric::Unk => score_unk(h, g),
        }
    }
}

impl fmt::Display for TextMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextMetric::Sm => "sm",
            TextMetric::Ld => "ld",
            TextMetric::Unk => "unk",
        })
    }
}

impl FromStr for TextMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sm" => Ok(TextMetric::Sm),
            "ld" => Ok(TextMetric::Ld),
            "unk" => Ok(TextMetric::Unk),
            other => Err(Error::NoData(format!("unknown text metric `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub metric: TextMetric,
    pub value: f64,
}

/// Longest common contiguous run as `(start_a, start_b, len)`.
///
/// Ties prefer the earliest start in `a`, then the earliest start in `b`.
fn longest_common_run(a: &[Token], b: &[Token]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    // suffix-match lengths for the previous row of `a`
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            let k = cur[j + 1];
            if k == 0 {
                continue;
            }
            let (sa, sb) = (i + 1 - k, j + 1 - k);
            if k > best.2 || (k == best.2 && (sa, sb) < (best.0, best.1)) {
                best = (sa, sb, k);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Ratcliff/Obershelp match count: the longest common run plus, recursively,
/// the matches to its left and to its right.
pub fn matching_chars(a: &[Token], b: &[Token]) -> usize {
    let mut total = 0;
    let mut stack = vec![(a, b)];
    while let Some((a, b)) = stack.pop() {
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let (i, j, k) = longest_common_run(a, b);
        if k == 0 {
            continue;
        }
        total += k;
        stack.push((&a[..i], &b[..j]));
        stack.push((&a[i + k..], &b[j + k..]));
    }
    total
}

/// Unit-cost Levenshtein distance.
pub fn edit_distance(a: &[Token], b: &[Token]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ta) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let sub = diag + usize::from(ta != tb);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(diag + 1);
        }
    }
    row[b.len()]
}

pub fn score_sm(h: &NormalizedHypothesis, g: &GroundTruth) -> UtteranceScore {
    let m = matching_chars(h.s1(), g.seq());
    let value = 100.0 * (2 * m) as f64 / (h.l1() + g.lg()) as f64;
    UtteranceScore {
        metric: TextMetric::Sm,
        value,
    }
}

pub fn score_ld(h: &NormalizedHypothesis, g: &GroundTruth) -> UtteranceScore {
    let l = edit_distance(h.s1(), g.seq());
    let value = (1.0 - l as f64 / (h.l1() + g.lg()) as f64) * 100.0;
    UtteranceScore {
        metric: TextMetric::Ld,
        value,
    }
}

pub fn score_unk(h: &NormalizedHypothesis, g: &GroundTruth) -> UtteranceScore {
    let rate = (h.unk_count() as f64 / g.lg() as f64).min(1.0);
    UtteranceScore {
        metric: TextMetric::Unk,
        value: (1.0 - rate) * 100.0,
    }
}

/// Arithmetic mean of values, summed in ascending order so the result does
/// not depend on the order the values arrived in.
pub(crate) fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Speaker-level score: average repetitions of each word, then average the
/// per-word means with equal weight.
pub fn aggregate_speaker<'a, I>(scores: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut by_word: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (word, value) in scores {
        by_word.entry(word).or_default().push(value);
    }
    if by_word.is_empty() {
        return Err(Error::NoData("no word scores to aggregate".into()));
    }
    let mut per_word: Vec<f64> = by_word
        .into_values()
        .map(|mut reps| stable_mean(&mut reps))
        .collect();
    Ok(stable_mean(&mut per_word))
}
