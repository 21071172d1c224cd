//! Word-subset selection: Pearson correlation, the normalized subset cost and
//! the exhaustive (or greedy) search for the cheapest subset.
//!
//! For a subset `W` of an `n`-word pool with total effort `T`:
//!
//! ```text
//! cost(W) = a1 * |W|/n  -  a2 * |r(W)|  -  a3 * sum_{w in W} E(w) / T
//! ```
//!
//! where `r(W)` is the Pearson correlation, over dysarthric speakers, between
//! each speaker's mean score on `W` and their perceptual score.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default largest pool searched exhaustively.
pub const DEFAULT_MAX_EXHAUSTIVE: usize = 24;
/// Hard ceiling for exhaustive search regardless of configuration.
pub const EXHAUSTIVE_CEILING: usize = 40;

const CHUNK: u64 = 1 << 14;
const SPLIT: usize = 12;

/// Sample Pearson correlation. Needs at least three pairs and nonzero
/// variance in both series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    pearson_by(x.len(), |i| x[i], |i| y[i])
}

fn pearson_by(n: usize, x: impl Fn(usize) -> f64, y: impl Fn(usize) -> f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "{n} pairs, at least 3 needed"
        )));
    }
    let constant = |f: &dyn Fn(usize) -> f64| (1..n).all(|i| f(i) == f(0));
    if constant(&x) || constant(&y) {
        return Err(Error::UndefinedCorrelation("a series is constant".into()));
    }
    let nf = n as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in 0..n {
        sx += x(i);
        sy += y(i);
    }
    let (mx, my) = (sx / nf, sy / nf);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dx = x(i) - mx;
        let dy = y(i) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Unweighted mean of a speaker's per-word scores over `words`.
pub fn subset_speaker_score(words: &[&str], scores: &BTreeMap<String, f64>) -> Result<f64> {
    if words.is_empty() {
        return Err(Error::InvalidPool("empty subset".into()));
    }
    let mut sum = 0.0;
    for w in words {
        sum += scores
            .get(*w)
            .ok_or_else(|| Error::UnknownWord(w.to_string()))?;
    }
    Ok(sum / words.len() as f64)
}

/// Weights of the size, correlation and effort terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alphas {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Alphas {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let a = Alphas { a1, a2, a3 };
        let all = [a1, a2, a3];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidAlphas(format!(
                "{a} has a negative or non-finite weight"
            )));
        }
        if all.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidAlphas("all weights are zero".into()));
        }
        Ok(a)
    }

    pub fn scaled(self, k: f64) -> Result<Self> {
        Alphas::new(self.a1 * k, self.a2 * k, self.a3 * k)
    }

    pub fn uses_correlation(&self) -> bool {
        self.a2 > 0.0
    }
}

impl Default for Alphas {
    fn default() -> Self {
        Alphas {
            a1: 1.0,
            a2: 1.0,
            a3: 1.0,
        }
    }
}

impl fmt::Display for Alphas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a1, self.a2, self.a3)
    }
}

impl FromStr for Alphas {
    type Err = Error;

    /// Parses `a1,a2,a3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidAlphas(format!(
                "expected three comma-separated weights, got `{s}`"
            )));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidAlphas(format!("`{p}` is not a number")))?;
        }
        Alphas::new(v[0], v[1], v[2])
    }
}

/// Named weight presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// No perceptual data: trade list length against articulatory effort.
    DictionaryOnly,
    CorrelationOnly,
    Full,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::DictionaryOnly,
        Scenario::CorrelationOnly,
        Scenario::Full,
    ];

    pub fn alphas(self) -> Alphas {
        scenario(self)
    }
}

pub fn scenario(preset: Scenario) -> Alphas {
    let (a1, a2, a3) = match preset {
        Scenario::DictionaryOnly => (1.0, 0.0, 1.0),
        Scenario::CorrelationOnly => (1.0, 1.0, 0.0),
        Scenario::Full => (1.0, 1.0, 1.0),
    };
    Alphas { a1, a2, a3 }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::DictionaryOnly => "dictionary-only",
            Scenario::CorrelationOnly => "correlation-only",
            Scenario::Full => "full",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::InvalidAlphas(format!("unknown preset `{s}`")))
    }
}

/// How the correlation enters the cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// `|r|`: negative correlation is rewarded like positive.
    #[default]
    Absolute,
    Signed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Exhaustive,
    /// Greedy forward selection. Not guaranteed optimal.
    Greedy,
}

/// A word of the candidate pool with its articulatory effort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateWord {
    pub word: String,
    pub effort: u32,
}

/// Perceptual score and per-word metric scores of one dysarthric speaker.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpeakerScores {
    pub perceptual: f64,
    pub word_scores: BTreeMap<String, f64>,
}

/// Raw, unnormalized quantities behind a cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTerms {
    pub size: usize,
    pub pool_size: usize,
    pub effort: u64,
    pub pool_effort: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetResult {
    /// Sorted.
    pub words: Vec<String>,
    pub cost: f64,
    pub size_term: f64,
    pub corr_term: f64,
    pub effort_term: f64,
    /// Signed correlation; absent when the correlation weight is zero or the
    /// correlation is undefined for this subset.
    pub pearson: Option<f64>,
    pub alphas: Alphas,
    pub mode: CorrelationMode,
    pub raw: RawTerms,
    pub method: SearchMethod,
    pub subsets_evaluated: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_exhaustive: usize,
    /// Fall back to greedy selection for pools beyond `max_exhaustive`
    /// instead of refusing.
    pub heuristic: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_exhaustive: DEFAULT_MAX_EXHAUSTIVE,
            heuristic: false,
        }
    }
}

/// Per-speaker subset sums from two lookup tables: one over the low
/// `SPLIT` bits of the mask and one over the rest. The sum for a mask is
/// a fixed function of the mask, whatever order subsets are visited in.
#[derive(Clone, Debug)]
struct SplitSums {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl SplitSums {
    fn new(values: &[f64]) -> Self {
        let nl = values.len().min(SPLIT);
        SplitSums {
            low: subset_sums(&values[..nl]),
            high: subset_sums(&values[nl..]),
        }
    }

    #[inline]
    fn sum(&self, mask: u64) -> f64 {
        let lm = (mask & ((1 << SPLIT) - 1)) as usize;
        let hm = (mask >> SPLIT) as usize;
        self.low[lm] + self.high[hm]
    }
}

fn subset_sums(values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << values.len()];
    for m in 1..out.len() {
        let b = m.trailing_zeros() as usize;
        out[m] = out[m & (m - 1)] + values[b];
    }
    out
}

#[derive(Clone, Debug)]
struct Panel {
    perceptual: Vec<f64>,
    sums: Vec<SplitSums>,
}

#[derive(Clone, Copy, Debug)]
struct Eval {
    mask: u64,
    size: u32,
    effort: u64,
    cost: f64,
    pearson: Option<f64>,
}

/// Strict total order: cost, then fewer words, then the lexicographically
/// smaller word list (masks index the sorted pool).
fn better(a: &Eval, b: &Eval) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then(a.size.cmp(&b.size))
        .then_with(|| {
            let d = a.mask ^ b.mask;
            if d == 0 {
                Ordering::Equal
            } else if a.mask & (d & d.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
}

fn pick(a: Eval, b: Eval) -> Eval {
    if better(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// A fully specified selection instance over a sorted candidate pool.
#[derive(Clone, Debug)]
pub struct SelectionProblem {
    words: Vec<String>,
    efforts: Vec<u32>,
    pool_effort: u64,
    alphas: Alphas,
    mode: CorrelationMode,
    panel: Option<Panel>,
    effort_sums: Vec<u64>,
}

impl SelectionProblem {
    /// `speakers` maps dysarthric speaker ids to their scores. It is ignored
    /// when the correlation weight is zero, and required otherwise.
    pub fn new(
        mut pool: Vec<CandidateWord>,
        speakers: Option<&BTreeMap<String, SpeakerScores>>,
        alphas: Alphas,
        mode: CorrelationMode,
    ) -> Result<Self> {
        let alphas = Alphas::new(alphas.a1, alphas.a2, alphas.a3)?;
        if pool.is_empty() {
            return Err(Error::InvalidPool("candidate pool is empty".into()));
        }
        if pool.len() > 63 {
            return Err(Error::InvalidPool(format!(
                "{} words; at most 63 supported",
                pool.len()
            )));
        }
        pool.sort_by(|a, b| a.word.cmp(&b.word));
        for pair in pool.windows(2) {
            if pair[0].word == pair[1].word {
                return Err(Error::InvalidPool(format!(
                    "duplicate word `{}`",
                    pair[0].word
                )));
            }
        }
        let words: Vec<String> = pool.iter().map(|c| c.word.clone()).collect();
        let efforts: Vec<u32> = pool.iter().map(|c| c.effort).collect();
        let pool_effort = efforts.iter().map(|&e| e as u64).sum();

        let panel = if alphas.uses_correlation() {
            let speakers = speakers.ok_or(Error::MissingPerceptual)?;
            if speakers.len() < 3 {
                return Err(Error::UndefinedCorrelation(format!(
                    "{} dysarthric speakers, at least 3 needed",
                    speakers.len()
                )));
            }
            let mut perceptual = Vec::with_capacity(speakers.len());
            let mut sums = Vec::with_capacity(speakers.len());
            for (id, s) in speakers {
                let row = words
                    .iter()
                    .map(|w| {
                        s.word_scores
                            .get(w)
                            .copied()
                            .ok_or_else(|| Error::MissingScore {
                                metric: "selection".into(),
                                speaker: id.clone(),
                                word: w.clone(),
                            })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                perceptual.push(s.perceptual);
                sums.push(SplitSums::new(&row));
            }
            Some(Panel { perceptual, sums })
        } else {
            None
        };

        let effort_sums = if words.len() <= SPLIT {
            let mut t = vec![0u64; 1 << words.len()];
            for m in 1..t.len() {
                t[m] = t[m & (m - 1)] + efforts[m.trailing_zeros() as usize] as u64;
            }
            t
        } else {
            Vec::new()
        };

        Ok(SelectionProblem {
            words,
            efforts,
            pool_effort,
            alphas,
            mode,
            panel,
            effort_sums,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn efforts(&self) -> &[u32] {
        &self.efforts
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn alphas(&self) -> Alphas {
        self.alphas
    }

    /// Nonempty subsets of the pool: `2^n - 1`.
    pub fn subset_count(&self) -> u64 {
        (1u64 << self.words.len()) - 1
    }

    fn mask_effort(&self, mask: u64) -> u64 {
        if !self.effort_sums.is_empty() {
            return self.effort_sums[mask as usize];
        }
        let (mut m, mut s) = (mask, 0u64);
        while m != 0 {
            s += self.efforts[m.trailing_zeros() as usize] as u64;
            m &= m - 1;
        }
        s
    }

    fn eval(&self, mask: u64) -> Eval {
        let n = self.words.len() as f64;
        let size = mask.count_ones();
        let effort = self.mask_effort(mask);
        let a = self.alphas;
        // integer-valued numerators keep ties exact
        let base = if self.pool_effort == 0 {
            a.a1 * size as f64 / n
        } else {
            let t = self.pool_effort as f64;
            (a.a1 * size as f64 * t - a.a3 * effort as f64 * n) / (n * t)
        };
        let pearson = self.panel.as_ref().and_then(|p| {
            let k = size as f64;
            pearson_by(
                p.perceptual.len(),
                |i| p.sums[i].sum(mask) / k,
                |i| p.perceptual[i],
            )
            .ok()
        });
        let corr = self.corr_term(pearson);
        Eval {
            mask,
            size,
            effort,
            cost: base - a.a2 * corr,
            pearson,
        }
    }

    fn corr_term(&self, pearson: Option<f64>) -> f64 {
        match (pearson, self.mode) {
            (None, _) => 0.0,
            (Some(r), CorrelationMode::Absolute) => r.abs(),
            (Some(r), CorrelationMode::Signed) => r,
        }
    }

    fn result(&self, e: Eval, method: SearchMethod, evaluated: u64) -> SubsetResult {
        let n = self.words.len();
        let words = (0..n)
            .filter(|i| e.mask >> i & 1 == 1)
            .map(|i| self.words[i].clone())
            .collect();
        let effort_term = if self.pool_effort == 0 {
            0.0
        } else {
            e.effort as f64 / self.pool_effort as f64
        };
        SubsetResult {
            words,
            cost: e.cost,
            size_term: e.size as f64 / n as f64,
            corr_term: self.corr_term(e.pearson),
            effort_term,
            pearson: e.pearson,
            alphas: self.alphas,
            mode: self.mode,
            raw: RawTerms {
                size: e.size as usize,
                pool_size: n,
                effort: e.effort,
                pool_effort: self.pool_effort,
            },
            method,
            subsets_evaluated: evaluated,
        }
    }

    fn mask_of(&self, subset: &[&str]) -> Result<u64> {
        if subset.is_empty() {
            return Err(Error::InvalidPool("empty subset".into()));
        }
        let mut mask = 0u64;
        for w in subset {
            let i = self
                .words
                .binary_search_by(|p| p.as_str().cmp(w))
                .map_err(|_| Error::UnknownWord(w.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// Cost breakdown of one subset. Errors when the correlation is needed
    /// but undefined for this subset.
    pub fn subset_cost(&self, subset: &[&str]) -> Result<SubsetResult> {
        let e = self.eval(self.mask_of(subset)?);
        if self.panel.is_some() && e.pearson.is_none() {
            return Err(Error::UndefinedCorrelation(
                "subset scores are constant across speakers".into(),
            ));
        }
        Ok(self.result(e, SearchMethod::Exhaustive, 1))
    }

    /// Exhaustive argmin over all nonempty subsets. Subsets whose correlation
    /// is undefined are scored with a zero correlation term.
    pub fn exhaustive(&self) -> SubsetResult {
        let total = self.subset_count();
        let chunks = total.div_ceil(CHUNK);
        let best = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 1 + c * CHUNK;
                let hi = (lo + CHUNK).min(total + 1);
                (lo..hi).map(|m| self.eval(m)).reduce(pick)
            })
            .flatten()
            .reduce_with(pick)
            .expect("pool is nonempty");
        self.result(best, SearchMethod::Exhaustive, total)
    }

    /// Greedy forward selection: repeatedly add the word giving the lowest
    /// cost and keep the best subset seen at any size. Not optimal in general.
    pub fn greedy(&self) -> SubsetResult {
        let n = self.words.len();
        let mut current = 0u64;
        let mut best: Option<Eval> = None;
        let mut evaluated = 0u64;
        for _ in 0..n {
            let step = (0..n)
                .filter(|i| current >> i & 1 == 0)
                .map(|i| self.eval(current | 1 << i))
                .reduce(pick)
                .expect("words remain");
            evaluated += (n - current.count_ones() as usize) as u64;
            current = step.mask;
            best = Some(match best {
                Some(b) => pick(b, step),
                None => step,
            });
        }
        self.result(
            best.expect("pool is nonempty"),
            SearchMethod::Greedy,
            evaluated,
        )
    }

    pub fn optimize(&self, opts: SearchOptions) -> Result<SubsetResult> {
        let n = self.words.len();
        let limit = opts.max_exhaustive.min(EXHAUSTIVE_CEILING);
        if n <= limit {
            Ok(self.exhaustive())
        } else if opts.heuristic {
            Ok(self.greedy())
        } else {
            Err(Error::PoolTooLarge {
                size: n,
                max: limit,
            })
        }
    }
}

/// Words whose effort is strictly above the pool mean: the exact optimum of
/// the dictionary-only weights. When no word qualifies every subset costs
/// the same and the answer is the alphabetically first word.
pub fn above_mean_effort(pool: &[CandidateWord]) -> Vec<String> {
    let n = pool.len() as u64;
    let total: u64 = pool.iter().map(|c| c.effort as u64).sum();
    let mut out: Vec<String> = pool
        .iter()
        .filter(|c| c.effort as u64 * n > total)
        .map(|c| c.word.clone())
        .collect();
    out.sort();
    if out.is_empty() {
        if let Some(first) = pool.iter().map(|c| &c.word).min() {
            out.push(first.clone());
        }
    }
    out
}
