//! Deliberately naive reference implementations used to cross-check the
//! library. Shared between test targets via `#[path]`.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use dysintel::{CandidateWord, SpeakerScores, Token};

/// Levenshtein distance by plain exponential recursion.
pub fn levenshtein(a: &[Token], b: &[Token]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            if x == y {
                levenshtein(ra, rb)
            } else {
                1 + levenshtein(ra, b)
                    .min(levenshtein(a, rb))
                    .min(levenshtein(ra, rb))
            }
        }
    }
}

/// Longest common contiguous run by enumerating every start pair.
/// Ties: earliest start in `a`, then earliest start in `b`.
fn longest_run(a: &[Token], b: &[Token]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut k = 0;
            while i + k < a.len() && j + k < b.len() && a[i + k] == b[j + k] {
                k += 1;
            }
            if k > best.2 {
                best = (i, j, k);
            }
        }
    }
    best
}

/// Ratcliff/Obershelp matching characters by direct recursion.
pub fn ratcliff_obershelp(a: &[Token], b: &[Token]) -> usize {
    let (i, j, k) = longest_run(a, b);
    if k == 0 {
        return 0;
    }
    k + ratcliff_obershelp(&a[..i], &b[..j]) + ratcliff_obershelp(&a[i + k..], &b[j + k..])
}

/// Pearson correlation from raw sums, `n Sxy - Sx Sy` over the root of the
/// product of the two variance numerators.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let num = nf * sxy - sx * sy;
    let den = ((nf * sxx - sx * sx) * (nf * syy - sy * sy)).sqrt();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(den > 1e-9 * (nf * sxx).abs().max(1.0)) {
        return None;
    }
    Some(num / den)
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub words: Vec<String>,
    pub cost: f64,
}

/// Tolerance under which two oracle costs count as tied.
pub const TIE_EPS: f64 = 1e-12;

/// Single-threaded enumeration of every nonempty subset, scored straight
/// from the cost definition. `signed` selects signed instead of absolute
/// correlation.
pub fn exhaustive_subset(
    pool: &[CandidateWord],
    speakers: &BTreeMap<String, SpeakerScores>,
    a: (f64, f64, f64),
    signed: bool,
) -> OracleResult {
    let mut pool = pool.to_vec();
    pool.sort_by(|x, y| x.word.cmp(&y.word));
    let n = pool.len();
    let total: f64 = pool.iter().map(|c| c.effort as f64).sum();
    let mut best: Option<OracleResult> = None;
    for mask in 1u64..(1 << n) {
        let words: Vec<&CandidateWord> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &pool[i])
            .collect();
        let k = words.len() as f64;
        let size = k / n as f64;
        let effort = if total == 0.0 {
            0.0
        } else {
            words.iter().map(|c| c.effort as f64).sum::<f64>() / total
        };
        let corr = if a.1 > 0.0 {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for s in speakers.values() {
                xs.push(words.iter().map(|c| s.word_scores[&c.word]).sum::<f64>() / k);
                ys.push(s.perceptual);
            }
            match pearson(&xs, &ys) {
                Some(r) if signed => r,
                Some(r) => r.abs(),
                None => 0.0,
            }
        } else {
            0.0
        };
        let cost = a.0 * size - a.1 * corr - a.2 * effort;
        let cand = OracleResult {
            words: words.iter().map(|c| c.word.clone()).collect(),
            cost,
        };
        best = Some(match best {
            None => cand,
            Some(b) => {
                if compare(&cand, &b) == Ordering::Less {
                    cand
                } else {
                    b
                }
            }
        });
    }
    best.expect("nonempty pool")
}

fn compare(a: &OracleResult, b: &OracleResult) -> Ordering {
    if (a.cost - b.cost).abs() > TIE_EPS {
        return a.cost.partial_cmp(&b.cost).expect("finite costs");
    }
    a.words
        .len()
        .cmp(&b.words.len())
        .then_with(|| a.words.cmp(&b.words))
}

/// Mean of the scaled Euclidean distance over every (speaker repetition,
/// reference) pair, written out longhand.
pub fn mean_pair_distance(reps: &[Vec<f64>], refs: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in reps {
        for h in refs {
            let mut ss = 0.0;
            for d in 0..r.len() {
                ss += (r[d] - h[d]).powi(2);
            }
            sum += ss.sqrt() / r.len() as f64;
            count += 1;
        }
    }
    sum / count as f64
}
