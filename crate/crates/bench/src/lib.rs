//! Shared fixtures for the benchmarks.

use std::collections::BTreeMap;

use dysintel::{CandidateWord, CharSeq, SpeakerScores, Token};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Speakers = BTreeMap<String, SpeakerScores>;

/// A pool of `n` words with random efforts and `m` speakers whose word
/// scores follow a per-word slope against the perceptual score.
pub fn selection_instance(n: usize, m: usize, seed: u64) -> (Vec<CandidateWord>, Speakers) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<CandidateWord> = (0..n)
        .map(|i| CandidateWord {
            word: format!("word{i:02}"),
            effort: rng.random_range(5..60),
        })
        .collect();
    let slopes: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let speakers = (0..m)
        .map(|s| {
            let p: f64 = rng.random_range(0.0..100.0);
            let word_scores = pool
                .iter()
                .zip(&slopes)
                .map(|(c, k)| {
                    (
                        c.word.clone(),
                        50.0 + k * (p - 50.0) + rng.random_range(-20.0..20.0),
                    )
                })
                .collect();
            (
                format!("S{s:02}"),
                SpeakerScores {
                    perceptual: p,
                    word_scores,
                },
            )
        })
        .collect();
    (pool, speakers)
}

/// Decoder-like stream: letters in runs, with blanks and unknowns mixed in.
pub fn decoder_stream(len: usize, seed: u64) -> CharSeq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let t = match rng.random_range(0..8) {
            0 => Token::SPACE,
            1 => Token::UNK,
            _ => Token::from_index(rng.random_range(0..26)).unwrap(),
        };
        let run = rng.random_range(1..4).min(len - out.len());
        out.extend(std::iter::repeat_n(t, run));
    }
    CharSeq::new(out)
}

pub fn letters(len: usize, seed: u64) -> Vec<Token> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Token::from_index(rng.random_range(0..26)).unwrap())
        .collect()
}
