//! Seeded synthetic corpora with a known severity per speaker.
//!
//! A speaker of severity `s` gets, for every utterance, `s` letter
//! substitutions and `s` unknown-sound insertions at distinct positions,
//! rendered as a frame-level stream with repeated tokens and separators.
//! Feature vectors are a per-word prototype plus Gaussian noise whose
//! standard deviation grows linearly with `s`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Block, Corpus, Speaker, Utterance, UtteranceKey, WordCategory};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_DIM};
use crate::phonetics::{LexEntry, Lexicon};
use crate::strops::{CharSeq, Token};

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticWord {
    pub word: String,
    pub phones: String,
    pub category: WordCategory,
    pub reps: u8,
}

impl SyntheticWord {
    pub fn new(word: &str, phones: &str, category: WordCategory, reps: u8) -> Self {
        SyntheticWord {
            word: word.to_string(),
            phones: phones.to_string(),
            category,
            reps,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub healthy: usize,
    /// One dysarthric speaker per entry.
    pub severities: Vec<u32>,
    pub words: Vec<SyntheticWord>,
    /// `None` leaves the corpus without features.
    pub feature_dim: Option<usize>,
    /// Noise standard deviation present in every utterance.
    pub jitter: f64,
    /// Extra standard deviation per unit of severity.
    pub noise_per_severity: f64,
    /// Round feature values to this many decimals.
    pub feature_decimals: Option<i32>,
    pub seed: u64,
}

const EXTRA_WORDS: [(&str, &str, WordCategory); 5] = [
    ("the", "DH AH", WordCategory::CW),
    ("with", "W IH TH", WordCategory::CW),
    ("seven", "S EH V AH N", WordCategory::D),
    ("alpha", "AE L F AH", WordCategory::L),
    ("paste", "P EY S T", WordCategory::CC),
];

impl SyntheticConfig {
    /// The shipped demo corpus: 3 healthy and 6 dysarthric speakers, the
    /// bundled candidate words once each plus a few three-repetition words.
    pub fn fixture() -> Self {
        let mut words: Vec<SyntheticWord> = Lexicon::bundled_candidates()
            .entries()
            .map(|e| SyntheticWord::new(&e.word, &phone_string(e), WordCategory::UW, 1))
            .collect();
        words.extend(
            EXTRA_WORDS
                .iter()
                .map(|&(w, p, c)| SyntheticWord::new(w, p, c, 3)),
        );
        SyntheticConfig {
            healthy: 3,
            severities: vec![1, 2, 3, 4, 5, 6],
            words,
            feature_dim: Some(FEATURE_DIM),
            jitter: 0.02,
            noise_per_severity: 0.03,
            feature_decimals: Some(4),
            seed: 20_240_601,
        }
    }

    /// Eight speakers of severity 0..=7 on ten long words, plus `healthy`
    /// references for the feature distance.
    pub fn graded(healthy: usize, seed: u64) -> Self {
        let words = Lexicon::bundled_candidates()
            .entries()
            .take(10)
            .map(|e| SyntheticWord::new(&e.word, &phone_string(e), WordCategory::UW, 1))
            .collect();
        SyntheticConfig {
            healthy,
            severities: (0..8).collect(),
            words,
            feature_dim: Some(FEATURE_DIM),
            jitter: 0.02,
            noise_per_severity: 0.03,
            feature_decimals: None,
            seed,
        }
    }
}

fn phone_string(e: &LexEntry) -> String {
    e.phones
        .iter()
        .map(|p| p.symbol())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Perceptual score falling with severity, with a little listener noise.
pub fn perceptual_score(severity: u32, rng: &mut impl Rng) -> f64 {
    let noise = Normal::new(0.0, 2.0).expect("valid sigma").sample(rng);
    let v = 95.0 - 12.0 * severity as f64 + noise;
    (v.clamp(0.0, 100.0) * 10.0).round() / 10.0
}

fn random_letter(rng: &mut impl Rng) -> Token {
    Token::from_index(rng.random_range(0..26)).expect("letter")
}

/// `severity` substitutions and `severity` unknown-token insertions at
/// distinct positions (capped by the word length).
pub fn degrade(word: &CharSeq, severity: u32, rng: &mut impl Rng) -> CharSeq {
    let mut tokens = word.to_vec();
    let n = tokens.len();
    let subs = (severity as usize).min(n);
    for i in sample(rng, n, subs).into_vec() {
        let old = tokens[i];
        let mut t = random_letter(rng);
        while t == old {
            t = random_letter(rng);
        }
        tokens[i] = t;
    }
    let gaps = (severity as usize).min(n + 1);
    let mut at = sample(rng, n + 1, gaps).into_vec();
    at.sort_unstable_by(|a, b| b.cmp(a));
    for g in at {
        tokens.insert(g, Token::UNK);
    }
    CharSeq::new(tokens)
}

/// Frame-level rendering: each token held for one to three frames, a
/// separator between equal neighbours and now and then elsewhere.
pub fn frame_stream(seq: &CharSeq, rng: &mut impl Rng) -> CharSeq {
    let mut out = Vec::with_capacity(seq.len() * 3);
    let mut prev: Option<Token> = None;
    for &t in seq.iter() {
        if prev == Some(t) || (prev.is_some() && rng.random_bool(0.2)) {
            out.push(Token::SPACE);
        }
        for _ in 0..rng.random_range(1..=3) {
            out.push(t);
        }
        prev = Some(t);
    }
    CharSeq::new(out)
}

fn round_to(x: f64, decimals: Option<i32>) -> f64 {
    match decimals {
        Some(d) => {
            let k = 10f64.powi(d);
            (x * k).round() / k
        }
        None => x,
    }
}

fn block_for(index: usize, word: &SyntheticWord, rep: u8) -> Block {
    match word.category {
        WordCategory::UW => Block::ALL[index % 3],
        _ => Block::ALL[(rep as usize - 1) % 3],
    }
}

/// Build the corpus. Identical configs give identical corpora.
pub fn generate(cfg: &SyntheticConfig) -> Result<Corpus> {
    if cfg.words.is_empty() {
        return Err(Error::NoData(
            "synthetic corpus needs at least one word".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lexicon = Lexicon::default();
    for w in &cfg.words {
        lexicon.insert(LexEntry::parse(&w.word, &w.phones)?);
    }

    let prototypes: Vec<Vec<f64>> = match cfg.feature_dim {
        Some(d) => cfg
            .words
            .iter()
            .map(|_| (0..d).map(|_| rng.random_range(0.2..0.8)).collect())
            .collect(),
        None => Vec::new(),
    };

    let mut speakers = Vec::new();
    let mut plan: Vec<(String, u32)> = Vec::new();
    for i in 0..cfg.healthy {
        let id = format!("C{:02}", i + 1);
        speakers.push(Speaker::healthy(&id));
        plan.push((id, 0));
    }
    for (i, &s) in cfg.severities.iter().enumerate() {
        let id = format!("D{:02}", i + 1);
        speakers.push(Speaker::dysarthric(&id, perceptual_score(s, &mut rng)));
        plan.push((id, s));
    }

    let mut utterances = Vec::new();
    for (id, severity) in &plan {
        let sigma = cfg.jitter + cfg.noise_per_severity * *severity as f64;
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::NoData(e.to_string()))?;
        for (wi, w) in cfg.words.iter().enumerate() {
            let clean = CharSeq::from_word(&w.word)?;
            for rep in 1..=w.reps {
                let hyp = frame_stream(&degrade(&clean, *severity, &mut rng), &mut rng);
                let features = cfg.feature_dim.map(|_| {
                    FeatureVector(
                        prototypes[wi]
                            .iter()
                            .map(|&b| round_to(b + noise.sample(&mut rng), cfg.feature_decimals))
                            .collect(),
                    )
                });
                utterances.push(Utterance {
                    key: UtteranceKey {
                        speaker: id.clone(),
                        word: w.word.clone(),
                        rep,
                    },
                    block: block_for(wi, w, rep),
                    category: w.category,
                    hypothesis: hyp,
                    features,
                });
            }
        }
    }
    Corpus::from_parts(speakers, utterances, lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strops::count_pattern;
    use crate::text_metrics::{normalize_hypothesis, score_unk, GroundTruth};

    #[test]
    fn clean_stream_normalizes_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for w in ["balloon", "naturalization", "committee"] {
            let clean = CharSeq::from_word(w).unwrap();
            for _ in 0..20 {
                let h = normalize_hypothesis(&frame_stream(&clean, &mut rng));
                assert_eq!(h.s1(), &clean);
                assert_eq!(h.unk_count(), 0);
            }
        }
    }

    #[test]
    fn degradation_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let clean = CharSeq::from_word("inexhaustible").unwrap();
        for s in 0..8 {
            let d = degrade(&clean, s, &mut rng);
            assert_eq!(count_pattern(&d, Token::UNK), s as usize);
            assert_eq!(d.len(), clean.len() + s as usize);
            let h = normalize_hypothesis(&frame_stream(&d, &mut rng));
            assert_eq!(h.unk_count(), s as usize);
            let g = GroundTruth::from_word("inexhaustible").unwrap();
            let expect = (1.0 - s as f64 / 13.0) * 100.0;
            assert!((score_unk(&h, &g).value - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let cfg = SyntheticConfig {
            feature_dim: Some(8),
            ..SyntheticConfig::fixture()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(
            a.validation().is_clean()
                || a.validation()
                    .warnings
                    .iter()
                    .all(|w| w.contains("dimensions"))
        );
        assert_eq!(a.speakers().count(), 9);
    }

    #[test]
    fn fixture_shape() {
        let c = generate(&SyntheticConfig::fixture()).unwrap();
        assert!(c.validation().is_clean(), "{:?}", c.validation());
        assert_eq!(c.words().len(), 19);
        assert_eq!(c.len(), 9 * (14 + 5 * 3));
    }
}
