//! Intelligibility scoring for dysarthric speech and selection of short
//! assessment word lists.
//!
//! The crate covers four speaker-level scores (three computed from
//! speech-recognizer character streams, one from acoustic feature vectors),
//! articulatory effort of words in a ten-radical Visible Speech basis,
//! vowel-space traversal, and the search for a minimal-cost word subset.

pub mod assess;
pub mod corpus;
pub mod error;
pub mod features;
pub mod phonetics;
pub mod selection;
pub mod strops;
pub mod synthetic;
pub mod text_metrics;
pub mod visible_speech;

pub use assess::{
    build_report, candidate_pool, emit_report, read_speaker_scores, selection_scores, Metric,
    Report, ReportFormat, ScoreOptions, ScoreTable, Scorer,
};
pub use corpus::{Block, Cohort, Corpus, Manifest, Speaker, Utterance, UtteranceKey, WordCategory};
pub use error::{Error, Result};
pub use features::{
    feature_distance, fit_normalization, i_os_speaker, i_os_word, normalize, FeatureVector,
    NormalizationParams, ReferencePool, FEATURE_DIM,
};
pub use phonetics::{
    arpabet_to_vs, filter_candidates, syllable_count, vowel_traversal, FilterCriteria,
    FormantTable, LexEntry, Lexicon, Phone, SyllableRule,
};
pub use selection::{
    pearson, scenario, subset_speaker_score, Alphas, CandidateWord, CorrelationMode, Scenario,
    SearchMethod, SearchOptions, SelectionProblem, SpeakerScores, SubsetResult,
};
pub use strops::{count_pattern, delete, length, squeeze, CharSeq, Token};
pub use text_metrics::{
    aggregate_speaker, edit_distance, matching_chars, normalize_hypothesis, score_ld, score_sm,
    score_unk, GroundTruth, NormalizedHypothesis, TextMetric,
};
pub use visible_speech::{
    effort_histogram, transition_effort, word_effort, Radical, VsSequence, VsTable, VsVector,
};
