//! Corpus scoring, correlation summaries and report files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    Block, Cohort, Corpus, PerceptualCategory, Utterance, UtteranceKey, WordCategory,
};
use crate::error::{Error, Result};
use crate::features::{
    fit_normalization, i_os_word, normalize, FeatureVector, NormalizationParams, ReferencePool,
};
use crate::phonetics::{arpabet_to_vs, Lexicon};
use crate::selection::{pearson, CandidateWord, SpeakerScores};
use crate::text_metrics::{
    aggregate_speaker, normalize_hypothesis, stable_mean, GroundTruth, TextMetric,
};
use crate::visible_speech::{word_effort, VsTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Feature distance to healthy speakers; lower is more intelligible.
    Os,
    Sm,
    Ld,
    Unk,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Os, Metric::Sm, Metric::Ld, Metric::Unk];

    pub fn text(self) -> Option<TextMetric> {
        match self {
            Metric::Os => None,
            Metric::Sm => Some(TextMetric::Sm),
            Metric::Ld => Some(TextMetric::Ld),
            Metric::Unk => Some(TextMetric::Unk),
        }
    }

    /// Column name in tabular output.
    pub fn column(self) -> &'static str {
        match self {
            Metric::Os => "i_os",
            Metric::Sm => "i_sm",
            Metric::Ld => "i_ld",
            Metric::Unk => "i_unk",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Os => "os",
            Metric::Sm => "sm",
            Metric::Ld => "ld",
            Metric::Unk => "unk",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.to_string() == s || m.column() == s)
            .ok_or_else(|| Error::NoData(format!("unknown metric `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Score feature distance over the words that have both a speaker
    /// utterance and a healthy reference instead of failing.
    pub allow_partial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeakerScore {
    pub value: f64,
    /// Mean over repetitions, per word.
    pub per_word: BTreeMap<String, f64>,
    pub excluded: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreTable {
    pub metric: Metric,
    pub speakers: BTreeMap<String, SpeakerScore>,
}

/// Normalized feature vectors and the healthy reference pool.
#[derive(Clone, Debug)]
pub struct FeatureSpace {
    params: NormalizationParams,
    normalized: BTreeMap<UtteranceKey, FeatureVector>,
    pool: ReferencePool,
}

impl FeatureSpace {
    /// Fit min/max over every utterance that has features, healthy and
    /// dysarthric alike.
    pub fn fit(corpus: &Corpus) -> Result<Self> {
        if !corpus.has_features() {
            return Err(Error::NoData("the corpus has no feature vectors".into()));
        }
        let params = fit_normalization(corpus.utterances().filter_map(|u| u.features.as_ref()))?;
        let mut normalized = BTreeMap::new();
        let mut pool = ReferencePool::new();
        for u in corpus.utterances() {
            if let Some(f) = &u.features {
                let v = normalize(f, &params)?;
                if corpus.speaker(&u.key.speaker)?.cohort == Cohort::Healthy {
                    pool.insert(&u.key.word, &u.key.speaker, v.clone());
                }
                normalized.insert(u.key.clone(), v);
            }
        }
        Ok(FeatureSpace {
            params,
            normalized,
            pool,
        })
    }

    pub fn params(&self) -> &NormalizationParams {
        &self.params
    }

    pub fn pool(&self) -> &ReferencePool {
        &self.pool
    }
}

/// Scores speakers of a corpus under any metric, optionally restricted to a
/// subset of utterances.
pub struct Scorer<'a> {
    corpus: &'a Corpus,
    space: Option<FeatureSpace>,
    opts: ScoreOptions,
}

impl<'a> Scorer<'a> {
    /// The feature space is fitted only when `metrics` includes the feature
    /// distance.
    pub fn new(corpus: &'a Corpus, metrics: &[Metric], opts: ScoreOptions) -> Result<Self> {
        let space = if metrics.contains(&Metric::Os) {
            Some(FeatureSpace::fit(corpus)?)
        } else {
            None
        };
        Ok(Scorer {
            corpus,
            space,
            opts,
        })
    }

    pub fn feature_space(&self) -> Option<&FeatureSpace> {
        self.space.as_ref()
    }

    pub fn score(&self, metric: Metric) -> Result<ScoreTable> {
        self.score_where(metric, &|_| true)
    }

    /// Score every speaker with at least one utterance passing `keep`.
    pub fn score_where(
        &self,
        metric: Metric,
        keep: &(dyn Fn(&Utterance) -> bool + Sync),
    ) -> Result<ScoreTable> {
        let ids: Vec<&str> = self.corpus.speakers().map(|s| s.id.as_str()).collect();
        let scored = ids
            .par_iter()
            .map(|id| {
                let utts: Vec<&Utterance> =
                    self.corpus.utterances_of(id).filter(|u| keep(u)).collect();
                if utts.is_empty() {
                    return Ok(None);
                }
                let s = match metric.text() {
                    Some(tm) => text_speaker(tm, &utts)?,
                    None => self.os_speaker(id, &utts)?,
                };
                Ok(Some((id.to_string(), s)))
            })
            .collect::<Vec<Result<_>>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreTable {
            metric,
            speakers: scored.into_iter().flatten().collect(),
        })
    }

    fn os_speaker(&self, id: &str, utts: &[&Utterance]) -> Result<SpeakerScore> {
        let space = self.space.as_ref().ok_or_else(|| {
            Error::NoData("feature distance requested without feature vectors".into())
        })?;
        let mut by_word: BTreeMap<&str, Vec<&FeatureVector>> = BTreeMap::new();
        let mut excluded = Vec::new();
        for u in utts {
            match space.normalized.get(&u.key) {
                Some(v) => by_word.entry(u.key.word.as_str()).or_default().push(v),
                None => excluded.push(u.key.word.clone()),
            }
        }
        let mut per_word = BTreeMap::new();
        for (w, reps) in &by_word {
            let refs = space.pool.references(w, id);
            if refs.is_empty() {
                excluded.push(w.to_string());
                continue;
            }
            per_word.insert(w.to_string(), i_os_word(w, reps, &refs)?);
        }
        excluded.sort();
        excluded.dedup();
        if !excluded.is_empty() && !self.opts.allow_partial {
            return Err(Error::MissingUtterances {
                speaker: id.to_string(),
                words: excluded,
            });
        }
        if per_word.is_empty() {
            return Err(Error::NoData(format!(
                "speaker `{id}` has no scorable words"
            )));
        }
        let mut values: Vec<f64> = per_word.values().copied().collect();
        Ok(SpeakerScore {
            value: stable_mean(&mut values),
            per_word,
            excluded,
        })
    }
}

fn text_speaker(metric: TextMetric, utts: &[&Utterance]) -> Result<SpeakerScore> {
    let mut scored = Vec::with_capacity(utts.len());
    for u in utts {
        let g = GroundTruth::from_word(&u.key.word)?;
        let h = normalize_hypothesis(&u.hypothesis);
        scored.push((u.key.word.as_str(), metric.score(&h, &g).value));
    }
    let mut by_word: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for &(w, v) in &scored {
        by_word.entry(w).or_default().push(v);
    }
    let per_word = by_word
        .into_iter()
        .map(|(w, mut reps)| (w.to_string(), stable_mean(&mut reps)))
        .collect();
    Ok(SpeakerScore {
        value: aggregate_speaker(scored)?,
        per_word,
        excluded: Vec::new(),
    })
}

/// Per-word scores of the dysarthric speakers for the selection search.
pub fn selection_scores(
    corpus: &Corpus,
    table: &ScoreTable,
    words: &[String],
) -> Result<BTreeMap<String, SpeakerScores>> {
    let mut out = BTreeMap::new();
    for s in corpus.cohort(Cohort::Dysarthric) {
        let scored = table.speakers.get(&s.id);
        let mut word_scores = BTreeMap::new();
        for w in words {
            let v =
                scored
                    .and_then(|sc| sc.per_word.get(w))
                    .ok_or_else(|| Error::MissingScore {
                        metric: table.metric.to_string(),
                        speaker: s.id.clone(),
                        word: w.clone(),
                    })?;
            word_scores.insert(w.clone(), *v);
        }
        out.insert(
            s.id.clone(),
            SpeakerScores {
                perceptual: s.perceptual.expect("validated"),
                word_scores,
            },
        );
    }
    Ok(out)
}

/// Candidate words with their articulatory effort.
pub fn candidate_pool(lexicon: &Lexicon, table: &VsTable) -> Result<Vec<CandidateWord>> {
    lexicon
        .entries()
        .map(|e| {
            Ok(CandidateWord {
                word: e.word.clone(),
                effort: word_effort(&arpabet_to_vs(e, table)?),
            })
        })
        .collect()
}

/// Utterance subset a correlation row is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    All,
    Block(Block),
    Category(WordCategory),
}

impl Group {
    pub fn all() -> Vec<Group> {
        let mut g = vec![Group::All];
        g.extend(Block::ALL.map(Group::Block));
        g.extend(WordCategory::ALL.map(Group::Category));
        g
    }

    pub fn contains(self, u: &Utterance) -> bool {
        match self {
            Group::All => true,
            Group::Block(b) => u.block == b,
            Group::Category(c) => u.category == c,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::All => f.write_str("all"),
            Group::Block(b) => write!(f, "{b}"),
            Group::Category(c) => write!(f, "{c}"),
        }
    }
}

pub const NO_CORRELATIONS: &str = "no correlations computable";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: Metric,
    pub group: String,
    pub n: usize,
    pub pearson: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeakerRow {
    pub speaker_id: String,
    pub cohort: Cohort,
    pub perceptual: Option<f64>,
    pub category: Option<PerceptualCategory>,
    /// Keyed by metric column name.
    pub scores: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub speaker_id: String,
    pub cohort: Cohort,
    pub metric: Metric,
    /// `*` for the speaker-level score.
    pub word: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metrics: Vec<Metric>,
    pub speakers: Vec<SpeakerRow>,
    pub word_scores: Vec<ScoreRecord>,
    pub correlations: Vec<CorrelationRow>,
    pub correlation_status: String,
    pub warnings: Vec<String>,
    pub normalization: Option<NormalizationParams>,
}

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn correlation_row(corpus: &Corpus, table: &ScoreTable, group: Group) -> CorrelationRow {
    let mut pred = Vec::new();
    let mut perc = Vec::new();
    for s in corpus.cohort(Cohort::Dysarthric) {
        if let (Some(sc), Some(p)) = (table.speakers.get(&s.id), s.perceptual) {
            pred.push(sc.value);
            perc.push(p);
        }
    }
    let n = pred.len();
    let (pearson, note) = if n < 3 {
        (None, Some(format!("insufficient speakers: {n} < 3")))
    } else {
        match pearson(&pred, &perc) {
            Ok(r) => (Some(round6(r)), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    CorrelationRow {
        metric: table.metric,
        group: group.to_string(),
        n,
        pearson,
        note,
    }
}

/// Correlation of each metric with perceptual scores, over all utterances
/// and per block and word category.
pub fn correlations(
    corpus: &Corpus,
    scorer: &Scorer<'_>,
    metrics: &[Metric],
) -> Result<Vec<CorrelationRow>> {
    if corpus.cohort(Cohort::Dysarthric).next().is_none() {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for &m in metrics {
        for g in Group::all() {
            let table = scorer.score_where(m, &|u| g.contains(u))?;
            rows.push(correlation_row(corpus, &table, g));
        }
    }
    Ok(rows)
}

pub fn build_report(corpus: &Corpus, metrics: &[Metric], opts: ScoreOptions) -> Result<Report> {
    let mut metrics = metrics.to_vec();
    metrics.sort();
    metrics.dedup();
    let scorer = Scorer::new(corpus, &metrics, opts)?;
    let tables = metrics
        .iter()
        .map(|&m| scorer.score(m))
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = corpus.validation().warnings.clone();
    let mut speakers = Vec::new();
    let mut word_scores = Vec::new();
    for s in corpus.speakers() {
        let mut scores = BTreeMap::new();
        for t in &tables {
            if let Some(sc) = t.speakers.get(&s.id) {
                scores.insert(t.metric.column().to_string(), round6(sc.value));
                word_scores.push(ScoreRecord {
                    speaker_id: s.id.clone(),
                    cohort: s.cohort,
                    metric: t.metric,
                    word: "*".into(),
                    score: round6(sc.value),
                });
                for (w, v) in &sc.per_word {
                    word_scores.push(ScoreRecord {
                        speaker_id: s.id.clone(),
                        cohort: s.cohort,
                        metric: t.metric,
                        word: w.clone(),
                        score: round6(*v),
                    });
                }
                for w in &sc.excluded {
                    warnings.push(format!("{}: `{w}` excluded for speaker {}", t.metric, s.id));
                }
            }
        }
        speakers.push(SpeakerRow {
            speaker_id: s.id.clone(),
            cohort: s.cohort,
            perceptual: s.perceptual,
            category: s.category,
            scores,
        });
    }

    let correlations = correlations(corpus, &scorer, &metrics)?;
    let correlation_status = if correlations.iter().any(|r| r.pearson.is_some()) {
        "ok".to_string()
    } else {
        NO_CORRELATIONS.to_string()
    };
    warnings.sort();
    warnings.dedup();
    Ok(Report {
        metrics,
        speakers,
        word_scores,
        correlations,
        correlation_status,
        warnings,
        normalization: scorer.feature_space().map(|s| s.params().clone()),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "both" => Ok(ReportFormat::Both),
            other => Err(Error::NoData(format!("unknown report format `{other}`"))),
        }
    }
}

fn fmt6(x: f64) -> String {
    format!("{:.6}", round6(x))
}

fn opt6(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

/// Write report files into `dir` and return their paths.
///
/// CSV: `speaker_scores.csv`, `scatter.csv` (one row per dysarthric
/// speaker), `correlations.csv`. JSON: `report.json`. The fitted
/// normalization goes to `normalization.json` whenever features were used.
pub fn emit_report(report: &Report, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        written.push(p);
        Ok(())
    };

    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let mut s = String::from("speaker_id,cohort,metric,word,score\n");
        for r in &report.word_scores {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.speaker_id,
                r.cohort,
                r.metric,
                r.word,
                fmt6(r.score)
            ));
        }
        put("speaker_scores.csv", s)?;

        let mut s = String::from("speaker_id,perceptual");
        for m in &report.metrics {
            s.push(',');
            s.push_str(m.column());
        }
        s.push('\n');
        for row in report
            .speakers
            .iter()
            .filter(|r| r.cohort == Cohort::Dysarthric)
        {
            s.push_str(&row.speaker_id);
            s.push(',');
            s.push_str(&opt6(row.perceptual));
            for m in &report.metrics {
                s.push(',');
                s.push_str(&opt6(row.scores.get(m.column()).copied()));
            }
            s.push('\n');
        }
        put("scatter.csv", s)?;

        let mut s = String::from("metric,group,n,pearson,note\n");
        if report.correlations.is_empty() {
            s.push_str(&format!("*,*,0,,{NO_CORRELATIONS}\n"));
        }
        for r in &report.correlations {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.metric,
                r.group,
                r.n,
                opt6(r.pearson),
                r.note.as_deref().unwrap_or("")
            ));
        }
        put("correlations.csv", s)?;
    }
    if matches!(format, ReportFormat::Json | ReportFormat::Both) {
        let mut body = serde_json::to_string_pretty(report)?;
        body.push('\n');
        put("report.json", body)?;
    }
    if let Some(n) = &report.normalization {
        let mut body = serde_json::to_string(n)?;
        body.push('\n');
        put("normalization.json", body)?;
    }
    Ok(written)
}

/// Read back a `speaker_scores.csv` file.
pub fn read_speaker_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |m: String| Error::parse(path, line, m);
        if rec.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", rec.len())));
        }
        out.push(ScoreRecord {
            speaker_id: rec[0].to_string(),
            cohort: rec[1].parse().map_err(|e: Error| bad(e.to_string()))?,
            metric: rec[2].parse().map_err(|e: Error| bad(e.to_string()))?,
            word: rec[3].to_string(),
            score: rec[4]
                .parse()
                .map_err(|_| bad(format!("bad score `{}`", &rec[4])))?,
        });
    }
    Ok(out)
}
