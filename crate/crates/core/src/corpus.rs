//! Corpus data model and file ingestion.
//!
//! A corpus is described by a TOML manifest:
//!
//! ```toml
//! transcripts = "transcripts.tsv"
//! lexicon = "lexicon.dict"
//! perceptual = "perceptual.csv"   # optional
//! features = "features.csv"       # optional
//! healthy = ["C01", "C02"]
//! ```
//!
//! Relative paths resolve against the manifest's directory. Speakers listed
//! under `healthy` form the control cohort; every other speaker must have a
//! perceptual score and is treated as dysarthric.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_DIM};
use crate::phonetics::Lexicon;
use crate::strops::CharSeq;
use crate::text_metrics::GroundTruth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohort {
    Healthy,
    Dysarthric,
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cohort::Healthy => "healthy",
            Cohort::Dysarthric => "dysarthric",
        })
    }
}

impl FromStr for Cohort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "healthy" => Ok(Cohort::Healthy),
            "dysarthric" => Ok(Cohort::Dysarthric),
            other => Err(Error::NoData(format!("unknown cohort `{other}`"))),
        }
    }
}

/// Perceptual intelligibility band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerceptualCategory {
    VeryLow,
    Low,
    Medium,
    High,
}

impl PerceptualCategory {
    /// Bands are `[0,25]`, `(25,50]`, `(50,75]` and `(75,100]`.
    pub fn from_score(score: f64) -> Self {
        if score <= 25.0 {
            PerceptualCategory::VeryLow
        } else if score <= 50.0 {
            PerceptualCategory::Low
        } else if score <= 75.0 {
            PerceptualCategory::Medium
        } else {
            PerceptualCategory::High
        }
    }
}

impl fmt::Display for PerceptualCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerceptualCategory::VeryLow => "very-low",
            PerceptualCategory::Low => "low",
            PerceptualCategory::Medium => "medium",
            PerceptualCategory::High => "high",
        })
    }
}

impl FromStr for PerceptualCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "very-low" => Ok(PerceptualCategory::VeryLow),
            "low" => Ok(PerceptualCategory::Low),
            "medium" => Ok(PerceptualCategory::Medium),
            "high" => Ok(PerceptualCategory::High),
            other => Err(Error::NoData(format!(
                "unknown perceptual category `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Speaker {
    pub id: String,
    pub cohort: Cohort,
    pub perceptual: Option<f64>,
    pub category: Option<PerceptualCategory>,
}

impl Speaker {
    pub fn healthy(id: &str) -> Self {
        Speaker {
            id: id.to_string(),
            cohort: Cohort::Healthy,
            perceptual: None,
            category: None,
        }
    }

    pub fn dysarthric(id: &str, perceptual: f64) -> Self {
        Speaker {
            id: id.to_string(),
            cohort: Cohort::Dysarthric,
            perceptual: Some(perceptual),
            category: Some(PerceptualCategory::from_score(perceptual)),
        }
    }

    fn check(&self) -> Result<()> {
        match (self.cohort, self.perceptual) {
            (Cohort::Healthy, Some(_)) => Err(Error::NoData(format!(
                "healthy speaker `{}` has a perceptual score",
                self.id
            ))),
            (Cohort::Dysarthric, None) => Err(Error::NoData(format!(
                "dysarthric speaker `{}` has no perceptual score",
                self.id
            ))),
            (Cohort::Dysarthric, Some(p)) if !(0.0..=100.0).contains(&p) => Err(Error::NoData(
                format!("perceptual score {p} of `{}` is outside 0-100", self.id),
            )),
            (_, Some(p)) => match self.category {
                Some(c) if c != PerceptualCategory::from_score(p) => Err(Error::NoData(format!(
                    "speaker `{}`: category {c} does not match score {p}",
                    self.id
                ))),
                _ => Ok(()),
            },
            (Cohort::Healthy, None) => match self.category {
                Some(_) => Err(Error::NoData(format!(
                    "healthy speaker `{}` has a perceptual category",
                    self.id
                ))),
                None => Ok(()),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Block {
    B1,
    B2,
    B3,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::B1, Block::B2, Block::B3];
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Block::ALL
            .into_iter()
            .find(|b| b.to_string() == s)
            .ok_or_else(|| Error::NoData(format!("unknown block `{s}`")))
    }
}

/// Word category: computer commands, radio letters, digits, common and
/// uncommon words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WordCategory {
    CC,
    L,
    D,
    CW,
    UW,
}

impl WordCategory {
    pub const ALL: [WordCategory; 5] = [
        WordCategory::CC,
        WordCategory::D,
        WordCategory::L,
        WordCategory::CW,
        WordCategory::UW,
    ];

    pub fn max_repetitions(self) -> u8 {
        match self {
            WordCategory::UW => 1,
            _ => 3,
        }
    }
}

impl fmt::Display for WordCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for WordCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WordCategory::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::NoData(format!("unknown word category `{s}`")))
    }
}

/// `(speaker, word, repetition)`; written `speaker:word:rep`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UtteranceKey {
    pub speaker: String,
    pub word: String,
    pub rep: u8,
}

impl fmt::Display for UtteranceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.speaker, self.word, self.rep)
    }
}

impl FromStr for UtteranceKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::NoData(format!("malformed utterance id `{s}`"));
        let mut parts = s.rsplitn(3, ':');
        let rep = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let word = parts.next().ok_or_else(bad)?;
        let speaker = parts.next().ok_or_else(bad)?;
        Ok(UtteranceKey {
            speaker: speaker.to_string(),
            word: word.to_lowercase(),
            rep,
        })
    }
}

impl Serialize for UtteranceKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Utterance {
    pub key: UtteranceKey,
    pub block: Block,
    pub category: WordCategory,
    pub hypothesis: CharSeq,
    #[serde(skip)]
    pub features: Option<FeatureVector>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Sorted.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub transcripts: PathBuf,
    pub lexicon: PathBuf,
    #[serde(default)]
    pub perceptual: Option<PathBuf>,
    #[serde(default)]
    pub features: Option<PathBuf>,
    #[serde(default)]
    pub healthy: Vec<String>,
}

/// A validated, immutable corpus. Speakers and utterances are kept in sorted
/// maps so that the input row order never matters.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    speakers: BTreeMap<String, Speaker>,
    utterances: BTreeMap<UtteranceKey, Utterance>,
    lexicon: Lexicon,
    feature_dim: Option<usize>,
    validation: ValidationReport,
}

impl Corpus {
    /// Cross-check parts: every utterance names a known speaker and a
    /// lexicon word, repetitions fit the category, feature dimensions agree.
    pub fn from_parts(
        speakers: Vec<Speaker>,
        utterances: Vec<Utterance>,
        lexicon: Lexicon,
    ) -> Result<Self> {
        let mut sp = BTreeMap::new();
        for s in speakers {
            s.check()?;
            if sp.contains_key(&s.id) {
                return Err(Error::NoData(format!("speaker `{}` listed twice", s.id)));
            }
            sp.insert(s.id.clone(), s);
        }
        let mut utts = BTreeMap::new();
        let mut feature_dim = None;
        let mut warnings = Vec::new();
        for u in utterances {
            validate_utterance(&u, &sp, &lexicon)?;
            if let Some(f) = &u.features {
                match feature_dim {
                    None => feature_dim = Some(f.dim()),
                    Some(d) if d != f.dim() => {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: f.dim(),
                        })
                    }
                    _ => {}
                }
            }
            if utts.contains_key(&u.key) {
                return Err(Error::DuplicateUtterance(u.key.to_string()));
            }
            utts.insert(u.key.clone(), u);
        }
        let spoken: BTreeSet<&str> = utts.keys().map(|k| k.speaker.as_str()).collect();
        for id in sp.keys() {
            if !spoken.contains(id.as_str()) {
                warnings.push(format!("speaker `{id}` has no utterances"));
            }
        }
        if let Some(d) = feature_dim {
            if d != FEATURE_DIM {
                warnings.push(format!(
                    "feature vectors have {d} dimensions, expected {FEATURE_DIM}"
                ));
            }
            let missing: Vec<String> = utts
                .values()
                .filter(|u| u.features.is_none())
                .map(|u| u.key.to_string())
                .collect();
            for k in missing {
                warnings.push(format!("utterance {k} has no feature row"));
            }
        }
        warnings.sort();
        Ok(Corpus {
            speakers: sp,
            utterances: utts,
            lexicon,
            feature_dim,
            validation: ValidationReport { warnings },
        })
    }

    pub fn load(manifest_path: &Path) -> Result<Self> {
        let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
        let manifest: Manifest =
            toml::from_str(&text).map_err(|e| Error::parse(manifest_path, 0, e.to_string()))?;
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        Self::load_manifest(&manifest, base)
    }

    pub fn load_manifest(m: &Manifest, base: &Path) -> Result<Self> {
        let resolve = |p: &Path| base.join(p);
        let lexicon = Lexicon::load(&resolve(&m.lexicon))?;
        let mut utterances = read_transcripts(&resolve(&m.transcripts))?;
        let perceptual = match &m.perceptual {
            Some(p) => read_perceptual(&resolve(p))?,
            None => BTreeMap::new(),
        };

        let mut extra_warnings = Vec::new();
        if let Some(fp) = &m.features {
            let path = resolve(fp);
            let (rows, dim) = read_features(&path)?;
            let mut rows: BTreeMap<UtteranceKey, FeatureVector> = rows;
            for u in utterances.iter_mut() {
                u.features = rows.remove(&u.key);
            }
            for k in rows.keys() {
                extra_warnings.push(format!(
                    "feature row {k} matches no utterance and was ignored"
                ));
            }
            if dim != FEATURE_DIM && utterances.iter().all(|u| u.features.is_none()) {
                extra_warnings.push(format!(
                    "feature vectors have {dim} dimensions, expected {FEATURE_DIM}"
                ));
            }
        }

        let healthy: BTreeSet<&str> = m.healthy.iter().map(String::as_str).collect();
        let spoken: BTreeSet<&str> = utterances.iter().map(|u| u.key.speaker.as_str()).collect();
        let labelled = healthy
            .iter()
            .copied()
            .chain(perceptual.keys().map(String::as_str));
        if let Some(id) = labelled.into_iter().find(|id| !spoken.contains(id)) {
            return Err(Error::UnknownSpeaker(id.to_string()));
        }
        let mut speakers = Vec::new();
        for id in &spoken {
            let s = match (healthy.contains(id), perceptual.get(*id)) {
                (true, None) => Speaker::healthy(id),
                (false, Some((score, category))) => Speaker {
                    id: id.to_string(),
                    cohort: Cohort::Dysarthric,
                    perceptual: Some(*score),
                    category: Some(
                        category.unwrap_or_else(|| PerceptualCategory::from_score(*score)),
                    ),
                },
                (true, Some(_)) => {
                    return Err(Error::NoData(format!(
                        "speaker `{id}` is listed as healthy and has a perceptual score"
                    )))
                }
                (false, None) => {
                    return Err(Error::NoData(format!(
                        "speaker `{id}` is neither listed as healthy nor has a perceptual score"
                    )))
                }
            };
            speakers.push(s);
        }

        let mut corpus = Corpus::from_parts(speakers, utterances, lexicon)?;
        corpus.validation.warnings.extend(extra_warnings);
        corpus.validation.warnings.sort();
        corpus.validation.warnings.dedup();
        Ok(corpus)
    }

    pub fn speakers(&self) -> impl Iterator<Item = &Speaker> {
        self.speakers.values()
    }

    pub fn speaker(&self, id: &str) -> Result<&Speaker> {
        self.speakers
            .get(id)
            .ok_or_else(|| Error::UnknownSpeaker(id.to_string()))
    }

    pub fn cohort(&self, cohort: Cohort) -> impl Iterator<Item = &Speaker> {
        self.speakers.values().filter(move |s| s.cohort == cohort)
    }

    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.utterances.values()
    }

    pub fn utterances_of<'a>(
        &'a self,
        speaker: &'a str,
    ) -> impl Iterator<Item = &'a Utterance> + 'a {
        self.utterances
            .values()
            .filter(move |u| u.key.speaker == speaker)
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Distinct words, sorted.
    pub fn words(&self) -> BTreeSet<&str> {
        self.utterances.keys().map(|k| k.word.as_str()).collect()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn has_features(&self) -> bool {
        self.feature_dim.is_some()
    }

    pub fn feature_dim(&self) -> Option<usize> {
        self.feature_dim
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    /// Write manifest, transcripts, perceptual scores, lexicon and (when
    /// present) features into `dir`. Feature values are written with Rust's
    /// shortest round-trip formatting.
    pub fn write_dir(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };

        let mut t = String::from("speaker\tword\trep\tblock\tcategory\thyp\n");
        for u in self.utterances.values() {
            t.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                u.key.speaker, u.key.word, u.key.rep, u.block, u.category, u.hypothesis
            ));
        }
        write("transcripts.tsv", t)?;

        let mut lex = String::new();
        for w in self.words() {
            let e = self.lexicon.get(w)?;
            let phones: Vec<&str> = e.phones.iter().map(|p| p.symbol()).collect();
            lex.push_str(&format!("{}  {}\n", w.to_uppercase(), phones.join(" ")));
        }
        write("lexicon.dict", lex)?;

        let dys: Vec<&Speaker> = self.cohort(Cohort::Dysarthric).collect();
        if !dys.is_empty() {
            let mut p = String::from("speaker_id,score,category\n");
            for s in dys {
                let score = s.perceptual.expect("validated");
                let cat = s
                    .category
                    .unwrap_or_else(|| PerceptualCategory::from_score(score));
                p.push_str(&format!("{},{},{}\n", s.id, score, cat));
            }
            write("perceptual.csv", p)?;
        }

        if let Some(d) = self.feature_dim {
            let p = dir.join("features.csv");
            let file = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
            let mut out = std::io::BufWriter::new(file);
            let mut header = String::from("utterance_id");
            for i in 0..d {
                header.push_str(&format!(",f{i}"));
            }
            writeln!(out, "{header}").map_err(|e| Error::io(&p, e))?;
            for u in self.utterances.values() {
                if let Some(f) = &u.features {
                    let mut line = u.key.to_string();
                    for v in &f.0 {
                        line.push(',');
                        line.push_str(&v.to_string());
                    }
                    writeln!(out, "{line}").map_err(|e| Error::io(&p, e))?;
                }
            }
            out.flush().map_err(|e| Error::io(&p, e))?;
        }

        let manifest = Manifest {
            transcripts: "transcripts.tsv".into(),
            lexicon: "lexicon.dict".into(),
            perceptual: self
                .cohort(Cohort::Dysarthric)
                .next()
                .map(|_| "perceptual.csv".into()),
            features: self.feature_dim.map(|_| "features.csv".into()),
            healthy: self.cohort(Cohort::Healthy).map(|s| s.id.clone()).collect(),
        };
        let body = toml::to_string(&manifest).map_err(|e| Error::NoData(e.to_string()))?;
        write("corpus.toml", body)?;
        Ok(dir.join("corpus.toml"))
    }
}

fn validate_utterance(
    u: &Utterance,
    speakers: &BTreeMap<String, Speaker>,
    lexicon: &Lexicon,
) -> Result<()> {
    if !speakers.contains_key(&u.key.speaker) {
        return Err(Error::UnknownSpeaker(u.key.speaker.clone()));
    }
    if !lexicon.contains(&u.key.word) {
        return Err(Error::UnknownWord(u.key.word.clone()));
    }
    GroundTruth::from_word(&u.key.word)?;
    let max = u.category.max_repetitions();
    if u.key.rep == 0 || u.key.rep > max {
        return Err(Error::NoData(format!(
            "utterance {}: repetition {} outside 1..={max} for category {}",
            u.key, u.key.rep, u.category
        )));
    }
    Ok(())
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map(|p| p.line()).unwrap_or(0)
}

#[derive(Deserialize)]
struct TranscriptRow {
    speaker: String,
    word: String,
    rep: u8,
    block: String,
    category: String,
    hyp: String,
}

pub fn read_transcripts(path: &Path) -> Result<Vec<Utterance>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row: TranscriptRow = rec
            .deserialize(None)
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        let at = |e: Error| Error::parse(path, line, e.to_string());
        out.push(Utterance {
            key: UtteranceKey {
                speaker: row.speaker,
                word: row.word.to_lowercase(),
                rep: row.rep,
            },
            block: row.block.parse().map_err(at)?,
            category: row.category.parse().map_err(at)?,
            hypothesis: row.hyp.parse().map_err(at)?,
            features: None,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct PerceptualRow {
    speaker_id: String,
    score: f64,
    #[serde(default)]
    category: Option<String>,
}

/// Speaker id to score and the category column, if filled in.
pub fn read_perceptual(path: &Path) -> Result<BTreeMap<String, (f64, Option<PerceptualCategory>)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row: PerceptualRow = rec
            .deserialize(None)
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        let category = match row.category.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(c) => Some(
                c.parse()
                    .map_err(|e: Error| Error::parse(path, line, e.to_string()))?,
            ),
        };
        if out
            .insert(row.speaker_id.clone(), (row.score, category))
            .is_some()
        {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate perceptual score for `{}`", row.speaker_id),
            ));
        }
    }
    Ok(out)
}

/// Feature rows by utterance, plus the dimension from the header. A row whose
/// width differs from the header is a dimension error.
pub fn read_features(path: &Path) -> Result<(BTreeMap<UtteranceKey, FeatureVector>, usize)> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if header.get(0) != Some("utterance_id") {
        return Err(Error::parse(path, 1, "first column must be `utterance_id`"));
    }
    for (i, h) in header.iter().skip(1).enumerate() {
        if h != format!("f{i}") {
            return Err(Error::parse(
                path,
                1,
                format!("column {} should be `f{i}`, found `{h}`", i + 1),
            ));
        }
    }
    let dim = header.len() - 1;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() - 1 != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rec.len().saturating_sub(1),
            });
        }
        let key: UtteranceKey = rec[0]
            .parse()
            .map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(path, line, format!("bad feature value `{v}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if out.insert(key.clone(), FeatureVector(values)).is_some() {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate feature row for {key}"),
            ));
        }
    }
    Ok((out, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> Lexicon {
        Lexicon::parse_str(
            "CAT  K AE T\nDOG  D AO G\nNATURE  N EY CH ER\n",
            Path::new("t"),
        )
        .unwrap()
    }

    fn utt(speaker: &str, word: &str, rep: u8, cat: WordCategory, hyp: &str) -> Utterance {
        Utterance {
            key: UtteranceKey {
                speaker: speaker.into(),
                word: word.into(),
                rep,
            },
            block: Block::B1,
            category: cat,
            hypothesis: hyp.parse().unwrap(),
            features: None,
        }
    }

    #[test]
    fn category_bins() {
        use PerceptualCategory::*;
        assert_eq!(PerceptualCategory::from_score(0.0), VeryLow);
        assert_eq!(PerceptualCategory::from_score(25.0), VeryLow);
        assert_eq!(PerceptualCategory::from_score(26.0), Low);
        assert_eq!(PerceptualCategory::from_score(50.0), Low);
        assert_eq!(PerceptualCategory::from_score(51.0), Medium);
        assert_eq!(PerceptualCategory::from_score(75.0), Medium);
        assert_eq!(PerceptualCategory::from_score(76.0), High);
        assert_eq!(PerceptualCategory::from_score(100.0), High);
    }

    #[test]
    fn utterance_key_roundtrip() {
        let k: UtteranceKey = "M01:cat:2".parse().unwrap();
        assert_eq!(k.to_string(), "M01:cat:2");
        assert!("M01:cat".parse::<UtteranceKey>().is_err());
        assert!("M01:cat:x".parse::<UtteranceKey>().is_err());
    }

    #[test]
    fn minimal_corpus_is_clean() {
        let c = Corpus::from_parts(
            vec![Speaker::healthy("C1"), Speaker::dysarthric("D1", 40.0)],
            vec![
                utt("C1", "cat", 1, WordCategory::CW, "c a t"),
                utt("C1", "dog", 1, WordCategory::CW, "d o g"),
                utt("D1", "nature", 1, WordCategory::UW, "n a <unk> e"),
            ],
            lexicon(),
        )
        .unwrap();
        assert!(c.validation().is_clean());
        assert_eq!(c.words().len(), 3);
    }

    #[test]
    fn rejects_bad_references() {
        let sp = || vec![Speaker::healthy("C1")];
        let err = Corpus::from_parts(
            sp(),
            vec![utt("C1", "bird", 1, WordCategory::CW, "b")],
            lexicon(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownWord(w) if w == "bird"));
        let err = Corpus::from_parts(
            sp(),
            vec![utt("X", "cat", 1, WordCategory::CW, "c")],
            lexicon(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownSpeaker(_)));
        let err = Corpus::from_parts(
            sp(),
            vec![
                utt("C1", "cat", 1, WordCategory::CW, "c"),
                utt("C1", "cat", 1, WordCategory::CW, "k"),
            ],
            lexicon(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateUtterance(_)));
        assert!(Corpus::from_parts(
            sp(),
            vec![utt("C1", "nature", 2, WordCategory::UW, "n")],
            lexicon()
        )
        .is_err());
        assert!(Corpus::from_parts(
            sp(),
            vec![utt("C1", "cat", 4, WordCategory::CW, "c")],
            lexicon()
        )
        .is_err());
        assert!(Corpus::from_parts(
            sp(),
            vec![utt("C1", "cat", 3, WordCategory::CW, "c")],
            lexicon()
        )
        .is_ok());
    }

    #[test]
    fn speaker_invariants() {
        let mut s = Speaker::dysarthric("D1", 30.0);
        assert!(s.check().is_ok());
        s.category = Some(PerceptualCategory::High);
        assert!(s.check().is_err());
        let mut h = Speaker::healthy("C1");
        h.perceptual = Some(90.0);
        assert!(h.check().is_err());
    }
}
