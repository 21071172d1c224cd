use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use serde_json::json;

use dysintel::assess::{correlations, Scorer, NO_CORRELATIONS};
use dysintel::phonetics::traversal_legs;
use dysintel::{
    arpabet_to_vs, build_report, candidate_pool, effort_histogram, emit_report, filter_candidates,
    selection_scores, vowel_traversal, word_effort, Alphas, Cohort, Corpus, CorrelationMode,
    FilterCriteria, FormantTable, LexEntry, Lexicon, Metric, Scenario, ScoreOptions, SearchMethod,
    SearchOptions, SelectionProblem, VsTable,
};

use super::{
    CorrelateArgs, DataFiles, EffortArgs, FilterArgs, ScoreArgs, SelectArgs, TraverseArgs,
    ValidateArgs, WordSource,
};

/// Failures that belong to the command line rather than the library.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingCorpus,
    Validation(usize),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::MissingCorpus => "missing_corpus",
            CliError::Validation(_) => "validation",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::MissingCorpus => f.write_str(
                "a corpus is required when the correlation weight is nonzero (pass --corpus)",
            ),
            CliError::Validation(n) => write!(f, "corpus has {n} validation warning(s)"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Clone, Debug)]
pub struct MetricList(pub Vec<Metric>);

impl FromStr for MetricList {
    type Err = dysintel::Error;

    fn from_str(s: &str) -> dysintel::Result<Self> {
        if s == "all" {
            return Ok(MetricList(Metric::ALL.to_vec()));
        }
        let mut v = s
            .split(',')
            .map(|m| m.trim().parse())
            .collect::<dysintel::Result<Vec<Metric>>>()?;
        v.sort();
        v.dedup();
        Ok(MetricList(v))
    }
}

fn vs_table(d: &DataFiles) -> Result<VsTable> {
    Ok(match &d.vs_table {
        Some(p) => VsTable::load(p)?,
        None => VsTable::bundled(),
    })
}

fn formants(d: &DataFiles) -> Result<FormantTable> {
    Ok(match &d.formants {
        Some(p) => FormantTable::load(p)?,
        None => FormantTable::bundled(),
    })
}

fn lexicon(path: Option<&Path>) -> Result<Lexicon> {
    Ok(match path {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::bundled_candidates(),
    })
}

fn entries(src: &WordSource) -> Result<Vec<LexEntry>> {
    let lex = lexicon(src.lexicon.as_deref())?;
    match &src.word {
        Some(words) => words
            .split(',')
            .map(|w| Ok(lex.get(w.trim())?.clone()))
            .collect(),
        None => Ok(lex.entries().cloned().collect()),
    }
}

fn histogram_text(h: &std::collections::BTreeMap<u32, usize>) -> String {
    h.iter()
        .map(|(k, c)| format!("{k}:{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn effort(a: EffortArgs) -> Result<()> {
    let table = vs_table(&a.data)?;
    let mut rows = Vec::new();
    for e in entries(&a.words)? {
        let seq = arpabet_to_vs(&e, &table)?;
        rows.push((word_effort(&seq), e.word, effort_histogram(&seq)));
    }
    rows.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    let mut out = io::stdout().lock();
    for (effort, word, hist) in rows {
        if a.histogram {
            writeln!(out, "{word}\t{effort}\t{}", histogram_text(&hist))?;
        } else {
            writeln!(out, "{word}\t{effort}")?;
        }
    }
    Ok(())
}

pub fn traverse(a: TraverseArgs) -> Result<()> {
    let table = formants(&a.data)?;
    let mut rows = Vec::new();
    for e in entries(&a.words)? {
        let total = vowel_traversal(&e, &table)?;
        rows.push((total, e));
    }
    rows.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.word.cmp(&y.1.word)));
    let mut out = io::stdout().lock();
    for (total, e) in rows {
        writeln!(out, "{}\t{total:.2}", e.word)?;
        if a.legs {
            for l in traversal_legs(&e, &table)? {
                writeln!(
                    out,
                    "\t({:.0}, {:.0}) -> ({:.0}, {:.0})\t{:.2}",
                    l.from.f1, l.from.f2, l.to.f1, l.to.f2, l.distance
                )?;
            }
        }
    }
    Ok(())
}

pub fn filter(a: FilterArgs) -> Result<()> {
    let lex = lexicon(a.lexicon.as_deref())?;
    let criteria = FilterCriteria {
        min_syllables: a.min_syllables,
        min_traversal: a.min_traversal,
        syllable_rule: a.syllable_rule,
    };
    let words = filter_candidates(&lex, &formants(&a.data)?, &criteria)?;
    let mut out = io::stdout().lock();
    for w in words {
        writeln!(out, "{w}")?;
    }
    Ok(())
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("loading corpus {}", path.display()))
}

fn write_lines(out: &Path, body: &str) -> Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(out, body).with_context(|| format!("writing {}", out.display()))
}

pub fn score(a: ScoreArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let opts = ScoreOptions {
        allow_partial: a.allow_partial,
    };
    let report = build_report(&corpus, &a.metric.0, opts)?;
    let written = emit_report(&report, &a.out, a.format)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = io::stdout().lock();
    for p in written {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}

pub fn correlate(a: CorrelateArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let opts = ScoreOptions {
        allow_partial: a.allow_partial,
    };
    let scorer = Scorer::new(&corpus, &a.metric.0, opts)?;
    let rows = correlations(&corpus, &scorer, &a.metric.0)?;
    let mut body = String::from("metric,group,n,pearson,note\n");
    if rows.is_empty() {
        body.push_str(&format!("*,*,0,,{NO_CORRELATIONS}\n"));
    }
    for r in rows {
        let p = r.pearson.map(|v| format!("{v:.6}")).unwrap_or_default();
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            r.metric,
            r.group,
            r.n,
            p,
            r.note.as_deref().unwrap_or("")
        ));
    }
    if let Some(out) = &a.out {
        write_lines(out, &body)?;
    }
    io::stdout().lock().write_all(body.as_bytes())?;
    Ok(())
}

pub fn validate(a: ValidateArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let warnings = &corpus.validation().warnings;
    let summary = json!({
        "speakers": corpus.speakers().count(),
        "healthy": corpus.cohort(Cohort::Healthy).count(),
        "dysarthric": corpus.cohort(Cohort::Dysarthric).count(),
        "utterances": corpus.len(),
        "words": corpus.words().len(),
        "feature_dim": corpus.feature_dim(),
        "warnings": warnings,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if a.strict && !warnings.is_empty() {
        return Err(CliError::Validation(warnings.len()).into());
    }
    Ok(())
}

/// Candidate file: one word per line, optionally followed by its phones.
fn read_candidates(path: &Path, lex: &Lexicon) -> Result<Lexicon> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Lexicon::default();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(";;;") || line.starts_with('#') {
            continue;
        }
        let at = || format!("{}:{}", path.display(), n + 1);
        let entry = match line.split_once(char::is_whitespace) {
            Some((w, phones)) => LexEntry::parse(w, phones).with_context(at)?,
            None => lex.get(line).with_context(at)?.clone(),
        };
        if out.contains(&entry.word) {
            return Err(CliError::Usage(format!("{}: `{}` listed twice", at(), entry.word)).into());
        }
        out.insert(entry);
    }
    Ok(out)
}

fn weights(a: &SelectArgs) -> Result<Alphas> {
    match (a.preset, a.alphas) {
        (Some(_), Some(_)) => {
            Err(CliError::Usage("pass either --preset or --alphas, not both".into()).into())
        }
        (Some(p), None) => Ok(p.alphas()),
        (None, Some(x)) => Ok(x),
        (None, None) => Ok(Scenario::Full.alphas()),
    }
}

pub fn select(a: SelectArgs) -> Result<()> {
    let alphas = weights(&a)?;
    let corpus = match &a.corpus {
        Some(p) => Some(load_corpus(p)?),
        None if alphas.uses_correlation() => return Err(CliError::MissingCorpus.into()),
        None => None,
    };
    let lex = match (&a.lexicon, &corpus) {
        (Some(p), _) => Lexicon::load(p)?,
        (None, Some(c)) => c.lexicon().clone(),
        (None, None) => Lexicon::bundled_candidates(),
    };
    let pool_lex = match &a.candidates {
        Some(p) => read_candidates(p, &lex)?,
        None => {
            let mut out = Lexicon::default();
            for w in filter_candidates(&lex, &formants(&a.data)?, &FilterCriteria::default())? {
                out.insert(lex.get(&w)?.clone());
            }
            out
        }
    };
    let pool = candidate_pool(&pool_lex, &vs_table(&a.data)?)?;

    let speakers = match (&corpus, alphas.uses_correlation()) {
        (Some(c), true) => {
            let opts = ScoreOptions {
                allow_partial: a.allow_partial,
            };
            let table = Scorer::new(c, &[a.metric], opts)?.score(a.metric)?;
            let words: Vec<String> = pool.iter().map(|c| c.word.clone()).collect();
            Some(selection_scores(c, &table, &words)?)
        }
        _ => None,
    };
    let mode = if a.signed {
        CorrelationMode::Signed
    } else {
        CorrelationMode::Absolute
    };
    let problem = SelectionProblem::new(pool, speakers.as_ref(), alphas, mode)?;
    let result = problem.optimize(SearchOptions {
        max_exhaustive: a.max_exhaustive,
        heuristic: a.heuristic,
    })?;
    if result.method == SearchMethod::Greedy {
        eprintln!(
            "warning: pool of {} words searched greedily; the result is not guaranteed optimal",
            problem.len()
        );
    }
    let mut body = serde_json::to_string_pretty(&json!({
        "metric": if alphas.uses_correlation() { Some(a.metric) } else { None },
        "result": result,
    }))?;
    body.push('\n');
    if let Some(out) = &a.out {
        write_lines(out, &body)?;
    }
    io::stdout().lock().write_all(body.as_bytes())?;
    Ok(())
}
