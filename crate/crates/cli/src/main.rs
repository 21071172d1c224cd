use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dysintel::{Alphas, Metric, ReportFormat, Scenario, SyllableRule};

mod commands;
mod config;

/// Intelligibility scoring and assessment word-list selection.
#[derive(Debug, Parser)]
#[command(name = "dysintel", version, args_override_self = true)]
struct Cli {
    /// Worker threads for scoring and search (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// TOML file supplying flags: top-level keys for global flags, a
    /// `[<command>]` table per subcommand. Command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every speaker of a corpus and write score, scatter and
    /// correlation tables.
    Score(ScoreArgs),
    /// Articulatory effort of words.
    Effort(EffortArgs),
    /// Vowel-space traversal of words.
    Traverse(TraverseArgs),
    /// Words passing the syllable and traversal thresholds.
    FilterCandidates(FilterArgs),
    /// Search for the minimum-cost assessment word subset.
    Select(SelectArgs),
    /// Pearson correlation of each metric with perceptual scores.
    Correlate(CorrelateArgs),
    /// Load a corpus and print its validation report.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct DataFiles {
    /// Visible Speech symbol table (TOML). Defaults to the bundled table.
    #[arg(long, env = "DYSINTEL_VS_TABLE", value_name = "PATH")]
    vs_table: Option<PathBuf>,

    /// Vowel formant table (TOML). Defaults to the bundled table.
    #[arg(long, env = "DYSINTEL_FORMANTS", value_name = "PATH")]
    formants: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Corpus manifest (corpus.toml).
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,

    /// `all` or a comma-separated list of os, sm, ld, unk.
    #[arg(long, default_value = "all")]
    metric: commands::MetricList,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// csv, json or both.
    #[arg(long, default_value = "both")]
    format: ReportFormat,

    /// Skip words with no healthy reference instead of failing.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Debug, Args)]
struct WordSource {
    /// Comma-separated words to look up in the lexicon.
    #[arg(long)]
    word: Option<String>,

    /// Pronunciation dictionary. Without --word every entry is reported.
    /// Defaults to the bundled candidate list.
    #[arg(long, env = "DYSINTEL_LEXICON", value_name = "PATH")]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EffortArgs {
    #[command(flatten)]
    words: WordSource,

    /// Add the transition-effort histogram.
    #[arg(long)]
    histogram: bool,

    #[command(flatten)]
    data: DataFiles,
}

#[derive(Debug, Args)]
struct TraverseArgs {
    #[command(flatten)]
    words: WordSource,

    /// Print every leg of the path.
    #[arg(long)]
    legs: bool,

    #[command(flatten)]
    data: DataFiles,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Pronunciation dictionary. Defaults to the bundled candidate list.
    #[arg(long, env = "DYSINTEL_LEXICON", value_name = "PATH")]
    lexicon: Option<PathBuf>,

    /// Minimum syllable count (inclusive).
    #[arg(long, default_value_t = 5)]
    min_syllables: usize,

    /// Traversal threshold in Hz (exclusive).
    #[arg(long, default_value_t = 2400.0)]
    min_traversal: f64,

    /// orthographic or phonemic.
    #[arg(long, default_value = "orthographic")]
    syllable_rule: SyllableRule,

    #[command(flatten)]
    data: DataFiles,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Corpus manifest. Needed whenever the correlation weight is nonzero.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,

    /// Candidate words, one per line; a line may carry its own
    /// pronunciation. Defaults to the filtered lexicon.
    #[arg(long, value_name = "PATH")]
    candidates: Option<PathBuf>,

    /// Pronunciations for the candidates. Defaults to the corpus lexicon,
    /// then the bundled candidate list.
    #[arg(long, env = "DYSINTEL_LEXICON", value_name = "PATH")]
    lexicon: Option<PathBuf>,

    /// dictionary-only, correlation-only or full. Default full.
    #[arg(long)]
    preset: Option<Scenario>,

    /// Explicit weights `a1,a2,a3`.
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<Alphas>,

    /// Metric whose per-word scores drive the correlation term.
    #[arg(long, default_value = "sm")]
    metric: Metric,

    /// Use signed instead of absolute correlation.
    #[arg(long)]
    signed: bool,

    /// Fall back to greedy search for pools above the exhaustive limit.
    #[arg(long)]
    heuristic: bool,

    /// Largest pool searched exhaustively (at most 40).
    #[arg(long, default_value_t = dysintel::selection::DEFAULT_MAX_EXHAUSTIVE)]
    max_exhaustive: usize,

    /// Also write the result JSON here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Skip words with no healthy reference instead of failing.
    #[arg(long)]
    allow_partial: bool,

    #[command(flatten)]
    data: DataFiles,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// Corpus manifest (corpus.toml).
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,

    /// `all` or a comma-separated list of os, sm, ld, unk.
    #[arg(long, default_value = "all")]
    metric: commands::MetricList,

    /// Also write the table here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Skip words with no healthy reference instead of failing.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Corpus manifest (corpus.toml).
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,

    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    if let Some(d) = e.downcast_ref::<dysintel::Error>() {
        d.kind()
    } else if let Some(c) = e.downcast_ref::<commands::CliError>() {
        c.kind()
    } else {
        "error"
    }
}

fn report(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()?;
    }
    match cli.command {
        Command::Score(a) => commands::score(a),
        Command::Effort(a) => commands::effort(a),
        Command::Traverse(a) => commands::traverse(a),
        Command::FilterCandidates(a) => commands::filter(a),
        Command::Select(a) => commands::select(a),
        Command::Correlate(a) => commands::correlate(a),
        Command::Validate(a) => commands::validate(a),
    }
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            report("config", &format!("{e:#}"));
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(error_kind(&e), &format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}
