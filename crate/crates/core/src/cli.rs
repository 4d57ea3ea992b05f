//! The `halq` command line.
//!
//! Data goes to stdout (or to files under `--out`), diagnostics to stderr.
//! Exit status is 0 on success, 2 for usage and input errors and 1 when
//! writing output fails.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus;
use crate::error::{Error, Result};
use crate::hal::build_matrix;
use crate::preprocess::{
    load_stopwords, preprocess, Label, PreprocessConfig, RawDocument, StemmerKind,
};
use crate::query::{parse_query, select_subcorpus};
use crate::report::{
    emit_csv, emit_svg, profile_distance, records_from_series, sweep, sweep_corpus, AnalysisConfig,
    AnalysisRecord, ProfileSeries, WindowRange,
};
use crate::semspace::{Axis, Orientation};

pub const MAX_WINDOW: usize = 64;
pub const DEFAULT_PAIRS: &str = "black:women,white:women,black:white";

#[derive(Debug, Parser)]
#[command(
    name = "halq",
    version,
    about = "HAL matrices, keyword cosine similarity and Born-rule correlation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the HAL matrix of one document as CSV.
    Matrix {
        #[arg(long)]
        doc: String,
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cosine and correlation for every selected document, pair and window.
    Analyze {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        selection: SelectionArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Window sweep of a single document.
    Sweep {
        #[arg(long)]
        doc: String,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the ids of documents matching a query.
    Select {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Rank documents by how close their correlation profile is to a reference.
    Compare {
        #[arg(long)]
        reference: String,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        selection: SelectionArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// JSON-Lines corpus; the bundled sample is used when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "porter")]
    pub stemmer: StemmerKind,
    /// Stopword lexicon file, or `none`.
    #[arg(long, default_value = "none")]
    pub stopwords: String,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Boolean keyword query, e.g. `white*women-black`.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long)]
    pub label: Option<Label>,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Keyword pairs, `a:b[,c:d...]`.
    #[arg(long, default_value = DEFAULT_PAIRS)]
    pub pairs: String,
    /// Inclusive window range `A..B`.
    #[arg(long, conflicts_with = "window")]
    pub windows: Option<WindowRange>,
    /// Single window length.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value = "oriented")]
    pub orientation: Orientation,
    #[arg(long, default_value = "x")]
    pub axis: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved analysis settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pairs: Vec<(String, String)>,
    pub windows: WindowRange,
    pub analysis: AnalysisConfig,
}

impl CorpusArgs {
    fn preprocess_config(&self) -> Result<PreprocessConfig> {
        let mut cfg = PreprocessConfig {
            stemmer: self.stemmer,
            ..Default::default()
        };
        if self.stopwords != "none" {
            cfg.stopword_lexicon = load_stopwords(Path::new(&self.stopwords))?;
            cfg.stopword_removal = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self) -> Result<Vec<RawDocument>> {
        match &self.corpus {
            Some(path) => corpus::load_jsonl(path),
            None => Ok(corpus::bundled()),
        }
    }
}

impl SelectionArgs {
    fn apply(&self, docs: Vec<RawDocument>, cfg: &PreprocessConfig) -> Result<Vec<RawDocument>> {
        let docs = match &self.query {
            Some(src) => select_subcorpus(&docs, &parse_query(src, cfg)?, cfg),
            None => docs,
        };
        Ok(match self.label {
            Some(label) => docs.into_iter().filter(|d| d.label == label).collect(),
            None => docs,
        })
    }
}

pub fn parse_pairs(src: &str, cfg: &PreprocessConfig) -> Result<Vec<(String, String)>> {
    let pairs: Vec<(String, String)> = src
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| {
                Error::InvalidConfig(format!("pair `{pair}` is not of the form a:b"))
            })?;
            let norm = |w: &str| {
                let w = w.trim().to_lowercase();
                if w.is_empty() || !w.chars().all(char::is_alphanumeric) {
                    return Err(Error::InvalidConfig(format!(
                        "bad keyword in pair `{pair}`"
                    )));
                }
                Ok(cfg.normalize_token(&w))
            };
            Ok((norm(a)?, norm(b)?))
        })
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one keyword pair is required".into(),
        ));
    }
    Ok(pairs)
}

fn check_window(w: usize) -> Result<()> {
    if w < 2 {
        return Err(Error::InvalidWindow(w));
    }
    if w > MAX_WINDOW {
        return Err(Error::Range(format!(
            "window {w} exceeds the maximum of {MAX_WINDOW}"
        )));
    }
    Ok(())
}

impl AnalysisArgs {
    fn resolve(&self, preprocess: PreprocessConfig) -> Result<RunConfig> {
        let windows = match (self.windows, self.window) {
            (Some(range), _) => range,
            (None, Some(w)) => WindowRange::single(w)?,
            (None, None) => WindowRange::default(),
        };
        check_window(windows.start)?;
        check_window(windows.end)?;
        Ok(RunConfig {
            pairs: parse_pairs(&self.pairs, &preprocess)?,
            windows,
            analysis: AnalysisConfig {
                preprocess,
                axis: self.axis,
                orientation: self.orientation,
            },
        })
    }
}

pub fn run_analysis(docs: &[RawDocument], run: &RunConfig) -> Result<Vec<ProfileSeries>> {
    sweep_corpus(docs, &run.pairs, &run.windows.windows(), &run.analysis)
}

pub fn collect_records(series: &[ProfileSeries]) -> Result<Vec<AnalysisRecord>> {
    let mut records = Vec::new();
    for s in series {
        records.extend(records_from_series(s)?);
    }
    Ok(records)
}

fn open_output(dir: &Path, name: &str) -> Result<fs::File> {
    fs::create_dir_all(dir).map_err(|source| Error::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::File::create(&path).map_err(|source| Error::File { path, source })
}

fn write_outputs(
    series: &[ProfileSeries],
    output: &OutputArgs,
    stem: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let records = collect_records(series)?;
    let want_csv = matches!(output.format, OutputFormat::Csv | OutputFormat::Both);
    let want_svg = matches!(output.format, OutputFormat::Svg | OutputFormat::Both);
    match &output.out {
        None if output.format == OutputFormat::Both => Err(Error::InvalidConfig(
            "--format both needs --out <dir>".into(),
        )),
        None => {
            if want_csv {
                emit_csv(&records, &mut *stdout)?;
            }
            if want_svg {
                if series.is_empty() {
                    writeln!(stderr, "warning: nothing to plot")?;
                } else {
                    emit_svg(series, &mut *stdout)?;
                }
            }
            Ok(())
        }
        Some(dir) => {
            if want_csv {
                emit_csv(&records, open_output(dir, &format!("{stem}.csv"))?)?;
            }
            if want_svg {
                if series.is_empty() {
                    writeln!(stderr, "warning: nothing to plot, {stem}.svg not written")?;
                } else {
                    emit_svg(series, open_output(dir, &format!("{stem}.svg"))?)?;
                }
            }
            Ok(())
        }
    }
}

/// Ranking entry produced by `compare`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub doc_id: String,
    pub label: Label,
    pub distance: f64,
}

/// Profile distance to the reference, combined over pairs by taking the
/// largest finite value. Sorted by distance, then id.
pub fn rank_by_profile(
    reference: &RawDocument,
    docs: &[RawDocument],
    run: &RunConfig,
) -> Result<Vec<Ranked>> {
    let windows = run.windows.windows();
    let reference_series: Vec<ProfileSeries> = run
        .pairs
        .iter()
        .map(|(a, b)| sweep(reference, a, b, &windows, &run.analysis))
        .collect::<Result<_>>()?;
    let all = sweep_corpus(docs, &run.pairs, &windows, &run.analysis)?;

    let mut ranked = Vec::new();
    for doc in docs {
        let mut distance: Option<f64> = None;
        for (series, reference_profile) in all
            .iter()
            .filter(|s| s.doc_id == doc.id)
            .zip(&reference_series)
        {
            let d = profile_distance(reference_profile, series)?;
            if d.is_finite() {
                distance = Some(distance.map_or(d, |cur: f64| cur.max(d)));
            }
        }
        ranked.push(Ranked {
            doc_id: doc.id.clone(),
            label: doc.label,
            distance: distance.unwrap_or(f64::INFINITY),
        });
    }
    ranked.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    Ok(ranked)
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Matrix {
            doc,
            window,
            corpus,
            out,
        } => {
            check_window(window)?;
            let cfg = corpus.preprocess_config()?;
            let docs = corpus.load()?;
            let doc = corpus::find(&docs, &doc)?;
            let m = build_matrix(&preprocess(doc, &cfg), window)?;
            match out {
                Some(dir) => m.write_csv(open_output(
                    &dir,
                    &format!("matrix_{}_w{window}.csv", doc.id),
                )?),
                None => m.write_csv(&mut *stdout),
            }
        }
        Command::Analyze {
            corpus,
            selection,
            analysis,
            output,
        } => {
            let cfg = corpus.preprocess_config()?;
            let run = analysis.resolve(cfg.clone())?;
            let docs = selection.apply(corpus.load()?, &cfg)?;
            let series = run_analysis(&docs, &run)?;
            write_outputs(&series, &output, "analysis", stdout, stderr)
        }
        Command::Sweep {
            doc,
            corpus,
            analysis,
            output,
        } => {
            let cfg = corpus.preprocess_config()?;
            let run = analysis.resolve(cfg)?;
            let docs = corpus.load()?;
            let doc = corpus::find(&docs, &doc)?;
            let series = run_analysis(std::slice::from_ref(doc), &run)?;
            write_outputs(&series, &output, "sweep", stdout, stderr)
        }
        Command::Select { corpus, selection } => {
            let cfg = corpus.preprocess_config()?;
            if selection.query.is_none() {
                return Err(Error::InvalidConfig("select needs --query".into()));
            }
            for doc in selection.apply(corpus.load()?, &cfg)? {
                writeln!(stdout, "{}", doc.id)?;
            }
            Ok(())
        }
        Command::Compare {
            reference,
            corpus,
            selection,
            analysis,
        } => {
            let cfg = corpus.preprocess_config()?;
            let run = analysis.resolve(cfg.clone())?;
            let all = corpus.load()?;
            let reference = corpus::find(&all, &reference)?.clone();
            let docs = selection.apply(all, &cfg)?;
            let ranked = rank_by_profile(&reference, &docs, &run)?;
            let mut out = csv::Writer::from_writer(&mut *stdout);
            out.write_record(["rank", "doc_id", "label", "distance"])?;
            for (i, entry) in ranked.iter().enumerate() {
                let distance = if entry.distance.is_finite() {
                    format!("{:.6}", entry.distance)
                } else {
                    "inf".to_string()
                };
                out.write_record([
                    (i + 1).to_string(),
                    entry.doc_id.clone(),
                    entry.label.to_string(),
                    distance,
                ])?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

/// Whether stderr diagnostics may use ANSI colour.
pub fn color_from_env() -> bool {
    std::env::var_os("HALQ_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = if color {
                e.render().ansi().to_string()
            } else {
                e.render().to_string()
            };
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(err) => {
            let prefix = if color {
                "\x1b[1;31merror\x1b[0m"
            } else {
                "error"
            };
            let _ = writeln!(stderr, "{prefix}: {err}");
            exit_code(&err)
        }
    }
}
