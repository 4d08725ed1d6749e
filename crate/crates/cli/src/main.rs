use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "touristwsd", version, about = "Word-sense disambiguation with hybrid tourist-walk classification")]
struct Cli {
    /// `key = value` file with experiment defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for fold plans and generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Newline-delimited stopword list replacing the built-in one.
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    /// `word<TAB>lemma` dictionary replacing the built-in one.
    #[arg(long, global = true)]
    lemmas: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tokenize, drop stopwords and lemmatize a directory of `.txt` files.
    Preprocess(PreprocessArgs),
    /// Build the word adjacency network of a corpus.
    BuildNet(BuildNetArgs),
    /// Write a feature matrix for annotated occurrences.
    Extract(ExtractArgs),
    /// Cross-validate one configuration.
    Evaluate(EvaluateArgs),
    /// Cross-validate over a grid of compliance values.
    Sweep(SweepArgs),
    /// Mean transient and cycle lengths per class component and memory.
    WalkCurves(WalkCurvesArgs),
    /// Run the two-class toy experiment.
    Toy(ToyArgs),
    /// Write synthetic inputs: a two-sense corpus or a lattice/scatter dataset.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Directory of `.txt` documents.
    #[arg(long = "in")]
    input: PathBuf,
    /// `document<TAB>position<TAB>word<TAB>sense` file.
    #[arg(long)]
    annotations: PathBuf,
    /// Accept annotated words outside the built-in sense inventory.
    #[arg(long)]
    any_word: bool,
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file (`document<TAB>lemmas`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildNetArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Edge list `from<TAB>to<TAB>weight`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    paradigm: Option<String>,
    /// Context words per occurrence (semantic paradigm).
    #[arg(long)]
    window: Option<usize>,
    /// Only occurrences of this word.
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Feature CSV written by `extract`.
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    low_level: Option<String>,
    #[arg(long)]
    alpha_t: Option<f64>,
    #[arg(long = "mu-c")]
    mu_c: Option<usize>,
    /// Graph radius; `auto` uses the median same-class distance.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    fallback_factor: Option<f64>,
    #[arg(long)]
    knn_k: Option<usize>,
    /// Word and paradigm labels for the report.
    #[arg(long, default_value = "word")]
    word: String,
    #[arg(long)]
    paradigm: Option<String>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    lambda: Option<f64>,
    /// Also estimate the p-value with this many random labelings.
    #[arg(long)]
    monte_carlo: Option<usize>,
    /// Write the low-level model fitted on all data (tree rules or Bayes
    /// bandwidths).
    #[arg(long)]
    dump_model: Option<PathBuf>,
    /// Write the class graphs built on all data.
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Grid step; the grid runs from 0 to 1.
    #[arg(long)]
    step: Option<f64>,
    /// Sweep every low-level classifier.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WalkCurvesArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    mu_max: Option<usize>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    kappa: Option<usize>,
    /// Standardize features before building the graphs.
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ToyArgs {
    /// Point file (`x,y,class`, probe row marked `probe`); the shipped one
    /// when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Write the point file used.
    #[arg(long)]
    dump_data: Option<PathBuf>,
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(value_parser = ["corpus", "lattice"])]
    kind: String,
    /// Corpus directory or lattice CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Annotation file for the corpus.
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    per_sense: usize,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    commands::run(cli)
}
