use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod model_spec;

use error::CliError;

/// Translation-memory guided decoding: indexing, piece extraction,
/// guided beam search, evaluation and timing.
#[derive(Debug, Parser)]
#[command(name = "transpiece", version)]
struct Cli {
    /// Worker threads for sentence-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Process sentences one at a time on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deduplicate and length-filter a corpus.
    Prepare(PrepareArgs),
    /// Build the retrieval index over a corpus.
    Index(IndexArgs),
    /// Write one piece table per input sentence.
    Pieces(PiecesArgs),
    /// Translate input sentences.
    Decode(DecodeArgs),
    /// Score translations against references.
    Eval(EvalArgs),
    /// Time retrieval, piece collection and decoding over a sweep of M.
    Bench(BenchArgs),
    /// Generate a synthetic narrow-domain corpus, lexicon and test set.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus prefix; reads PREFIX.src, PREFIX.tgt and PREFIX.align.
    #[arg(long)]
    corpus: PathBuf,
    /// Prebuilt index; built in memory when omitted.
    #[arg(long)]
    index: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PrepareArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output prefix.
    #[arg(long)]
    out: PathBuf,
    /// Drop pairs where either side is longer than this.
    #[arg(long, default_value_t = 80)]
    max_len: usize,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PiecesArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// One tokenized sentence per line.
    #[arg(long)]
    input: PathBuf,
    /// Number of sentence pairs to retrieve (M).
    #[arg(long = "retrieve", default_value_t = 100)]
    m: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Score every collected piece 1 instead of by similarity.
    #[arg(long)]
    binary_reward: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// `table:PATH` for a listing file or `lexicon:PATH` for a lexicon.
    #[arg(long)]
    model: String,
    /// Noise mass of the lexicon model.
    #[arg(long, default_value_t = 0.3)]
    noise_eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus prefix; required unless --baseline or --pieces-dir is given.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    input: PathBuf,
    /// Reward weight.
    #[arg(long, default_value_t = transpiece::decoding::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long = "retrieve", default_value_t = 100)]
    m: usize,
    #[arg(long = "beam", default_value_t = transpiece::decoding::DEFAULT_BEAM_SIZE)]
    beam_size: usize,
    /// Output length cap including EOS (default 2·|X| + 10).
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    binary_reward: bool,
    /// Decode without piece rewards.
    #[arg(long)]
    baseline: bool,
    /// Read piece tables written by `pieces` instead of retrieving.
    #[arg(long)]
    pieces_dir: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Bleu,
    Similarity,
    CountGamma,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// System output, one line per sentence.
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Test source sentences (similarity mode).
    #[arg(long)]
    source: Option<PathBuf>,
    /// Training corpus prefix (similarity and count-gamma modes).
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long = "retrieve", default_value_t = 100)]
    m: usize,
    /// Baseline output; reports BLEU gains on each similarity half.
    #[arg(long)]
    baseline_hyp: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bleu")]
    mode: Vec<EvalMode>,
    /// Also write histogram.tsv, count_gamma.tsv and count_gamma_by_order.tsv here.
    #[arg(long)]
    tsv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    input: PathBuf,
    /// Retrieval sizes to time.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
    sweep: Vec<usize>,
    /// Also time decoding with this model (`table:PATH` or `lexicon:PATH`).
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    noise_eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_size: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        transpiece::par::configure_threads(n);
    }
    let exec = if cli.sequential {
        transpiece::Execution::Sequential
    } else {
        transpiece::Execution::Parallel
    };
    match cli.command {
        Command::Prepare(a) => commands::prepare(&a),
        Command::Index(a) => commands::index(&a),
        Command::Pieces(a) => commands::pieces(&a, exec),
        Command::Decode(a) => commands::decode(&a, exec),
        Command::Eval(a) => commands::eval(&a, exec),
        Command::Bench(a) => commands::bench(&a),
        Command::Synth(a) => commands::synth(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
