use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "webclir",
    version,
    about = "Cross-language retrieval with translation models mined from web text"
)]
struct Cli {
    /// Configuration file of key=value lines. Defaults to $WEBCLIR_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a configuration value; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_key_value)]
    overrides: Vec<(String, String)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find candidate page pairs in a mirrored site and filter them.
    Mine {
        #[arg(long, value_name = "DIR")]
        site: PathBuf,
        /// Accepted pairs, one `source<TAB>target` path pair per line.
        #[arg(long)]
        out: PathBuf,
        /// Mining report; printed to stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Language pair such as `en-fr`.
        #[arg(long)]
        direction: Option<String>,
        /// Extra language-identification model (TSV), on top of the bundled ones.
        #[arg(long, value_name = "FILE")]
        langid: Vec<PathBuf>,
    },
    /// Extract and sentence-split the text of mined page pairs.
    Extract {
        #[arg(long, value_name = "DIR")]
        site: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, value_name = "FILE")]
        source_out: PathBuf,
        #[arg(long, value_name = "FILE")]
        target_out: PathBuf,
    },
    /// Sentence-align two corpora document by document.
    Align {
        #[arg(long, value_name = "FILE")]
        source: PathBuf,
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// 1-1 sentence pairs for training.
        #[arg(long)]
        out: PathBuf,
        /// Full alignment with every couple and its score.
        #[arg(long, value_name = "FILE")]
        alignment: Option<PathBuf>,
    },
    /// Train a translation model on sentence pairs.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        direction: Option<String>,
        #[arg(long)]
        iterations: Option<usize>,
        /// Model file; expected counts and marginals go to `<out>.counts`
        /// and `<out>.marginals`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Prune a translation model.
    Prune {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = PruneMethod::Threshold)]
        method: PruneMethod,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        top_n: Option<usize>,
        /// Expected counts for top-N pruning [default: <model>.counts]
        #[arg(long)]
        counts: Option<PathBuf>,
        /// Source marginals for noise pruning [default: <model>.marginals]
        #[arg(long)]
        marginals: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Index a corpus of target-language documents.
    Index {
        /// Documents in corpus format (`#doc id` followed by text lines).
        #[arg(long)]
        docs: PathBuf,
        /// Document language [default: target_lang]
        #[arg(long)]
        language: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank documents for a topic set, or combine two runs.
    Search {
        #[arg(long, value_parser = parse_method)]
        method: Option<webclir::retrieval::Method>,
        /// Forward model P(target|source).
        #[arg(long, value_name = "FILE")]
        tm: Option<PathBuf>,
        /// Reverse model P(source|target), for dt.
        #[arg(long, value_name = "FILE")]
        reverse_tm: Option<PathBuf>,
        #[arg(long)]
        topics: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        /// Interpolate two run files instead of searching.
        #[arg(long, num_args = 2, value_names = ["RUN_A", "RUN_B"], conflicts_with_all = ["method", "topics", "index"])]
        combine: Option<Vec<PathBuf>>,
        /// Weight of the first run when combining.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        tag: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean average precision and significance tests.
    Evaluate {
        #[arg(long)]
        run: Option<PathBuf>,
        /// Further runs to compare.
        #[arg(long, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        qrels: PathBuf,
        /// Friedman test with Fisher's LSD letters.
        #[arg(long)]
        significance: bool,
        #[arg(long)]
        cutoff: Option<usize>,
        /// Average over every judged topic, scoring unanswered ones as 0.
        #[arg(long)]
        judged: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query-vocabulary coverage of a translation model.
    Stats {
        #[arg(long)]
        topics: PathBuf,
        #[arg(long)]
        tm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruneMethod {
    Threshold,
    Topn,
    Noise,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    Ok((k.trim().to_owned(), v.trim().to_owned()))
}

fn parse_method(s: &str) -> Result<webclir::retrieval::Method, String> {
    s.parse().map_err(|e: webclir::Error| e.to_string())
}

/// Reports a usage error the way clap does and exits with status 2.
fn usage(msg: &str) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg).exit()
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    String::from_utf8(bytes).map_err(|_| anyhow!("{} is not valid UTF-8", path.display()))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string().replace('\n', " ")).collect();
            eprintln!("webclir: error: {}", chain.join(": "));
            ExitCode::from(1)
        }
    }
}
