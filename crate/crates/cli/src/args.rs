use std::path::PathBuf;

use adaptbpe::builder::Strategy;
use adaptbpe::Mode;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "adaptbpe", version, about = "Byte-level BPE with domain-aware initialization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize one document per input line.
    Tokenize(TokenizeArgs),
    /// Compare standard BPE and AdaptBPE fragment scores on a corpus.
    Compare(CorpusArgs),
    /// Fragment score of a corpus under one mode.
    Fragscore(FragscoreArgs),
    /// Build a domain vocabulary from a corpus.
    BuildVocab(BuildArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Base vocabulary (JSON object token -> id).
    #[arg(long)]
    pub vocab: PathBuf,
    /// Merge rules, optionally with a domain-merges section.
    #[arg(long)]
    pub merges: PathBuf,
    /// Domain tokens, one per line.
    #[arg(long)]
    pub domain: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file; standard input when omitted or "-".
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted or "-".
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Read JSON lines and take each document from its "text" field.
    #[arg(long)]
    pub jsonl: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bpe,
    Adaptbpe,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Bpe => Mode::Bpe,
            ModeArg::Adaptbpe => Mode::AdaptBpe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Avocado,
    Sizesearch,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Avocado => Strategy::Avocado,
            StrategyArg::Sizesearch => Strategy::SizeSearch,
        }
    }
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, value_enum, default_value = "bpe")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also emit token ids.
    #[arg(long)]
    pub ids: bool,
    /// Emit per-word merge traces (JSON only).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: InputArgs,
}

#[derive(Debug, Args)]
pub struct FragscoreArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, value_enum, default_value = "bpe")]
    pub mode: ModeArg,
    /// Only score words that the base tokenizer splits into more than K pieces.
    #[arg(long, value_name = "K")]
    pub min_subwords: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Target fragment score (avocado).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Comma-separated candidate counts to evaluate (sizesearch).
    #[arg(long, value_delimiter = ',')]
    pub size_grid: Option<Vec<usize>>,
    /// Relative slack when picking the smallest near-best size (sizesearch).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Candidate words are those standard BPE splits into more than K pieces.
    #[arg(long, value_name = "K")]
    pub min_subwords: Option<usize>,
    /// Candidates added per avocado step.
    #[arg(long)]
    pub batch: Option<usize>,
    /// Upper bound on merges learned for the candidate pool.
    #[arg(long)]
    pub max_merges: Option<usize>,
    /// Mode used to score intermediate vocabularies.
    #[arg(long, value_enum, default_value = "adaptbpe")]
    pub mode: ModeArg,
    /// Directory receiving vocab.json, merges.txt, domain.txt and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}
