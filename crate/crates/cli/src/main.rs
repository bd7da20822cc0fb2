mod args;
mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adaptbpe::builder::{
    build_avocado, build_sizesearch, collect_candidates, BaseModel, BuildConfig, BuildOutcome, Strategy,
};
use adaptbpe::metrics::{compare_counts, subword_count, FragmentReport};
use adaptbpe::{ExtendedVocabulary, Mode, Tokenizer, WordOptions, WordTrace};
use anyhow::{Context, Result};
use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;

use args::{BuildArgs, Cli, Command, CorpusArgs, Format, FragscoreArgs, ModelArgs, StrategyArg, TokenizeArgs};
use io::{escape_tsv, open_input, open_output, Documents};

const CHUNK: usize = 4096;

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_model(args: &ModelArgs) -> Result<Tokenizer> {
    let ev = ExtendedVocabulary::load_files(&args.vocab, &args.merges, args.domain.as_deref()).with_context(|| {
        let mut files = format!("{}, {}", args.vocab.display(), args.merges.display());
        if let Some(d) = &args.domain {
            files += &format!(", {}", d.display());
        }
        format!("loading vocabulary from {files}")
    })?;
    for w in ev.base().warnings() {
        eprintln!("warning: {w}");
    }
    let stats = ev.stats();
    if stats.filtered_tokens() > 0 {
        eprintln!(
            "note: skipped {} domain tokens ({} already in the base vocabulary)",
            stats.filtered_tokens(),
            stats.filtered_in_base
        );
    }
    Ok(Tokenizer::new(ev)?)
}

#[derive(Serialize)]
struct TokenLine<'a> {
    tokens: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    ids: Option<&'a [u32]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [WordTrace]>,
}

fn render_line(tok: &Tokenizer, text: &str, args: &TokenizeArgs) -> String {
    let mode = Mode::from(args.mode);
    let (seq, traces) = if args.trace {
        let (s, t) = tok.encode_traced(text, mode);
        (s, Some(t))
    } else {
        (tok.encode_mode(text, mode), None)
    };
    match args.format {
        Format::Json => serde_json::to_string(&TokenLine {
            tokens: &seq.tokens,
            ids: args.ids.then_some(seq.ids.as_slice()),
            trace: traces.as_deref(),
        })
        .expect("token line serialization"),
        Format::Tsv => {
            let fields: Vec<String> = if args.ids {
                seq.ids.iter().zip(&seq.tokens).map(|(id, t)| format!("{id}:{}", escape_tsv(t))).collect()
            } else {
                seq.tokens.iter().map(|t| escape_tsv(t)).collect()
            };
            fields.join("\t")
        }
    }
}

fn cmd_tokenize(args: &TokenizeArgs) -> Result<()> {
    if args.trace && args.format != Format::Json {
        return Err(usage("--trace requires --format json"));
    }
    let tok = load_model(&args.model)?;
    let mut docs = Documents::new(open_input(&args.io.input)?, args.io.jsonl);
    let mut out = open_output(&args.io.output)?;
    loop {
        let chunk = docs.next_chunk(CHUNK)?;
        if chunk.is_empty() {
            break;
        }
        let rendered: Vec<String> = chunk.par_iter().map(|text| render_line(&tok, text, args)).collect();
        for line in rendered {
            writeln!(out, "{line}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn count_corpus(io: &args::InputArgs, opts: &WordOptions) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for doc in Documents::new(open_input(&io.input)?, io.jsonl) {
        for w in opts.words(&doc?) {
            *counts.entry(w.to_string()).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

fn emit(output: &Option<PathBuf>, body: &str) -> Result<()> {
    let mut out = open_output(output)?;
    writeln!(out, "{body}")?;
    out.flush()?;
    Ok(())
}

fn cmd_compare(args: &CorpusArgs) -> Result<()> {
    if args.model.domain.is_none() {
        return Err(usage("compare needs --domain"));
    }
    let tok = load_model(&args.model)?;
    let opts = WordOptions::default();
    let counts = count_corpus(&args.io, &opts)?;
    emit(&args.io.output, &compare_counts(&counts, &tok, &opts).to_json())
}

fn cmd_fragscore(args: &FragscoreArgs) -> Result<()> {
    let tok = load_model(&args.model)?;
    let opts = WordOptions::default();
    let counts = count_corpus(&args.io, &opts)?;
    let mode = Mode::from(args.mode);
    let ev = tok.vocabulary();
    let base = Tokenizer::new(ExtendedVocabulary::plain(ev.base().clone(), ev.base_merges().clone()))?;
    let report = FragmentReport::from_counts(
        &counts,
        |w| subword_count(&tok, mode, w, &opts),
        |w| args.min_subwords.is_none_or(|k| subword_count(&base, Mode::Bpe, w, &opts) > k),
    );
    if !report.scores_defined {
        eprintln!("warning: no words were scored");
    }
    emit(&args.io.output, &report.to_json())
}

fn build_config(args: &BuildArgs) -> Result<BuildConfig> {
    let mut config = match args.strategy {
        StrategyArg::Avocado => BuildConfig::avocado(args.gamma.ok_or_else(|| usage("avocado needs --gamma"))?),
        StrategyArg::Sizesearch => {
            let grid = args.size_grid.clone().ok_or_else(|| usage("sizesearch needs --size-grid"))?;
            BuildConfig::sizesearch(grid, args.epsilon.unwrap_or(BuildConfig::default().epsilon))
        }
    };
    if let Some(k) = args.min_subwords {
        config.threshold_k = k;
    }
    if let Some(b) = args.batch {
        config.batch = b;
    }
    if let Some(m) = args.max_merges {
        config.max_merges = m;
    }
    config.scoring_mode = args.mode.into();
    Ok(config)
}

#[derive(Serialize)]
struct BuildSummary {
    strategy: Strategy,
    chosen_size: usize,
    chosen_score: Option<f64>,
    out_dir: String,
}

fn cmd_build_vocab(args: &BuildArgs) -> Result<()> {
    if args.model.domain.is_some() {
        return Err(usage("build-vocab starts from a base vocabulary; drop --domain"));
    }
    let config = build_config(args)?;
    config.validate(args.strategy.into())?;
    let base_ev = load_model(&args.model)?.into_vocabulary();
    let base = BaseModel::new(base_ev.base().clone(), base_ev.base_merges().clone());
    let opts = WordOptions::default();
    let docs: Vec<String> = Documents::new(open_input(&args.io.input)?, args.io.jsonl).collect::<Result<_>>()?;
    let pool = collect_candidates(&docs, &base, &config, &opts)?;
    let BuildOutcome { vocabulary, manifest } = match args.strategy {
        StrategyArg::Avocado => build_avocado(&pool, &base, &config, &opts)?,
        StrategyArg::Sizesearch => build_sizesearch(&pool, &base, &config, &opts)?,
    };
    if manifest.exhausted {
        eprintln!("warning: candidates exhausted before reaching gamma");
    }
    vocabulary.save().write_to_dir(&args.out_dir).with_context(|| format!("writing {}", args.out_dir.display()))?;
    let manifest_path = args.out_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json() + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    let summary = BuildSummary {
        strategy: manifest.strategy,
        chosen_size: manifest.chosen_size,
        chosen_score: manifest.chosen_score,
        out_dir: args.out_dir.display().to_string(),
    };
    emit(&args.io.output, &serde_json::to_string(&summary)?)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Tokenize(a) => cmd_tokenize(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Fragscore(a) => cmd_fragscore(a),
        Command::BuildVocab(a) => cmd_build_vocab(a),
    }
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<UsageError>() || matches!(e.downcast_ref::<adaptbpe::Error>(), Some(adaptbpe::Error::InvalidConfig(_)))
    })
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
