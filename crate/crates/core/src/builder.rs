//! Domain vocabulary construction driven by fragment score.
//!
//! Two strategies share a candidate pool: words the base tokenizer splits
//! into more than `threshold_k` pieces, and the tokens a frequency-greedy
//! BPE run over those words creates, in creation order.
//!
//! * [`build_avocado`] adds candidates batch by batch until the fragment
//!   score of the candidate words drops to `gamma` or below.
//! * [`build_sizesearch`] scores prefixes of the candidate list at fixed
//!   sizes and keeps the smallest one within `(1 + epsilon)` of the best.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{count_words, subword_count, FragmentReport, WordOptions};
use crate::pretokenize::pre_tokenize;
use crate::tokenizer::{Mode, Tokenizer};
use crate::train::train_bpe;
use crate::vocab::{extend, ExtendedVocabulary, MergePair, MergeRuleTable, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Avocado,
    SizeSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildConfig {
    pub gamma: f64,
    pub size_grid: Vec<usize>,
    pub threshold_k: usize,
    pub epsilon: f64,
    /// Candidates added per fragment-score evaluation (threshold strategy).
    pub batch: usize,
    /// Upper bound on merges learned while ranking candidates.
    pub max_merges: usize,
    /// Tokenizer used to score extended vocabularies.
    pub scoring_mode: Mode,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            gamma: 3.0,
            size_grid: vec![0],
            threshold_k: 2,
            epsilon: 0.01,
            batch: 100,
            max_merges: 20_000,
            scoring_mode: Mode::AdaptBpe,
        }
    }
}

impl BuildConfig {
    pub fn avocado(gamma: f64) -> Self {
        BuildConfig { gamma, threshold_k: 2, ..Default::default() }
    }

    pub fn sizesearch(size_grid: Vec<usize>, epsilon: f64) -> Self {
        BuildConfig { size_grid, epsilon, threshold_k: 1, ..Default::default() }
    }

    pub fn validate(&self, strategy: Strategy) -> Result<()> {
        if !(1..=2).contains(&self.threshold_k) {
            return Err(Error::InvalidConfig(format!("threshold_k must be 1 or 2, got {}", self.threshold_k)));
        }
        if self.batch == 0 {
            return Err(Error::InvalidConfig("batch must be at least 1".into()));
        }
        match strategy {
            Strategy::Avocado => {
                if !(self.gamma.is_finite() && self.gamma > 1.0) {
                    return Err(Error::InvalidConfig(format!("gamma must exceed 1, got {}", self.gamma)));
                }
            }
            Strategy::SizeSearch => {
                if self.size_grid.is_empty() {
                    return Err(Error::InvalidConfig("size grid is empty".into()));
                }
                if self.size_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidConfig("size grid must be strictly increasing".into()));
                }
                if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
                    return Err(Error::InvalidConfig(format!("epsilon must be non-negative, got {}", self.epsilon)));
                }
            }
        }
        Ok(())
    }
}

/// Base vocabulary plus merges, the starting point of every build.
#[derive(Debug, Clone)]
pub struct BaseModel {
    pub vocab: Vocabulary,
    pub merges: MergeRuleTable,
}

impl BaseModel {
    pub fn new(vocab: Vocabulary, merges: MergeRuleTable) -> Self {
        BaseModel { vocab, merges }
    }

    pub fn tokenizer(&self) -> Result<Tokenizer> {
        Tokenizer::new(ExtendedVocabulary::plain(self.vocab.clone(), self.merges.clone()))
    }

    /// Base extended with the first `size` candidates of `pool`.
    pub fn extended(&self, pool: &CandidatePool, size: usize) -> ExtendedVocabulary {
        let size = size.min(pool.ranked_subwords.len());
        extend(
            self.vocab.clone(),
            self.merges.clone(),
            pool.ranked_subwords[..size].iter().cloned(),
            Some(pool.merges[..size].to_vec()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePool {
    /// Words split into more than `threshold_k` pieces, with counts.
    pub words: BTreeMap<String, u64>,
    /// Every corpus word, with counts.
    pub corpus: BTreeMap<String, u64>,
    pub threshold_k: usize,
    /// Candidate tokens in creation order, none of them in the base vocabulary.
    pub ranked_subwords: Vec<String>,
    /// The merge that created each candidate.
    pub merges: Vec<MergePair>,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.ranked_subwords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked_subwords.is_empty()
    }
}

pub fn collect_candidates<I, S>(
    documents: I,
    base: &BaseModel,
    config: &BuildConfig,
    opts: &WordOptions,
) -> Result<CandidatePool>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let tokenizer = base.tokenizer()?;
    let corpus = count_words(documents, opts);
    let words: BTreeMap<String, u64> = corpus
        .iter()
        .filter(|(w, _)| subword_count(&tokenizer, Mode::Bpe, w, opts) > config.threshold_k)
        .map(|(w, &c)| (w.clone(), c))
        .collect();

    let mut surfaces: BTreeMap<String, u64> = BTreeMap::new();
    for (w, &c) in &words {
        for pre in pre_tokenize(&opts.scoring_text(w)) {
            *surfaces.entry(pre.surface).or_insert(0) += c;
        }
    }
    let trained = train_bpe(surfaces, config.max_merges);

    let mut seen = HashSet::new();
    let mut ranked_subwords = Vec::new();
    let mut merges = Vec::new();
    for (l, r) in trained.merges {
        let token = format!("{l}{r}");
        if base.vocab.contains(&token) || !seen.insert(token.clone()) {
            continue;
        }
        ranked_subwords.push(token);
        merges.push((l, r));
    }
    Ok(CandidatePool { words, corpus, threshold_k: config.threshold_k, ranked_subwords, merges })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    /// Requested number of candidates.
    pub size: usize,
    /// Candidates actually added (capped by the pool size).
    pub added: usize,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildManifest {
    pub strategy: Strategy,
    pub config: BuildConfig,
    pub candidate_words: usize,
    pub candidates: usize,
    pub chosen_size: usize,
    pub chosen_score: Option<f64>,
    /// Threshold strategy: the score reached `gamma`.
    pub reached_threshold: bool,
    /// Threshold strategy: candidates ran out first.
    pub exhausted: bool,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl BuildManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization")
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub vocabulary: ExtendedVocabulary,
    pub manifest: BuildManifest,
}

fn score_words(
    base: &BaseModel,
    pool: &CandidatePool,
    size: usize,
    words: &BTreeMap<String, u64>,
    config: &BuildConfig,
    opts: &WordOptions,
) -> Result<(ExtendedVocabulary, Option<f64>)> {
    let tokenizer = Tokenizer::new(base.extended(pool, size))?;
    let report =
        FragmentReport::from_counts(words, |w| subword_count(&tokenizer, config.scoring_mode, w, opts), |_| true);
    Ok((tokenizer.into_vocabulary(), report.fragment_score_occurrence))
}

/// Adds candidates in batches until the fragment score of `pool.words`
/// is at most `gamma`, or the candidates run out.
pub fn build_avocado(
    pool: &CandidatePool,
    base: &BaseModel,
    config: &BuildConfig,
    opts: &WordOptions,
) -> Result<BuildOutcome> {
    config.validate(Strategy::Avocado)?;
    let mut trajectory = Vec::new();
    let mut size = 0;
    let (vocabulary, score, reached, exhausted) = loop {
        let (ev, score) = score_words(base, pool, size, &pool.words, config, opts)?;
        trajectory.push(TrajectoryPoint { size, added: ev.domain().len(), score });
        match score {
            None => break (ev, score, true, false),
            Some(s) if s <= config.gamma => break (ev, score, true, false),
            Some(_) if size >= pool.len() => break (ev, score, false, true),
            Some(_) => size = (size + config.batch).min(pool.len()),
        }
    };
    Ok(BuildOutcome {
        manifest: BuildManifest {
            strategy: Strategy::Avocado,
            config: config.clone(),
            candidate_words: pool.words.len(),
            candidates: pool.len(),
            chosen_size: vocabulary.domain().len(),
            chosen_score: score,
            reached_threshold: reached,
            exhausted,
            trajectory,
        },
        vocabulary,
    })
}

/// Scores every grid size on the whole corpus and picks the smallest size
/// whose score is within `(1 + epsilon)` of the best one.
pub fn build_sizesearch(
    pool: &CandidatePool,
    base: &BaseModel,
    config: &BuildConfig,
    opts: &WordOptions,
) -> Result<BuildOutcome> {
    config.validate(Strategy::SizeSearch)?;
    let mut trajectory = Vec::new();
    for &size in &config.size_grid {
        let (ev, score) = score_words(base, pool, size, &pool.corpus, config, opts)?;
        trajectory.push(TrajectoryPoint { size, added: ev.domain().len(), score });
    }
    let best = trajectory.iter().filter_map(|p| p.score).min_by(f64::total_cmp);
    let chosen = match best {
        Some(best) => trajectory
            .iter()
            .find(|p| p.score.is_some_and(|s| s <= (1.0 + config.epsilon) * best))
            .expect("the minimum itself qualifies"),
        None => &trajectory[0],
    };
    let chosen_size = chosen.size;
    let chosen_score = chosen.score;
    let vocabulary = base.extended(pool, chosen_size);
    Ok(BuildOutcome {
        manifest: BuildManifest {
            strategy: Strategy::SizeSearch,
            config: config.clone(),
            candidate_words: pool.words.len(),
            candidates: pool.len(),
            chosen_size: vocabulary.domain().len(),
            chosen_score,
            reached_threshold: false,
            exhausted: false,
            trajectory,
        },
        vocabulary,
    })
}
