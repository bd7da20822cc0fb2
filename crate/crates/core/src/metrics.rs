//! Fragment score, OOV rate and BPE-vs-AdaptBPE corpus comparison.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::pretokenize::{byte_encode, SPACE_MARKER};
use crate::tokenizer::{Mode, Tokenizer};
use crate::vocab::Vocabulary;

/// How raw text is cut into scored words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordOptions {
    /// Characters stripped from both ends of each whitespace-delimited unit.
    pub strip: Vec<char>,
    /// Score words as they appear at the start of a sentence (no leading
    /// space marker) instead of mid-sentence.
    pub sentence_initial: bool,
}

impl Default for WordOptions {
    fn default() -> Self {
        WordOptions {
            strip: (0u8..128).map(char::from).filter(char::is_ascii_punctuation).collect(),
            sentence_initial: false,
        }
    }
}

impl WordOptions {
    pub fn words<'a>(&'a self, text: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        text.split_whitespace().map(move |w| w.trim_matches(|c| self.strip.contains(&c))).filter(|w| !w.is_empty())
    }

    /// The text a word is tokenized as.
    pub fn scoring_text(&self, word: &str) -> String {
        if self.sentence_initial {
            word.to_string()
        } else {
            format!(" {word}")
        }
    }
}

/// Word occurrence counts over a stream of documents.
pub fn count_words<I, S>(documents: I, opts: &WordOptions) -> BTreeMap<String, u64>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = BTreeMap::new();
    for doc in documents {
        for w in opts.words(doc.as_ref()) {
            *counts.entry(w.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordStat {
    pub occurrences: u64,
    pub subwords: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentReport {
    pub word_count: u64,
    pub unique_words: usize,
    /// Mean subwords per word occurrence; `None` when no words were scored.
    pub fragment_score_occurrence: Option<f64>,
    /// Mean subwords per distinct word.
    pub fragment_score_type: Option<f64>,
    pub scores_defined: bool,
    pub per_word: BTreeMap<String, WordStat>,
}

impl FragmentReport {
    /// Builds a report from word counts. `subwords` returns the number of
    /// tokens for a word; `keep` restricts which words are scored.
    pub fn from_counts<F, P>(counts: &BTreeMap<String, u64>, mut subwords: F, mut keep: P) -> Self
    where
        F: FnMut(&str) -> usize,
        P: FnMut(&str) -> bool,
    {
        let mut per_word = BTreeMap::new();
        for (word, &occurrences) in counts {
            if occurrences == 0 || !keep(word) {
                continue;
            }
            per_word.insert(word.clone(), WordStat { occurrences, subwords: subwords(word) });
        }
        Self::from_stats(per_word)
    }

    pub fn from_stats(per_word: BTreeMap<String, WordStat>) -> Self {
        let word_count: u64 = per_word.values().map(|s| s.occurrences).sum();
        let weighted: u64 = per_word.values().map(|s| s.occurrences * s.subwords as u64).sum();
        let type_total: u64 = per_word.values().map(|s| s.subwords as u64).sum();
        let unique_words = per_word.len();
        let defined = word_count > 0;
        FragmentReport {
            word_count,
            unique_words,
            fragment_score_occurrence: defined.then(|| weighted as f64 / word_count as f64),
            fragment_score_type: defined.then(|| type_total as f64 / unique_words as f64),
            scores_defined: defined,
            per_word,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

/// Fragment score of a corpus under `tokenizer` in `mode`.
///
/// `keep` optionally restricts the scored words, e.g. to the words a
/// reference tokenizer splits into more than two pieces.
pub fn fragment_score<I, S>(
    documents: I,
    tokenizer: &Tokenizer,
    mode: Mode,
    keep: Option<&dyn Fn(&str) -> bool>,
    opts: &WordOptions,
) -> FragmentReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let counts = count_words(documents, opts);
    FragmentReport::from_counts(&counts, |w| subword_count(tokenizer, mode, w, opts), |w| keep.is_none_or(|k| k(w)))
}

pub fn subword_count(tokenizer: &Tokenizer, mode: Mode, word: &str, opts: &WordOptions) -> usize {
    tokenizer.encode_mode(&opts.scoring_text(word), mode).len()
}

pub fn word_tokens(tokenizer: &Tokenizer, mode: Mode, word: &str, opts: &WordOptions) -> (Vec<String>, usize) {
    let seq = tokenizer.encode_mode(&opts.scoring_text(word), mode);
    let domain = seq.ids.iter().filter(|&&id| tokenizer.vocabulary().is_domain_id(id)).count();
    (seq.tokens, domain)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangedWord {
    pub word: String,
    pub bpe: Vec<String>,
    pub adaptbpe: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DomainTokenUsage {
    pub bpe: u64,
    pub adaptbpe: u64,
}

/// Standard BPE (`bpe`) against AdaptBPE (`adaptbpe`) on the same corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub bpe: FragmentReport,
    pub adaptbpe: FragmentReport,
    /// `100 * (bpe - adaptbpe) / bpe` on the occurrence-weighted scores.
    pub drop_percent: f64,
    pub changed_words: Vec<ChangedWord>,
    /// Emitted tokens with a domain id, weighted by word occurrences.
    pub domain_token_usage: DomainTokenUsage,
}

#[derive(Serialize)]
struct Summary {
    fragment_score_occurrence: Option<f64>,
    fragment_score_type: Option<f64>,
    word_count: u64,
    unique_words: usize,
}

impl From<&FragmentReport> for Summary {
    fn from(r: &FragmentReport) -> Self {
        Summary {
            fragment_score_occurrence: r.fragment_score_occurrence,
            fragment_score_type: r.fragment_score_type,
            word_count: r.word_count,
            unique_words: r.unique_words,
        }
    }
}

#[derive(Serialize)]
struct DiffJson<'a> {
    fragment_score_occurrence: Option<f64>,
    fragment_score_type: Option<f64>,
    word_count: u64,
    drop_percent: f64,
    changed_words: &'a [ChangedWord],
    domain_token_usage: DomainTokenUsage,
    bpe: Summary,
    adaptbpe: Summary,
}

impl DiffReport {
    /// Top-level scores describe AdaptBPE; the `bpe` and `adaptbpe` objects
    /// carry both sides.
    pub fn to_json(&self) -> String {
        let doc = DiffJson {
            fragment_score_occurrence: self.adaptbpe.fragment_score_occurrence,
            fragment_score_type: self.adaptbpe.fragment_score_type,
            word_count: self.adaptbpe.word_count,
            drop_percent: self.drop_percent,
            changed_words: &self.changed_words,
            domain_token_usage: self.domain_token_usage,
            bpe: (&self.bpe).into(),
            adaptbpe: (&self.adaptbpe).into(),
        };
        serde_json::to_string(&doc).expect("report serialization")
    }
}

pub fn drop_percent(before: Option<f64>, after: Option<f64>) -> f64 {
    match (before, after) {
        (Some(a), Some(b)) if a > 0.0 => 100.0 * (a - b) / a,
        _ => 0.0,
    }
}

/// Tokenizes every corpus word both ways and reports the difference.
pub fn compare<I, S>(documents: I, tokenizer: &Tokenizer, opts: &WordOptions) -> DiffReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    compare_counts(&count_words(documents, opts), tokenizer, opts)
}

pub fn compare_counts(counts: &BTreeMap<String, u64>, tokenizer: &Tokenizer, opts: &WordOptions) -> DiffReport {
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut changed_words = Vec::new();
    let mut usage = DomainTokenUsage { bpe: 0, adaptbpe: 0 };
    for (word, &occurrences) in counts {
        let (ta, da) = word_tokens(tokenizer, Mode::Bpe, word, opts);
        let (tb, db) = word_tokens(tokenizer, Mode::AdaptBpe, word, opts);
        usage.bpe += da as u64 * occurrences;
        usage.adaptbpe += db as u64 * occurrences;
        a.insert(word.clone(), WordStat { occurrences, subwords: ta.len() });
        b.insert(word.clone(), WordStat { occurrences, subwords: tb.len() });
        if ta != tb {
            changed_words.push(ChangedWord { word: word.clone(), bpe: ta, adaptbpe: tb });
        }
    }
    let bpe = FragmentReport::from_stats(a);
    let adaptbpe = FragmentReport::from_stats(b);
    DiffReport {
        drop_percent: drop_percent(bpe.fragment_score_occurrence, adaptbpe.fragment_score_occurrence),
        bpe,
        adaptbpe,
        changed_words,
        domain_token_usage: usage,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OovReport {
    /// Per document: share of distinct words that are not a single vocabulary token.
    pub fractions: Vec<f64>,
    pub median: Option<f64>,
    /// Indices of documents with no words; they count as 0.
    pub empty_documents: Vec<usize>,
}

/// A word counts as in-vocabulary if its byte-level surface, with or without
/// the leading space marker, is a single token.
pub fn is_oov(word: &str, vocab: &Vocabulary) -> bool {
    let surface = byte_encode(word.as_bytes());
    let marked = format!("{SPACE_MARKER}{surface}");
    !vocab.contains(&surface) && !vocab.contains(&marked)
}

pub fn oov_rate<I, S>(documents: I, vocab: &Vocabulary, opts: &WordOptions) -> OovReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut fractions = Vec::new();
    let mut empty_documents = Vec::new();
    for (i, doc) in documents.into_iter().enumerate() {
        let unique: BTreeSet<&str> = opts.words(doc.as_ref()).collect();
        if unique.is_empty() {
            empty_documents.push(i);
            fractions.push(0.0);
            continue;
        }
        let oov = unique.iter().filter(|w| is_oov(w, vocab)).count();
        fractions.push(oov as f64 / unique.len() as f64);
    }
    OovReport { median: median(&fractions), fractions, empty_documents }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}
