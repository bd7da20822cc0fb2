//! Fixture loading and naive reference implementations shared by the
//! integration tests. The reference code deliberately avoids the crate's
//! merge loop, trie and trainer.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use adaptbpe::vocab::read_domain_tokens;
use adaptbpe::{extend, ExtendedVocabulary, MergeRuleTable, Tokenizer, Vocabulary};
use rand::Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn lines(name: &str) -> Vec<String> {
    read(name).lines().filter(|l| !l.trim().is_empty()).map(String::from).collect()
}

pub fn golden() -> serde_json::Value {
    serde_json::from_str(&read("golden/golden.json")).unwrap()
}

pub fn base_vocab() -> Vocabulary {
    Vocabulary::from_json_str(&read("base/vocab.json")).unwrap()
}

pub fn base_merges() -> MergeRuleTable {
    MergeRuleTable::from_text(&read("base/merges.txt")).unwrap()
}

pub fn domain_tokens() -> Vec<String> {
    read_domain_tokens(read("domain.txt").as_bytes()).unwrap()
}

/// Base vocabulary with the medical domain tokens and their merge chains appended.
pub fn medical() -> ExtendedVocabulary {
    ExtendedVocabulary::load(
        read("base/vocab.json").as_bytes(),
        read("medical/merges.txt").as_bytes(),
        Some(read("domain.txt").as_bytes()),
    )
    .unwrap()
}

pub fn medical_tokenizer() -> Tokenizer {
    Tokenizer::new(medical()).unwrap()
}

pub fn plain_tokenizer() -> Tokenizer {
    Tokenizer::new(ExtendedVocabulary::plain(base_vocab(), base_merges())).unwrap()
}

pub fn with_domain<S: Into<String>>(tokens: Vec<S>) -> Tokenizer {
    Tokenizer::new(extend(base_vocab(), base_merges(), tokens, None)).unwrap()
}

/// Rank lookup for the naive loop.
pub fn rank_map(rules: &[(String, String)]) -> HashMap<(String, String), usize> {
    rules.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()
}

/// The textbook loop: find the least-ranked applicable adjacent pair by
/// re-scanning every pair, merge all its occurrences left to right, repeat.
pub fn naive_merge(mut word: Vec<String>, ranks: &HashMap<(String, String), usize>) -> Vec<String> {
    while word.len() > 1 {
        let best = word
            .windows(2)
            .filter_map(|w| ranks.get(&(w[0].clone(), w[1].clone())).map(|&r| (r, w[0].clone(), w[1].clone())))
            .min();
        let Some((_, first, second)) = best else {
            break;
        };
        let mut out = Vec::new();
        let mut i = 0;
        while i < word.len() {
            if i + 1 < word.len() && word[i] == first && word[i + 1] == second {
                out.push(format!("{first}{second}"));
                i += 2;
            } else {
                out.push(word[i].clone());
                i += 1;
            }
        }
        word = out;
    }
    word
}

pub fn chars(s: &str) -> Vec<String> {
    s.chars().map(String::from).collect()
}

/// Exhaustive initialization: repeatedly try every substring from longest to
/// shortest and leftmost first, masking each hit.
pub fn naive_initialize(surface: &str, domain: &HashSet<String>) -> Vec<String> {
    let symbols: Vec<char> = surface.chars().collect();
    let n = symbols.len();
    let mut masked = vec![false; n];
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    'outer: loop {
        for len in (1..=n).rev() {
            for start in 0..=(n - len) {
                if masked[start..start + len].iter().any(|&m| m) {
                    continue;
                }
                let piece: String = symbols[start..start + len].iter().collect();
                if domain.contains(&piece) {
                    hits.insert(start, len);
                    masked[start..start + len].iter_mut().for_each(|m| *m = true);
                    continue 'outer;
                }
            }
        }
        break;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if let Some(&len) = hits.get(&i) {
            out.push(symbols[i..i + len].iter().collect());
            i += len;
        } else {
            out.push(symbols[i].to_string());
            i += 1;
        }
    }
    out
}

/// Pair-recounting trainer with lexicographic tie-break.
pub fn naive_train(words: &[(String, u64)], target: usize) -> Vec<(String, String)> {
    let mut corpus: Vec<(Vec<String>, u64)> = words.iter().map(|(w, c)| (chars(w), *c)).collect();
    let mut merges = Vec::new();
    while merges.len() < target {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (seq, c) in &corpus {
            for w in seq.windows(2) {
                *counts.entry((w[0].clone(), w[1].clone())).or_default() += c;
            }
        }
        // BTreeMap iterates in key order, so the first maximum is the lexicographically smallest
        let Some((best, &n)) = counts.iter().fold(None, |acc: Option<(&(String, String), &u64)>, (k, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((k, v)),
        }) else {
            break;
        };
        if n < 2 {
            break;
        }
        let (a, b) = best.clone();
        for (seq, _) in corpus.iter_mut() {
            let mut out = Vec::new();
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && seq[i] == a && seq[i + 1] == b {
                    out.push(format!("{a}{b}"));
                    i += 2;
                } else {
                    out.push(seq[i].clone());
                    i += 1;
                }
            }
            *seq = out;
        }
        merges.push((a, b));
    }
    merges
}

/// Random UTF-8 text mixing ASCII words, whitespace runs, punctuation,
/// digits, accented letters, CJK and emoji.
pub fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const PIECES: &[&str] = &[
        " ", "  ", "\n", "\t", "the", "cat", "chol", "ester", "ol", "emia", "hyper", "'s", "'ll", "!", "?!", ",", "-",
        "42", "7", "é", "ü", "ß", "中文", "日本", "😀", "🧬", "\u{301}", "\u{a0}", "Ġ", "x",
    ];
    let n = rng.gen_range(0..=max_len);
    let mut s = String::new();
    for _ in 0..n {
        if rng.gen_bool(0.15) {
            s.push(random_char(rng));
        } else {
            s.push_str(PIECES[rng.gen_range(0..PIECES.len())]);
        }
    }
    s
}

pub fn random_char<R: Rng>(rng: &mut R) -> char {
    loop {
        let range = match rng.gen_range(0..4) {
            0 => 0x20..0x7f,
            1 => 0x80..0x800,
            2 => 0x800..0x10000,
            _ => 0x10000..0x110000,
        };
        if let Some(c) = char::from_u32(rng.gen_range(range)) {
            return c;
        }
    }
}

pub fn shared_medical() -> &'static Tokenizer {
    static TOK: std::sync::OnceLock<Tokenizer> = std::sync::OnceLock::new();
    TOK.get_or_init(medical_tokenizer)
}

pub fn shared_plain() -> &'static Tokenizer {
    static TOK: std::sync::OnceLock<Tokenizer> = std::sync::OnceLock::new();
    TOK.get_or_init(plain_tokenizer)
}
