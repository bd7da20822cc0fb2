//! Vocabularies, merge tables and the appended domain vocabulary.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::adapt::MatchIndex;
use crate::error::{Error, Result};

/// Marker line separating base merges from appended domain merges in a
/// saved merges document.
pub const DOMAIN_MERGES_MARKER: &str = "#domain-merges";

pub type MergePair = (String, String);

/// Bidirectional token ↔ id map of a pretrained model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    entries: HashMap<String, u32>,
    reverse: HashMap<u32, String>,
    next_id: u32,
    warnings: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from `(token, id)` pairs, rejecting duplicates.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for (token, id) in entries {
            let token = token.into();
            if vocab.entries.contains_key(&token) {
                return Err(Error::DuplicateToken(token));
            }
            if let Some(first) = vocab.reverse.get(&id) {
                return Err(Error::DuplicateId { id, first: first.clone(), second: token });
            }
            vocab.entries.insert(token.clone(), id);
            vocab.reverse.insert(id, token);
            vocab.next_id = vocab.next_id.max(id + 1);
        }
        let holes = vocab.next_id as usize - vocab.entries.len();
        if holes > 0 {
            vocab.warnings.push(format!("ids are not dense: {holes} unused ids below {}", vocab.next_id));
        }
        Ok(vocab)
    }

    /// Parses a `vocab.json` style document (`{"token": id, ...}`).
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_reader(reader);
        let RawEntries(entries) = RawEntries::deserialize(&mut de).map_err(|e| Error::MalformedVocab(e.to_string()))?;
        de.end().map_err(|e| Error::MalformedVocab(e.to_string()))?;
        Self::from_entries(entries)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_reader(s.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest id in use; equals `len()` when ids are dense.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    pub fn is_dense(&self) -> bool {
        self.next_id as usize == self.entries.len()
    }

    /// Non-fatal issues found while loading.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn token_to_id(&self, token: &str) -> Option<u32> {
        self.entries.get(token).copied()
    }

    pub fn id_to_token(&self, id: u32) -> Option<&str> {
        self.reverse.get(&id).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    /// Tokens ordered by id.
    pub fn iter_by_id(&self) -> impl Iterator<Item = (u32, &str)> {
        let mut ids: Vec<u32> = self.reverse.keys().copied().collect();
        ids.sort_unstable();
        ids.into_iter().map(move |id| (id, self.reverse[&id].as_str()))
    }

    /// Serializes as a JSON object with keys in id order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (id, token)) in self.iter_by_id().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(token).expect("string serialization"));
            out.push(':');
            out.push_str(&id.to_string());
        }
        out.push('}');
        out
    }
}

/// Map entries in document order, keeping duplicates so they can be reported.
struct RawEntries(Vec<(String, u32)>);

impl<'de> Deserialize<'de> for RawEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RawEntries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object mapping tokens to non-negative integer ids")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawEntries, A::Error> {
                let mut entries = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((token, id)) = map.next_entry::<String, u32>()? {
                    entries.push((token, id));
                }
                Ok(RawEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// Ordered merge rules; a rule's position is its rank (0 = applied first).
#[derive(Debug, Clone, Default)]
pub struct MergeRuleTable {
    rules: Vec<MergePair>,
    ranks: HashMap<String, HashMap<String, u32>>,
}

impl PartialEq for MergeRuleTable {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for MergeRuleTable {}

impl MergeRuleTable {
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = MergePair>,
    {
        let mut table = MergeRuleTable::default();
        for (i, (left, right)) in pairs.into_iter().enumerate() {
            if !table.push(left.clone(), right.clone()) {
                return Err(Error::DuplicateMerge { line: i + 1, left, right });
            }
        }
        Ok(table)
    }

    /// Appends a rule with the next rank; returns false if it already exists.
    pub fn push(&mut self, left: String, right: String) -> bool {
        let rank = self.rules.len() as u32;
        let row = self.ranks.entry(left.clone()).or_default();
        if row.contains_key(&right) {
            return false;
        }
        row.insert(right.clone(), rank);
        self.rules.push((left, right));
        true
    }

    /// Parses a `merges.txt` style document. An appended-domain section
    /// (see [`DOMAIN_MERGES_MARKER`]) is read as a continuation of the table.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let (base, domain) = read_merge_sections(reader)?;
        Self::from_pairs(base.into_iter().chain(domain))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        Self::from_reader(s.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[MergePair] {
        &self.rules
    }

    #[inline]
    pub fn rank(&self, left: &str, right: &str) -> Option<u32> {
        self.ranks.get(left)?.get(right).copied()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("#version: 0.2\n");
        for (l, r) in &self.rules {
            out.push_str(l);
            out.push(' ');
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Reads a merges document, splitting it at the domain marker line if present.
fn read_merge_sections<R: Read>(reader: R) -> Result<(Vec<MergePair>, Vec<MergePair>)> {
    let mut base = Vec::new();
    let mut domain = Vec::new();
    let mut in_domain = false;
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 && line.starts_with("#version") {
            continue;
        }
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }
        if trimmed.trim() == DOMAIN_MERGES_MARKER {
            in_domain = true;
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(left), Some(right), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::MalformedMergeLine { line: lineno, content: trimmed.to_string() });
        };
        let pair = (left.to_string(), right.to_string());
        if !seen.insert(pair.clone()) {
            return Err(Error::DuplicateMerge { line: lineno, left: pair.0, right: pair.1 });
        }
        if in_domain {
            domain.push(pair);
        } else {
            base.push(pair);
        }
    }
    Ok((base, domain))
}

/// The added vocabulary, with ids following the base vocabulary.
#[derive(Debug, Clone)]
pub struct DomainVocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    first_id: u32,
    appended_merges: Vec<MergePair>,
    index: MatchIndex,
}

impl DomainVocabulary {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn first_id(&self) -> u32 {
        self.first_id
    }

    pub fn token_to_id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn id_to_token(&self, id: u32) -> Option<&str> {
        let offset = id.checked_sub(self.first_id)? as usize;
        self.tokens.get(offset).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn appended_merges(&self) -> &[MergePair] {
        &self.appended_merges
    }

    pub fn match_index(&self) -> &MatchIndex {
        &self.index
    }
}

/// What [`extend`] dropped on the way in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendStats {
    /// Tokens already present whole in the base vocabulary.
    pub filtered_in_base: usize,
    /// Empty, repeated, or line-breaking tokens.
    pub filtered_invalid: usize,
    /// Domain merge rules already present in the base table.
    pub skipped_merges: usize,
}

impl ExtendStats {
    pub fn filtered_tokens(&self) -> usize {
        self.filtered_in_base + self.filtered_invalid
    }
}

/// A base vocabulary and merge table with a domain vocabulary appended.
#[derive(Debug, Clone)]
pub struct ExtendedVocabulary {
    base: Vocabulary,
    base_merges: MergeRuleTable,
    domain: DomainVocabulary,
    merges: MergeRuleTable,
    stats: ExtendStats,
}

impl PartialEq for ExtendedVocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.base_merges == other.base_merges
            && self.domain.tokens == other.domain.tokens
            && self.domain.first_id == other.domain.first_id
            && self.domain.appended_merges == other.domain.appended_merges
    }
}

/// Appends `domain_tokens` (and optionally their merge rules) to a base vocabulary.
///
/// Tokens already present in `base` are dropped and counted in
/// [`ExtendedVocabulary::stats`]. Surviving tokens receive consecutive ids
/// starting at `base.next_id()`, in input order. Domain merges rank after
/// every base merge.
pub fn extend<I, S>(
    base: Vocabulary,
    merges: MergeRuleTable,
    domain_tokens: I,
    domain_merges: Option<Vec<MergePair>>,
) -> ExtendedVocabulary
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut stats = ExtendStats::default();
    let first_id = base.next_id();
    let mut tokens = Vec::new();
    let mut ids = HashMap::new();
    for token in domain_tokens {
        let token: String = token.into();
        if token.is_empty() || token.contains(['\n', '\r']) || ids.contains_key(&token) {
            stats.filtered_invalid += 1;
            continue;
        }
        if base.contains(&token) {
            stats.filtered_in_base += 1;
            continue;
        }
        ids.insert(token.clone(), first_id + tokens.len() as u32);
        tokens.push(token);
    }

    let mut combined = merges.clone();
    let mut appended = Vec::new();
    for (l, r) in domain_merges.unwrap_or_default() {
        if combined.push(l.clone(), r.clone()) {
            appended.push((l, r));
        } else {
            stats.skipped_merges += 1;
        }
    }

    let index = MatchIndex::new(tokens.iter().map(String::as_str));
    ExtendedVocabulary {
        base,
        base_merges: merges,
        domain: DomainVocabulary { tokens, ids, first_id, appended_merges: appended, index },
        merges: combined,
        stats,
    }
}

impl ExtendedVocabulary {
    /// Extended vocabulary with nothing appended.
    pub fn plain(base: Vocabulary, merges: MergeRuleTable) -> Self {
        extend(base, merges, Vec::<String>::new(), None)
    }

    pub fn base(&self) -> &Vocabulary {
        &self.base
    }

    pub fn base_merges(&self) -> &MergeRuleTable {
        &self.base_merges
    }

    pub fn domain(&self) -> &DomainVocabulary {
        &self.domain
    }

    /// Base merges followed by appended domain merges.
    pub fn merges(&self) -> &MergeRuleTable {
        &self.merges
    }

    pub fn stats(&self) -> ExtendStats {
        self.stats
    }

    /// Ids at or above this value belong to the domain vocabulary.
    pub fn plm_size(&self) -> u32 {
        self.domain.first_id
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exclusive upper bound of the id space.
    pub fn id_bound(&self) -> u32 {
        self.domain.first_id + self.domain.len() as u32
    }

    pub fn token_to_id(&self, token: &str) -> Option<u32> {
        self.base.token_to_id(token).or_else(|| self.domain.token_to_id(token))
    }

    pub fn id_to_token(&self, id: u32) -> Option<&str> {
        if id >= self.domain.first_id {
            self.domain.id_to_token(id)
        } else {
            self.base.id_to_token(id)
        }
    }

    pub fn is_domain_id(&self, id: u32) -> bool {
        id >= self.domain.first_id
    }

    /// Serializes to the three documents: base vocab, merges, domain tokens.
    pub fn save(&self) -> SavedVocabulary {
        let mut merges = self.base_merges.to_text();
        if !self.domain.appended_merges.is_empty() {
            merges.push_str(DOMAIN_MERGES_MARKER);
            merges.push('\n');
            for (l, r) in &self.domain.appended_merges {
                merges.push_str(l);
                merges.push(' ');
                merges.push_str(r);
                merges.push('\n');
            }
        }
        let mut domain = String::new();
        for t in &self.domain.tokens {
            domain.push_str(t);
            domain.push('\n');
        }
        SavedVocabulary { vocab: self.base.to_json(), merges, domain }
    }

    /// Inverse of [`ExtendedVocabulary::save`].
    pub fn load<V: Read, M: Read, D: Read>(vocab: V, merges: M, domain: Option<D>) -> Result<Self> {
        let base = Vocabulary::from_reader(vocab)?;
        let (base_merges, domain_merges) = read_merge_sections(merges)?;
        let base_merges = MergeRuleTable::from_pairs(base_merges)?;
        let tokens = match domain {
            Some(d) => read_domain_tokens(d)?,
            None => Vec::new(),
        };
        let domain_merges = (!domain_merges.is_empty()).then_some(domain_merges);
        Ok(extend(base, base_merges, tokens, domain_merges))
    }

    pub fn load_files(vocab: &Path, merges: &Path, domain: Option<&Path>) -> Result<Self> {
        let v = std::fs::File::open(vocab)?;
        let m = std::fs::File::open(merges)?;
        let d = domain.map(std::fs::File::open).transpose()?;
        Self::load(v, m, d)
    }
}

/// Reads a domain-token document: one token per line, blank lines skipped.
pub fn read_domain_tokens<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let token = line.trim_end_matches('\r');
        if !token.is_empty() {
            out.push(token.to_string());
        }
    }
    Ok(out)
}

/// The three text documents that make up an extended vocabulary on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SavedVocabulary {
    pub vocab: String,
    pub merges: String,
    pub domain: String,
}

impl SavedVocabulary {
    pub const VOCAB_FILE: &'static str = "vocab.json";
    pub const MERGES_FILE: &'static str = "merges.txt";
    pub const DOMAIN_FILE: &'static str = "domain.txt";

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in
            [(Self::VOCAB_FILE, &self.vocab), (Self::MERGES_FILE, &self.merges), (Self::DOMAIN_FILE, &self.domain)]
        {
            let mut f = std::fs::File::create(dir.join(name))?;
            f.write_all(body.as_bytes())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_base() -> (Vocabulary, MergeRuleTable) {
        let vocab = Vocabulary::from_json_str(r#"{"t":0,"h":1,"e":2,"th":3,"the":4}"#).unwrap();
        let merges = MergeRuleTable::from_text("#version: 0.2\nt h\nth e\n").unwrap();
        (vocab, merges)
    }

    #[test]
    fn minimal_vocab() {
        let v = Vocabulary::from_json_str(r#"{"a":0,"b":1}"#).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.token_to_id("b"), Some(1));
        assert_eq!(v.id_to_token(0), Some("a"));
        assert!(v.is_dense());
        assert!(v.warnings().is_empty());
    }

    #[test]
    fn duplicate_token_is_rejected() {
        let err = Vocabulary::from_json_str(r#"{"a":0,"a":1}"#).unwrap_err();
        assert!(matches!(err, Error::DuplicateToken(t) if t == "a"));
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let err = Vocabulary::from_json_str(r#"{"a":0,"b":0}"#).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { id: 0, .. }));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(Vocabulary::from_json_str("[1,2]"), Err(Error::MalformedVocab(_))));
        assert!(matches!(Vocabulary::from_json_str(r#"{"a":-1}"#), Err(Error::MalformedVocab(_))));
        assert!(matches!(Vocabulary::from_json_str(r#"{"a":0} x"#), Err(Error::MalformedVocab(_))));
    }

    #[test]
    fn holes_produce_a_warning() {
        let v = Vocabulary::from_json_str(r#"{"a":0,"b":5}"#).unwrap();
        assert!(!v.is_dense());
        assert_eq!(v.next_id(), 6);
        assert_eq!(v.warnings().len(), 1);
    }

    #[test]
    fn merges_are_ranked_in_file_order() {
        let m = MergeRuleTable::from_text("t h\nth e").unwrap();
        assert_eq!(m.rank("t", "h"), Some(0));
        assert_eq!(m.rank("th", "e"), Some(1));
        assert_eq!(m.rank("h", "e"), None);
        assert!(MergeRuleTable::from_text("").unwrap().is_empty());
    }

    #[test]
    fn malformed_and_duplicate_merge_lines() {
        assert!(matches!(MergeRuleTable::from_text("a b c"), Err(Error::MalformedMergeLine { line: 1, .. })));
        assert!(matches!(MergeRuleTable::from_text("a b\nx\n"), Err(Error::MalformedMergeLine { line: 2, .. })));
        assert!(matches!(MergeRuleTable::from_text("a b\na b\n"), Err(Error::DuplicateMerge { line: 2, .. })));
    }

    #[test]
    fn extend_filters_tokens_already_in_base() {
        let (v, m) = toy_base();
        let ev = extend(v, m, ["the", "cholesterol"], None);
        assert_eq!(ev.domain().tokens(), ["cholesterol"]);
        assert_eq!(ev.stats().filtered_in_base, 1);
        assert_eq!(ev.token_to_id("cholesterol"), Some(5));
        assert_eq!(ev.len(), 6);
    }

    #[test]
    fn extend_with_nothing_surviving() {
        let (v, m) = toy_base();
        let ev = extend(v, m, ["the", "th", ""], None);
        assert!(ev.domain().is_empty());
        assert_eq!(ev.stats().filtered_tokens(), 3);
        assert_eq!(ev.len(), 5);
    }

    #[test]
    fn domain_merges_rank_after_base() {
        let (v, m) = toy_base();
        let dm = vec![("c".to_string(), "h".to_string()), ("t".to_string(), "h".to_string())];
        let ev = extend(v, m, ["ch"], Some(dm));
        assert_eq!(ev.merges().rank("c", "h"), Some(2));
        assert_eq!(ev.stats().skipped_merges, 1);
        assert_eq!(ev.domain().appended_merges().len(), 1);
    }

    #[test]
    fn domain_ids_follow_non_dense_base() {
        let v = Vocabulary::from_json_str(r#"{"a":0,"b":5}"#).unwrap();
        let ev = extend(v, MergeRuleTable::default(), ["zz"], None);
        assert_eq!(ev.token_to_id("zz"), Some(6));
        assert_eq!(ev.id_to_token(6), Some("zz"));
        assert_eq!(ev.id_to_token(7), None);
    }

    #[test]
    fn save_layout() {
        let (v, m) = toy_base();
        let dm = vec![("c".to_string(), "h".to_string())];
        let ev = extend(v.clone(), m.clone(), ["ch"], Some(dm));
        let saved = ev.save();
        let lines: Vec<&str> = saved.merges.lines().collect();
        assert_eq!(lines, ["#version: 0.2", "t h", "th e", DOMAIN_MERGES_MARKER, "c h"]);
        assert_eq!(saved.domain, "ch\n");

        let empty = ExtendedVocabulary::plain(v, m.clone());
        let saved = empty.save();
        assert_eq!(saved.domain, "");
        assert_eq!(saved.merges, m.to_text());
    }

    #[test]
    fn save_then_load_is_identity() {
        let (v, m) = toy_base();
        let dm = vec![("c".to_string(), "h".to_string())];
        let ev = extend(v, m, ["ch", "Ġchol\"esterol"], Some(dm));
        let saved = ev.save();
        let back =
            ExtendedVocabulary::load(saved.vocab.as_bytes(), saved.merges.as_bytes(), Some(saved.domain.as_bytes()))
                .unwrap();
        assert_eq!(back, ev);
        // A plain merges reader sees one continuous table.
        let all = MergeRuleTable::from_text(&saved.merges).unwrap();
        assert_eq!(all, *ev.merges());
    }
}
