//! Domain-aware initialization: longest-substring matches against the added
//! vocabulary are fixed as atomic segments before the merge loop runs.

use serde::Serialize;

use crate::bpe::{merge_segments, MergeStep};
use crate::vocab::MergeRuleTable;

#[derive(Debug, Clone, Default)]
struct Node {
    children: Vec<(char, u32)>,
    token: Option<u32>,
}

impl Node {
    fn child(&self, c: char) -> Option<u32> {
        self.children.binary_search_by_key(&c, |&(k, _)| k).ok().map(|i| self.children[i].1)
    }
}

/// Character trie over the domain tokens.
///
/// A query walks the trie once from every start position, so its cost is
/// bounded by `query_len * longest_token` regardless of how many tokens
/// are indexed.
#[derive(Debug, Clone)]
pub struct MatchIndex {
    nodes: Vec<Node>,
    tokens: Vec<String>,
}

impl Default for MatchIndex {
    fn default() -> Self {
        MatchIndex { nodes: vec![Node::default()], tokens: Vec::new() }
    }
}

impl MatchIndex {
    pub fn new<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Self {
        let mut index = MatchIndex::default();
        for token in tokens {
            index.insert(token);
        }
        index
    }

    fn insert(&mut self, token: &str) {
        if token.is_empty() {
            return;
        }
        let mut node = 0usize;
        for c in token.chars() {
            node = match self.nodes[node].children.binary_search_by_key(&c, |&(k, _)| k) {
                Ok(i) => self.nodes[node].children[i].1 as usize,
                Err(i) => {
                    let id = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[node].children.insert(i, (c, id as u32));
                    id
                }
            };
        }
        if self.nodes[node].token.is_none() {
            self.nodes[node].token = Some(self.tokens.len() as u32);
            self.tokens.push(token.to_string());
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        let mut node = 0usize;
        for c in token.chars() {
            match self.nodes[node].child(c) {
                Some(n) => node = n as usize,
                None => return false,
            }
        }
        self.nodes[node].token.is_some()
    }

    /// Longest indexed token occurring in `remaining` as a run of unmasked
    /// symbols (`None` marks a masked position). Returns its start position.
    /// Among equally long matches the leftmost wins.
    pub fn longest_substr(&self, remaining: &[Option<char>]) -> Option<(usize, &str)> {
        if self.tokens.is_empty() {
            return None;
        }
        let n = remaining.len();
        let mut best: Option<(usize, usize, u32)> = None;
        for start in 0..n {
            let best_len = best.map_or(0, |b| b.1);
            if n - start <= best_len {
                break;
            }
            let mut node = 0usize;
            for (k, sym) in remaining[start..].iter().enumerate() {
                let Some(c) = sym else { break };
                let Some(child) = self.nodes[node].child(*c) else { break };
                node = child as usize;
                if let Some(tok) = self.nodes[node].token {
                    let len = k + 1;
                    if len > best.map_or(0, |b| b.1) {
                        best = Some((start, len, tok));
                    }
                }
            }
        }
        best.map(|(start, _, tok)| (start, self.tokens[tok as usize].as_str()))
    }
}

/// Free-function form of [`MatchIndex::longest_substr`].
pub fn longest_substr<'a>(remaining: &[Option<char>], index: &'a MatchIndex) -> Option<(usize, &'a str)> {
    index.longest_substr(remaining)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    DomainMatch,
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub surface: String,
    pub kind: SegmentKind,
}

/// Segments the merge loop starts from, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct InitSegmentation {
    pub segments: Vec<Segment>,
}

impl InitSegmentation {
    pub fn surfaces(&self) -> Vec<String> {
        self.segments.iter().map(|s| s.surface.clone()).collect()
    }

    pub fn into_surfaces(self) -> Vec<String> {
        self.segments.into_iter().map(|s| s.surface).collect()
    }

    /// Symbol-index intervals `[start, end)` covered by domain matches.
    pub fn match_intervals(&self) -> Vec<(usize, usize)> {
        let mut pos = 0;
        let mut out = Vec::new();
        for s in &self.segments {
            let len = s.surface.chars().count();
            if s.kind == SegmentKind::DomainMatch {
                out.push((pos, pos + len));
            }
            pos += len;
        }
        out
    }
}

/// Repeatedly takes the longest domain match, masks it, and repeats until
/// nothing matches; every unmasked symbol then becomes its own segment.
pub fn adapt_initialize(surface: &str, index: &MatchIndex) -> InitSegmentation {
    let symbols: Vec<char> = surface.chars().collect();
    let mut remaining: Vec<Option<char>> = symbols.iter().copied().map(Some).collect();
    // start position -> matched length
    let mut matches: Vec<Option<usize>> = vec![None; symbols.len()];
    while let Some((start, token)) = index.longest_substr(&remaining) {
        let len = token.chars().count();
        matches[start] = Some(len);
        remaining[start..start + len].fill(None);
    }

    let mut segments = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        match matches[i] {
            Some(len) => {
                segments
                    .push(Segment { surface: symbols[i..i + len].iter().collect(), kind: SegmentKind::DomainMatch });
                i += len;
            }
            None => {
                segments.push(Segment { surface: symbols[i].to_string(), kind: SegmentKind::Symbol });
                i += 1;
            }
        }
    }
    InitSegmentation { segments }
}

/// AdaptBPE on one pre-token.
pub fn adapt_encode_word(surface: &str, index: &MatchIndex, merges: &MergeRuleTable) -> Vec<String> {
    merge_segments(adapt_initialize(surface, index).into_surfaces(), merges, None)
}

pub fn adapt_encode_word_traced(
    surface: &str,
    index: &MatchIndex,
    merges: &MergeRuleTable,
) -> (InitSegmentation, Vec<String>, Vec<MergeStep>) {
    let init = adapt_initialize(surface, index);
    let mut trace = Vec::new();
    let out = merge_segments(init.surfaces(), merges, Some(&mut trace));
    (init, out, trace)
}
