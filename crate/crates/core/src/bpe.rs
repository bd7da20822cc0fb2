//! The ranked merge loop shared by standard BPE and AdaptBPE.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::vocab::MergeRuleTable;

/// One iteration of the merge loop: every non-overlapping occurrence of the
/// lowest-ranked applicable rule, merged left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub left: String,
    pub right: String,
    pub rank: u32,
    /// Number of occurrences merged in this iteration.
    pub applied: usize,
}

const NONE: usize = usize::MAX;

/// Runs the merge loop over `segments` until no rule applies.
///
/// Each iteration picks the applicable adjacent pair with the least rank and
/// merges all of its occurrences in a single left-to-right pass, as the
/// classic re-scanning implementation does. Pairs are kept in a heap keyed by
/// `(rank, position)`, so the scan is never repeated from scratch.
pub fn merge_segments(
    segments: Vec<String>,
    merges: &MergeRuleTable,
    mut trace: Option<&mut Vec<MergeStep>>,
) -> Vec<String> {
    let n = segments.len();
    if n < 2 || merges.is_empty() {
        return segments;
    }
    let mut text = segments;
    let mut next: Vec<usize> = (1..n).chain(std::iter::once(NONE)).collect();
    let mut prev: Vec<usize> = std::iter::once(NONE).chain(0..n - 1).collect();
    let mut alive = vec![true; n];
    let mut remaining = n;

    let mut heap = BinaryHeap::new();
    for i in 0..n - 1 {
        if let Some(rank) = merges.rank(&text[i], &text[i + 1]) {
            heap.push(Reverse((rank, i)));
        }
    }

    let mut round = Vec::new();
    let mut merged_at = Vec::new();
    while let Some(&Reverse((rank, _))) = heap.peek() {
        round.clear();
        while let Some(&Reverse((r, pos))) = heap.peek() {
            if r != rank {
                break;
            }
            heap.pop();
            round.push(pos);
        }
        round.sort_unstable();
        round.dedup();

        let (first, second) = &merges.rules()[rank as usize];
        merged_at.clear();
        for &p in &round {
            if !alive[p] {
                continue;
            }
            let q = next[p];
            if q == NONE || text[p] != *first || text[q] != *second {
                continue;
            }
            let right = std::mem::take(&mut text[q]);
            text[p].push_str(&right);
            alive[q] = false;
            next[p] = next[q];
            if next[q] != NONE {
                prev[next[q]] = p;
            }
            remaining -= 1;
            merged_at.push(p);
        }
        if merged_at.is_empty() {
            continue;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(MergeStep { left: first.clone(), right: second.clone(), rank, applied: merged_at.len() });
        }
        if remaining == 1 {
            break;
        }
        for &p in &merged_at {
            let l = prev[p];
            if l != NONE {
                if let Some(r) = merges.rank(&text[l], &text[p]) {
                    heap.push(Reverse((r, l)));
                }
            }
            let q = next[p];
            if q != NONE {
                if let Some(r) = merges.rank(&text[p], &text[q]) {
                    heap.push(Reverse((r, p)));
                }
            }
        }
    }

    let mut out = Vec::with_capacity(remaining);
    let mut i = 0;
    while i != NONE {
        out.push(std::mem::take(&mut text[i]));
        i = next[i];
    }
    out
}

/// Splits a byte-level surface into one segment per symbol.
pub fn split_symbols(surface: &str) -> Vec<String> {
    surface.chars().map(String::from).collect()
}

/// Standard BPE on one pre-token: per-symbol initialization, then the merge loop.
pub fn encode_word(surface: &str, merges: &MergeRuleTable) -> Vec<String> {
    merge_segments(split_symbols(surface), merges, None)
}

pub fn encode_word_traced(surface: &str, merges: &MergeRuleTable) -> (Vec<String>, Vec<MergeStep>) {
    let mut trace = Vec::new();
    let out = merge_segments(split_symbols(surface), merges, Some(&mut trace));
    (out, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rules: &[(&str, &str)]) -> MergeRuleTable {
        MergeRuleTable::from_pairs(rules.iter().map(|(l, r)| (l.to_string(), r.to_string()))).unwrap()
    }

    #[test]
    fn happy_merges_pp_first() {
        let m = table(&[("p", "p"), ("h", "a"), ("ha", "pp"), ("happ", "y")]);
        let (out, trace) = encode_word_traced("happy", &m);
        assert_eq!(out, ["happy"]);
        assert_eq!(trace[0].left, "p");
        assert_eq!(trace[0].right, "p");
        assert_eq!(trace.iter().map(|s| s.rank).collect::<Vec<_>>(), [0, 1, 2, 3]);

        // stopping after the first rule gives the intermediate state
        let first_only = table(&[("p", "p")]);
        assert_eq!(encode_word("happy", &first_only), ["h", "a", "pp", "y"]);
    }

    #[test]
    fn single_symbol_is_untouched() {
        let m = table(&[("a", "a")]);
        assert_eq!(encode_word("a", &m), ["a"]);
    }

    #[test]
    fn overlapping_occurrences_merge_left_to_right() {
        let m = table(&[("a", "a")]);
        assert_eq!(encode_word("aaa", &m), ["aa", "a"]);
        assert_eq!(encode_word("aaaa", &m), ["aa", "aa"]);
    }

    #[test]
    fn a_full_pass_completes_before_lower_ranks_fire() {
        // Merging the first "ab" creates ("ab","a") with a better rank, but the
        // pass over ("a","b") finishes first.
        let m = table(&[("ab", "a"), ("a", "b")]);
        assert_eq!(encode_word("abab", &m), ["ab", "ab"]);
    }

    #[test]
    fn rule_can_reapply_after_later_merges() {
        let m = table(&[("xy", "z"), ("x", "y")]);
        assert_eq!(encode_word("xyz", &m), ["xyz"]);
    }
}
