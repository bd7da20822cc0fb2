//! Frequency-greedy BPE training.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use crate::vocab::MergePair;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainOutput {
    /// Initial symbols plus every merged token.
    pub tokens: BTreeSet<String>,
    /// Merges in creation order.
    pub merges: Vec<MergePair>,
}

#[derive(Eq, PartialEq)]
struct Candidate {
    count: u64,
    pair: (u32, u32),
    key: Reverse<(String, String)>,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count.cmp(&other.count).then_with(|| self.key.cmp(&other.key))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Learns up to `target_merges` merges from `(word, count)` pairs, where each
/// word is a byte-level symbol string.
///
/// Each step merges the most frequent adjacent pair (overlapping occurrences
/// counted, weighted by word count). Ties go to the lexicographically smallest
/// `(left, right)`. Training stops early once no pair occurs at least twice.
pub fn train_bpe<I, S>(words: I, target_merges: usize) -> TrainOutput
where
    I: IntoIterator<Item = (S, u64)>,
    S: AsRef<str>,
{
    let mut symbols: Vec<String> = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut intern = |s: String, symbols: &mut Vec<String>| -> u32 {
        *ids.entry(s.clone()).or_insert_with(|| {
            symbols.push(s);
            symbols.len() as u32 - 1
        })
    };

    let mut corpus: Vec<(Vec<u32>, u64)> = Vec::new();
    for (word, count) in words {
        if count == 0 || word.as_ref().is_empty() {
            continue;
        }
        let seq = word.as_ref().chars().map(|c| intern(c.to_string(), &mut symbols)).collect();
        corpus.push((seq, count));
    }
    let mut out = TrainOutput { tokens: symbols.iter().cloned().collect(), merges: Vec::new() };

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut where_: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
    for (wi, (seq, count)) in corpus.iter().enumerate() {
        for w in seq.windows(2) {
            *pair_counts.entry((w[0], w[1])).or_default() += count;
            where_.entry((w[0], w[1])).or_default().insert(wi);
        }
    }

    let key =
        |p: (u32, u32), symbols: &[String]| Reverse((symbols[p.0 as usize].clone(), symbols[p.1 as usize].clone()));
    let mut heap: BinaryHeap<Candidate> =
        pair_counts.iter().map(|(&pair, &count)| Candidate { count, pair, key: key(pair, &symbols) }).collect();

    while out.merges.len() < target_merges {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            if current > 0 {
                heap.push(Candidate { count: current, ..top });
            }
            continue;
        }
        if current < 2 {
            break;
        }

        let (a, b) = top.pair;
        let merged = format!("{}{}", symbols[a as usize], symbols[b as usize]);
        let new_id = intern(merged.clone(), &mut symbols);
        out.merges.push((symbols[a as usize].clone(), symbols[b as usize].clone()));
        out.tokens.insert(merged);

        let mut affected: Vec<usize> = where_.remove(&top.pair).unwrap_or_default().into_iter().collect();
        affected.sort_unstable();
        let mut touched: HashSet<(u32, u32)> = HashSet::new();
        for wi in affected {
            let (seq, count) = &mut corpus[wi];
            let count = *count;
            for w in seq.windows(2) {
                let p = (w[0], w[1]);
                if let Some(c) = pair_counts.get_mut(&p) {
                    *c -= count;
                }
                touched.insert(p);
            }
            let mut merged_seq = Vec::with_capacity(seq.len());
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && seq[i] == a && seq[i + 1] == b {
                    merged_seq.push(new_id);
                    i += 2;
                } else {
                    merged_seq.push(seq[i]);
                    i += 1;
                }
            }
            *seq = merged_seq;
            for w in seq.windows(2) {
                let p = (w[0], w[1]);
                *pair_counts.entry(p).or_default() += count;
                where_.entry(p).or_default().insert(wi);
                touched.insert(p);
            }
        }
        pair_counts.remove(&top.pair);
        let mut touched: Vec<_> = touched.into_iter().collect();
        touched.sort_unstable();
        for p in touched {
            match pair_counts.get(&p).copied() {
                Some(0) => {
                    pair_counts.remove(&p);
                }
                Some(count) => heap.push(Candidate { count, pair: p, key: key(p, &symbols) }),
                None => {}
            }
        }
    }
    out
}
