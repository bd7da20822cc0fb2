//! Trains a small byte-level base vocabulary from a text file.
//!
//! Usage: make_base_vocab <corpus.txt> <out-dir> [merges]
//!
//! Ids 0..256 are the byte symbols in byte order; merged tokens follow in
//! creation order.

use std::collections::BTreeMap;
use std::path::PathBuf;

use adaptbpe::pretokenize::byte_alphabet;
use adaptbpe::{pre_tokenize, train_bpe, ExtendedVocabulary, MergeRuleTable, Vocabulary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let corpus = PathBuf::from(args.next().ok_or("missing corpus path")?);
    let out = PathBuf::from(args.next().ok_or("missing output directory")?);
    let target: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(600);

    let text = std::fs::read_to_string(corpus)?;
    let mut surfaces: BTreeMap<String, u64> = BTreeMap::new();
    for line in text.lines() {
        for pre in pre_tokenize(line) {
            *surfaces.entry(pre.surface).or_insert(0) += 1;
        }
    }
    let trained = train_bpe(surfaces, target);

    let mut tokens: Vec<String> = byte_alphabet().iter().map(|c| c.to_string()).collect();
    for (l, r) in &trained.merges {
        tokens.push(format!("{l}{r}"));
    }
    let vocab = Vocabulary::from_entries(tokens.into_iter().zip(0u32..))?;
    let merges = MergeRuleTable::from_pairs(trained.merges)?;
    let saved = ExtendedVocabulary::plain(vocab.clone(), merges).save();
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("vocab.json"), saved.vocab)?;
    std::fs::write(out.join("merges.txt"), saved.merges)?;
    eprintln!("{} tokens", vocab.len());
    Ok(())
}
