mod common;

use adaptbpe::builder::{build_avocado, build_sizesearch, collect_candidates, BaseModel, BuildConfig};
use adaptbpe::metrics::{compare, WordOptions};
use adaptbpe::{adapt_initialize, Mode, Tokenizer};
use common::*;
use serde_json::Value;

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn check_tokenize_golden(mode: Mode, file: &str) {
    let tok = medical_tokenizer();
    let inputs: Vec<String> = lines("english.txt").into_iter().chain(lines("medical_corpus.txt")).collect();
    let golden = lines(file);
    assert_eq!(inputs.len(), golden.len());
    for (text, g) in inputs.iter().zip(&golden) {
        let g: Value = serde_json::from_str(g).unwrap();
        let seq = tok.encode_mode(text, mode);
        assert_eq!(seq.tokens, strings(&g["tokens"]), "{text}");
        let ids: Vec<u32> = g["ids"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as u32).collect();
        assert_eq!(seq.ids, ids, "{text}");
    }
}

#[test]
fn standard_bpe_matches_reference_tokens() {
    check_tokenize_golden(Mode::Bpe, "golden/tokenize_bpe.jsonl");
}

#[test]
fn adaptbpe_matches_reference_tokens() {
    check_tokenize_golden(Mode::AdaptBpe, "golden/tokenize_adaptbpe.jsonl");
}

#[test]
fn hypercholesterolemia_example() {
    let g = golden();
    let example = &g["hypercholesterolemia"];
    let tok = medical_tokenizer();
    let word = example["word"].as_str().unwrap();
    assert_eq!(tok.encode(word).tokens, strings(&example["bpe"]));
    assert_eq!(tok.adapt_encode(word).tokens, strings(&example["adaptbpe"]));
    let init = adapt_initialize(word, tok.vocabulary().domain().match_index());
    assert_eq!(init.surfaces(), strings(&example["adaptbpe_init"]));
}

#[test]
fn compare_matches_golden() {
    let g = golden();
    let c = &g["compare"];
    let report = compare(lines("medical_corpus.txt"), &medical_tokenizer(), &WordOptions::default());
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(report.drop_percent, c["drop_percent"].as_f64().unwrap()) < 1e-9);
    assert!(rel(report.bpe.fragment_score_occurrence.unwrap(), c["bpe_score"].as_f64().unwrap()) < 1e-9);
    assert!(rel(report.adaptbpe.fragment_score_occurrence.unwrap(), c["adaptbpe_score"].as_f64().unwrap()) < 1e-9);
    assert_eq!(report.bpe.word_count, c["word_count"].as_u64().unwrap());
}

fn base() -> BaseModel {
    BaseModel::new(base_vocab(), base_merges())
}

#[test]
fn avocado_matches_reference_simulation() {
    let g = golden();
    let a = &g["builder"]["avocado"];
    let config = BuildConfig {
        batch: a["batch"].as_u64().unwrap() as usize,
        ..BuildConfig::avocado(a["gamma"].as_f64().unwrap())
    };
    let opts = WordOptions::default();
    let pool = collect_candidates(lines("toy_corpus.txt"), &base(), &config, &opts).unwrap();
    assert_eq!(pool.words.len() as u64, a["candidate_words"].as_u64().unwrap());
    assert_eq!(pool.len() as u64, a["candidates"].as_u64().unwrap());
    assert_eq!(pool.ranked_subwords[..10], strings(&a["first_candidates"])[..]);

    let out = build_avocado(&pool, &base(), &config, &opts).unwrap();
    assert_eq!(out.manifest.chosen_size as u64, a["added"].as_u64().unwrap());
    assert_eq!(out.manifest.reached_threshold, a["reached_threshold"].as_bool().unwrap());
    let traj = a["trajectory"].as_array().unwrap();
    assert_eq!(out.manifest.trajectory.len(), traj.len());
    for (p, t) in out.manifest.trajectory.iter().zip(traj) {
        assert_eq!(p.size as u64, t[0].as_u64().unwrap());
        assert!((p.score.unwrap() - t[1].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn sizesearch_matches_exhaustive_grid() {
    let g = golden();
    let s = &g["builder"]["sizesearch"];
    let grid: Vec<usize> = s["grid"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    let config = BuildConfig::sizesearch(grid, s["epsilon"].as_f64().unwrap());
    let opts = WordOptions::default();
    let pool = collect_candidates(lines("toy_corpus.txt"), &base(), &config, &opts).unwrap();
    assert_eq!(pool.len() as u64, s["candidates"].as_u64().unwrap());
    let out = build_sizesearch(&pool, &base(), &config, &opts).unwrap();
    assert_eq!(out.manifest.chosen_size as u64, s["chosen_size"].as_u64().unwrap());
    for (p, t) in out.manifest.trajectory.iter().zip(s["scores"].as_array().unwrap()) {
        assert!((p.score.unwrap() - t[1].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn plain_tokenizer_has_no_domain_ids() {
    let tok: Tokenizer = plain_tokenizer();
    let seq = tok.encode("the cholesterol level");
    assert!(seq.ids.iter().all(|&id| (id as usize) < tok.vocabulary().base().len()));
}
