//! Browser demo: standard BPE next to AdaptBPE on a small bundled vocabulary.
//!
//! Every method returns a JSON string so the page can stay framework-free.

use adaptbpe::metrics::compare;
use adaptbpe::pretokenize::byte_decode;
use adaptbpe::{byte_encode, pre_tokenize, ExtendedVocabulary, InitSegmentation, Mode, TokenSequence, Tokenizer};
use adaptbpe::{WordOptions, WordTrace};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const VOCAB: &str = include_str!("../../../fixtures/base/vocab.json");
const MERGES: &str = include_str!("../../../fixtures/medical/merges.txt");
const DOMAIN: &str = include_str!("../../../fixtures/domain.txt");
const SAMPLE_CORPUS: &str = include_str!("../../../fixtures/medical_corpus.txt");

/// Default domain words, one per line, as a user would type them.
#[wasm_bindgen]
pub fn default_domain_words() -> String {
    let mut words: Vec<String> = Vec::new();
    for token in DOMAIN.lines().filter(|l| !l.is_empty()) {
        let text = String::from_utf8_lossy(&byte_decode(token).unwrap_or_default()).trim().to_string();
        if !text.is_empty() && !words.contains(&text) {
            words.push(text);
        }
    }
    words.join("\n")
}

#[wasm_bindgen]
pub fn sample_corpus() -> String {
    SAMPLE_CORPUS.to_string()
}

/// Domain tokens for whitespace-separated words: each word both bare and
/// with the leading space it carries mid-sentence.
pub fn domain_tokens(words: &str) -> Vec<String> {
    words
        .split_whitespace()
        .flat_map(|w| [byte_encode(w.as_bytes()), byte_encode(format!(" {w}").as_bytes())])
        .collect()
}

#[derive(Serialize)]
struct Side {
    tokens: Vec<String>,
    text: Vec<String>,
    ids: Vec<u32>,
    domain: Vec<bool>,
}

#[derive(Serialize)]
struct Segmentation {
    bpe: Side,
    adaptbpe: Side,
    init: Vec<PreTokenInit>,
    first_domain_id: u32,
    domain_size: usize,
    filtered: usize,
}

#[derive(Serialize)]
struct PreTokenInit {
    pre_token: String,
    init: InitSegmentation,
}

#[derive(Serialize)]
struct Traces {
    bpe: Vec<WordTrace>,
    adaptbpe: Vec<WordTrace>,
}

#[wasm_bindgen]
pub struct Demo {
    tokenizer: Tokenizer,
}

#[wasm_bindgen]
impl Demo {
    /// Builds the bundled vocabulary extended with `domain_words`.
    #[wasm_bindgen(constructor)]
    pub fn new(domain_words: &str) -> Demo {
        let ev =
            ExtendedVocabulary::load(VOCAB.as_bytes(), MERGES.as_bytes(), None::<&[u8]>).expect("bundled vocabulary");
        let ev = adaptbpe::extend(
            ev.base().clone(),
            ev.base_merges().clone(),
            domain_tokens(domain_words),
            Some(ev.domain().appended_merges().to_vec()),
        );
        Demo { tokenizer: Tokenizer::new(ev).expect("bundled vocabulary covers every byte") }
    }

    /// Both segmentations of `text` plus the AdaptBPE initialization of each pre-token.
    pub fn tokenize(&self, text: &str) -> String {
        let ev = self.tokenizer.vocabulary();
        let init = pre_tokenize(text)
            .into_iter()
            .map(|p| PreTokenInit {
                init: adaptbpe::adapt_initialize(&p.surface, ev.domain().match_index()),
                pre_token: p.surface,
            })
            .collect();
        let doc = Segmentation {
            bpe: self.side(self.tokenizer.encode(text)),
            adaptbpe: self.side(self.tokenizer.adapt_encode(text)),
            init,
            first_domain_id: ev.domain().first_id(),
            domain_size: ev.domain().len(),
            filtered: ev.stats().filtered_tokens(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    /// Merge traces for every pre-token of `text` under both modes.
    pub fn trace(&self, text: &str) -> String {
        let doc = Traces {
            bpe: self.tokenizer.encode_traced(text, Mode::Bpe).1,
            adaptbpe: self.tokenizer.encode_traced(text, Mode::AdaptBpe).1,
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    /// Fragment-score comparison over a corpus with one document per line.
    pub fn compare(&self, corpus: &str) -> String {
        compare(corpus.lines(), &self.tokenizer, &WordOptions::default()).to_json()
    }
}

impl Demo {
    fn side(&self, seq: TokenSequence) -> Side {
        let ev = self.tokenizer.vocabulary();
        Side {
            text: seq.tokens.iter().map(|t| readable(t)).collect(),
            domain: seq.ids.iter().map(|&id| ev.is_domain_id(id)).collect(),
            tokens: seq.tokens,
            ids: seq.ids,
        }
    }
}

/// The text a token stands for; bytes that do not form whole characters
/// are shown as `\xNN`.
fn readable(token: &str) -> String {
    let bytes = byte_decode(token).unwrap_or_default();
    match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => e.into_bytes().iter().map(|b| format!("\\x{b:02X}")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn demo() -> Demo {
        Demo::new(&default_domain_words())
    }

    #[test]
    fn default_words_are_plain_text() {
        let words = default_domain_words();
        assert!(words.lines().any(|w| w == "cholesterol"));
        assert!(!words.contains('Ġ'));
    }

    #[test]
    fn tokenize_shows_both_sides() {
        let v: Value = serde_json::from_str(&demo().tokenize("hypercholesterolemia")).unwrap();
        let adapt: Vec<&str> =
            v["adaptbpe"]["tokens"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        assert!(adapt.contains(&"cholesterol"));
        assert!(!v["bpe"]["tokens"].as_array().unwrap().iter().any(|t| t == "cholesterol"));
        let pos = adapt.iter().position(|t| *t == "cholesterol").unwrap();
        assert_eq!(v["adaptbpe"]["domain"][pos], true);
        assert_eq!(v["init"][0]["init"]["segments"][5]["kind"], "domain_match");
    }

    #[test]
    fn user_words_become_atomic() {
        let d = Demo::new("zorblax");
        let v: Value = serde_json::from_str(&d.tokenize("the zorblax and zorblax")).unwrap();
        let tokens = v["adaptbpe"]["tokens"].as_array().unwrap();
        assert_eq!(tokens.iter().filter(|t| *t == "Ġzorblax").count(), 2);
        assert_eq!(v["domain_size"], 2);
    }

    #[test]
    fn readable_text_reassembles_input() {
        let v: Value = serde_json::from_str(&demo().tokenize("the  cat, 42!")).unwrap();
        let text: String = v["bpe"]["text"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        assert_eq!(text, "the  cat, 42!");
        assert_eq!(readable("Ã"), "\\xC3");
    }

    #[test]
    fn trace_and_compare() {
        let d = demo();
        let v: Value = serde_json::from_str(&d.trace("hypercholesterolemia")).unwrap();
        assert!(v["bpe"][0]["steps"].as_array().unwrap().len() > 1);
        assert_eq!(v["adaptbpe"][0]["init"]["segments"][5]["surface"], "cholesterol");
        let v: Value = serde_json::from_str(&d.compare(&sample_corpus())).unwrap();
        assert!(v["drop_percent"].as_f64().unwrap() > 0.0);
    }
}
