use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adapt::{adapt_encode_word, adapt_encode_word_traced, InitSegmentation};
use crate::bpe::{encode_word, encode_word_traced, MergeStep};
use crate::error::{Error, Result};
use crate::pretokenize::{byte_alphabet, byte_decode, pre_tokenize};
use crate::vocab::ExtendedVocabulary;

/// Which initialization the merge loop starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Per-symbol initialization.
    #[default]
    Bpe,
    /// Domain longest-match initialization.
    AdaptBpe,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bpe => "bpe",
            Mode::AdaptBpe => "adaptbpe",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpe" => Ok(Mode::Bpe),
            "adaptbpe" | "adapt-bpe" | "adapt" => Ok(Mode::AdaptBpe),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// Tokens with their ids and byte spans in the source text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub ids: Vec<u32>,
    pub spans: Vec<(usize, usize)>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Merge trace for one pre-token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordTrace {
    pub pre_token: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSegmentation>,
    pub steps: Vec<MergeStep>,
    pub output: Vec<String>,
}

/// Encoder/decoder over an [`ExtendedVocabulary`].
///
/// Both modes use the full merge table (base rules first, then the appended
/// domain rules). Immutable and `Sync`; share it freely between threads.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    ev: ExtendedVocabulary,
}

impl Tokenizer {
    /// Fails if some byte-level symbol has no id, since byte-level encoding
    /// relies on every single symbol being a token.
    pub fn new(ev: ExtendedVocabulary) -> Result<Self> {
        if let Some(&c) = byte_alphabet().iter().find(|c| ev.token_to_id(&c.to_string()).is_none()) {
            return Err(Error::MissingByteSymbol(c));
        }
        Ok(Tokenizer { ev })
    }

    pub fn vocabulary(&self) -> &ExtendedVocabulary {
        &self.ev
    }

    pub fn into_vocabulary(self) -> ExtendedVocabulary {
        self.ev
    }

    /// Tokens for one pre-token surface.
    pub fn word_tokens(&self, surface: &str, mode: Mode) -> Vec<String> {
        match mode {
            Mode::Bpe => encode_word(surface, self.ev.merges()),
            Mode::AdaptBpe => adapt_encode_word(surface, self.ev.domain().match_index(), self.ev.merges()),
        }
    }

    pub fn encode(&self, text: &str) -> TokenSequence {
        self.encode_mode(text, Mode::Bpe)
    }

    pub fn adapt_encode(&self, text: &str) -> TokenSequence {
        self.encode_mode(text, Mode::AdaptBpe)
    }

    pub fn encode_mode(&self, text: &str, mode: Mode) -> TokenSequence {
        let mut seq = TokenSequence::default();
        for pre in pre_tokenize(text) {
            let words = self.word_tokens(&pre.surface, mode);
            self.push_tokens(&mut seq, words, pre.span.0);
        }
        seq
    }

    /// Like [`Tokenizer::encode_mode`], also returning one trace per pre-token.
    pub fn encode_traced(&self, text: &str, mode: Mode) -> (TokenSequence, Vec<WordTrace>) {
        let mut seq = TokenSequence::default();
        let mut traces = Vec::new();
        for pre in pre_tokenize(text) {
            let (init, words, steps) = match mode {
                Mode::Bpe => {
                    let (w, s) = encode_word_traced(&pre.surface, self.ev.merges());
                    (None, w, s)
                }
                Mode::AdaptBpe => {
                    let (i, w, s) =
                        adapt_encode_word_traced(&pre.surface, self.ev.domain().match_index(), self.ev.merges());
                    (Some(i), w, s)
                }
            };
            traces.push(WordTrace { pre_token: pre.surface, init, steps, output: words.clone() });
            self.push_tokens(&mut seq, words, pre.span.0);
        }
        (seq, traces)
    }

    fn push_tokens(&self, seq: &mut TokenSequence, words: Vec<String>, mut offset: usize) {
        for token in words {
            let width = token.chars().count();
            match self.ev.token_to_id(&token) {
                Some(id) => {
                    seq.ids.push(id);
                    seq.tokens.push(token);
                    seq.spans.push((offset, offset + width));
                    offset += width;
                }
                None => {
                    // No id for the merged segment: fall back to its symbols.
                    for c in token.chars() {
                        let symbol = c.to_string();
                        let id = self.ev.token_to_id(&symbol).expect("byte alphabet checked at construction");
                        seq.ids.push(id);
                        seq.tokens.push(symbol);
                        seq.spans.push((offset, offset + 1));
                        offset += 1;
                    }
                }
            }
        }
    }

    pub fn decode_bytes(&self, ids: &[u32]) -> Result<Vec<u8>> {
        let mut symbols = String::new();
        for &id in ids {
            let token = self.ev.id_to_token(id).ok_or(Error::IdOutOfRange { id, size: self.ev.id_bound() as usize })?;
            symbols.push_str(token);
        }
        byte_decode(&symbols)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        Ok(String::from_utf8(self.decode_bytes(ids)?)?)
    }
}
