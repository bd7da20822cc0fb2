//! Byte-level BPE with domain-vocabulary-aware initialization.
//!
//! Appending domain tokens and their merge rules to a pretrained BPE
//! vocabulary gives those rules the lowest priority, so base merges often
//! consume the characters of a domain token before it can form. AdaptBPE
//! changes only the initialization: the longest domain-token matches in a
//! pre-token are fixed as atomic segments, and the usual ranked merge loop
//! runs over what is left.
//!
//! ```
//! use adaptbpe::{adapt::{adapt_initialize, MatchIndex}};
//!
//! let index = MatchIndex::new(["cholesterol"]);
//! let init = adapt_initialize("hypercholesterolemia", &index);
//! assert_eq!(init.surfaces(), ["h", "y", "p", "e", "r", "cholesterol", "e", "m", "i", "a"]);
//! ```

pub mod adapt;
pub mod bpe;
pub mod builder;
pub mod error;
pub mod metrics;
pub mod pretokenize;
pub mod tokenizer;
pub mod train;
pub mod vocab;

pub use adapt::{adapt_initialize, InitSegmentation, MatchIndex, SegmentKind};
pub use bpe::{encode_word, MergeStep};
pub use error::{Error, Result};
pub use metrics::{compare, fragment_score, oov_rate, DiffReport, FragmentReport, WordOptions};
pub use pretokenize::{byte_decode, byte_encode, pre_tokenize, PreToken};
pub use tokenizer::{Mode, TokenSequence, Tokenizer, WordTrace};
pub use train::train_bpe;
pub use vocab::{extend, ExtendedVocabulary, MergeRuleTable, SavedVocabulary, Vocabulary};
