use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("malformed vocabulary document: {0}")]
    MalformedVocab(String),

    #[error("duplicate token {0:?} in vocabulary document")]
    DuplicateToken(String),

    #[error("id {id} assigned to both {first:?} and {second:?}")]
    DuplicateId { id: u32, first: String, second: String },

    #[error("merges line {line}: expected two fields, got {content:?}")]
    MalformedMergeLine { line: usize, content: String },

    #[error("merges line {line}: duplicate rule ({left:?}, {right:?})")]
    DuplicateMerge { line: usize, left: String, right: String },

    #[error("symbol {0:?} is not part of the byte-level alphabet")]
    UnknownSymbol(char),

    #[error("vocabulary is missing the byte-level symbol {0:?}")]
    MissingByteSymbol(char),

    #[error("token id {id} out of range for vocabulary of size {size}")]
    IdOutOfRange { id: u32, size: usize },

    #[error("decoded bytes are not valid UTF-8")]
    InvalidUtf8(#[from] std::string::FromUtf8Error),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
