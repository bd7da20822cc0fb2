//! Byte-level symbol mapping and GPT-2 style pre-tokenization.
//!
//! Every byte maps to one printable `char` through a fixed 256-entry table, so
//! tokens can be stored as ordinary strings in `vocab.json` files and any byte
//! sequence stays representable. Printable Latin-1 bytes map to themselves;
//! the remaining 68 bytes are shifted to `U+0100..`, which makes the space
//! byte surface as `Ġ` (U+0120).

use std::collections::HashMap;

use fancy_regex::Regex;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Symbol that stands for the space byte (0x20).
pub const SPACE_MARKER: char = '\u{0120}';

const PATTERN: &str = r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

static SPLITTER: Lazy<Regex> = Lazy::new(|| Regex::new(PATTERN).expect("pre-tokenizer pattern"));

static BYTE_TO_CHAR: Lazy<[char; 256]> = Lazy::new(|| {
    let mut table = ['\0'; 256];
    let mut shifted = 0u32;
    for (byte, slot) in table.iter_mut().enumerate() {
        let b = byte as u32;
        let printable = (0x21..=0x7e).contains(&b) || (0xa1..=0xac).contains(&b) || (0xae..=0xff).contains(&b);
        *slot = if printable {
            char::from_u32(b).unwrap()
        } else {
            shifted += 1;
            char::from_u32(255 + shifted).unwrap()
        };
    }
    table
});

static CHAR_TO_BYTE: Lazy<HashMap<char, u8>> =
    Lazy::new(|| BYTE_TO_CHAR.iter().enumerate().map(|(b, &c)| (c, b as u8)).collect());

/// The 256 byte-level symbols, indexed by byte value.
pub fn byte_alphabet() -> &'static [char; 256] {
    &BYTE_TO_CHAR
}

#[inline]
pub fn byte_to_symbol(byte: u8) -> char {
    BYTE_TO_CHAR[byte as usize]
}

#[inline]
pub fn symbol_to_byte(symbol: char) -> Option<u8> {
    CHAR_TO_BYTE.get(&symbol).copied()
}

pub fn is_byte_symbol(symbol: char) -> bool {
    CHAR_TO_BYTE.contains_key(&symbol)
}

pub fn byte_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_symbol(b)).collect()
}

pub fn byte_decode(symbols: &str) -> Result<Vec<u8>> {
    symbols.chars().map(|c| symbol_to_byte(c).ok_or(Error::UnknownSymbol(c))).collect()
}

/// One unit produced by [`pre_tokenize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreToken {
    /// Byte-level symbols of the unit, space marker included.
    pub surface: String,
    /// Byte offsets `(start, end)` in the source text.
    pub span: (usize, usize),
}

/// Splits `text` into word-like units and maps each to byte-level symbols.
///
/// The units tile the input: their spans are ordered, non-overlapping and
/// cover every byte.
pub fn pre_tokenize(text: &str) -> Vec<PreToken> {
    let mut out = Vec::new();
    let mut cursor = 0;
    for m in SPLITTER.find_iter(text) {
        // The pattern cannot fail on valid UTF-8; treat an error as "rest of input".
        let (start, end) = match m {
            Ok(m) => (m.start(), m.end()),
            Err(_) => break,
        };
        if start > cursor {
            out.push(unit(text, cursor, start));
        }
        out.push(unit(text, start, end));
        cursor = end;
    }
    if cursor < text.len() {
        out.push(unit(text, cursor, text.len()));
    }
    out
}

fn unit(text: &str, start: usize, end: usize) -> PreToken {
    PreToken { surface: byte_encode(&text.as_bytes()[start..end]), span: (start, end) }
}
