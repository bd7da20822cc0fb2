use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;

fn is_stdio(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

pub fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    if is_stdio(path) {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let p = path.as_ref().unwrap();
    let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

pub fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let p = path.as_ref().unwrap();
    let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

#[derive(Deserialize)]
struct JsonDoc {
    text: String,
}

/// Documents from a line-oriented input: raw lines, or the "text" field of
/// each non-blank JSON line.
pub struct Documents {
    lines: io::Lines<Box<dyn BufRead>>,
    jsonl: bool,
    line_no: usize,
}

impl Documents {
    pub fn new(reader: Box<dyn BufRead>, jsonl: bool) -> Self {
        Documents { lines: reader.lines(), jsonl, line_no: 0 }
    }

    /// Reads up to `n` documents.
    pub fn next_chunk(&mut self, n: usize) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.next() {
                Some(doc) => out.push(doc?),
                None => break,
            }
        }
        Ok(out)
    }
}

impl Iterator for Documents {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Result<String>> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(anyhow!(e).context(format!("reading line {}", self.line_no + 1)))),
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').map(str::to_owned).unwrap_or(line);
            if !self.jsonl {
                return Some(Ok(line));
            }
            if line.trim().is_empty() {
                continue;
            }
            return Some(
                serde_json::from_str::<JsonDoc>(&line)
                    .map(|d| d.text)
                    .with_context(|| format!("line {}: expected a JSON object with a \"text\" string", self.line_no)),
            );
        }
    }
}

/// Backslash-escapes characters that would break a TSV field.
pub fn escape_tsv(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_escapes() {
        assert_eq!(escape_tsv("a\tb\\c\nd"), "a\\tb\\\\c\\nd");
        assert_eq!(escape_tsv("Ġthe"), "Ġthe");
    }

    #[test]
    fn jsonl_documents() {
        let input = "{\"text\": \"one\"}\n\n{\"text\": \"two\", \"id\": 3}\r\n";
        let docs: Vec<String> = Documents::new(Box::new(input.as_bytes()), true).collect::<Result<_>>().unwrap();
        assert_eq!(docs, ["one", "two"]);
        let bad = Documents::new(Box::new("{\"body\": 1}\n".as_bytes()), true).next().unwrap();
        assert!(bad.unwrap_err().to_string().contains("line 1"));
    }

    #[test]
    fn plain_documents_keep_blank_lines() {
        let docs: Vec<String> = Documents::new(Box::new("a\n\nb".as_bytes()), false).collect::<Result<_>>().unwrap();
        assert_eq!(docs, ["a", "", "b"]);
    }
}
