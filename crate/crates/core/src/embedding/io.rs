//! word2vec binary, word2vec text and GloVe text readers and writers.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Embedding;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// `"<n> <k>\n"` then `token 0x20 <k × f32 LE> [0x0A]` per entry.
    #[default]
    #[serde(rename = "word2vec-binary")]
    Word2VecBinary,
    /// `"<n> <k>"` header line then `token v1 … vk` rows.
    #[serde(rename = "word2vec-text")]
    Word2VecText,
    /// `token v1 … vk` rows, no header.
    GloveText,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word2vec-binary" | "bin" | "binary" => Ok(Format::Word2VecBinary),
            "word2vec-text" | "text" => Ok(Format::Word2VecText),
            "glove-text" | "glove" => Ok(Format::GloveText),
            other => Err(Error::Config(format!("unknown embedding format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Word2VecBinary => "word2vec-binary",
            Format::Word2VecText => "word2vec-text",
            Format::GloveText => "glove-text",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Lowercase tokens; on collision the first occurrence wins.
    pub case_fold: bool,
    /// Keep at most this many (post-folding) tokens.
    pub max_vocab: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Entries parsed from the file, including dropped ones.
    pub entries_read: usize,
    /// Entries dropped because their case-folded token was already present.
    pub folded_duplicates: usize,
}

pub fn load_embedding(
    path: impl AsRef<Path>,
    format: Format,
    options: &LoadOptions,
) -> Result<(Embedding, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embedding(BufReader::with_capacity(1 << 20, file), format, options)
}

pub fn read_embedding<R: BufRead>(reader: R, format: Format, options: &LoadOptions) -> Result<(Embedding, LoadReport)> {
    match format {
        Format::Word2VecBinary => read_binary(reader, options),
        Format::Word2VecText => read_text(reader, true, options),
        Format::GloveText => read_text(reader, false, options),
    }
}

pub fn save_embedding(emb: &Embedding, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    // Validate before touching the filesystem.
    check_tokens(emb)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    write_embedding(emb, &mut w, format).map_err(|e| match e {
        Error::Stream(source) => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_embedding<W: Write>(emb: &Embedding, w: &mut W, format: Format) -> Result<()> {
    check_tokens(emb)?;
    match format {
        Format::Word2VecBinary => {
            writeln!(w, "{} {}", emb.len(), emb.dim())?;
            let mut buf = Vec::with_capacity(emb.dim() * 4);
            for (token, row) in emb.tokens().iter().zip(emb.rows()) {
                w.write_all(token.as_bytes())?;
                w.write_all(b" ")?;
                buf.clear();
                for &x in row {
                    buf.extend_from_slice(&(x as f32).to_le_bytes());
                }
                w.write_all(&buf)?;
                w.write_all(b"\n")?;
            }
        }
        Format::Word2VecText | Format::GloveText => {
            if format == Format::Word2VecText {
                writeln!(w, "{} {}", emb.len(), emb.dim())?;
            }
            for (token, row) in emb.tokens().iter().zip(emb.rows()) {
                w.write_all(token.as_bytes())?;
                for x in row {
                    // 17 significant digits round-trips every f64.
                    write!(w, " {x:.16e}")?;
                }
                w.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn check_tokens(emb: &Embedding) -> Result<()> {
    for t in emb.tokens() {
        if t.is_empty() || t.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken {
                token: t.clone(),
                reason: "tokens must be non-empty and contain no whitespace".into(),
            });
        }
    }
    Ok(())
}

/// Accumulates rows while applying the case-folding and truncation policy.
struct Builder<'a> {
    options: &'a LoadOptions,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    report: LoadReport,
}

impl<'a> Builder<'a> {
    fn new(options: &'a LoadOptions, capacity: usize, dim: usize) -> Self {
        let cap = options.max_vocab.map_or(capacity, |m| m.min(capacity));
        Builder {
            options,
            tokens: Vec::with_capacity(cap),
            index: HashMap::with_capacity(cap),
            data: Vec::with_capacity(cap.saturating_mul(dim)),
            report: LoadReport::default(),
        }
    }

    fn full(&self) -> bool {
        self.options.max_vocab.is_some_and(|m| self.tokens.len() >= m)
    }

    fn push(&mut self, token: String, values: &[f64], location: impl FnOnce() -> String) -> Result<()> {
        self.report.entries_read += 1;
        let token = if self.options.case_fold {
            token.to_lowercase()
        } else {
            token
        };
        if self.index.contains_key(&token) {
            if self.options.case_fold {
                self.report.folded_duplicates += 1;
                return Ok(());
            }
            return Err(Error::parse(location(), format!("duplicate token {token:?}")));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(values);
        Ok(())
    }

    fn finish(self, dim: usize) -> (Embedding, LoadReport) {
        let emb = Embedding {
            tokens: self.tokens,
            index: self.index,
            data: self.data,
            dim,
            normalized: false,
        };
        (emb, self.report)
    }
}

fn parse_header(line: &str, location: &str) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let n = parts.next().and_then(|s| s.parse::<usize>().ok());
    let k = parts.next().and_then(|s| s.parse::<usize>().ok());
    match (n, k, parts.next()) {
        (Some(n), Some(k), None) if k > 0 => Ok((n, k)),
        _ => Err(Error::parse(
            location,
            format!("malformed header {:?}, expected \"<n> <k>\"", line.trim_end()),
        )),
    }
}

fn read_binary<R: BufRead>(mut r: R, options: &LoadOptions) -> Result<(Embedding, LoadReport)> {
    let mut header = Vec::new();
    r.read_until(b'\n', &mut header)?;
    if header.last() != Some(&b'\n') {
        return Err(Error::parse("byte 0", "missing header line"));
    }
    let header_str = std::str::from_utf8(&header).map_err(|_| Error::parse("byte 0", "header is not UTF-8"))?;
    let (n, k) = parse_header(header_str, "byte 0")?;
    let mut offset = header.len();

    let mut b = Builder::new(options, n, k);
    let mut raw = vec![0u8; k * 4];
    let mut values = vec![0.0f64; k];
    let mut token = Vec::new();
    for entry in 0..n {
        if b.full() {
            break;
        }
        let entry_offset = offset;
        token.clear();
        r.read_until(b' ', &mut token)?;
        offset += token.len();
        if token.last() != Some(&b' ') {
            return Err(Error::parse(
                format!("byte {entry_offset}"),
                format!("unexpected end of file in entry {entry} of {n}"),
            ));
        }
        token.pop();
        if token.is_empty() || token.contains(&b'\n') {
            return Err(Error::parse(format!("byte {entry_offset}"), "empty or malformed token"));
        }
        let tok = String::from_utf8(std::mem::take(&mut token))
            .map_err(|_| Error::parse(format!("byte {entry_offset}"), "token is not valid UTF-8"))?;
        let vec_offset = offset;
        r.read_exact(&mut raw).map_err(|_| {
            Error::parse(
                format!("byte {vec_offset}"),
                format!("truncated vector for {tok:?}: expected {k} float32 values"),
            )
        })?;
        offset += raw.len();
        for (v, chunk) in values.iter_mut().zip(raw.chunks_exact(4)) {
            *v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64;
        }
        if let Some(j) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::parse(
                format!("byte {}", vec_offset + 4 * j),
                format!("non-finite value in vector for {tok:?}"),
            ));
        }
        // One optional newline after each vector.
        if r.fill_buf()?.first() == Some(&b'\n') {
            r.consume(1);
            offset += 1;
        }
        b.push(tok, &values, || format!("byte {entry_offset}"))?;
    }
    Ok(b.finish(k))
}

fn read_text<R: BufRead>(r: R, has_header: bool, options: &LoadOptions) -> Result<(Embedding, LoadReport)> {
    let mut lines = r.lines().enumerate();
    let mut expected_rows = None;
    let mut dim = None;
    if has_header {
        let (_, line) = lines
            .next()
            .ok_or_else(|| Error::parse("line 1", "empty file, missing header"))?;
        let (n, k) = parse_header(&line?, "line 1")?;
        expected_rows = Some(n);
        dim = Some(k);
    }

    let mut builder: Option<Builder> = dim.map(|k| Builder::new(options, expected_rows.unwrap_or(0), k));
    let mut rows = 0usize;
    let mut values = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if expected_rows.is_some_and(|n| rows >= n) {
            return Err(Error::parse(
                format!("line {lineno}"),
                "more rows than declared in header",
            ));
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap_or_default().to_string();
        values.clear();
        for field in parts {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(format!("line {lineno}"), format!("invalid number {field:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(
                    format!("line {lineno}"),
                    format!("non-finite value {field:?}"),
                ));
            }
            values.push(v);
        }
        let k = *dim.get_or_insert(values.len());
        if k == 0 {
            return Err(Error::parse(format!("line {lineno}"), "row has no values"));
        }
        if values.len() != k {
            return Err(Error::parse(
                format!("line {lineno}"),
                format!("expected {k} values, found {}", values.len()),
            ));
        }
        let b = builder.get_or_insert_with(|| Builder::new(options, 1024, k));
        rows += 1;
        if b.full() {
            break;
        }
        b.push(token, &values, || format!("line {lineno}"))?;
        if b.full() {
            break;
        }
    }
    let k = dim.ok_or_else(|| Error::parse("line 1", "empty file: cannot infer dimensionality"))?;
    let b = builder.unwrap_or_else(|| Builder::new(options, 0, k));
    if let Some(n) = expected_rows {
        if rows < n && !b.full() {
            return Err(Error::parse(
                format!("line {}", rows + 2),
                format!("header declares {n} rows, file has {rows}"),
            ));
        }
    }
    Ok(b.finish(k))
}
