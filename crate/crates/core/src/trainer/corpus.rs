//! Training corpora: plain line documents or weighted n-gram records.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    /// One whitespace-tokenized document per line.
    #[default]
    Plain,
    /// `tok1 … tokJ<TAB>count` per line.
    Weighted,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" | "lines" => Ok(CorpusFormat::Plain),
            "weighted" | "ngrams" => Ok(CorpusFormat::Weighted),
            other => Err(Error::Config(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// One resampling unit: a token sequence with an occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    /// Interned token ids into the owning corpus' lexicon.
    pub tokens: Vec<u32>,
    pub count: u64,
}

/// An interned collection of records.
///
/// Subsets built by [`Corpus::subset`] share the lexicon, so resampled
/// corpora are cheap to construct.
#[derive(Debug, Clone)]
pub struct Corpus {
    lexicon: Arc<Vec<String>>,
    records: Vec<Record>,
}

#[derive(Default)]
pub struct CorpusBuilder {
    lexicon: Vec<String>,
    ids: HashMap<String, u32>,
    records: Vec<Record>,
    lowercase: bool,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lowercase(mut self, yes: bool) -> Self {
        self.lowercase = yes;
        self
    }

    /// Adds a record; empty token lists are ignored, `count` must be ≥ 1.
    pub fn push<S: AsRef<str>>(&mut self, tokens: &[S], count: u64) -> Result<()> {
        if count == 0 {
            return Err(Error::Config("record count must be >= 1".into()));
        }
        if tokens.is_empty() {
            return Ok(());
        }
        let mut ids = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref();
            let owned;
            let key = if self.lowercase {
                owned = t.to_lowercase();
                owned.as_str()
            } else {
                t
            };
            let id = match self.ids.get(key) {
                Some(&id) => id,
                None => {
                    let id = self.lexicon.len() as u32;
                    self.lexicon.push(key.to_string());
                    self.ids.insert(key.to_string(), id);
                    id
                }
            };
            ids.push(id);
        }
        self.records.push(Record { tokens: ids, count });
        Ok(())
    }

    pub fn build(self) -> Corpus {
        Corpus {
            lexicon: Arc::new(self.lexicon),
            records: self.records,
        }
    }
}

impl Corpus {
    /// Whitespace-tokenizes each line into a count-1 record.
    pub fn from_lines<S: AsRef<str>>(lines: impl IntoIterator<Item = S>) -> Corpus {
        let mut b = CorpusBuilder::new();
        for line in lines {
            let toks: Vec<&str> = line.as_ref().split_whitespace().collect();
            b.push(&toks, 1).expect("count 1 is valid");
        }
        b.build()
    }

    pub fn read(path: impl AsRef<Path>, format: CorpusFormat, lowercase: bool) -> Result<Corpus> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), format, lowercase)
    }

    pub fn parse<R: BufRead>(reader: R, format: CorpusFormat, lowercase: bool) -> Result<Corpus> {
        let mut b = CorpusBuilder::new().lowercase(lowercase);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            match format {
                CorpusFormat::Plain => {
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    b.push(&toks, 1)?;
                }
                CorpusFormat::Weighted => {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let loc = || format!("line {}", i + 1);
                    let (text, count) = line
                        .rsplit_once('\t')
                        .ok_or_else(|| Error::parse(loc(), "expected \"<tokens>\\t<count>\""))?;
                    let count: u64 = count
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(loc(), format!("invalid count {count:?}")))?;
                    if count == 0 {
                        return Err(Error::parse(loc(), "count must be >= 1"));
                    }
                    let toks: Vec<&str> = text.split_whitespace().collect();
                    if toks.is_empty() {
                        return Err(Error::parse(loc(), "record has no tokens"));
                    }
                    b.push(&toks, count)?;
                }
            }
        }
        Ok(b.build())
    }

    /// Number of records (τ).
    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn lexicon(&self) -> &[String] {
        &self.lexicon
    }

    pub fn token(&self, id: u32) -> &str {
        &self.lexicon[id as usize]
    }

    /// Token occurrences with multiplicities applied.
    pub fn weighted_token_count(&self) -> u64 {
        self.records.iter().map(|r| r.tokens.len() as u64 * r.count).sum()
    }

    /// A corpus holding the records at `indices` (repeats allowed), sharing
    /// this corpus' lexicon.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            lexicon: Arc::clone(&self.lexicon),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Each record replaced by `count` copies with count 1.
    pub fn unrolled(&self) -> Corpus {
        let mut records = Vec::new();
        for r in &self.records {
            for _ in 0..r.count {
                records.push(Record {
                    tokens: r.tokens.clone(),
                    count: 1,
                });
            }
        }
        Corpus {
            lexicon: Arc::clone(&self.lexicon),
            records,
        }
    }

    pub fn record_text(&self, record: &Record) -> String {
        record
            .tokens
            .iter()
            .map(|&t| self.token(t))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
