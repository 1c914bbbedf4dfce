//! Antonym lexicons and the nearest-dimension scan.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_dimension, AntonymPair, BuildOptions, CulturalDimension, DimensionSpec, MissingPolicy};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::linalg::{clamp_unit, dot};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntonymLexicon {
    pub pairs: Vec<AntonymPair>,
    pub provenance: String,
    /// Pairs dropped on load because the same unordered pair came earlier.
    pub duplicates_dropped: usize,
}

impl AntonymLexicon {
    pub fn new(pairs: Vec<AntonymPair>, provenance: impl Into<String>) -> Self {
        let mut lex = AntonymLexicon {
            pairs: Vec::with_capacity(pairs.len()),
            provenance: provenance.into(),
            duplicates_dropped: 0,
        };
        let mut seen = HashSet::new();
        for p in pairs {
            let key = {
                let (a, b) = p.unordered_key();
                (a.to_string(), b.to_string())
            };
            if seen.insert(key) {
                lex.pairs.push(p);
            } else {
                lex.duplicates_dropped += 1;
            }
        }
        lex
    }

    pub fn parse<R: BufRead>(reader: R, provenance: impl Into<String>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = if body.contains('\t') {
                body.split('\t').map(str::trim).collect()
            } else {
                body.split_whitespace().collect()
            };
            if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::parse(
                    format!("line {}", i + 1),
                    format!("expected \"word1<TAB>word2\", got {body:?}"),
                ));
            }
            let pair = AntonymPair::new(fields[0], fields[1])
                .map_err(|e| Error::parse(format!("line {}", i + 1), e.to_string()))?;
            pairs.push(pair);
        }
        Ok(AntonymLexicon::new(pairs, provenance))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn load_antonym_lexicon(path: impl AsRef<Path>) -> Result<AntonymLexicon> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    AntonymLexicon::parse(BufReader::new(file), path.display().to_string())
}

/// Keeps pairs whose words both rank below `top_n` in the embedding's
/// vocabulary order.
pub fn filter_lexicon(lex: &AntonymLexicon, emb: &Embedding, top_n: usize) -> AntonymLexicon {
    let within = |t: &str| emb.rank(t).is_some_and(|r| r < top_n);
    AntonymLexicon {
        pairs: lex
            .pairs
            .iter()
            .filter(|p| within(p.first()) && within(p.second()))
            .cloned()
            .collect(),
        provenance: format!("{} (both words in top {top_n})", lex.provenance),
        duplicates_dropped: lex.duplicates_dropped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub pair: AntonymPair,
    /// Signed cosine between the pair's dimension and the focal dimension.
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub focal: String,
    /// Sorted by `|cosine|` descending, ties in lexicon order.
    pub entries: Vec<ScanEntry>,
    /// Pairs with a missing word or identical vectors.
    pub dropped: Vec<AntonymPair>,
}

/// Ranks every lexicon pair's single-pair dimension by `|cosine|` to `focal`
/// and keeps the best `top_k`.
pub fn scan_nearest_dimensions(
    emb: &Embedding,
    focal: &CulturalDimension,
    lex: &AntonymLexicon,
    top_k: usize,
) -> Result<ScanResult> {
    if emb.dim() != focal.dim() {
        return Err(Error::DimensionMismatch {
            expected: emb.dim(),
            found: focal.dim(),
        });
    }
    let options = BuildOptions {
        on_missing: MissingPolicy::Error,
        ..BuildOptions::default()
    };
    let scored: Vec<Result<Option<f64>>> = lex
        .pairs
        .par_iter()
        .map(|pair| {
            let spec = DimensionSpec {
                name: pair.to_string(),
                pairs: vec![pair.clone()],
            };
            match build_dimension(emb, &spec, options) {
                Ok(d) => Ok(Some(clamp_unit(dot(d.vector(), focal.vector())))),
                Err(e) if e.is_replicate_failure() => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for (pair, s) in lex.pairs.iter().zip(scored) {
        match s? {
            Some(cosine) => entries.push(ScanEntry {
                pair: pair.clone(),
                cosine,
            }),
            None => dropped.push(pair.clone()),
        }
    }
    entries.sort_by(|a, b| b.cosine.abs().total_cmp(&a.cosine.abs()));
    entries.truncate(top_k);
    Ok(ScanResult {
        focal: focal.name.clone(),
        entries,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tsv_with_comments_and_duplicates() {
        let text = "# WordNet antonyms\nrich\tpoor\n\nhot\tcold\npoor\trich\n";
        let lex = AntonymLexicon::parse(text.as_bytes(), "test").unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.duplicates_dropped, 1);
        assert!(AntonymLexicon::parse("one\n".as_bytes(), "t").is_err());
        assert!(AntonymLexicon::parse("a\tb\tc\n".as_bytes(), "t").is_err());
        assert!(AntonymLexicon::parse("a\ta\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn filter_uses_vocabulary_rank() {
        let emb = Embedding::from_rows(vec![
            ("a", vec![1.0, 0.0]),
            ("b", vec![0.0, 1.0]),
            ("c", vec![1.0, 1.0]),
        ])
        .unwrap();
        let lex = AntonymLexicon::new(
            vec![AntonymPair::new("a", "b").unwrap(), AntonymPair::new("a", "c").unwrap()],
            "t",
        );
        let kept = filter_lexicon(&lex, &emb, 2);
        assert_eq!(kept.pairs, vec![AntonymPair::new("a", "b").unwrap()]);
    }

    #[test]
    fn focal_pair_scores_one() {
        let emb = Embedding::from_rows(vec![
            ("man", vec![1.0, 0.2, 0.0]),
            ("woman", vec![0.1, 1.0, 0.3]),
            ("x", vec![0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let focal = build_dimension(
            &emb,
            &DimensionSpec::new("g", &[("man", "woman")]).unwrap(),
            BuildOptions::default(),
        )
        .unwrap();
        let lex = AntonymLexicon::new(
            vec![
                AntonymPair::new("woman", "man").unwrap(),
                AntonymPair::new("man", "ghost").unwrap(),
            ],
            "t",
        );
        let scan = scan_nearest_dimensions(&emb, &focal, &lex, 5).unwrap();
        assert_eq!(scan.entries.len(), 1);
        assert!((scan.entries[0].cosine + 1.0).abs() < 1e-12);
        assert_eq!(scan.dropped.len(), 1);
    }
}
