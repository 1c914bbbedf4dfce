//! Cultural dimensions built from antonym pairs.
//!
//! A dimension is the renormalized mean of `unit(first) - unit(second)` over
//! its usable pairs, so it points toward the first word of each pair
//! (masculine, rich, black for the bundled gender, class and race lists).
//! Projecting a word onto a dimension is the cosine between the two.

mod lexicon;
mod variance;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::linalg::{self, dot};

pub use lexicon::{
    filter_lexicon, load_antonym_lexicon, scan_nearest_dimensions, AntonymLexicon, ScanEntry, ScanResult,
};
pub use variance::{top_component, top_component_variance, variance_explained, Centering, PrincipalComponent};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(String, String)", into = "(String, String)")]
pub struct AntonymPair {
    first: String,
    second: String,
}

impl AntonymPair {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Result<Self> {
        let (first, second) = (first.into(), second.into());
        if first == second {
            return Err(Error::InvalidToken {
                token: first,
                reason: "antonym pair needs two distinct words".into(),
            });
        }
        Ok(AntonymPair { first, second })
    }

    /// Positive pole.
    pub fn first(&self) -> &str {
        &self.first
    }

    pub fn second(&self) -> &str {
        &self.second
    }

    pub fn reversed(&self) -> AntonymPair {
        AntonymPair {
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }

    fn unordered_key(&self) -> (&str, &str) {
        if self.first <= self.second {
            (&self.first, &self.second)
        } else {
            (&self.second, &self.first)
        }
    }
}

impl TryFrom<(String, String)> for AntonymPair {
    type Error = Error;

    fn try_from((a, b): (String, String)) -> Result<Self> {
        AntonymPair::new(a, b)
    }
}

impl From<AntonymPair> for (String, String) {
    fn from(p: AntonymPair) -> Self {
        (p.first, p.second)
    }
}

impl std::fmt::Display for AntonymPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}–{}", self.first, self.second)
    }
}

/// A named list of antonym pairs, as stored in dimension spec JSON files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub name: String,
    pub pairs: Vec<AntonymPair>,
}

impl DimensionSpec {
    pub fn new(name: impl Into<String>, pairs: &[(&str, &str)]) -> Result<Self> {
        Ok(DimensionSpec {
            name: name.into(),
            pairs: pairs
                .iter()
                .map(|(a, b)| AntonymPair::new(*a, *b))
                .collect::<Result<_>>()?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DimensionSpec = serde_json::from_str(text)?;
        if spec.pairs.is_empty() {
            return Err(Error::Config(format!("dimension {:?} lists no pairs", spec.name)));
        }
        Ok(spec)
    }

    /// Masculine-positive gender pairs.
    pub fn gender() -> Self {
        Self::from_json(include_str!("../../data/gender.json")).expect("bundled spec")
    }

    /// Rich-positive class pairs.
    pub fn class() -> Self {
        Self::from_json(include_str!("../../data/class.json")).expect("bundled spec")
    }

    /// Black-positive race pairs (mixed case).
    pub fn race() -> Self {
        Self::from_json(include_str!("../../data/race.json")).expect("bundled spec")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "gender" => Some(Self::gender()),
            "class" => Some(Self::class()),
            "race" => Some(Self::race()),
            _ => None,
        }
    }

    /// Resolves a bundled name or else a JSON file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Some(s) => Ok(s),
            None => Self::load(name_or_path),
        }
    }

    /// Lowercases every word and drops pairs that collapse into an earlier
    /// one. Use with case-folded embeddings.
    pub fn lowercased(&self) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut pairs = Vec::new();
        for p in &self.pairs {
            let (a, b) = (p.first.to_lowercase(), p.second.to_lowercase());
            if a == b || !seen.insert((a.clone(), b.clone())) {
                continue;
            }
            pairs.push(AntonymPair { first: a, second: b });
        }
        DimensionSpec {
            name: self.name.clone(),
            pairs,
        }
    }

    /// The same pairs with poles swapped.
    pub fn reversed(&self) -> Self {
        DimensionSpec {
            name: format!("-{}", self.name),
            pairs: self.pairs.iter().map(AntonymPair::reversed).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    /// Drop pairs with an out-of-vocabulary word and record them.
    #[default]
    Skip,
    Error,
}

/// How per-pair differences are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCombination {
    /// Mean of `unit(first) - unit(second)`.
    #[default]
    MeanDifference,
    /// Mean of `unit(unit(first) - unit(second))`.
    MeanUnitDifference,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub on_missing: MissingPolicy,
    pub combination: PairCombination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub pair: AntonymPair,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CulturalDimension {
    pub name: String,
    vector: Vec<f64>,
    pub pairs_used: Vec<AntonymPair>,
    pub pairs_skipped: Vec<SkippedPair>,
}

impl CulturalDimension {
    /// Wraps an arbitrary direction (scaled to unit length).
    pub fn from_vector(name: impl Into<String>, v: &[f64]) -> Result<Self> {
        let name = name.into();
        let vector = linalg::unit(v).ok_or_else(|| Error::ZeroNorm(name.clone()))?;
        Ok(CulturalDimension {
            name,
            vector,
            pairs_used: Vec::new(),
            pairs_skipped: Vec::new(),
        })
    }

    /// Unit vector.
    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn negated(&self) -> CulturalDimension {
        CulturalDimension {
            name: format!("-{}", self.name),
            vector: self.vector.iter().map(|x| -x).collect(),
            pairs_used: self.pairs_used.iter().map(AntonymPair::reversed).collect(),
            pairs_skipped: self.pairs_skipped.clone(),
        }
    }
}

/// Builds a dimension from `spec` in `emb`.
pub fn build_dimension(emb: &Embedding, spec: &DimensionSpec, options: BuildOptions) -> Result<CulturalDimension> {
    let mut acc = vec![0.0; emb.dim()];
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    for pair in &spec.pairs {
        match pair_difference(emb, pair) {
            Ok(diff) => {
                let diff = match options.combination {
                    PairCombination::MeanDifference => diff,
                    PairCombination::MeanUnitDifference => {
                        linalg::unit(&diff).ok_or_else(|| Error::ZeroNorm(pair.to_string()))?
                    }
                };
                linalg::axpy(&mut acc, 1.0, &diff);
                used.push(pair.clone());
            }
            Err(Error::MissingToken(t)) if options.on_missing == MissingPolicy::Skip => skipped.push(SkippedPair {
                pair: pair.clone(),
                reason: format!("missing token {t:?}"),
            }),
            Err(e) => return Err(e),
        }
    }
    if used.is_empty() {
        return Err(Error::NoUsablePairs {
            name: spec.name.clone(),
            skipped: skipped.len(),
        });
    }
    let n = used.len() as f64;
    acc.iter_mut().for_each(|x| *x /= n);
    let vector =
        linalg::unit(&acc).ok_or_else(|| Error::ZeroNorm(format!("mean of pair differences for {:?}", spec.name)))?;
    Ok(CulturalDimension {
        name: spec.name.clone(),
        vector,
        pairs_used: used,
        pairs_skipped: skipped,
    })
}

/// `unit(first) - unit(second)`.
pub fn pair_difference(emb: &Embedding, pair: &AntonymPair) -> Result<Vec<f64>> {
    let a = emb.unit_vector(&pair.first)?;
    let b = emb.unit_vector(&pair.second)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// Projection of a token onto `dim`: cosine in `[-1, 1]`, positive toward the
/// first pole.
pub fn project(emb: &Embedding, token: &str, dim: &CulturalDimension) -> Result<f64> {
    let v = emb.vector(token)?;
    project_vector(v, dim).map_err(|e| match e {
        Error::ZeroNorm(_) => Error::ZeroNorm(token.to_string()),
        other => other,
    })
}

pub fn project_vector(v: &[f64], dim: &CulturalDimension) -> Result<f64> {
    linalg::cosine(v, &dim.vector)
}

/// Projections of every token, in vocabulary order.
pub fn project_all(emb: &Embedding, dim: &CulturalDimension) -> Result<Vec<f64>> {
    if emb.dim() != dim.dim() {
        return Err(Error::DimensionMismatch {
            expected: emb.dim(),
            found: dim.dim(),
        });
    }
    emb.tokens()
        .iter()
        .zip(emb.rows())
        .map(|(t, row)| {
            if emb.is_normalized() {
                Ok(linalg::clamp_unit(dot(row, &dim.vector)))
            } else {
                linalg::cosine(row, &dim.vector).map_err(|_| Error::ZeroNorm(t.clone()))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    pub cosine: f64,
    pub degrees: f64,
}

impl Angle {
    pub fn from_cosine(cosine: f64) -> Angle {
        let cosine = linalg::clamp_unit(cosine);
        Angle {
            cosine,
            degrees: cosine.acos().to_degrees(),
        }
    }
}

pub fn dimension_angle(a: &CulturalDimension, b: &CulturalDimension) -> Result<Angle> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(Angle::from_cosine(dot(&a.vector, &b.vector)))
}
