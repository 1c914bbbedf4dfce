use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dimension::{build_dimension, dimension_angle, project, BuildOptions, DimensionSpec, MissingPolicy};
use crate::embedding::Embedding;
use crate::error::Result;
use crate::linalg::cosine;

/// Anything that maps an embedding to one real number.
pub trait Statistic: Sync {
    fn evaluate(&self, emb: &Embedding) -> Result<f64>;

    fn label(&self) -> String {
        "statistic".into()
    }
}

impl<F> Statistic for F
where
    F: Fn(&Embedding) -> Result<f64> + Sync,
{
    fn evaluate(&self, emb: &Embedding) -> Result<f64> {
        self(emb)
    }
}

/// A dimension named by a bundled name or file path, or given inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimensionRef {
    Named(String),
    Inline(DimensionSpec),
}

impl DimensionRef {
    pub fn spec(&self) -> Result<DimensionSpec> {
        match self {
            DimensionRef::Named(n) => DimensionSpec::resolve(n),
            DimensionRef::Inline(s) => Ok(s.clone()),
        }
    }

    /// The same reference with any file contents read in.
    pub fn resolved(&self) -> Result<DimensionRef> {
        Ok(DimensionRef::Inline(self.spec()?))
    }

    fn name(&self) -> String {
        match self {
            DimensionRef::Named(n) => n.clone(),
            DimensionRef::Inline(s) => s.name.clone(),
        }
    }
}

/// Named statistics over an embedding.
///
/// Dimensions are rebuilt inside each embedding with every pair required, so
/// a pair word that is absent makes the statistic undefined rather than
/// silently changing the dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticSpec {
    Cosine {
        a: String,
        b: String,
    },
    Projection {
        word: String,
        dimension: DimensionRef,
    },
    /// Angle between two dimensions, in degrees.
    Angle {
        first: DimensionRef,
        second: DimensionRef,
    },
    /// Cosine between two dimensions.
    DimensionCosine {
        first: DimensionRef,
        second: DimensionRef,
    },
    Difference {
        left: Box<StatisticSpec>,
        right: Box<StatisticSpec>,
    },
}

fn dimension_in(emb: &Embedding, d: &DimensionRef) -> Result<crate::dimension::CulturalDimension> {
    let options = BuildOptions {
        on_missing: MissingPolicy::Error,
        ..BuildOptions::default()
    };
    build_dimension(emb, &d.spec()?, options)
}

impl StatisticSpec {
    /// Replaces file references by their contents so replicates never touch
    /// the file system.
    pub fn resolved(&self) -> Result<StatisticSpec> {
        Ok(match self {
            StatisticSpec::Cosine { .. } => self.clone(),
            StatisticSpec::Projection { word, dimension } => StatisticSpec::Projection {
                word: word.clone(),
                dimension: dimension.resolved()?,
            },
            StatisticSpec::Angle { first, second } => StatisticSpec::Angle {
                first: first.resolved()?,
                second: second.resolved()?,
            },
            StatisticSpec::DimensionCosine { first, second } => StatisticSpec::DimensionCosine {
                first: first.resolved()?,
                second: second.resolved()?,
            },
            StatisticSpec::Difference { left, right } => StatisticSpec::Difference {
                left: Box::new(left.resolved()?),
                right: Box::new(right.resolved()?),
            },
        })
    }
}

impl Statistic for StatisticSpec {
    fn evaluate(&self, emb: &Embedding) -> Result<f64> {
        match self {
            StatisticSpec::Cosine { a, b } => cosine(emb.vector(a)?, emb.vector(b)?),
            StatisticSpec::Projection { word, dimension } => project(emb, word, &dimension_in(emb, dimension)?),
            StatisticSpec::Angle { first, second } => {
                Ok(dimension_angle(&dimension_in(emb, first)?, &dimension_in(emb, second)?)?.degrees)
            }
            StatisticSpec::DimensionCosine { first, second } => {
                Ok(dimension_angle(&dimension_in(emb, first)?, &dimension_in(emb, second)?)?.cosine)
            }
            StatisticSpec::Difference { left, right } => Ok(left.evaluate(emb)? - right.evaluate(emb)?),
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticSpec::Cosine { a, b } => write!(f, "cosine({a}, {b})"),
            StatisticSpec::Projection { word, dimension } => write!(f, "projection({word}, {})", dimension.name()),
            StatisticSpec::Angle { first, second } => write!(f, "angle({}, {})", first.name(), second.name()),
            StatisticSpec::DimensionCosine { first, second } => {
                write!(f, "cosine({}, {})", first.name(), second.name())
            }
            StatisticSpec::Difference { left, right } => write!(f, "{left} - {right}"),
        }
    }
}
