use serde::{Deserialize, Serialize};

use super::stats::{pearson, welch_t_test, WelchTest};
use super::survey::{Domain, Scale, SurveyDataset};
use super::weights::ItemMeans;
use crate::dimension::{project, CulturalDimension};
use crate::embedding::Embedding;
use crate::error::{Error, Result};

/// Sign relating each survey scale's 100 anchor to a dimension's positive
/// pole. With the bundled pairs, 100 means masculine, upper class and
/// African-American, which are the first poles, so every sign is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrientationMap {
    pub gender: f64,
    pub class: f64,
    pub race: f64,
}

impl Default for OrientationMap {
    fn default() -> Self {
        OrientationMap {
            gender: 1.0,
            class: 1.0,
            race: 1.0,
        }
    }
}

impl OrientationMap {
    pub fn sign(&self, scale: Scale) -> f64 {
        let s = match scale {
            Scale::Gender => self.gender,
            Scale::Class => self.class,
            Scale::Race => self.race,
        };
        if s < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub n_items: usize,
    /// Items without a vector in the embedding.
    pub missing: Vec<String>,
}

/// Pearson correlation between survey means and projections, over the items
/// present in the embedding.
pub fn correlate_with_embedding(
    means: &[(String, f64)],
    emb: &Embedding,
    dim: &CulturalDimension,
) -> Result<Correlation> {
    let mut xs = Vec::with_capacity(means.len());
    let mut ys = Vec::with_capacity(means.len());
    let mut missing = Vec::new();
    for (item, m) in means {
        match project(emb, item, dim) {
            Ok(p) => {
                xs.push(*m);
                ys.push(p);
            }
            Err(Error::MissingToken(_)) => missing.push(item.clone()),
            Err(e) => return Err(e),
        }
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "correlation needs at least 3 items in vocabulary, found {}",
            xs.len()
        )));
    }
    Ok(Correlation {
        r: pearson(&xs, &ys)?,
        n_items: xs.len(),
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDetail {
    pub first: String,
    pub second: String,
    /// `None` when both samples are constant and the test is undefined.
    pub welch: Option<WelchTest>,
    pub significant: bool,
    /// Weighted mean of `first` minus weighted mean of `second`.
    pub survey_difference: f64,
    /// Oriented projection of `first` minus that of `second`.
    pub projection_difference: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub scale: Scale,
    pub domain: Option<Domain>,
    /// `None` when no pair is significant.
    pub accuracy: Option<f64>,
    pub n_significant_pairs: usize,
    pub n_correct: usize,
    pub pairs: Vec<PairDetail>,
    pub missing: Vec<String>,
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

/// Share of significantly different item pairs whose survey ordering the
/// projections reproduce.
///
/// The gate is a Welch test on unweighted ratings at `alpha`; ordering uses
/// the weighted means. Two constant samples with different values count as
/// significant. `domain = None` pools every item.
#[allow(clippy::too_many_arguments)]
pub fn pairwise_classification(
    survey: &SurveyDataset,
    means: &ItemMeans,
    emb: &Embedding,
    dim: &CulturalDimension,
    scale: Scale,
    domain: Option<Domain>,
    alpha: f64,
    orientation: &OrientationMap,
) -> Result<PairwiseResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let sign = orientation.sign(scale);
    let mut items = Vec::new();
    let mut missing = Vec::new();
    for item in survey.items() {
        if domain.is_some() && survey.domain_of(item) != domain {
            continue;
        }
        let Some(mean) = means.get(item, scale) else {
            continue;
        };
        match project(emb, item, dim) {
            Ok(p) => items.push((item.to_string(), mean, sign * p, survey.ratings(item, scale))),
            Err(Error::MissingToken(_)) => missing.push(item.to_string()),
            Err(e) => return Err(e),
        }
    }
    if items.len() < 2 {
        return Err(Error::Degenerate(format!(
            "pairwise classification needs two rated in-vocabulary items, found {}",
            items.len()
        )));
    }

    let mut pairs = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (a, b) = (&items[i], &items[j]);
            let survey_difference = a.1 - b.1;
            let projection_difference = a.2 - b.2;
            let (welch, significant) = match welch_t_test(&a.3, &b.3) {
                Ok(w) => (Some(w), w.p < alpha),
                Err(Error::Degenerate(_)) if a.3.len() >= 2 && b.3.len() >= 2 => (None, a.3[0] != b.3[0]),
                Err(Error::Degenerate(_)) => (None, false),
                Err(e) => return Err(e),
            };
            pairs.push(PairDetail {
                first: a.0.clone(),
                second: b.0.clone(),
                welch,
                significant,
                survey_difference,
                projection_difference,
                correct: significant && same_sign(survey_difference, projection_difference),
            });
        }
    }
    let n_significant_pairs = pairs.iter().filter(|p| p.significant).count();
    let n_correct = pairs.iter().filter(|p| p.correct).count();
    Ok(PairwiseResult {
        scale,
        domain,
        accuracy: (n_significant_pairs > 0).then(|| n_correct as f64 / n_significant_pairs as f64),
        n_significant_pairs,
        n_correct,
        pairs,
        missing,
    })
}
