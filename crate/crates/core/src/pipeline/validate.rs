use serde::{Deserialize, Serialize};

use super::Manifest;
use crate::dimension::{build_dimension, project, BuildOptions, DimensionSpec};
use crate::embedding::Embedding;
use crate::error::Result;
use crate::validation::{
    correlate_with_embedding, pairwise_classification, poststratify, weighted_item_means, Cell, Correlation, Domain,
    OrientationMap, PairwiseResult, PopulationTable, Scale, StratumWeights, SurveyDataset,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemPoint {
    pub item: String,
    pub mean: f64,
    pub projection: Option<f64>,
}

/// Pairwise accuracy in one domain, or why it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// `None` pools every item.
    pub domain: Option<Domain>,
    pub result: Option<PairwiseResult>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleTable {
    pub scale: Scale,
    pub dimension: String,
    pub correlation: Option<Correlation>,
    pub correlation_reason: Option<String>,
    pub rows: Vec<TableRow>,
    pub items: Vec<ItemPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub alpha: f64,
    pub orientation: OrientationMap,
    pub weighted: bool,
    pub unreachable_cells: Vec<Cell>,
    pub tables: Vec<ScaleTable>,
    pub manifest: Manifest,
}

/// Post-stratifies (when a population table is given), then for each
/// `(scale, dimension)` computes the correlation with projections and the
/// pairwise accuracy per domain and over all items.
pub fn validation_report(
    survey: &SurveyDataset,
    population: Option<&PopulationTable>,
    emb: &Embedding,
    dimensions: &[(Scale, DimensionSpec)],
    alpha: f64,
    orientation: &OrientationMap,
) -> Result<ValidationReport> {
    let weights = match population {
        Some(p) => poststratify(survey, p)?,
        None => StratumWeights::uniform(survey),
    };
    let means = weighted_item_means(survey, &weights)?;
    let mut tables = Vec::new();
    for (scale, spec) in dimensions {
        let dim = build_dimension(emb, spec, BuildOptions::default())?;
        let sign = orientation.sign(*scale);
        let scale_means = means.for_scale(*scale);
        let oriented: Vec<(String, f64)> = scale_means.iter().map(|(i, m)| (i.clone(), sign * m)).collect();
        let (correlation, correlation_reason) = match correlate_with_embedding(&oriented, emb, &dim) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let mut rows = Vec::new();
        for domain in Domain::ALL.map(Some).into_iter().chain([None]) {
            let row = match pairwise_classification(survey, &means, emb, &dim, *scale, domain, alpha, orientation) {
                Ok(r) => TableRow {
                    domain,
                    result: Some(r),
                    reason: None,
                },
                Err(e) => TableRow {
                    domain,
                    result: None,
                    reason: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
        let items = scale_means
            .iter()
            .map(|(item, mean)| ItemPoint {
                item: item.clone(),
                mean: *mean,
                projection: project(emb, item, &dim).ok(),
            })
            .collect();
        tables.push(ScaleTable {
            scale: *scale,
            dimension: spec.name.clone(),
            correlation,
            correlation_reason,
            rows,
            items,
        });
    }
    let mut manifest = Manifest::new("validate");
    manifest.parameter("alpha", alpha).parameter("orientation", orientation);
    Ok(ValidationReport {
        alpha,
        orientation: *orientation,
        weighted: population.is_some(),
        unreachable_cells: weights.unreachable_cells,
        tables,
        manifest,
    })
}
