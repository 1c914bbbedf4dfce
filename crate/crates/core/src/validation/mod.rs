//! Survey-based validation: post-stratified item means, correlation with
//! projections, and significance-gated pairwise ordering accuracy.

mod classify;
mod stats;
mod survey;
mod weights;

pub use classify::{
    correlate_with_embedding, pairwise_classification, Correlation, OrientationMap, PairDetail, PairwiseResult,
};
pub use stats::{pearson, welch_t_test, WelchTest};
pub use survey::{default_item_domains, Cell, Domain, Education, Race, Response, Scale, Sex, SurveyDataset};
pub use weights::{
    poststratify, weighted_cell_shares, weighted_item_means, ItemMeans, PopulationTable, StratumWeights,
};
