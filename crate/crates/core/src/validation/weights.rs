use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::survey::{Cell, Scale, SurveyDataset};
use crate::error::{Error, Result};

const SHARE_TOLERANCE: f64 = 1e-9;

/// Population share per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTable {
    shares: BTreeMap<Cell, f64>,
}

#[derive(Deserialize)]
struct PopulationRow {
    sex: String,
    education: String,
    race: String,
    share: f64,
}

impl PopulationTable {
    pub fn new(shares: BTreeMap<Cell, f64>) -> Result<Self> {
        if let Some((c, s)) = shares.iter().find(|(_, s)| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Survey(format!("invalid population share {s} for {c}")));
        }
        let total: f64 = shares.values().sum();
        if (total - 1.0).abs() > SHARE_TOLERANCE {
            return Err(Error::Survey(format!("population shares sum to {total}, expected 1")));
        }
        Ok(PopulationTable { shares })
    }

    /// Reads `population.csv` (sex,education,race,share).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut shares = BTreeMap::new();
        for row in reader.deserialize() {
            let row: PopulationRow = row?;
            let cell = Cell {
                sex: row.sex.parse()?,
                education: row.education.parse()?,
                race: row.race.parse()?,
            };
            if shares.insert(cell, row.share).is_some() {
                return Err(Error::Survey(format!("population cell {cell} listed twice")));
            }
        }
        PopulationTable::new(shares)
    }

    pub fn share(&self, cell: &Cell) -> Option<f64> {
        self.shares.get(cell).copied()
    }

    pub fn shares(&self) -> &BTreeMap<Cell, f64> {
        &self.shares
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumWeights {
    pub cell_weights: BTreeMap<Cell, f64>,
    pub respondent_weights: BTreeMap<String, f64>,
    /// Population cells with positive share but no sampled respondent.
    pub unreachable_cells: Vec<Cell>,
}

impl StratumWeights {
    /// Every respondent weighted 1.
    pub fn uniform(survey: &SurveyDataset) -> Self {
        StratumWeights {
            cell_weights: BTreeMap::new(),
            respondent_weights: survey.respondents().into_iter().map(|r| (r.to_string(), 1.0)).collect(),
            unreachable_cells: Vec::new(),
        }
    }

    pub fn weight(&self, respondent: &str) -> Option<f64> {
        self.respondent_weights.get(respondent).copied()
    }
}

/// Post-stratification: `weight(cell) = population share / sample share`.
pub fn poststratify(survey: &SurveyDataset, population: &PopulationTable) -> Result<StratumWeights> {
    let respondents = survey.respondents();
    if respondents.is_empty() {
        return Err(Error::Survey("survey has no responses".into()));
    }
    let n = respondents.len() as f64;
    let mut counts: BTreeMap<Cell, usize> = BTreeMap::new();
    for r in &respondents {
        let cell = survey
            .cell_of(r)
            .ok_or_else(|| Error::Survey(format!("respondent {r:?} has no demographics")))?;
        *counts.entry(cell).or_default() += 1;
    }
    let mut cell_weights = BTreeMap::new();
    for (cell, &count) in &counts {
        let pop = population
            .share(cell)
            .ok_or_else(|| Error::Survey(format!("sample cell {cell} missing from population table")))?;
        if pop == 0.0 {
            return Err(Error::Survey(format!(
                "population share of {cell} is zero but {count} respondents fall in it"
            )));
        }
        cell_weights.insert(*cell, pop / (count as f64 / n));
    }
    let unreachable_cells = population
        .shares()
        .iter()
        .filter(|(c, s)| **s > 0.0 && !counts.contains_key(*c))
        .map(|(c, _)| *c)
        .collect();
    let respondent_weights = respondents
        .iter()
        .map(|r| (r.to_string(), cell_weights[&survey.cell_of(r).expect("checked above")]))
        .collect();
    Ok(StratumWeights {
        cell_weights,
        respondent_weights,
        unreachable_cells,
    })
}

/// Weighted share of the sample in each cell.
pub fn weighted_cell_shares(survey: &SurveyDataset, weights: &StratumWeights) -> BTreeMap<Cell, f64> {
    let mut shares: BTreeMap<Cell, f64> = BTreeMap::new();
    let mut total = 0.0;
    for r in survey.respondents() {
        let w = weights.weight(r).unwrap_or(0.0);
        *shares.entry(survey.cell_of(r).expect("validated")).or_default() += w;
        total += w;
    }
    shares.values_mut().for_each(|s| *s /= total);
    shares
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemMeans {
    /// item → scale → weighted mean rating.
    pub means: BTreeMap<String, BTreeMap<Scale, f64>>,
    /// (item, scale) combinations with no responses.
    pub omitted: Vec<(String, Scale)>,
}

impl ItemMeans {
    pub fn get(&self, item: &str, scale: Scale) -> Option<f64> {
        self.means.get(item).and_then(|m| m.get(&scale)).copied()
    }

    /// item → mean for one scale, sorted by item.
    pub fn for_scale(&self, scale: Scale) -> Vec<(String, f64)> {
        self.means
            .iter()
            .filter_map(|(item, m)| m.get(&scale).map(|v| (item.clone(), *v)))
            .collect()
    }
}

/// `Σ wᵢ·ratingᵢ / Σ wᵢ` per (item, scale).
pub fn weighted_item_means(survey: &SurveyDataset, weights: &StratumWeights) -> Result<ItemMeans> {
    let mut sums: BTreeMap<(String, Scale), (f64, f64)> = BTreeMap::new();
    for r in survey.responses() {
        let w = weights
            .weight(&r.respondent_id)
            .ok_or_else(|| Error::Survey(format!("no weight for respondent {:?}", r.respondent_id)))?;
        let e = sums.entry((r.item.clone(), r.scale)).or_default();
        e.0 += w * r.rating;
        e.1 += w;
    }
    let mut means: BTreeMap<String, BTreeMap<Scale, f64>> = BTreeMap::new();
    let mut omitted = Vec::new();
    for item in survey.items() {
        for scale in Scale::ALL {
            match sums.get(&(item.to_string(), scale)) {
                Some(&(num, den)) if den > 0.0 => {
                    means.entry(item.to_string()).or_default().insert(scale, num / den);
                }
                _ => omitted.push((item.to_string(), scale)),
            }
        }
    }
    Ok(ItemMeans { means, omitted })
}
