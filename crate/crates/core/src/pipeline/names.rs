use std::path::Path;

use serde::{Deserialize, Serialize};

use super::set::EmbeddingSet;
use super::Manifest;
use crate::dimension::{build_dimension, project, BuildOptions, DimensionSpec};
use crate::error::{Error, Result};
use crate::validation::Sex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameRecord {
    /// Cohort label: when the name was popular.
    pub label: String,
    pub name: String,
    pub recorded_sex: Sex,
}

#[derive(Deserialize)]
struct NameRow {
    label: String,
    name: String,
    recorded_sex: String,
}

/// Reads `label,name,recorded_sex` rows.
pub fn load_names(path: impl AsRef<Path>) -> Result<Vec<NameRecord>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    reader
        .deserialize()
        .map(|row| {
            let row: NameRow = row?;
            Ok(NameRecord {
                label: row.label,
                name: row.name,
                recorded_sex: row.recorded_sex.parse()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameDetail {
    pub cohort: String,
    pub name: String,
    pub recorded_sex: Sex,
    /// `None` when the name is not in the embedding.
    pub projection: Option<f64>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameAuditRow {
    pub cohort: String,
    /// Label of the embedding the cohort was scored in.
    pub embedding: String,
    pub n_names: usize,
    pub n_missing: usize,
    /// Names projecting exactly to zero; scored as misclassified.
    pub n_zero: usize,
    pub n_correct: usize,
    /// Correct over in-vocabulary names; `None` if there are none.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameAuditReport {
    pub lag: usize,
    pub dimension: DimensionSpec,
    pub rows: Vec<NameAuditRow>,
    /// Cohorts with no embedding `lag` labels later, or not in the set.
    pub dropped_cohorts: Vec<String>,
    pub details: Vec<NameDetail>,
    pub manifest: Manifest,
}

/// Scores names as masculine when their projection on the gender dimension
/// is positive, using the embedding `lag` labels after the cohort.
pub fn name_gender_audit(
    set: &EmbeddingSet,
    names: &[NameRecord],
    lag: usize,
    gender: &DimensionSpec,
) -> Result<NameAuditReport> {
    let mut cohorts: Vec<&str> = Vec::new();
    for n in names {
        if !cohorts.contains(&n.label.as_str()) {
            cohorts.push(&n.label);
        }
    }
    // Scored cohorts follow set order; unknown ones keep file order.
    let mut dropped_cohorts: Vec<String> = cohorts
        .iter()
        .filter(|c| set.position(c).is_none())
        .map(|c| c.to_string())
        .collect();
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (p, entry) in set.labels.iter().enumerate() {
        if !cohorts.contains(&entry.label.as_str()) {
            continue;
        }
        let Some(target) = p.checked_add(lag).filter(|&t| t < set.len()) else {
            dropped_cohorts.push(entry.label.clone());
            continue;
        };
        let emb = set.embedding(target)?;
        let dim = build_dimension(&emb, gender, BuildOptions::default())?;
        let mut row = NameAuditRow {
            cohort: entry.label.clone(),
            embedding: set.labels[target].label.clone(),
            n_names: 0,
            n_missing: 0,
            n_zero: 0,
            n_correct: 0,
            accuracy: None,
        };
        for n in names.iter().filter(|n| n.label == entry.label) {
            row.n_names += 1;
            let projection = match project(&emb, &n.name, &dim) {
                Ok(v) => Some(v),
                Err(e) if e.is_replicate_failure() => None,
                Err(e) => return Err(e),
            };
            let correct = match projection {
                Some(v) if v > 0.0 => n.recorded_sex == Sex::Male,
                Some(v) if v < 0.0 => n.recorded_sex == Sex::Female,
                Some(_) => {
                    row.n_zero += 1;
                    false
                }
                None => {
                    row.n_missing += 1;
                    false
                }
            };
            row.n_correct += usize::from(correct);
            details.push(NameDetail {
                cohort: n.label.clone(),
                name: n.name.clone(),
                recorded_sex: n.recorded_sex,
                projection,
                correct,
            });
        }
        let scored = row.n_names - row.n_missing;
        row.accuracy = (scored > 0).then(|| row.n_correct as f64 / scored as f64);
        rows.push(row);
    }
    if rows.is_empty() && !names.is_empty() {
        return Err(Error::Config(format!(
            "no cohort has an embedding {lag} labels later (dropped: {})",
            dropped_cohorts.join(", ")
        )));
    }
    let mut manifest = Manifest::new("names");
    for e in &set.labels {
        manifest.input(format!("embedding:{}", e.label), &e.embedding);
    }
    manifest.parameter("lag", lag).parameter("dimension", &gender.name);
    Ok(NameAuditReport {
        lag,
        dimension: gender.clone(),
        rows,
        dropped_cohorts,
        details,
        manifest,
    })
}
