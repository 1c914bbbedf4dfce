//! Batch analyses over labeled embeddings and their file renderings.
//!
//! Every number here comes from a direct call into the `dimension`,
//! `validation` or `resampling` modules; this layer only loops, collects and
//! records provenance.

mod names;
mod render;
mod series;
mod set;
mod svg;
mod validate;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use names::{load_names, name_gender_audit, NameAuditReport, NameAuditRow, NameDetail, NameRecord};
pub use render::{render, render_to_string, OutputFormat, Report};
pub use series::{
    angle_series, cross_corpus_compare, projection_series, CompareReport, CompareRow, ConfidenceSetup, LabelNote,
    SeriesKind, SeriesPoint, SeriesReport,
};
pub use set::{EmbeddingSet, LabelEntry};
pub use validate::{validation_report, ItemPoint, ScaleTable, TableRow, ValidationReport};

/// Everything needed to rerun an analysis. Contains no timestamps, so equal
/// runs give byte-identical output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub command: String,
    /// role → path, in insertion order.
    pub inputs: Vec<(String, String)>,
    pub seeds: BTreeMap<String, u64>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Self {
        Manifest {
            tool: format!("culturegeo {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            ..Manifest::default()
        }
    }

    pub fn input(&mut self, role: impl Into<String>, path: impl AsRef<Path>) -> &mut Self {
        self.inputs.push((role.into(), path.as_ref().display().to_string()));
        self
    }

    pub fn seed(&mut self, name: impl Into<String>, value: u64) -> &mut Self {
        self.seeds.insert(name.into(), value);
        self
    }

    pub fn parameter(&mut self, name: impl Into<String>, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(name.into(), value);
        self
    }

    /// Merges `other` into `self`; entries already present win.
    pub fn absorb(&mut self, other: &Manifest) {
        for (role, path) in &other.inputs {
            if !self.inputs.iter().any(|(r, p)| r == role && p == path) {
                self.inputs.push((role.clone(), path.clone()));
            }
        }
        for (k, v) in &other.seeds {
            self.seeds.entry(k.clone()).or_insert(*v);
        }
        for (k, v) in &other.parameters {
            self.parameters.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
}
