use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::{load_embedding, Embedding, Format, LoadOptions};
use crate::error::{Error, Result};
use crate::trainer::{Corpus, CorpusFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub label: String,
    pub embedding: PathBuf,
    /// Training corpus for this label; needed for confidence intervals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
}

/// Ordered labels, each with an embedding file.
///
/// Relative paths in a manifest file resolve against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSet {
    pub labels: Vec<LabelEntry>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub corpus_format: CorpusFormat,
    /// Lowercase embedding tokens and corpus text on load.
    #[serde(default)]
    pub lowercase: bool,
}

impl EmbeddingSet {
    pub fn new(labels: Vec<LabelEntry>, format: Format) -> Result<Self> {
        let set = EmbeddingSet {
            labels,
            format,
            corpus_format: CorpusFormat::Plain,
            lowercase: false,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut set: EmbeddingSet = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut set.labels {
            entry.embedding = base.join(&entry.embedding);
            entry.corpus = entry.corpus.as_ref().map(|c| base.join(c));
        }
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.labels {
            if !seen.insert(e.label.as_str()) {
                return Err(Error::Config(format!("label {:?} appears twice", e.label)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|e| e.label == label)
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|e| e.label.clone()).collect()
    }

    pub fn embedding(&self, index: usize) -> Result<Embedding> {
        let opts = LoadOptions {
            case_fold: self.lowercase,
            ..LoadOptions::default()
        };
        Ok(load_embedding(&self.labels[index].embedding, self.format, &opts)?.0)
    }

    pub fn corpus(&self, index: usize) -> Result<Option<Corpus>> {
        self.labels[index]
            .corpus
            .as_ref()
            .map(|p| Corpus::read(p, self.corpus_format, self.lowercase))
            .transpose()
    }
}
