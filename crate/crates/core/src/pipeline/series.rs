use serde::{Deserialize, Serialize};

use super::set::EmbeddingSet;
use super::Manifest;
use crate::dimension::{
    build_dimension, dimension_angle, project, BuildOptions, CulturalDimension, DimensionSpec, SkippedPair,
};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::resampling::{resample_each, trainer_fit, DimensionRef, ResamplingPlan, StatisticSpec};
use crate::trainer::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Word projections onto one dimension.
    Projection,
    /// Cosine between two dimensions.
    Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub label: String,
    /// A word, or `"a·b"` for a dimension pair.
    pub key: String,
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Why `value` or the bounds are missing.
    pub reason: Option<String>,
}

/// How a dimension came out in one labeled embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelNote {
    pub label: String,
    pub dimension: String,
    pub pairs_used: usize,
    pub skipped: Vec<SkippedPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub labels: Vec<String>,
    pub keys: Vec<String>,
    pub dimensions: Vec<DimensionSpec>,
    /// Label-major, keys in order within each label.
    pub points: Vec<SeriesPoint>,
    pub notes: Vec<LabelNote>,
    pub plan: Option<ResamplingPlan>,
    pub manifest: Manifest,
}

impl SeriesReport {
    pub fn point(&self, label: &str, key: &str) -> Option<&SeriesPoint> {
        self.points.iter().find(|p| p.label == label && p.key == key)
    }

    /// Values for one key across labels.
    pub fn column(&self, key: &str) -> Vec<Option<f64>> {
        self.labels
            .iter()
            .map(|l| self.point(l, key).and_then(|p| p.value))
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
struct Value {
    value: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    reason: Option<String>,
}

impl Value {
    fn from_result(r: Result<f64>) -> Result<Value> {
        match r {
            Ok(v) => Ok(Value {
                value: Some(v),
                ..Value::default()
            }),
            Err(e) if e.is_replicate_failure() => Ok(Value {
                reason: Some(e.to_string()),
                ..Value::default()
            }),
            Err(e) => Err(e),
        }
    }
}

fn note(label: &str, dim: &CulturalDimension) -> LabelNote {
    LabelNote {
        label: label.to_string(),
        dimension: dim.name.clone(),
        pairs_used: dim.pairs_used.len(),
        skipped: dim.pairs_skipped.clone(),
    }
}

/// The pairs a built dimension actually used, as an inline spec.
fn used_spec(dim: &CulturalDimension) -> DimensionRef {
    DimensionRef::Inline(DimensionSpec {
        name: dim.name.clone(),
        pairs: dim.pairs_used.clone(),
    })
}

/// Adds CIs to the values that have a point estimate. `statistic(i)` is the
/// statistic behind `values[i]`.
fn attach_intervals(
    values: &mut [Value],
    statistic: impl Fn(usize) -> StatisticSpec,
    emb: &Embedding,
    corpus: &Corpus,
    plan: &ResamplingPlan,
) -> Result<()> {
    let wanted: Vec<usize> = (0..values.len()).filter(|&i| values[i].value.is_some()).collect();
    if wanted.is_empty() {
        return Ok(());
    }
    let stats: Vec<StatisticSpec> = wanted.iter().map(|&i| statistic(i)).collect();
    let intervals = resample_each(
        corpus,
        &plan.settings()?,
        plan.trainer.seed,
        Some(emb),
        trainer_fit(&plan.trainer),
        &stats,
    )?;
    for (&i, ci) in wanted.iter().zip(intervals) {
        match ci {
            Ok(ci) => {
                values[i].lower = Some(ci.lower);
                values[i].upper = Some(ci.upper);
            }
            Err(e) => values[i].reason = Some(format!("no confidence interval: {e}")),
        }
    }
    Ok(())
}

fn label_corpus(set: &EmbeddingSet, i: usize) -> Result<Corpus> {
    set.corpus(i)?.ok_or_else(|| {
        Error::Config(format!(
            "label {:?} has no corpus, which confidence intervals need",
            set.labels[i].label
        ))
    })
}

fn projections(emb: &Embedding, dim: &CulturalDimension, words: &[String]) -> Result<Vec<Value>> {
    words.iter().map(|w| Value::from_result(project(emb, w, dim))).collect()
}

fn base_manifest(command: &str, set: &EmbeddingSet, plan: Option<&ResamplingPlan>) -> Manifest {
    let mut m = Manifest::new(command);
    for e in &set.labels {
        m.input(format!("embedding:{}", e.label), &e.embedding);
        if let (Some(c), Some(_)) = (&e.corpus, plan) {
            m.input(format!("corpus:{}", e.label), c);
        }
    }
    if let Some(p) = plan {
        m.seed("base_seed", p.base_seed);
        m.seed("trainer_seed", p.trainer.seed);
    }
    m.parameter("format", set.format);
    m.parameter("lowercase", set.lowercase);
    m
}

/// Projection of each word onto `spec`'s dimension, built separately in
/// every labeled embedding.
pub fn projection_series(
    set: &EmbeddingSet,
    spec: &DimensionSpec,
    words: &[String],
    plan: Option<&ResamplingPlan>,
) -> Result<SeriesReport> {
    if let Some(p) = plan {
        p.validate()?;
    }
    let mut points = Vec::new();
    let mut notes = Vec::new();
    for (i, entry) in set.labels.iter().enumerate() {
        let emb = set.embedding(i)?;
        let dim = build_dimension(&emb, spec, BuildOptions::default())?;
        let mut values = projections(&emb, &dim, words)?;
        if let Some(plan) = plan {
            let corpus = label_corpus(set, i)?;
            let dimension = used_spec(&dim);
            let stat = |k: usize| StatisticSpec::Projection {
                word: words[k].clone(),
                dimension: dimension.clone(),
            };
            attach_intervals(&mut values, stat, &emb, &corpus, plan)?;
        }
        notes.push(note(&entry.label, &dim));
        points.extend(words.iter().zip(values).map(|(w, v)| SeriesPoint {
            label: entry.label.clone(),
            key: w.clone(),
            value: v.value,
            lower: v.lower,
            upper: v.upper,
            reason: v.reason,
        }));
    }
    let mut manifest = base_manifest("series project", set, plan);
    manifest.parameter("dimension", &spec.name);
    Ok(SeriesReport {
        kind: SeriesKind::Projection,
        labels: set.label_names(),
        keys: words.to_vec(),
        dimensions: vec![spec.clone()],
        points,
        notes,
        plan: plan.cloned(),
        manifest,
    })
}

/// Cosine between two dimensions in every labeled embedding.
pub fn angle_series(
    set: &EmbeddingSet,
    spec_a: &DimensionSpec,
    spec_b: &DimensionSpec,
    plan: Option<&ResamplingPlan>,
) -> Result<SeriesReport> {
    if let Some(p) = plan {
        p.validate()?;
    }
    let key = format!("{}·{}", spec_a.name, spec_b.name);
    let mut points = Vec::new();
    let mut notes = Vec::new();
    for (i, entry) in set.labels.iter().enumerate() {
        let emb = set.embedding(i)?;
        let a = build_dimension(&emb, spec_a, BuildOptions::default())?;
        let b = build_dimension(&emb, spec_b, BuildOptions::default())?;
        let mut values = vec![Value {
            value: Some(dimension_angle(&a, &b)?.cosine),
            ..Value::default()
        }];
        if let Some(plan) = plan {
            let corpus = label_corpus(set, i)?;
            let stat = |_: usize| StatisticSpec::DimensionCosine {
                first: used_spec(&a),
                second: used_spec(&b),
            };
            attach_intervals(&mut values, stat, &emb, &corpus, plan)?;
        }
        notes.push(note(&entry.label, &a));
        notes.push(note(&entry.label, &b));
        let v = values.pop().unwrap_or_default();
        points.push(SeriesPoint {
            label: entry.label.clone(),
            key: key.clone(),
            value: v.value,
            lower: v.lower,
            upper: v.upper,
            reason: v.reason,
        });
    }
    let mut manifest = base_manifest("series angle", set, plan);
    manifest.parameter("dimensions", [&spec_a.name, &spec_b.name]);
    Ok(SeriesReport {
        kind: SeriesKind::Angle,
        labels: set.label_names(),
        keys: vec![key],
        dimensions: vec![spec_a.clone(), spec_b.clone()],
        points,
        notes,
        plan: plan.cloned(),
        manifest,
    })
}

/// Corpora and plan for confidence intervals in a two-embedding comparison.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceSetup<'a> {
    pub plan: &'a ResamplingPlan,
    pub corpus_a: &'a Corpus,
    pub corpus_b: &'a Corpus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub word: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub a_lower: Option<f64>,
    pub a_upper: Option<f64>,
    pub b_lower: Option<f64>,
    pub b_upper: Option<f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub label_a: String,
    pub label_b: String,
    pub dimension: DimensionSpec,
    pub notes: Vec<LabelNote>,
    pub rows: Vec<CompareRow>,
    pub plan: Option<ResamplingPlan>,
    pub manifest: Manifest,
}

fn join_reasons(a: Option<String>, b: Option<String>, label_a: &str, label_b: &str) -> Option<String> {
    match (a, b) {
        (None, None) => None,
        (Some(a), None) => Some(format!("{label_a}: {a}")),
        (None, Some(b)) => Some(format!("{label_b}: {b}")),
        (Some(a), Some(b)) => Some(format!("{label_a}: {a}; {label_b}: {b}")),
    }
}

/// Paired projections of `words` in two embeddings, each on its own copy of
/// the dimension.
pub fn cross_corpus_compare(
    (label_a, emb_a): (&str, &Embedding),
    (label_b, emb_b): (&str, &Embedding),
    spec: &DimensionSpec,
    words: &[String],
    confidence: Option<ConfidenceSetup<'_>>,
) -> Result<CompareReport> {
    let dim_a = build_dimension(emb_a, spec, BuildOptions::default())?;
    let dim_b = build_dimension(emb_b, spec, BuildOptions::default())?;
    let mut va = projections(emb_a, &dim_a, words)?;
    let mut vb = projections(emb_b, &dim_b, words)?;
    if let Some(c) = confidence {
        c.plan.validate()?;
        for (values, emb, dim, corpus) in [
            (&mut va, emb_a, &dim_a, c.corpus_a),
            (&mut vb, emb_b, &dim_b, c.corpus_b),
        ] {
            let dimension = used_spec(dim);
            let stat = |k: usize| StatisticSpec::Projection {
                word: words[k].clone(),
                dimension: dimension.clone(),
            };
            attach_intervals(values, stat, emb, corpus, c.plan)?;
        }
    }
    let rows = words
        .iter()
        .zip(va.into_iter().zip(vb))
        .map(|(w, (a, b))| CompareRow {
            word: w.clone(),
            a: a.value,
            b: b.value,
            a_lower: a.lower,
            a_upper: a.upper,
            b_lower: b.lower,
            b_upper: b.upper,
            reason: join_reasons(a.reason, b.reason, label_a, label_b),
        })
        .collect();
    let mut manifest = Manifest::new("compare");
    manifest.parameter("dimension", &spec.name);
    if let Some(c) = confidence {
        manifest.seed("base_seed", c.plan.base_seed);
        manifest.seed("trainer_seed", c.plan.trainer.seed);
    }
    Ok(CompareReport {
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
        dimension: spec.clone(),
        notes: vec![note(label_a, &dim_a), note(label_b, &dim_b)],
        rows,
        plan: confidence.map(|c| c.plan.clone()),
        manifest,
    })
}
