//! Confidence intervals for embedding statistics by retraining on resampled
//! corpora.
//!
//! The resampling unit is one corpus record; weighted records move as a
//! whole. Replicate `i` uses seed `base_seed + i` both to draw its corpus
//! (ChaCha8, stream [`RESAMPLE_STREAM`]) and to train. Subsampling draws its
//! single partition from `base_seed`.

mod statistic;

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::trainer::{train, Corpus, TrainingConfig};

pub use statistic::{DimensionRef, Statistic, StatisticSpec};

/// ChaCha8 stream used for resampling draws; training uses streams 0 to 2.
pub const RESAMPLE_STREAM: u64 = 3;

/// Maximum share of failed replicates before a run is aborted.
pub const MAX_FAILURE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bootstrap,
    Subsample,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bootstrap => "bootstrap",
            Mode::Subsample => "subsample",
        })
    }
}

/// Which subsampling bounds to report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleVariant {
    /// `[s̄ − B₍R−1₎/√τ, s̄ + B₍₂₎/√τ]`, sorted.
    #[default]
    AsWritten,
    /// `[s̄ − B₍R−1₎/√τ, s̄ − B₍₂₎/√τ]`.
    QuantileStandard,
}

impl std::str::FromStr for SubsampleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as_written" | "as-written" => Ok(SubsampleVariant::AsWritten),
            "quantile_standard" | "quantile-standard" => Ok(SubsampleVariant::QuantileStandard),
            other => Err(Error::Config(format!("unknown subsample variant {other:?}"))),
        }
    }
}

/// Confidence level, tied to the replicate count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum Level {
    P90,
    P95,
    P99,
}

impl Level {
    pub fn replicates(self) -> usize {
        match self {
            Level::P90 => 20,
            Level::P95 => 40,
            Level::P99 => 200,
        }
    }

    pub fn from_replicates(n: usize) -> Option<Level> {
        match n {
            20 => Some(Level::P90),
            40 => Some(Level::P95),
            200 => Some(Level::P99),
            _ => None,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Level::P90 => 0.90,
            Level::P95 => 0.95,
            Level::P99 => 0.99,
        }
    }
}

impl TryFrom<f64> for Level {
    type Error = String;

    fn try_from(v: f64) -> std::result::Result<Self, String> {
        [Level::P90, Level::P95, Level::P99]
            .into_iter()
            .find(|l| (l.value() - v).abs() < 1e-9)
            .ok_or_else(|| format!("confidence level must be 0.90, 0.95 or 0.99, got {v}"))
    }
}

impl From<Level> for f64 {
    fn from(l: Level) -> f64 {
        l.value()
    }
}

/// A resampling run as read from a plan file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResamplingPlan {
    pub mode: Mode,
    pub replicates: usize,
    /// Implied by `replicates` when omitted.
    #[serde(default)]
    pub level: Option<Level>,
    pub base_seed: u64,
    #[serde(default)]
    pub trainer: TrainingConfig,
    pub statistic: StatisticSpec,
    #[serde(default)]
    pub variant: SubsampleVariant,
}

impl ResamplingPlan {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: ResamplingPlan = serde_json::from_str(&text)?;
        plan.validate()?;
        Ok(plan)
    }

    /// The level, checked against the replicate count.
    pub fn level(&self) -> Result<Level> {
        let implied = Level::from_replicates(self.replicates).ok_or_else(|| {
            Error::Config(format!(
                "replicates must be 20 (90%), 40 (95%) or 200 (99%), got {}",
                self.replicates
            ))
        })?;
        match self.level {
            Some(l) if l != implied => Err(Error::Config(format!(
                "level {} needs {} replicates, plan has {}",
                l.value(),
                l.replicates(),
                self.replicates
            ))),
            _ => Ok(implied),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.level()?;
        self.trainer.validate()
    }

    pub fn settings(&self) -> Result<ResampleSettings> {
        Ok(ResampleSettings {
            mode: self.mode,
            replicates: self.replicates,
            level: self.level()?,
            base_seed: self.base_seed,
            variant: self.variant,
        })
    }
}

/// The plan fields the generic runner needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleSettings {
    pub mode: Mode,
    pub replicates: usize,
    pub level: Level,
    pub base_seed: u64,
    pub variant: SubsampleVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub statistic: String,
    /// Statistic on the full-sample embedding.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// One entry per replicate; `None` where the statistic was undefined.
    pub replicate_values: Vec<Option<f64>>,
    /// Record count of each replicate corpus.
    pub replicate_records: Vec<usize>,
    pub failures: Vec<ReplicateFailure>,
    pub mode: Mode,
    pub level: Level,
    /// Set for subsampling only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<SubsampleVariant>,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Seed for replicate `index`.
pub fn replicate_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

fn resample_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(RESAMPLE_STREAM);
    rng
}

/// `tau` record indices drawn uniformly with replacement.
pub fn bootstrap_indices(tau: usize, seed: u64) -> Vec<usize> {
    let mut rng = resample_rng(seed);
    (0..tau).map(|_| rng.random_range(0..tau)).collect()
}

/// Random partition of `0..tau` into `parts` disjoint sets whose sizes
/// differ by at most one. Each part is sorted so records keep corpus order.
pub fn subsample_partition(tau: usize, parts: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if parts == 0 || tau < parts {
        return Err(Error::Config(format!(
            "cannot split {tau} records into {parts} non-empty subsamples"
        )));
    }
    let mut order: Vec<usize> = (0..tau).collect();
    order.shuffle(&mut resample_rng(seed));
    let (base, extra) = (tau / parts, tau % parts);
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for k in 0..parts {
        let len = base + usize::from(k < extra);
        let mut part = order[start..start + len].to_vec();
        part.sort_unstable();
        out.push(part);
        start += len;
    }
    let sizes = out.iter().map(Vec::len);
    let (lo, hi) = (sizes.clone().min().unwrap_or(0), sizes.max().unwrap_or(0));
    if hi - lo > 1 || start != tau {
        return Err(Error::Internal(format!("subsample sizes range from {lo} to {hi}")));
    }
    Ok(out)
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Second-smallest and second-largest replicate values.
pub fn bootstrap_interval(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 3 {
        return Err(Error::Degenerate(format!(
            "bootstrap interval needs at least 3 replicate values, got {}",
            values.len()
        )));
    }
    let s = sorted(values);
    Ok((s[1], s[s.len() - 2]))
}

/// Subsampling bounds from `(s^k, τ_k)` pairs: `B^k = √τ_k·(s^k − s̄)`, then
/// the second-smallest and second-largest `B` scaled by `1/√τ`.
pub fn subsample_interval(
    estimate: f64,
    replicates: &[(f64, usize)],
    tau: usize,
    variant: SubsampleVariant,
) -> Result<(f64, f64)> {
    if replicates.len() < 3 {
        return Err(Error::Degenerate(format!(
            "subsample interval needs at least 3 replicate values, got {}",
            replicates.len()
        )));
    }
    let b: Vec<f64> = replicates
        .iter()
        .map(|&(s, tau_k)| (tau_k as f64).sqrt() * (s - estimate))
        .collect();
    let b = sorted(&b);
    let (b_low, b_high) = (b[1], b[b.len() - 2]);
    let root = (tau as f64).sqrt();
    let (x, y) = match variant {
        SubsampleVariant::AsWritten => (estimate - b_high / root, estimate + b_low / root),
        SubsampleVariant::QuantileStandard => (estimate - b_high / root, estimate - b_low / root),
    };
    Ok((x.min(y), x.max(y)))
}

/// Runs one resampling experiment for several statistics at once.
///
/// `fit(corpus, seed)` turns a corpus into an embedding. The full-sample
/// embedding is `full` when given, otherwise `fit(corpus, full_seed)`.
/// Replicates run in parallel. A statistic with more than 10% undefined
/// replicates aborts the run.
pub fn resample<F, S>(
    corpus: &Corpus,
    settings: &ResampleSettings,
    full_seed: u64,
    full: Option<&Embedding>,
    fit: F,
    statistics: &[S],
) -> Result<Vec<ConfidenceInterval>>
where
    F: Fn(&Corpus, u64) -> Result<Embedding> + Sync,
    S: Statistic,
{
    resample_each(corpus, settings, full_seed, full, fit, statistics)?
        .into_iter()
        .collect()
}

/// Like [`resample`], but a statistic that is undefined on the full sample
/// or fails too often yields its own error instead of aborting the others.
pub fn resample_each<F, S>(
    corpus: &Corpus,
    settings: &ResampleSettings,
    full_seed: u64,
    full: Option<&Embedding>,
    fit: F,
    statistics: &[S],
) -> Result<Vec<Result<ConfidenceInterval>>>
where
    F: Fn(&Corpus, u64) -> Result<Embedding> + Sync,
    S: Statistic,
{
    if Level::from_replicates(settings.replicates) != Some(settings.level) {
        return Err(Error::Config(format!(
            "{} replicates do not match level {}",
            settings.replicates,
            settings.level.value()
        )));
    }
    let tau = corpus.record_count();
    if tau == 0 {
        return Err(Error::EmptyVocabulary("corpus has no records".into()));
    }
    let owned;
    let full = match full {
        Some(e) => e,
        None => {
            owned = fit(corpus, full_seed)?;
            &owned
        }
    };
    let estimates: Vec<Result<f64>> = statistics.iter().map(|s| s.evaluate(full)).collect();

    let partition = match settings.mode {
        Mode::Subsample => Some(subsample_partition(tau, settings.replicates, settings.base_seed)?),
        Mode::Bootstrap => None,
    };
    let outcomes: Vec<(usize, Vec<std::result::Result<f64, String>>)> = (0..settings.replicates)
        .into_par_iter()
        .map(|i| {
            let seed = replicate_seed(settings.base_seed, i);
            let sample = match &partition {
                Some(parts) => corpus.subset(&parts[i]),
                None => corpus.subset(&bootstrap_indices(tau, seed)),
            };
            let n = sample.record_count();
            let values = match fit(&sample, seed) {
                Ok(emb) => statistics
                    .iter()
                    .map(|s| match s.evaluate(&emb) {
                        Ok(v) => Ok(Ok(v)),
                        Err(e) if e.is_replicate_failure() => Ok(Err(e.to_string())),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()?,
                Err(e) if e.is_replicate_failure() => vec![Err(e.to_string()); statistics.len()],
                Err(e) => return Err(e),
            };
            Ok((n, values))
        })
        .collect::<Result<_>>()?;

    let replicate_records: Vec<usize> = outcomes.iter().map(|(n, _)| *n).collect();
    Ok(statistics
        .iter()
        .zip(estimates)
        .enumerate()
        .map(|(j, (stat, estimate))| {
            let column = outcomes.iter().map(|(_, v)| v[j].clone());
            summarize(stat.label(), estimate?, column, &replicate_records, settings, tau)
        })
        .collect())
}

fn summarize(
    label: String,
    estimate: f64,
    column: impl Iterator<Item = std::result::Result<f64, String>>,
    replicate_records: &[usize],
    settings: &ResampleSettings,
    tau: usize,
) -> Result<ConfidenceInterval> {
    let mut values = Vec::with_capacity(settings.replicates);
    let mut failures = Vec::new();
    for (i, v) in column.enumerate() {
        match v {
            Ok(x) => values.push(Some(x)),
            Err(reason) => {
                values.push(None);
                failures.push(ReplicateFailure {
                    index: i,
                    seed: replicate_seed(settings.base_seed, i),
                    reason,
                });
            }
        }
    }
    if failures.len() as f64 > MAX_FAILURE_FRACTION * settings.replicates as f64 {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: settings.replicates,
            reason: format!("{label}: first failure {}", failures[0].reason),
        });
    }
    let (lower, upper) = match settings.mode {
        Mode::Bootstrap => bootstrap_interval(&values.iter().flatten().copied().collect::<Vec<_>>())?,
        Mode::Subsample => {
            let pairs: Vec<(f64, usize)> = values
                .iter()
                .zip(replicate_records)
                .filter_map(|(v, &n)| v.map(|x| (x, n)))
                .collect();
            subsample_interval(estimate, &pairs, tau, settings.variant)?
        }
    };
    Ok(ConfidenceInterval {
        statistic: label,
        estimate,
        lower,
        upper,
        replicate_values: values,
        replicate_records: replicate_records.to_vec(),
        failures,
        mode: settings.mode,
        level: settings.level,
        variant: (settings.mode == Mode::Subsample).then_some(settings.variant),
    })
}

/// Fits with the word2vec trainer, single worker, seed overridden.
pub fn trainer_fit(config: &TrainingConfig) -> impl Fn(&Corpus, u64) -> Result<Embedding> + Sync + '_ {
    move |corpus, seed| {
        let cfg = TrainingConfig {
            seed,
            workers: 1,
            ..config.clone()
        };
        train(corpus, &cfg)?.embedding()
    }
}

/// Runs a plan end to end with the trainer. The full sample is trained with
/// `plan.trainer.seed` unless `full` is supplied.
pub fn run_plan(corpus: &Corpus, plan: &ResamplingPlan, full: Option<&Embedding>) -> Result<ConfidenceInterval> {
    plan.validate()?;
    let statistic = plan.statistic.resolved()?;
    let settings = plan.settings()?;
    let mut out = resample(
        corpus,
        &settings,
        plan.trainer.seed,
        full,
        trainer_fit(&plan.trainer),
        std::slice::from_ref(&statistic),
    )?;
    out.pop().ok_or_else(|| Error::Internal("no interval produced".into()))
}

pub fn bootstrap_ci(corpus: &Corpus, plan: &ResamplingPlan) -> Result<ConfidenceInterval> {
    if plan.mode != Mode::Bootstrap {
        return Err(Error::Config("plan mode is not bootstrap".into()));
    }
    run_plan(corpus, plan, None)
}

pub fn subsample_ci(corpus: &Corpus, plan: &ResamplingPlan, variant: SubsampleVariant) -> Result<ConfidenceInterval> {
    if plan.mode != Mode::Subsample {
        return Err(Error::Config("plan mode is not subsample".into()));
    }
    let plan = ResamplingPlan {
        variant,
        ..plan.clone()
    };
    run_plan(corpus, &plan, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bootstrap_order_statistics() {
        let v: Vec<f64> = (1..=20).rev().map(f64::from).collect();
        assert_eq!(bootstrap_interval(&v).unwrap(), (2.0, 19.0));
        let v: Vec<f64> = (1..=40).map(f64::from).collect();
        assert_eq!(bootstrap_interval(&v).unwrap(), (2.0, 39.0));
        assert_eq!(bootstrap_interval(&[5.0; 20]).unwrap(), (5.0, 5.0));
    }

    #[test]
    fn subsample_hand_calculation() {
        // s̄ = 10, τ = 2000, τ_k = 100, s^k = 10 + (k − 10)/10 for k = 1..20.
        let reps: Vec<(f64, usize)> = (1..=20).map(|k| (10.0 + (k as f64 - 10.0) / 10.0, 100)).collect();
        // B^k = 10·(k − 10)/10 = k − 10, so B₍₂₎ = −8, B₍₁₉₎ = 9; √2000 = 44.72...
        let r = 2000f64.sqrt();
        let (lo, hi) = subsample_interval(10.0, &reps, 2000, SubsampleVariant::AsWritten).unwrap();
        assert!((lo - (10.0 - 9.0 / r)).abs() < 1e-12);
        assert!((hi - (10.0 - 8.0 / r)).abs() < 1e-12);
        let (lo, hi) = subsample_interval(10.0, &reps, 2000, SubsampleVariant::QuantileStandard).unwrap();
        assert!((lo - (10.0 - 9.0 / r)).abs() < 1e-12);
        assert!((hi - (10.0 + 8.0 / r)).abs() < 1e-12);
        let flat = vec![(3.0, 50); 20];
        assert_eq!(
            subsample_interval(3.0, &flat, 1000, SubsampleVariant::AsWritten).unwrap(),
            (3.0, 3.0)
        );
    }

    #[test]
    fn levels_follow_replicates() {
        assert_eq!(Level::from_replicates(20), Some(Level::P90));
        assert_eq!(Level::from_replicates(40), Some(Level::P95));
        assert_eq!(Level::from_replicates(200), Some(Level::P99));
        assert_eq!(Level::from_replicates(30), None);
        let json = r#"{"mode":"subsample","replicates":40,"level":0.9,"base_seed":1,
            "statistic":{"kind":"cosine","a":"x","b":"y"}}"#;
        let plan: ResamplingPlan = serde_json::from_str(json).unwrap();
        assert!(plan.validate().is_err());
        let ok: ResamplingPlan = serde_json::from_str(&json.replace("0.9", "0.95")).unwrap();
        assert_eq!(ok.level().unwrap(), Level::P95);
    }

    #[test]
    fn partition_sizes() {
        let parts = subsample_partition(103, 20, 9).unwrap();
        let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
        assert!(parts.iter().all(|p| p.len() == 5 || p.len() == 6));
        assert!(subsample_partition(5, 20, 1).is_err());
    }

    #[test]
    fn constant_statistic() {
        let corpus = Corpus::from_lines(["a b", "b c", "c a", "a a"]);
        let settings = ResampleSettings {
            mode: Mode::Bootstrap,
            replicates: 20,
            level: Level::P90,
            base_seed: 3,
            variant: SubsampleVariant::AsWritten,
        };
        let fit = |_: &Corpus, _: u64| Embedding::from_rows(vec![("a", vec![1.0])]);
        let five = |_: &Embedding| Ok(5.0);
        let ci = resample(&corpus, &settings, 0, None, fit, &[five]).unwrap();
        assert_eq!((ci[0].lower, ci[0].estimate, ci[0].upper), (5.0, 5.0, 5.0));
        assert_eq!(ci[0].replicate_values.len(), 20);
    }

    #[test]
    fn failure_threshold() {
        let corpus = Corpus::from_lines(["a b"; 30]);
        let settings = ResampleSettings {
            mode: Mode::Subsample,
            replicates: 20,
            level: Level::P90,
            base_seed: 0,
            variant: SubsampleVariant::AsWritten,
        };
        // Encode the replicate seed in the embedding and fail on chosen seeds.
        let fit = |_: &Corpus, seed: u64| Embedding::from_rows(vec![("s", vec![seed as f64 + 1.0])]);
        let fails_on = |bad: u64| {
            move |e: &Embedding| {
                let seed = e.row(0)[0] as u64 - 1;
                if seed <= bad && seed != 99 {
                    Err(Error::MissingToken(format!("seed {seed}")))
                } else {
                    Ok(seed as f64)
                }
            }
        };
        // Replicate seeds are 0..20; the full sample uses seed 99.
        let two = resample(&corpus, &settings, 99, None, fit, &[fails_on(1)]).unwrap();
        assert_eq!(two[0].failures.len(), 2);
        assert_eq!(two[0].replicate_values.iter().filter(|v| v.is_none()).count(), 2);
        let three = resample(&corpus, &settings, 99, None, fit, &[fails_on(2)]);
        assert!(matches!(
            three,
            Err(Error::TooManyFailures {
                failed: 3,
                total: 20,
                ..
            })
        ));
    }
}
