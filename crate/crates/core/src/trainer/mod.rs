//! Desk-scale word2vec: CBOW and skip-gram with negative sampling.
//!
//! A single worker is fully deterministic for a fixed seed. With more workers
//! the parameter matrices are shared between threads without locking
//! (relaxed atomic loads and stores per row), so results vary run to run.
//!
//! Weighted records are unrolled: a record with count `c` is walked `c`
//! times in a row, which visits exactly the same (center, context) pairs as
//! `c` consecutive plain copies.

mod config;
mod corpus;
mod negative;
mod vocab;

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::Embedding;
use crate::error::{Error, Result};

pub use config::{Architecture, TrainingConfig};
pub use corpus::{Corpus, CorpusBuilder, CorpusFormat, Record};
pub use negative::{NegativeTable, TABLE_SIZE};
pub use vocab::{build_vocab, VocabCounts};

const MIN_LR_FRACTION: f64 = 1e-4;

const STREAM_INIT: u64 = 0;
const STREAM_SCHEDULE: u64 = 1;
const STREAM_NEGATIVE: u64 = 2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Result of a training run: input vectors, context vectors and telemetry.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub vocab: VocabCounts,
    dim: usize,
    input: Vec<f32>,
    output: Vec<f32>,
    /// Mean binary log-loss per prediction, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

impl TrainedModel {
    /// The word (input-side) vectors, unnormalized, in vocabulary order.
    pub fn embedding(&self) -> Result<Embedding> {
        self.to_embedding(&self.input)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn to_embedding(&self, m: &[f32]) -> Result<Embedding> {
        Embedding::new(
            self.vocab.tokens().to_vec(),
            m.iter().map(|&x| x as f64).collect(),
            self.dim,
        )
    }
}

/// The context (output-side) matrix over the same vocabulary.
pub fn context_vectors(model: &TrainedModel) -> Result<Embedding> {
    model.to_embedding(&model.output)
}

/// One center position and the context tokens paired with it.
#[derive(Debug)]
pub struct Visit<'a> {
    /// Index of the center among the record's in-vocabulary tokens.
    pub position: usize,
    pub center: u32,
    pub contexts: &'a [u32],
}

/// Expands records into (center, contexts) visits: drops out-of-vocabulary
/// tokens, applies frequent-word downsampling and draws window sizes.
pub struct Walker<'a> {
    vocab: &'a VocabCounts,
    window: usize,
    dynamic: bool,
    keep: Option<Vec<f64>>,
    rng: ChaCha8Rng,
    ids: Vec<u32>,
    kept: Vec<(u32, usize)>,
    contexts: Vec<u32>,
}

impl<'a> Walker<'a> {
    fn new(vocab: &'a VocabCounts, config: &TrainingConfig, rng: ChaCha8Rng) -> Self {
        let keep = (config.subsample_t > 0.0).then(|| {
            let threshold = config.subsample_t * vocab.total() as f64;
            vocab
                .counts()
                .iter()
                .map(|&c| ((c as f64 / threshold).sqrt() + 1.0) * threshold / c as f64)
                .collect()
        });
        Walker {
            vocab,
            window: config.window,
            dynamic: config.dynamic_window,
            keep,
            rng,
            ids: Vec::new(),
            kept: Vec::new(),
            contexts: Vec::new(),
        }
    }

    /// Walks one pass over `record`; returns the number of in-vocabulary
    /// tokens (visited or downsampled).
    pub fn walk(&mut self, record: &Record, mut f: impl FnMut(Visit<'_>)) -> usize {
        self.ids.clear();
        self.ids
            .extend(record.tokens.iter().filter_map(|&t| self.vocab.map_lexicon_id(t)));
        self.kept.clear();
        for (pos, &id) in self.ids.iter().enumerate() {
            if let Some(keep) = &self.keep {
                let p = keep[id as usize];
                if p < 1.0 && p < self.rng.random::<f64>() {
                    continue;
                }
            }
            self.kept.push((id, pos));
        }
        for i in 0..self.kept.len() {
            let span = if self.dynamic {
                self.rng.random_range(1..=self.window)
            } else {
                self.window
            };
            let lo = i.saturating_sub(span);
            let hi = (i + span).min(self.kept.len() - 1);
            self.contexts.clear();
            for j in lo..=hi {
                if j != i {
                    self.contexts.push(self.kept[j].0);
                }
            }
            let (center, position) = self.kept[i];
            f(Visit {
                position,
                center,
                contexts: &self.contexts,
            });
        }
        self.ids.len()
    }
}

/// Calls `f(epoch, visit)` for every visit a single-worker training run with
/// this configuration performs, in order.
pub fn for_each_visit(
    corpus: &Corpus,
    config: &TrainingConfig,
    mut f: impl FnMut(usize, &Visit<'_>),
) -> Result<VocabCounts> {
    config.validate()?;
    let vocab = build_vocab(corpus, config.min_count)?;
    let mut walker = Walker::new(&vocab, config, rng_for(config.seed, STREAM_SCHEDULE));
    for epoch in 0..config.epochs {
        for record in corpus.records() {
            for _ in 0..record.count {
                walker.walk(record, |v| f(epoch, &v));
            }
        }
    }
    drop(walker);
    Ok(vocab)
}

/// Row access to the two parameter matrices.
trait Params {
    fn read_input(&mut self, row: u32, out: &mut [f32]);
    fn add_input(&mut self, row: u32, delta: &[f32]);
    fn with_output<R>(&mut self, row: u32, f: impl FnOnce(&mut [f32]) -> R) -> R;
}

struct DirectParams<'a> {
    input: &'a mut [f32],
    output: &'a mut [f32],
    dim: usize,
}

impl Params for DirectParams<'_> {
    fn read_input(&mut self, row: u32, out: &mut [f32]) {
        let s = row as usize * self.dim;
        out.copy_from_slice(&self.input[s..s + self.dim]);
    }

    fn add_input(&mut self, row: u32, delta: &[f32]) {
        let s = row as usize * self.dim;
        for (x, d) in self.input[s..s + self.dim].iter_mut().zip(delta) {
            *x += d;
        }
    }

    fn with_output<R>(&mut self, row: u32, f: impl FnOnce(&mut [f32]) -> R) -> R {
        let s = row as usize * self.dim;
        f(&mut self.output[s..s + self.dim])
    }
}

struct SharedParams<'a> {
    input: &'a [AtomicU32],
    output: &'a [AtomicU32],
    dim: usize,
    scratch: Vec<f32>,
}

impl Params for SharedParams<'_> {
    fn read_input(&mut self, row: u32, out: &mut [f32]) {
        let s = row as usize * self.dim;
        for (o, a) in out.iter_mut().zip(&self.input[s..s + self.dim]) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add_input(&mut self, row: u32, delta: &[f32]) {
        let s = row as usize * self.dim;
        for (a, d) in self.input[s..s + self.dim].iter().zip(delta) {
            let v = f32::from_bits(a.load(Ordering::Relaxed)) + d;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn with_output<R>(&mut self, row: u32, f: impl FnOnce(&mut [f32]) -> R) -> R {
        let s = row as usize * self.dim;
        let cells = &self.output[s..s + self.dim];
        for (o, a) in self.scratch.iter_mut().zip(cells) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
        let r = f(&mut self.scratch);
        for (a, v) in cells.iter().zip(&self.scratch) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
        r
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Per-worker SGD state: the negative sampler and scratch buffers.
struct Kernel<'a> {
    arch: Architecture,
    negative: usize,
    table: &'a NegativeTable,
    rng: ChaCha8Rng,
    hidden: Vec<f32>,
    row: Vec<f32>,
    grad: Vec<f32>,
    loss: f64,
    predictions: u64,
}

impl<'a> Kernel<'a> {
    fn new(config: &TrainingConfig, table: &'a NegativeTable, rng: ChaCha8Rng) -> Self {
        Kernel {
            arch: config.architecture,
            negative: config.negative,
            table,
            rng,
            hidden: vec![0.0; config.dim],
            row: vec![0.0; config.dim],
            grad: vec![0.0; config.dim],
            loss: 0.0,
            predictions: 0,
        }
    }

    /// One logistic prediction of `target` from `hidden`; accumulates the
    /// input gradient into `grad` and updates the output row in place.
    fn predict<P: Params>(&mut self, params: &mut P, target: u32, label: f32, lr: f32) {
        let hidden = &self.hidden;
        let grad = &mut self.grad;
        let f = params.with_output(target, |out| {
            let f: f32 = hidden.iter().zip(out.iter()).map(|(h, o)| h * o).sum();
            let sig = 1.0 / (1.0 + (-f).exp());
            let g = (label - sig) * lr;
            for ((gr, o), h) in grad.iter_mut().zip(out.iter_mut()).zip(hidden) {
                *gr += g * *o;
                *o += g * h;
            }
            f
        });
        let f = f as f64;
        self.loss += if label > 0.5 { softplus(-f) } else { softplus(f) };
        self.predictions += 1;
    }

    fn predict_with_negatives<P: Params>(&mut self, params: &mut P, positive: u32, lr: f32) {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
        self.predict(params, positive, 1.0, lr);
        for _ in 0..self.negative {
            let t = self.table.sample(&mut self.rng);
            if t == positive {
                continue;
            }
            self.predict(params, t, 0.0, lr);
        }
    }

    fn visit<P: Params>(&mut self, params: &mut P, center: u32, contexts: &[u32], lr: f32) {
        if contexts.is_empty() {
            return;
        }
        match self.arch {
            Architecture::Sgns => {
                for &c in contexts {
                    params.read_input(center, &mut self.hidden);
                    self.predict_with_negatives(params, c, lr);
                    params.add_input(center, &self.grad);
                }
            }
            Architecture::Cbow => {
                self.hidden.iter_mut().for_each(|h| *h = 0.0);
                for &c in contexts {
                    params.read_input(c, &mut self.row);
                    for (h, r) in self.hidden.iter_mut().zip(&self.row) {
                        *h += r;
                    }
                }
                let inv = 1.0 / contexts.len() as f32;
                self.hidden.iter_mut().for_each(|h| *h *= inv);
                self.predict_with_negatives(params, center, lr);
                for &c in contexts {
                    params.add_input(c, &self.grad);
                }
            }
        }
    }

    fn take_epoch_stats(&mut self) -> (f64, u64) {
        let s = (self.loss, self.predictions);
        self.loss = 0.0;
        self.predictions = 0;
        s
    }
}

#[inline]
fn learning_rate(initial: f64, processed: u64, planned: u64) -> f32 {
    let frac = 1.0 - processed as f64 / planned.max(1) as f64;
    (initial * frac.max(MIN_LR_FRACTION)) as f32
}

fn check_finite(m: impl IntoIterator<Item = f32>, what: &str, epoch: usize) -> Result<()> {
    if m.into_iter().any(|x| !x.is_finite()) {
        return Err(Error::Diverged(format!(
            "non-finite {what} parameter after epoch {}; lower initial_lr",
            epoch + 1
        )));
    }
    Ok(())
}

/// Trains word vectors on `corpus`.
pub fn train(corpus: &Corpus, config: &TrainingConfig) -> Result<TrainedModel> {
    config.validate()?;
    let vocab = build_vocab(corpus, config.min_count)?;
    let dim = config.dim;
    let n = vocab.len();

    let mut init_rng = rng_for(config.seed, STREAM_INIT);
    let input: Vec<f32> = (0..n * dim)
        .map(|_| (init_rng.random::<f32>() - 0.5) / dim as f32)
        .collect();
    let output = vec![0.0f32; n * dim];

    let table = NegativeTable::new(vocab.counts());
    let per_epoch: u64 = corpus
        .records()
        .iter()
        .map(|r| {
            let in_vocab = r.tokens.iter().filter(|&&t| vocab.map_lexicon_id(t).is_some()).count();
            in_vocab as u64 * r.count
        })
        .sum();
    let planned = per_epoch * config.epochs as u64;

    let (input, output, epoch_losses) = if config.is_deterministic() {
        train_single(corpus, config, &vocab, &table, planned, input, output)?
    } else {
        train_parallel(corpus, config, &vocab, &table, planned, input, output)?
    };
    Ok(TrainedModel {
        vocab,
        dim,
        input,
        output,
        epoch_losses,
    })
}

type Trained = (Vec<f32>, Vec<f32>, Vec<f64>);

fn train_single(
    corpus: &Corpus,
    config: &TrainingConfig,
    vocab: &VocabCounts,
    table: &NegativeTable,
    planned: u64,
    mut input: Vec<f32>,
    mut output: Vec<f32>,
) -> Result<Trained> {
    let mut walker = Walker::new(vocab, config, rng_for(config.seed, STREAM_SCHEDULE));
    let mut kernel = Kernel::new(config, table, rng_for(config.seed, STREAM_NEGATIVE));
    let mut losses = Vec::with_capacity(config.epochs);
    let mut processed = 0u64;
    for epoch in 0..config.epochs {
        let mut params = DirectParams {
            input: &mut input,
            output: &mut output,
            dim: config.dim,
        };
        for record in corpus.records() {
            for _ in 0..record.count {
                let base = processed;
                let seen = walker.walk(record, |v| {
                    let lr = learning_rate(config.initial_lr, base + v.position as u64, planned);
                    kernel.visit(&mut params, v.center, v.contexts, lr);
                });
                processed += seen as u64;
            }
        }
        check_finite(input.iter().copied(), "input", epoch)?;
        check_finite(output.iter().copied(), "context", epoch)?;
        let (loss, count) = kernel.take_epoch_stats();
        losses.push(if count > 0 { loss / count as f64 } else { 0.0 });
    }
    Ok((input, output, losses))
}

fn train_parallel(
    corpus: &Corpus,
    config: &TrainingConfig,
    vocab: &VocabCounts,
    table: &NegativeTable,
    planned: u64,
    input: Vec<f32>,
    output: Vec<f32>,
) -> Result<Trained> {
    let to_atomic = |v: Vec<f32>| -> Vec<AtomicU32> { v.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect() };
    let input = to_atomic(input);
    let output = to_atomic(output);
    let progress = AtomicU64::new(0);

    let records = corpus.records();
    let workers = config.workers.min(records.len().max(1));
    let chunk = records.len().div_ceil(workers).max(1);
    let mut states: Vec<(Walker, Kernel)> = (0..workers)
        .map(|w| {
            let seed = config.seed.wrapping_add(w as u64);
            (
                Walker::new(vocab, config, rng_for(seed, STREAM_SCHEDULE)),
                Kernel::new(config, table, rng_for(seed, STREAM_NEGATIVE)),
            )
        })
        .collect();

    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        std::thread::scope(|scope| {
            for (slice, (walker, kernel)) in records.chunks(chunk).zip(states.iter_mut()) {
                let (input, output, progress) = (&input, &output, &progress);
                scope.spawn(move || {
                    let mut params = SharedParams {
                        input,
                        output,
                        dim: config.dim,
                        scratch: vec![0.0; config.dim],
                    };
                    for record in slice {
                        for _ in 0..record.count {
                            let base = progress.load(Ordering::Relaxed);
                            let seen = walker.walk(record, |v| {
                                let lr = learning_rate(config.initial_lr, base + v.position as u64, planned);
                                kernel.visit(&mut params, v.center, v.contexts, lr);
                            });
                            progress.fetch_add(seen as u64, Ordering::Relaxed);
                        }
                    }
                });
            }
        });
        let load = |m: &[AtomicU32]| {
            m.iter()
                .map(|a| f32::from_bits(a.load(Ordering::Relaxed)))
                .collect::<Vec<_>>()
        };
        check_finite(load(&input), "input", epoch)?;
        check_finite(load(&output), "context", epoch)?;
        let (mut loss, mut count) = (0.0, 0u64);
        for (_, k) in states.iter_mut() {
            let (l, c) = k.take_epoch_stats();
            loss += l;
            count += c;
        }
        losses.push(if count > 0 { loss / count as f64 } else { 0.0 });
    }
    drop(states);
    let unwrap = |m: Vec<AtomicU32>| m.into_iter().map(|a| f32::from_bits(a.into_inner())).collect();
    Ok((unwrap(input), unwrap(output), losses))
}
