//! Measure word-embedding spaces as geometric objects.
//!
//! * [`embedding`]: load, save, normalize and query vector spaces.
//! * [`trainer`]: deterministic word2vec (CBOW / SGNS) for retraining on
//!   resampled corpora.
//! * [`dimension`]: cultural dimensions from antonym pairs, projections,
//!   angles and explained variance.
//! * [`validation`]: survey weighting and agreement statistics.
//! * [`resampling`]: bootstrap and subsampling confidence intervals.
//! * [`pipeline`]: batch series, comparisons, audits and report rendering.

pub mod dimension;
pub mod embedding;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod resampling;
pub mod trainer;
pub mod validation;

pub use embedding::{Embedding, Format, LoadOptions};
pub use error::{Error, Result};
