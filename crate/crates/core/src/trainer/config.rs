use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// Continuous bag of words: predict the center from the averaged context.
    Cbow,
    /// Skip-gram with negative sampling: predict each context from the center.
    Sgns,
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cbow" => Ok(Architecture::Cbow),
            "sgns" | "skipgram" | "skip-gram" | "sg" => Ok(Architecture::Sgns),
            other => Err(Error::Config(format!("unknown architecture {other:?}"))),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Cbow => "cbow",
            Architecture::Sgns => "sgns",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub dim: usize,
    pub window: usize,
    pub architecture: Architecture,
    pub negative: usize,
    pub epochs: usize,
    pub min_count: u64,
    /// Frequent-word downsampling threshold; 0 disables dropping.
    pub subsample_t: f64,
    pub initial_lr: f64,
    pub seed: u64,
    pub workers: usize,
    /// Shrink each window uniformly in `[1, window]`.
    pub dynamic_window: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dim: 300,
            window: 8,
            architecture: Architecture::Sgns,
            negative: 5,
            epochs: 5,
            min_count: 5,
            subsample_t: 1e-3,
            initial_lr: 0.025,
            seed: 1,
            workers: 1,
            dynamic_window: true,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::Config(msg.into())) };
        check(self.dim >= 1, "dim must be >= 1")?;
        check(self.window >= 1, "window must be >= 1")?;
        check(self.negative >= 1, "negative must be >= 1")?;
        check(self.epochs >= 1, "epochs must be >= 1")?;
        check(self.workers >= 1, "workers must be >= 1")?;
        check(
            self.subsample_t >= 0.0 && self.subsample_t.is_finite(),
            "subsample_t must be finite and >= 0",
        )?;
        check(
            self.initial_lr > 0.0 && self.initial_lr.is_finite(),
            "initial_lr must be finite and > 0",
        )
    }

    /// Single-worker runs are bit-reproducible for a fixed seed.
    pub fn is_deterministic(&self) -> bool {
        self.workers == 1
    }

    /// Applies `key=value` lines (`#` comments, blank lines ignored) on top
    /// of `self`.
    pub fn apply_key_values(mut self, text: &str) -> Result<Self> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}", i + 1), format!("expected key=value, got {line:?}")))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::parse(format!("line {}", i + 1), e.to_string()))?;
        }
        Ok(self)
    }

    /// Sets one field by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
        }
        match key {
            "dim" | "size" => self.dim = num(key, value)?,
            "window" => self.window = num(key, value)?,
            "architecture" | "arch" => self.architecture = value.parse()?,
            "negative" => self.negative = num(key, value)?,
            "epochs" | "iter" => self.epochs = num(key, value)?,
            "min_count" => self.min_count = num(key, value)?,
            "subsample_t" | "sample" => self.subsample_t = num(key, value)?,
            "initial_lr" | "alpha" => self.initial_lr = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" | "threads" => self.workers = num(key, value)?,
            "dynamic_window" => self.dynamic_window = num(key, value)?,
            other => return Err(Error::Config(format!("unknown training option {other:?}"))),
        }
        Ok(())
    }
}
