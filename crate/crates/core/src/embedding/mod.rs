//! Dense word-embedding spaces: storage, normalization and similarity queries.
//!
//! All downstream geometry reads vectors through [`Embedding`]. Rows are kept
//! in a single contiguous row-major `f64` buffer; token order is the order of
//! the source file, which for word2vec-style files is descending frequency.

mod io;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm};

pub use io::{load_embedding, read_embedding, save_embedding, write_embedding, Format, LoadOptions, LoadReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    dim: usize,
    normalized: bool,
}

impl Embedding {
    /// Builds an embedding from tokens and a row-major matrix.
    ///
    /// Rejects duplicate tokens, ragged or non-finite data and `dim == 0`.
    pub fn new(tokens: Vec<String>, data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimensionality must be positive".into()));
        }
        if data.len() != tokens.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: tokens.len() * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Degenerate(format!(
                "non-finite value in row {} ({:?})",
                pos / dim,
                tokens[pos / dim]
            )));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidToken {
                    token: t.clone(),
                    reason: format!("duplicate token at row {i}"),
                });
            }
        }
        Ok(Embedding {
            tokens,
            index,
            data,
            dim,
            normalized: false,
        })
    }

    /// Builds an embedding from per-token rows.
    pub fn from_rows<S: Into<String>>(rows: impl IntoIterator<Item = (S, Vec<f64>)>) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut data = Vec::new();
        let mut dim = None;
        for (t, v) in rows {
            let t = t.into();
            match dim {
                None => dim = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: v.len(),
                    })
                }
                _ => {}
            }
            tokens.push(t);
            data.extend_from_slice(&v);
        }
        let dim = dim.ok_or_else(|| Error::EmptyVocabulary("no rows supplied".into()))?;
        Embedding::new(tokens, data, dim)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Row-major matrix, `len() * dim()` entries.
    pub fn matrix(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Vocabulary rank of a token (its row index).
    pub fn rank(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// The row for `token`, or [`Error::MissingToken`].
    pub fn vector(&self, token: &str) -> Result<&[f64]> {
        self.rank(token)
            .map(|i| self.row(i))
            .ok_or_else(|| Error::MissingToken(token.to_string()))
    }

    /// The row for `token` scaled to unit length.
    pub fn unit_vector(&self, token: &str) -> Result<Vec<f64>> {
        let v = self.vector(token)?;
        if self.normalized {
            return Ok(v.to_vec());
        }
        linalg::unit(v).ok_or_else(|| Error::ZeroNorm(token.to_string()))
    }

    /// Divides every row by its Euclidean norm.
    pub fn normalize(&self) -> Result<Embedding> {
        let mut out = self.clone();
        for (i, row) in out.data.chunks_exact_mut(self.dim).enumerate() {
            let n = norm(row);
            if n == 0.0 {
                return Err(Error::ZeroNorm(self.tokens[i].clone()));
            }
            row.iter_mut().for_each(|x| *x /= n);
        }
        out.normalized = true;
        Ok(out)
    }

    /// Top `count` tokens by cosine to `query`, skipping `exclude`.
    ///
    /// Ties are broken by vocabulary order. Rows with zero norm are never
    /// returned. `count == 0` yields an empty list.
    pub fn nearest_neighbors(&self, query: &[f64], count: usize, exclude: &[&str]) -> Result<Vec<Neighbor>> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        let qn = norm(query);
        if qn == 0.0 {
            return Err(Error::ZeroNorm("<query>".into()));
        }
        if count == 0 {
            return Ok(Vec::new());
        }
        let skip: HashSet<usize> = exclude.iter().filter_map(|t| self.rank(t)).collect();

        // Min-heap on quality: the root is the weakest retained candidate.
        let mut heap: BinaryHeap<std::cmp::Reverse<Candidate>> = BinaryHeap::with_capacity(count + 1);
        for (i, row) in self.rows().enumerate() {
            if skip.contains(&i) {
                continue;
            }
            let rn = if self.normalized { 1.0 } else { norm(row) };
            if rn == 0.0 {
                continue;
            }
            let cand = Candidate {
                score: linalg::clamp_unit(dot(query, row) / (qn * rn)),
                index: i,
            };
            if heap.len() < count {
                heap.push(std::cmp::Reverse(cand));
            } else if let Some(worst) = heap.peek() {
                if cand > worst.0 {
                    heap.pop();
                    heap.push(std::cmp::Reverse(cand));
                }
            }
        }
        let mut best: Vec<Candidate> = heap.into_iter().map(|r| r.0).collect();
        best.sort_by(|a, b| b.cmp(a));
        Ok(best
            .into_iter()
            .map(|c| Neighbor {
                token: self.tokens[c.index].clone(),
                cosine: c.score,
            })
            .collect())
    }

    /// 3CosAdd analogy: the token closest to `unit(c) - unit(a) + unit(b)`,
    /// never one of `a`, `b`, `c`.
    ///
    /// `analogy("man", "woman", "king")` asks "man is to woman as king is to ?".
    pub fn analogy(&self, a: &str, b: &str, c: &str) -> Result<Neighbor> {
        self.analogy_top(a, b, c, 1)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::EmptyVocabulary("no candidate besides the query tokens".into()))
    }

    pub fn analogy_top(&self, a: &str, b: &str, c: &str, count: usize) -> Result<Vec<Neighbor>> {
        let va = self.unit_vector(a)?;
        let vb = self.unit_vector(b)?;
        let vc = self.unit_vector(c)?;
        let target: Vec<f64> = (0..self.dim).map(|j| vc[j] - va[j] + vb[j]).collect();
        let target = linalg::unit(&target).ok_or_else(|| Error::ZeroNorm("analogy target".into()))?;
        self.nearest_neighbors(&target, count, &[a, b, c])
    }

    /// Averages the unit vectors of whichever `tokens` are present and
    /// renormalizes the mean.
    pub fn entity_vector<S: AsRef<str>>(&self, tokens: &[S]) -> Result<EntityVector> {
        let mut acc = vec![0.0; self.dim];
        let mut found = Vec::new();
        let mut missing = Vec::new();
        for t in tokens {
            let t = t.as_ref();
            match self.unit_vector(t) {
                Ok(u) => {
                    linalg::axpy(&mut acc, 1.0, &u);
                    found.push(t.to_string());
                }
                Err(Error::MissingToken(_)) => missing.push(t.to_string()),
                Err(e) => return Err(e),
            }
        }
        if found.is_empty() {
            return Err(Error::MissingToken(missing.join(", ")));
        }
        let n = found.len() as f64;
        acc.iter_mut().for_each(|x| *x /= n);
        let vector = linalg::unit(&acc).ok_or_else(|| Error::ZeroNorm(format!("mean of {}", found.join("+"))))?;
        Ok(EntityVector { vector, found, missing })
    }

    /// Keeps the first `n` rows.
    pub fn truncated(&self, n: usize) -> Embedding {
        let n = n.min(self.len());
        let tokens = self.tokens[..n].to_vec();
        let index = tokens.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Embedding {
            tokens,
            index,
            data: self.data[..n * self.dim].to_vec(),
            dim: self.dim,
            normalized: self.normalized,
        }
    }

    /// An embedding with no tokens.
    pub fn empty(dim: usize) -> Embedding {
        Embedding {
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            dim,
            normalized: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub token: String,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityVector {
    pub vector: Vec<f64>,
    pub found: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Greater = better: higher score, then earlier vocabulary position.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.index.cmp(&self.index))
    }
}
