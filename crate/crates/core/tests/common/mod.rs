//! Brute-force reference implementations and fixture generators shared by
//! the integration tests. Everything here goes through nalgebra rather than
//! the library's own linear algebra.

#![allow(dead_code)]

use std::collections::BTreeMap;

use culturegeo::trainer::{Corpus, CorpusBuilder};
use culturegeo::validation::{Cell, Education, Race, Response, Scale, Sex, SurveyDataset};
use culturegeo::Embedding;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v = DVector::from_vec(gaussian_vector(rng, k));
    let n = v.norm();
    (v / n).iter().copied().collect()
}

/// Gaussian rows named `w0..w{n-1}`.
pub fn random_embedding(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Embedding {
    let rows: Vec<(String, Vec<f64>)> = (0..n).map(|i| (format!("w{i}"), gaussian_vector(rng, k))).collect();
    Embedding::from_rows(rows).unwrap()
}

pub fn vector_of(emb: &Embedding, token: &str) -> DVector<f64> {
    DVector::from_column_slice(emb.vector(token).unwrap())
}

pub fn unit_of(emb: &Embedding, token: &str) -> DVector<f64> {
    vector_of(emb, token).normalize()
}

/// Embedding as an `n × k` matrix.
pub fn matrix_of(emb: &Embedding) -> DMatrix<f64> {
    DMatrix::from_row_slice(emb.len(), emb.dim(), emb.matrix())
}

pub fn oracle_dimension(emb: &Embedding, pairs: &[(String, String)]) -> DVector<f64> {
    let mut acc = DVector::zeros(emb.dim());
    for (a, b) in pairs {
        acc += unit_of(emb, a) - unit_of(emb, b);
    }
    (acc / pairs.len() as f64).normalize()
}

pub fn oracle_cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(b) / (a.norm() * b.norm())
}

pub fn oracle_degrees(cosine: f64) -> f64 {
    cosine.clamp(-1.0, 1.0).acos() * 180.0 / std::f64::consts::PI
}

fn centered(emb: &Embedding) -> DMatrix<f64> {
    let mut m = matrix_of(emb);
    let mean = m.row_mean();
    for mut row in m.row_iter_mut() {
        row -= &mean;
    }
    m
}

/// Share of centered sum of squares along `d`.
pub fn oracle_variance(emb: &Embedding, d: &DVector<f64>) -> f64 {
    let m = centered(emb);
    let proj = &m * d.normalize();
    proj.norm_squared() / m.norm_squared()
}

/// Largest eigenvalue of the centered scatter matrix over its trace, and
/// the matching eigenvector.
pub fn oracle_top_pc(emb: &Embedding) -> (f64, DVector<f64>) {
    let m = centered(emb);
    let s = m.transpose() * &m;
    let trace = s.trace();
    let eig = SymmetricEigen::new(s);
    let (i, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    (lambda / trace, eig.eigenvectors.column(i).into_owned())
}

/// Every token's cosine to `query`, best first, ties by vocabulary order.
pub fn oracle_neighbors(emb: &Embedding, query: &DVector<f64>, exclude: &[&str]) -> Vec<(String, f64)> {
    let mut scored: Vec<(usize, f64)> = emb
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| !exclude.contains(&t.as_str()))
        .map(|(i, t)| (i, oracle_cosine(query, &vector_of(emb, t))))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().map(|(i, c)| (emb.tokens()[i].clone(), c)).collect()
}

/// `a : b :: c : ?` by maximizing cosine with `c − a + b` (unit vectors).
pub fn oracle_analogy(emb: &Embedding, a: &str, b: &str, c: &str) -> Vec<(String, f64)> {
    let target = unit_of(emb, c) - unit_of(emb, a) + unit_of(emb, b);
    oracle_neighbors(emb, &target, &[a, b, c])
}

/// Two disjoint topic vocabularies; each sentence draws only from one topic.
pub fn two_topic_corpus(seed: u64, sentences: usize, length: usize, topic_size: usize) -> Corpus {
    let mut rng = rng(seed);
    let mut b = CorpusBuilder::new();
    for s in 0..sentences {
        let topic = if s % 2 == 0 { "a" } else { "b" };
        let line: Vec<String> = (0..length)
            .map(|_| format!("{topic}{}", rng.random_range(0..topic_size)))
            .collect();
        b.push(&line, 1).unwrap();
    }
    b.build()
}

/// Mean pairwise cosine within topics and across them.
pub fn topic_separation(emb: &Embedding, topic_size: usize) -> (f64, f64) {
    let units = |p: &str| -> Vec<DVector<f64>> {
        (0..topic_size)
            .filter_map(|i| emb.vector(&format!("{p}{i}")).ok())
            .map(|v| DVector::from_column_slice(v).normalize())
            .collect()
    };
    let (a, b) = (units("a"), units("b"));
    let mut within = (0.0, 0usize);
    for group in [&a, &b] {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                within.0 += group[i].dot(&group[j]);
                within.1 += 1;
            }
        }
    }
    let mut across = (0.0, 0usize);
    for x in &a {
        for y in &b {
            across.0 += x.dot(y);
            across.1 += 1;
        }
    }
    (within.0 / within.1 as f64, across.0 / across.1 as f64)
}

pub const FIXTURE_CELL: Cell = Cell {
    sex: Sex::Female,
    education: Education::Bachelor,
    race: Race::Other,
};

/// A gender-only survey: item `i` is rated `base_i + r` by respondent `r`,
/// so any two distinct bases are significantly different.
pub fn aligned_survey(items: &[(&str, f64)], respondents: usize) -> SurveyDataset {
    let mut demo = BTreeMap::new();
    let mut responses = Vec::new();
    for r in 0..respondents {
        let id = format!("r{r}");
        demo.insert(id.clone(), FIXTURE_CELL);
        for (item, base) in items {
            responses.push(Response {
                respondent_id: id.clone(),
                item: item.to_string(),
                scale: Scale::Gender,
                rating: base + r as f64,
            });
        }
    }
    SurveyDataset::new(responses, demo).unwrap()
}

/// Unit vectors `(x, √(1−x²))` with `x` linear in the item's value, so the
/// projection onto the first axis reproduces the ratings up to an affine map.
pub fn aligned_embedding(items: &[(&str, f64)]) -> Embedding {
    Embedding::from_rows(items.iter().map(|(t, v)| {
        let x = (v - 50.0) / 60.0;
        (t.to_string(), vec![x, (1.0 - x * x).sqrt()])
    }))
    .unwrap()
}
