//! Share of embedding variance along a direction, and the top principal
//! component by power iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CulturalDimension;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

const POWER_TOLERANCE: f64 = 1e-7;
const POWER_MAX_ITERATIONS: usize = 200_000;
const CHUNK_ROWS: usize = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    /// Subtract the mean row first.
    #[default]
    Centered,
    Uncentered,
}

fn mean_row(emb: &Embedding) -> Vec<f64> {
    let mut mean = vec![0.0; emb.dim()];
    for row in emb.rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    let n = emb.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

fn offset(emb: &Embedding, centering: Centering) -> Vec<f64> {
    match centering {
        Centering::Centered => mean_row(emb),
        Centering::Uncentered => vec![0.0; emb.dim()],
    }
}

fn check_rows(emb: &Embedding) -> Result<()> {
    if emb.len() < 2 {
        return Err(Error::Degenerate("variance needs at least two rows".into()));
    }
    Ok(())
}

/// `Σ((xᵢ−x̄)·d)² / Σ‖xᵢ−x̄‖²` (with `x̄ = 0` when uncentered).
pub fn variance_explained(emb: &Embedding, dim: &CulturalDimension, centering: Centering) -> Result<f64> {
    check_rows(emb)?;
    if emb.dim() != dim.dim() {
        return Err(Error::DimensionMismatch {
            expected: emb.dim(),
            found: dim.dim(),
        });
    }
    let mu = offset(emb, centering);
    let d = dim.vector();
    let mu_d = dot(&mu, d);
    let (along, total) = emb
        .matrix()
        .par_chunks(CHUNK_ROWS * emb.dim())
        .map(|chunk| {
            let mut along = 0.0;
            let mut total = 0.0;
            for row in chunk.chunks_exact(emb.dim()) {
                let p = dot(row, d) - mu_d;
                along += p * p;
                total += row.iter().zip(&mu).map(|(x, m)| (x - m) * (x - m)).sum::<f64>();
            }
            (along, total)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, t), (ca, ct)| (a + ca, t + ct));
    if total == 0.0 {
        return Err(Error::Degenerate("all rows are identical (zero total variance)".into()));
    }
    Ok(along / total)
}

/// Scatter matrix `Σ (xᵢ−x̄)(xᵢ−x̄)ᵀ`, row-major `k × k`. Chunk partial sums are
/// reduced in a fixed order.
fn scatter_matrix(emb: &Embedding, mu: &[f64]) -> Vec<f64> {
    let k = emb.dim();
    let partials: Vec<Vec<f64>> = emb
        .matrix()
        .par_chunks(CHUNK_ROWS * k)
        .map(|chunk| {
            let mut s = vec![0.0; k * k];
            let mut c = vec![0.0; k];
            for row in chunk.chunks_exact(k) {
                for (cj, (x, m)) in c.iter_mut().zip(row.iter().zip(mu)) {
                    *cj = x - m;
                }
                for a in 0..k {
                    let ca = c[a];
                    let dst = &mut s[a * k + a..a * k + k];
                    for (d, cb) in dst.iter_mut().zip(&c[a..]) {
                        *d += ca * cb;
                    }
                }
            }
            s
        })
        .collect();
    let mut s = vec![0.0; k * k];
    for p in partials {
        for (x, y) in s.iter_mut().zip(p) {
            *x += y;
        }
    }
    for a in 0..k {
        for b in 0..a {
            s[a * k + b] = s[b * k + a];
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalComponent {
    /// Unit eigenvector of the scatter matrix.
    pub vector: Vec<f64>,
    /// Its eigenvalue over the trace.
    pub variance_fraction: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Top principal component by power iteration on the `k × k` scatter matrix.
///
/// Stops when `‖Sv − λv‖ ≤ 1e-7·λ`.
pub fn top_component(emb: &Embedding, centering: Centering) -> Result<PrincipalComponent> {
    check_rows(emb)?;
    let k = emb.dim();
    let mu = offset(emb, centering);
    let s = scatter_matrix(emb, &mu);
    let trace: f64 = (0..k).map(|i| s[i * k + i]).sum();
    if trace == 0.0 {
        return Err(Error::Degenerate("all rows are identical (zero total variance)".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut w = vec![0.0; k];
    let mut lambda = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < POWER_MAX_ITERATIONS {
        iterations += 1;
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = dot(&s[i * k..(i + 1) * k], &v);
        }
        lambda = dot(&v, &w);
        let residual = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let wn = norm(&w);
        if wn == 0.0 {
            break;
        }
        if residual <= POWER_TOLERANCE * lambda.abs() {
            converged = true;
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Ok(PrincipalComponent {
        vector: v,
        variance_fraction: lambda / trace,
        iterations,
        converged,
    })
}

/// Fraction of centered variance captured by the top principal component.
pub fn top_component_variance(emb: &Embedding) -> Result<f64> {
    Ok(top_component(emb, Centering::Centered)?.variance_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_variance_along_d() {
        let d = [0.6, 0.8, 0.0];
        let rows: Vec<(String, Vec<f64>)> = (0..6)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                (format!("w{i}"), d.iter().map(|x| x * s).collect())
            })
            .collect();
        let emb = Embedding::from_rows(rows).unwrap();
        let dim = CulturalDimension::from_vector("d", &d).unwrap();
        let v = variance_explained(&emb, &dim, Centering::Centered).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let pc = top_component(&emb, Centering::Centered).unwrap();
        assert!(pc.converged);
        assert!((pc.variance_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let emb = Embedding::from_rows(vec![("a", vec![1.0, 2.0]), ("b", vec![1.0, 2.0])]).unwrap();
        let dim = CulturalDimension::from_vector("d", &[1.0, 0.0]).unwrap();
        assert!(matches!(
            variance_explained(&emb, &dim, Centering::Centered),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(top_component_variance(&emb), Err(Error::Degenerate(_))));
        let single = Embedding::from_rows(vec![("a", vec![1.0, 2.0])]).unwrap();
        assert!(top_component_variance(&single).is_err());
    }

    #[test]
    fn uncentered_differs_from_centered() {
        let emb = Embedding::from_rows(vec![("a", vec![1.0, 0.1]), ("b", vec![1.0, -0.1])]).unwrap();
        let x = CulturalDimension::from_vector("x", &[1.0, 0.0]).unwrap();
        assert_eq!(variance_explained(&emb, &x, Centering::Centered).unwrap(), 0.0);
        assert!(variance_explained(&emb, &x, Centering::Uncentered).unwrap() > 0.9);
    }
}
