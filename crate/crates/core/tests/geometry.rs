mod common;

use common::*;
use culturegeo::dimension::{
    build_dimension, dimension_angle, project, project_all, top_component, top_component_variance, variance_explained,
    Angle, BuildOptions, Centering, CulturalDimension, DimensionSpec,
};
use culturegeo::Embedding;
use nalgebra::DVector;
use proptest::prelude::*;

fn random_spec(rng: &mut rand_chacha::ChaCha8Rng, n: usize, pairs: usize) -> (DimensionSpec, Vec<(String, String)>) {
    use rand::seq::index::sample;
    let picks = sample(rng, n, 2 * pairs).into_vec();
    let named: Vec<(String, String)> = picks
        .chunks(2)
        .map(|c| (format!("w{}", c[0]), format!("w{}", c[1])))
        .collect();
    let refs: Vec<(&str, &str)> = named.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    (DimensionSpec::new("d", &refs).unwrap(), named)
}

fn max_abs_diff(a: &[f64], b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn dimension_and_projection_match_oracle() {
    let mut rng = rng(11);
    for case in 0..20 {
        let (n, k) = (40 + case * 7, 5 + case);
        let emb = random_embedding(&mut rng, n, k);
        let (spec, named) = random_spec(&mut rng, n, 1 + case % 6);
        let dim = build_dimension(&emb, &spec, BuildOptions::default()).unwrap();
        let expected = oracle_dimension(&emb, &named);
        assert!(max_abs_diff(dim.vector(), &expected) < 1e-10, "case {case}");

        for (token, p) in emb.tokens().iter().zip(project_all(&emb, &dim).unwrap()) {
            let o = oracle_cosine(&vector_of(&emb, token), &expected);
            assert!((project(&emb, token, &dim).unwrap() - o).abs() < 1e-10);
            assert!((p - o).abs() < 1e-10);
        }
    }
}

#[test]
fn angle_and_variance_match_oracle() {
    let mut rng = rng(12);
    for case in 0..15 {
        let (n, k) = (60 + 10 * case, 4 + 3 * case);
        let emb = random_embedding(&mut rng, n, k);
        let (sa, na) = random_spec(&mut rng, n, 3);
        let (sb, nb) = random_spec(&mut rng, n, 2);
        let a = build_dimension(&emb, &sa, BuildOptions::default()).unwrap();
        let b = build_dimension(&emb, &sb, BuildOptions::default()).unwrap();
        let cos = oracle_cosine(&oracle_dimension(&emb, &na), &oracle_dimension(&emb, &nb));
        let angle = dimension_angle(&a, &b).unwrap();
        assert!((angle.cosine - cos).abs() < 1e-10);
        assert!((angle.degrees - oracle_degrees(cos)).abs() < 1e-10);

        let ve = variance_explained(&emb, &a, Centering::Centered).unwrap();
        assert!((ve - oracle_variance(&emb, &oracle_dimension(&emb, &na))).abs() < 1e-10);

        let (frac, vec) = oracle_top_pc(&emb);
        let pc = top_component(&emb, Centering::Centered).unwrap();
        assert!(pc.converged);
        assert!((pc.variance_fraction - frac).abs() < 1e-10, "case {case}");
        // Eigenvectors are defined up to sign.
        assert!((oracle_cosine(&DVector::from_column_slice(&pc.vector), &vec).abs() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn neighbors_and_analogies_match_oracle() {
    let mut rng = rng(13);
    for case in 0..10 {
        let emb = random_embedding(&mut rng, 200 + 30 * case, 8 + case);
        let query = DVector::from_vec(gaussian_vector(&mut rng, emb.dim()));
        let got = emb.nearest_neighbors(query.as_slice(), 15, &["w3"]).unwrap();
        let want = oracle_neighbors(&emb, &query, &["w3"]);
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(g.token, w.0);
            assert!((g.cosine - w.1).abs() < 1e-6);
        }
        assert_eq!(got.len(), 15);

        let top = emb.analogy_top("w0", "w1", "w2", 10).unwrap();
        let want = oracle_analogy(&emb, "w0", "w1", "w2");
        for (g, w) in top.iter().zip(&want) {
            assert_eq!(g.token, w.0);
            assert!((g.cosine - w.1).abs() < 1e-6);
        }
        assert_eq!(emb.analogy("w0", "w1", "w2").unwrap().token, want[0].0);
    }
}

#[test]
fn planted_analogy_is_recovered() {
    let emb = Embedding::from_rows(vec![
        ("man", vec![1.0, 0.0, 0.2]),
        ("woman", vec![-1.0, 0.0, 0.2]),
        ("king", vec![1.0, 1.0, 0.0]),
        ("queen", vec![-1.0, 1.0, 0.0]),
        ("apple", vec![0.0, -1.0, 1.0]),
    ])
    .unwrap();
    assert_eq!(emb.analogy("man", "woman", "king").unwrap().token, "queen");
}

#[test]
fn normalized_copy_gives_same_answers() {
    let mut rng = rng(14);
    let emb = random_embedding(&mut rng, 120, 10);
    let unit = emb.normalize().unwrap();
    let (spec, _) = random_spec(&mut rng, 120, 4);
    let a = build_dimension(&emb, &spec, BuildOptions::default()).unwrap();
    let b = build_dimension(&unit, &spec, BuildOptions::default()).unwrap();
    assert!(max_abs_diff(a.vector(), &DVector::from_column_slice(b.vector())) < 1e-12);
    let pa = project_all(&emb, &a).unwrap();
    let pb = project_all(&unit, &b).unwrap();
    assert!(pa.iter().zip(&pb).all(|(x, y)| (x - y).abs() < 1e-12));
}

#[test]
fn angle_conversion_reference_points() {
    assert!((Angle::from_cosine(-0.255).degrees - 104.8).abs() < 0.05);
    assert!((Angle::from_cosine(-0.143).degrees - 98.2).abs() < 0.05);
    assert_eq!(Angle::from_cosine(1.0).degrees, 0.0);
    assert!((Angle::from_cosine(0.0).degrees - 90.0).abs() < 1e-12);
}

fn embedding_strategy() -> impl Strategy<Value = (Embedding, DimensionSpec)> {
    (any::<u64>(), 12usize..80, 2usize..20, 1usize..5).prop_map(|(seed, n, k, pairs)| {
        let mut rng = rng(seed);
        let emb = random_embedding(&mut rng, n, k);
        let (spec, _) = random_spec(&mut rng, n, pairs);
        (emb, spec)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Swapping every pair's poles flips the dimension and every projection
    /// while leaving explained variance untouched.
    #[test]
    fn reversing_poles_negates((emb, spec) in embedding_strategy()) {
        let opts = BuildOptions::default();
        let d = build_dimension(&emb, &spec, opts).unwrap();
        let r = build_dimension(&emb, &spec.reversed(), opts).unwrap();
        for (x, y) in d.vector().iter().zip(r.vector()) {
            prop_assert!((x + y).abs() < 1e-12);
        }
        for t in emb.tokens() {
            prop_assert!((project(&emb, t, &d).unwrap() + project(&emb, t, &r).unwrap()).abs() < 1e-12);
        }
        let vd = variance_explained(&emb, &d, Centering::Centered).unwrap();
        let vr = variance_explained(&emb, &r, Centering::Centered).unwrap();
        prop_assert!((vd - vr).abs() < 1e-12);
        prop_assert!((dimension_angle(&d, &r).unwrap().degrees - 180.0).abs() < 1e-5);
    }

    /// No direction explains more centered variance than the top component.
    #[test]
    fn top_component_dominates((emb, spec) in embedding_strategy(), extra in any::<u64>()) {
        let d = build_dimension(&emb, &spec, BuildOptions::default()).unwrap();
        let top = top_component_variance(&emb).unwrap();
        prop_assert!(variance_explained(&emb, &d, Centering::Centered).unwrap() <= top + 1e-9);
        let mut rng = rng(extra);
        let random = CulturalDimension::from_vector("r", &random_unit(&mut rng, emb.dim())).unwrap();
        prop_assert!(variance_explained(&emb, &random, Centering::Centered).unwrap() <= top + 1e-9);
        prop_assert!(top >= 1.0 / emb.dim() as f64 - 1e-9);
    }
}
