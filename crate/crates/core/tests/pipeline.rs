mod common;

use std::path::Path;

use common::{aligned_embedding, aligned_survey};
use culturegeo::dimension::{build_dimension, project, BuildOptions, DimensionSpec};
use culturegeo::embedding::save_embedding;
use culturegeo::pipeline::{
    angle_series, cross_corpus_compare, name_gender_audit, projection_series, render_to_string, validation_report,
    ConfidenceSetup, EmbeddingSet, LabelEntry, NameRecord, OutputFormat, Report,
};
use culturegeo::resampling::{Mode, ResamplingPlan, StatisticSpec, SubsampleVariant};
use culturegeo::trainer::{train, Corpus, TrainingConfig};
use culturegeo::validation::{OrientationMap, Scale, Sex};
use culturegeo::{Embedding, Format};

fn gender() -> DimensionSpec {
    DimensionSpec::new("gender", &[("he", "she"), ("man", "woman")]).unwrap()
}

fn words(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

/// Pole words on the first axis; `extra` words placed at angle `theta`
/// (degrees) from it.
fn planted(extra: &[(&str, f64)]) -> Embedding {
    let mut rows = vec![
        ("he".to_string(), vec![1.0, 0.2, 0.0]),
        ("she".to_string(), vec![-1.0, 0.2, 0.0]),
        ("man".to_string(), vec![1.0, 0.0, 0.3]),
        ("woman".to_string(), vec![-1.0, 0.0, 0.3]),
    ];
    for (w, theta) in extra {
        let t = theta.to_radians();
        rows.push((w.to_string(), vec![t.cos(), 0.0, t.sin()]));
    }
    Embedding::from_rows(rows).unwrap()
}

fn write_set(dir: &Path, embeddings: &[(&str, Embedding)]) -> EmbeddingSet {
    let labels = embeddings
        .iter()
        .map(|(label, emb)| {
            let path = dir.join(format!("{label}.txt"));
            save_embedding(emb, &path, Format::Word2VecText).unwrap();
            LabelEntry {
                label: label.to_string(),
                embedding: path,
                corpus: None,
            }
        })
        .collect();
    EmbeddingSet::new(labels, Format::Word2VecText).unwrap()
}

#[test]
fn single_label_series_is_a_direct_projection() {
    let dir = tempfile::tempdir().unwrap();
    let emb = planted(&[("nurse", 120.0), ("boxer", 30.0)]);
    let set = write_set(dir.path(), &[("only", emb.clone())]);
    let report = projection_series(&set, &gender(), &words(&["nurse", "boxer"]), None).unwrap();
    let dim = build_dimension(&emb, &gender(), BuildOptions::default()).unwrap();
    for w in ["nurse", "boxer"] {
        assert_eq!(
            report.point("only", w).unwrap().value,
            Some(project(&emb, w, &dim).unwrap())
        );
    }
}

#[test]
fn identical_labels_give_identical_columns_and_drift_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let angles = [150.0, 120.0, 90.0, 60.0, 30.0];
    let mut embs: Vec<(String, Embedding)> = angles
        .iter()
        .enumerate()
        .map(|(i, a)| (format!("{}", 1900 + 10 * i), planted(&[("nurse", *a), ("fixed", 45.0)])))
        .collect();
    embs.push(("copy".into(), embs[0].1.clone()));
    let named: Vec<(&str, Embedding)> = embs.iter().map(|(l, e)| (l.as_str(), e.clone())).collect();
    let set = write_set(dir.path(), &named);
    let r = projection_series(&set, &gender(), &words(&["nurse", "fixed"]), None).unwrap();

    let nurse: Vec<f64> = r.column("nurse").into_iter().map(Option::unwrap).collect();
    assert!(nurse[..5].windows(2).all(|w| w[0] < w[1]), "{nurse:?}");
    let fixed: Vec<f64> = r.column("fixed").into_iter().map(Option::unwrap).collect();
    assert!(fixed.iter().all(|v| *v == fixed[0]));
    assert_eq!(nurse[5], nurse[0]);
}

#[test]
fn missing_words_are_flagged_not_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), &[("a", planted(&[("nurse", 100.0)])), ("b", planted(&[]))]);
    let r = projection_series(&set, &gender(), &words(&["nurse"]), None).unwrap();
    assert_eq!(r.points.len(), 2);
    let gone = r.point("b", "nurse").unwrap();
    assert_eq!(gone.value, None);
    assert!(gone.reason.as_deref().unwrap().contains("nurse"));
}

#[test]
fn angle_series_identity_and_reversal() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), &[("x", planted(&[("rich", 80.0), ("poor", 140.0)]))]);
    let same = angle_series(&set, &gender(), &gender(), None).unwrap();
    assert!((same.points[0].value.unwrap() - 1.0).abs() < 1e-12);

    let class = DimensionSpec::new("class", &[("rich", "poor")]).unwrap();
    let fwd = angle_series(&set, &gender(), &class, None).unwrap().points[0]
        .value
        .unwrap();
    let rev = angle_series(&set, &gender(), &class.reversed(), None).unwrap().points[0]
        .value
        .unwrap();
    assert!((fwd + rev).abs() < 1e-12);
    assert_eq!(same.keys, vec!["gender·gender".to_string()]);
}

#[test]
fn compare_diagonal_and_antidiagonal() {
    let a = planted(&[("nurse", 130.0), ("boxer", 40.0), ("only_a", 10.0)]);
    let ws = words(&["nurse", "boxer", "only_a"]);
    let same = cross_corpus_compare(("a", &a), ("a2", &a), &gender(), &ws, None).unwrap();
    for row in &same.rows[..2] {
        assert_eq!(row.a, row.b);
    }

    // Swapping the pole words flips the dimension in the second space.
    let rows: Vec<(String, Vec<f64>)> = a
        .tokens()
        .iter()
        .filter(|t| t.as_str() != "only_a")
        .map(|t| {
            let src = match t.as_str() {
                "he" => "she",
                "she" => "he",
                "man" => "woman",
                "woman" => "man",
                other => other,
            };
            (t.clone(), a.vector(src).unwrap().to_vec())
        })
        .collect();
    let b = Embedding::from_rows(rows).unwrap();
    let flipped = cross_corpus_compare(("a", &a), ("b", &b), &gender(), &ws, None).unwrap();
    for row in &flipped.rows[..2] {
        assert!((row.a.unwrap() + row.b.unwrap()).abs() < 1e-12);
    }
    let oov = &flipped.rows[2];
    assert!(oov.a.is_some() && oov.b.is_none());
    assert!(oov.reason.as_deref().unwrap().starts_with("b:"));
}

#[test]
fn compare_with_intervals_keeps_point_values() {
    let lines: Vec<&str> = (0..40)
        .map(|i| {
            if i % 2 == 0 {
                "he man boxer strong loud"
            } else {
                "she woman nurse gentle quiet"
            }
        })
        .collect();
    let corpus = Corpus::from_lines(&lines);
    let trainer = TrainingConfig {
        dim: 6,
        window: 3,
        epochs: 2,
        min_count: 1,
        subsample_t: 0.0,
        seed: 3,
        ..TrainingConfig::default()
    };
    let emb = train(&corpus, &trainer).unwrap().embedding().unwrap();
    let plan = ResamplingPlan {
        mode: Mode::Subsample,
        replicates: 20,
        level: None,
        base_seed: 8,
        trainer,
        statistic: StatisticSpec::Cosine {
            a: "he".into(),
            b: "she".into(),
        },
        variant: SubsampleVariant::AsWritten,
    };
    let setup = ConfidenceSetup {
        plan: &plan,
        corpus_a: &corpus,
        corpus_b: &corpus,
    };
    let ws = words(&["boxer", "nurse"]);
    let plain = cross_corpus_compare(("a", &emb), ("b", &emb), &gender(), &ws, None).unwrap();
    let with = cross_corpus_compare(("a", &emb), ("b", &emb), &gender(), &ws, Some(setup)).unwrap();
    for (p, w) in plain.rows.iter().zip(&with.rows) {
        assert_eq!(p.a, w.a);
        match (w.a_lower, w.a_upper) {
            (Some(lo), Some(hi)) => assert!(lo <= hi),
            _ => assert!(w.reason.is_some()),
        }
        assert_eq!((w.a_lower, w.a_upper), (w.b_lower, w.b_upper));
    }
}

fn name_set(dir: &Path, flip_last: bool) -> EmbeddingSet {
    let names = [("john", 20.0), ("mike", 35.0), ("mary", 160.0), ("anna", 140.0)];
    let normal = planted(&names);
    let flipped = {
        let rows: Vec<(String, Vec<f64>)> = normal
            .tokens()
            .iter()
            .map(|t| {
                let v = normal.vector(t).unwrap();
                let v = if ["he", "she", "man", "woman"].contains(&t.as_str()) {
                    vec![-v[0], v[1], v[2]]
                } else {
                    v.to_vec()
                };
                (t.clone(), v)
            })
            .collect();
        Embedding::from_rows(rows).unwrap()
    };
    let last = if flip_last { flipped } else { normal.clone() };
    write_set(
        dir,
        &[("1950", normal.clone()), ("1960", normal.clone()), ("1970", last)],
    )
}

fn name_records() -> Vec<NameRecord> {
    let rec = |label: &str, name: &str, sex| NameRecord {
        label: label.into(),
        name: name.into(),
        recorded_sex: sex,
    };
    vec![
        rec("1950", "john", Sex::Male),
        rec("1950", "mary", Sex::Female),
        rec("1950", "anna", Sex::Female),
        rec("1950", "zed", Sex::Male),
        rec("1960", "mike", Sex::Male),
        rec("1970", "mike", Sex::Male),
    ]
}

#[test]
fn name_audit_uses_lagged_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let r = name_gender_audit(&name_set(dir.path(), false), &name_records(), 2, &gender()).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!((row.cohort.as_str(), row.embedding.as_str()), ("1950", "1970"));
    assert_eq!((row.n_names, row.n_missing, row.n_correct), (4, 1, 3));
    assert_eq!(row.accuracy, Some(1.0));
    assert_eq!(r.dropped_cohorts, vec!["1960".to_string(), "1970".to_string()]);

    let flipped = name_gender_audit(&name_set(dir.path(), true), &name_records(), 2, &gender()).unwrap();
    assert_eq!(flipped.rows[0].accuracy, Some(0.0));

    let no_lag = name_gender_audit(&name_set(dir.path(), true), &name_records(), 0, &gender()).unwrap();
    let accs: Vec<Option<f64>> = no_lag.rows.iter().map(|r| r.accuracy).collect();
    assert_eq!(accs, vec![Some(1.0), Some(1.0), Some(0.0)]);
}

const ITEMS: [(&str, f64); 5] = [
    ("nurse", 12.0),
    ("teacher", 30.0),
    ("doctor", 48.0),
    ("boxing", 71.0),
    ("football", 85.0),
];

fn validation_embedding() -> Embedding {
    let mut rows: Vec<(String, Vec<f64>)> = aligned_embedding(&ITEMS)
        .tokens()
        .iter()
        .zip(aligned_embedding(&ITEMS).rows())
        .map(|(t, r)| (t.clone(), r.to_vec()))
        .collect();
    rows.push(("he".into(), vec![1.0, 0.3]));
    rows.push(("she".into(), vec![-1.0, 0.3]));
    Embedding::from_rows(rows).unwrap()
}

#[test]
fn validation_report_aligned_and_reversed() {
    let survey = aligned_survey(&ITEMS, 10);
    let emb = validation_embedding();
    let spec = DimensionSpec::new("gender", &[("he", "she")]).unwrap();
    let o = OrientationMap::default();
    let report = validation_report(&survey, None, &emb, &[(Scale::Gender, spec.clone())], 0.05, &o).unwrap();
    let t = &report.tables[0];
    assert!((t.correlation.as_ref().unwrap().r - 1.0).abs() < 1e-12);
    let all = t.rows.iter().find(|r| r.domain.is_none()).unwrap();
    assert_eq!(all.result.as_ref().unwrap().accuracy, Some(1.0));
    assert_eq!(t.rows.len(), 8);
    assert!(!report.weighted);

    let rev = validation_report(&survey, None, &emb, &[(Scale::Gender, spec.reversed())], 0.05, &o).unwrap();
    let t = &rev.tables[0];
    assert!((t.correlation.as_ref().unwrap().r + 1.0).abs() < 1e-12);
    let all = t.rows.iter().find(|r| r.domain.is_none()).unwrap();
    assert_eq!(all.result.as_ref().unwrap().accuracy, Some(0.0));
}

fn sample_reports(dir: &Path) -> Vec<Report> {
    let set = write_set(
        dir,
        &[
            ("1900", planted(&[("nurse", 110.0)])),
            ("1910", planted(&[("nurse", 95.0)])),
        ],
    );
    let series = projection_series(&set, &gender(), &words(&["nurse", "ghost"]), None).unwrap();
    let emb = planted(&[("nurse", 110.0), ("boxer", 20.0)]);
    let compare = cross_corpus_compare(("a", &emb), ("b", &emb), &gender(), &words(&["nurse", "boxer"]), None).unwrap();
    let names = name_gender_audit(&name_set(dir, false), &name_records(), 2, &gender()).unwrap();
    let survey = aligned_survey(&ITEMS, 6);
    let spec = DimensionSpec::new("gender", &[("he", "she")]).unwrap();
    let validation = validation_report(
        &survey,
        None,
        &validation_embedding(),
        &[(Scale::Gender, spec)],
        0.05,
        &OrientationMap::default(),
    )
    .unwrap();
    vec![
        Report::Series(series),
        Report::Compare(compare),
        Report::Names(names),
        Report::Validation(validation),
    ]
}

#[test]
fn json_round_trips_every_report() {
    let dir = tempfile::tempdir().unwrap();
    for report in sample_reports(dir.path()) {
        let text = render_to_string(&report, OutputFormat::Json).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(text.contains("\"manifest\""));
    }
}

#[test]
fn svg_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    for report in sample_reports(dir.path()) {
        let a = render_to_string(&report, OutputFormat::Svg).unwrap();
        let b = render_to_string(&report, OutputFormat::Svg).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg ") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<g ").count(), a.matches("</g>").count());
        assert!(!a.contains("NaN"));
    }
}

#[test]
fn empty_series_renders_placeholder() {
    let set = EmbeddingSet::new(Vec::new(), Format::Word2VecText).unwrap();
    let report = projection_series(&set, &gender(), &[], None).unwrap();
    let svg = render_to_string(&Report::Series(report.clone()), OutputFormat::Svg).unwrap();
    assert!(svg.contains("no data"));
    assert!(svg.ends_with("</svg>\n"));
    let csv = render_to_string(&Report::Series(report), OutputFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let Report::Series(series) = &sample_reports(dir.path())[0] else {
        unreachable!()
    };
    let csv = render_to_string(&Report::Series(series.clone()), OutputFormat::Csv).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), series.points.len());
    for (row, point) in rows.iter().zip(&series.points) {
        assert_eq!(&row[0], point.label);
        assert_eq!(&row[1], point.key);
        let parsed: Option<f64> = (!row[2].is_empty()).then(|| row[2].parse().unwrap());
        assert_eq!(parsed, point.value);
        assert_eq!(row[5].is_empty(), point.reason.is_none());
    }
}

#[test]
fn set_manifest_paths_resolve_relative_to_file() {
    let dir = tempfile::tempdir().unwrap();
    save_embedding(&planted(&[]), dir.path().join("e.bin"), Format::Word2VecBinary).unwrap();
    std::fs::write(
        dir.path().join("set.json"),
        r#"{"labels":[{"label":"1990","embedding":"e.bin"}]}"#,
    )
    .unwrap();
    let set = EmbeddingSet::load(dir.path().join("set.json")).unwrap();
    assert_eq!(set.embedding(0).unwrap().len(), 4);
    std::fs::write(
        dir.path().join("dup.json"),
        r#"{"labels":[{"label":"x","embedding":"e.bin"},{"label":"x","embedding":"e.bin"}]}"#,
    )
    .unwrap();
    assert!(EmbeddingSet::load(dir.path().join("dup.json")).is_err());
}
