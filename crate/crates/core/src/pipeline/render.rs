use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::names::NameAuditReport;
use super::series::{CompareReport, SeriesKind, SeriesReport};
use super::svg::{self, LineChart, LineSeries, Mark, Panel, Scatter, ScatterPoint};
use super::validate::ValidationReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum Report {
    Series(SeriesReport),
    Compare(CompareReport),
    Names(NameAuditReport),
    Validation(ValidationReport),
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn to_csv(report: &Report) -> Result<String> {
    match report {
        Report::Series(s) => csv_string(
            &["label", "key", "value", "lower", "upper", "reason"],
            s.points.iter().map(|p| {
                vec![
                    p.label.clone(),
                    p.key.clone(),
                    opt(p.value),
                    opt(p.lower),
                    opt(p.upper),
                    p.reason.clone().unwrap_or_default(),
                ]
            }),
        ),
        Report::Compare(c) => csv_string(
            &["word", "a", "b", "a_lower", "a_upper", "b_lower", "b_upper", "reason"],
            c.rows.iter().map(|r| {
                vec![
                    r.word.clone(),
                    opt(r.a),
                    opt(r.b),
                    opt(r.a_lower),
                    opt(r.a_upper),
                    opt(r.b_lower),
                    opt(r.b_upper),
                    r.reason.clone().unwrap_or_default(),
                ]
            }),
        ),
        Report::Names(n) => csv_string(
            &[
                "cohort",
                "embedding",
                "n_names",
                "n_missing",
                "n_zero",
                "n_correct",
                "accuracy",
            ],
            n.rows.iter().map(|r| {
                vec![
                    r.cohort.clone(),
                    r.embedding.clone(),
                    r.n_names.to_string(),
                    r.n_missing.to_string(),
                    r.n_zero.to_string(),
                    r.n_correct.to_string(),
                    opt(r.accuracy),
                ]
            }),
        ),
        Report::Validation(v) => {
            let mut rows = Vec::new();
            for t in &v.tables {
                rows.push(vec![
                    t.scale.to_string(),
                    t.dimension.clone(),
                    "pearson_r".into(),
                    String::new(),
                    opt(t.correlation.as_ref().map(|c| c.r)),
                    t.correlation
                        .as_ref()
                        .map(|c| c.n_items.to_string())
                        .unwrap_or_default(),
                    t.correlation_reason.clone().unwrap_or_default(),
                ]);
                for r in &t.rows {
                    rows.push(vec![
                        t.scale.to_string(),
                        t.dimension.clone(),
                        "accuracy".into(),
                        r.domain.map(|d| d.to_string()).unwrap_or_else(|| "all".into()),
                        opt(r.result.as_ref().and_then(|x| x.accuracy)),
                        r.result
                            .as_ref()
                            .map(|x| x.n_significant_pairs.to_string())
                            .unwrap_or_default(),
                        r.reason.clone().unwrap_or_default(),
                    ]);
                }
            }
            csv_string(
                &["scale", "dimension", "statistic", "domain", "value", "n", "reason"],
                rows,
            )
        }
    }
}

fn range(lo: Option<f64>, hi: Option<f64>) -> Option<(f64, f64)> {
    lo.zip(hi)
}

fn panels(report: &Report) -> Vec<Panel> {
    match report {
        Report::Series(s) => {
            let series = s
                .keys
                .iter()
                .map(|k| LineSeries {
                    name: k.clone(),
                    marks: s
                        .labels
                        .iter()
                        .map(|l| {
                            s.point(l, k).and_then(|p| {
                                p.value.map(|y| Mark {
                                    y,
                                    range: range(p.lower, p.upper),
                                })
                            })
                        })
                        .collect(),
                })
                .collect();
            let names: Vec<&str> = s.dimensions.iter().map(|d| d.name.as_str()).collect();
            let (title, y_label) = match s.kind {
                SeriesKind::Projection => (format!("Projection on {}", names.join(", ")), "projection"),
                SeriesKind::Angle => (format!("Cosine between {}", names.join(" and ")), "cosine"),
            };
            vec![Panel::Line(LineChart {
                title,
                y_label: y_label.into(),
                x_labels: s.labels.clone(),
                series,
            })]
        }
        Report::Compare(c) => vec![Panel::Scatter(Scatter {
            title: format!("Projection on {}", c.dimension.name),
            x_label: c.label_a.clone(),
            y_label: c.label_b.clone(),
            points: c
                .rows
                .iter()
                .filter_map(|r| {
                    Some(ScatterPoint {
                        label: r.word.clone(),
                        x: r.a?,
                        y: r.b?,
                        x_range: range(r.a_lower, r.a_upper),
                        y_range: range(r.b_lower, r.b_upper),
                    })
                })
                .collect(),
            diagonal: true,
        })],
        Report::Names(n) => vec![Panel::Line(LineChart {
            title: format!("Name gender accuracy, lag {}", n.lag),
            y_label: "accuracy".into(),
            x_labels: n.rows.iter().map(|r| r.cohort.clone()).collect(),
            series: vec![LineSeries {
                name: "accuracy".into(),
                marks: n
                    .rows
                    .iter()
                    .map(|r| r.accuracy.map(|y| Mark { y, range: None }))
                    .collect(),
            }],
        })],
        Report::Validation(v) => v
            .tables
            .iter()
            .map(|t| {
                Panel::Scatter(Scatter {
                    title: format!("{} survey vs {} projection", t.scale, t.dimension),
                    x_label: "weighted mean rating".into(),
                    y_label: "projection".into(),
                    points: t
                        .items
                        .iter()
                        .filter_map(|i| {
                            Some(ScatterPoint {
                                label: i.item.clone(),
                                x: i.mean,
                                y: i.projection?,
                                x_range: None,
                                y_range: None,
                            })
                        })
                        .collect(),
                    diagonal: false,
                })
            })
            .collect(),
    }
}

pub fn render_to_string(report: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(report),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Svg => Ok(svg::document(&panels(report))),
    }
}

pub fn render(report: &Report, format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_to_string(report, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
