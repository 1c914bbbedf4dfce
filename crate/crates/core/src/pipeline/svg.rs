//! Minimal self-contained SVG charts with fixed-precision coordinates.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy)]
pub(super) struct Mark {
    pub y: f64,
    pub range: Option<(f64, f64)>,
}

pub(super) struct LineSeries {
    pub name: String,
    pub marks: Vec<Option<Mark>>,
}

pub(super) struct LineChart {
    pub title: String,
    pub y_label: String,
    pub x_labels: Vec<String>,
    pub series: Vec<LineSeries>,
}

pub(super) struct ScatterPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

pub(super) struct Scatter {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<ScatterPoint>,
    pub diagonal: bool,
}

pub(super) enum Panel {
    Line(LineChart),
    Scatter(Scatter),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn n(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Padded data range; `[-1, 1]` when empty.
fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if lo > hi {
        return (-1.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn axes(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let (r, b) = (WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        n(LEFT),
        n(TOP),
        n(r - LEFT),
        n(b - TOP)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        n((LEFT + r) / 2.0),
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        n((LEFT + r) / 2.0),
        n(HEIGHT - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        n((TOP + b) / 2.0),
        n((TOP + b) / 2.0),
        escape(y_label)
    );
}

fn y_ticks(out: &mut String, f: &Frame) {
    for i in 0..=4 {
        let v = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let y = f.py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">{:.3}</text>"##,
            n(LEFT),
            n(y),
            n(WIDTH - RIGHT),
            n(y),
            n(LEFT - 6.0),
            n(y + 4.0),
            if v.abs() < 5e-4 { 0.0 } else { v }
        );
    }
}

fn vertical_whisker(out: &mut String, x: f64, y_lo: f64, y_hi: f64, color: &str) {
    let _ = writeln!(
        out,
        r#"<path d="M{x} {a}V{b}M{l} {a}H{r}M{l} {b}H{r}" stroke="{color}" fill="none"/>"#,
        x = n(x),
        a = n(y_lo),
        b = n(y_hi),
        l = n(x - 4.0),
        r = n(x + 4.0),
    );
}

fn horizontal_whisker(out: &mut String, y: f64, x_lo: f64, x_hi: f64, color: &str) {
    let _ = writeln!(
        out,
        r#"<path d="M{a} {y}H{b}M{a} {t}V{u}M{b} {t}V{u}" stroke="{color}" fill="none"/>"#,
        y = n(y),
        a = n(x_lo),
        b = n(x_hi),
        t = n(y - 4.0),
        u = n(y + 4.0),
    );
}

fn no_data(out: &mut String) {
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" text-anchor="middle" fill="#888">no data</text>"##,
        n((LEFT + WIDTH - RIGHT) / 2.0),
        n((TOP + HEIGHT - BOTTOM) / 2.0)
    );
}

fn line_chart(out: &mut String, c: &LineChart) {
    let values = c.series.iter().flat_map(|s| s.marks.iter().flatten()).flat_map(|m| {
        let (lo, hi) = m.range.unwrap_or((m.y, m.y));
        [m.y, lo, hi]
    });
    let (y0, y1) = extent(values);
    let slots = c.x_labels.len().max(1) as f64;
    let f = Frame {
        x0: -0.5,
        x1: slots - 0.5,
        y0,
        y1,
    };
    axes(out, &c.title, "", &c.y_label);
    y_ticks(out, &f);
    for (i, l) in c.x_labels.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            n(f.px(i as f64)),
            n(HEIGHT - BOTTOM + 18.0),
            escape(l)
        );
    }
    let mut any = false;
    for (si, s) in c.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (i, m) in s.marks.iter().enumerate() {
            match m {
                Some(m) => {
                    let _ = write!(
                        d,
                        "{}{} {}",
                        if pen_down { "L" } else { "M" },
                        n(f.px(i as f64)),
                        n(f.py(m.y))
                    );
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        if !d.is_empty() {
            let _ = writeln!(
                out,
                r#"<path d="{d}" stroke="{color}" fill="none" stroke-width="1.5"/>"#
            );
        }
        for (i, m) in s.marks.iter().enumerate() {
            let Some(m) = m else { continue };
            any = true;
            let x = f.px(i as f64);
            if let Some((lo, hi)) = m.range {
                vertical_whisker(out, x, f.py(lo), f.py(hi), color);
            }
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                n(x),
                n(f.py(m.y))
            );
        }
        let ly = TOP + 14.0 + 18.0 * si as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            n(lx),
            n(ly - 9.0),
            n(lx + 16.0),
            n(ly),
            escape(&s.name)
        );
    }
    if !any {
        no_data(out);
    }
}

fn scatter(out: &mut String, s: &Scatter) {
    let (mut x0, mut x1) = extent(s.points.iter().flat_map(|p| {
        let (lo, hi) = p.x_range.unwrap_or((p.x, p.x));
        [p.x, lo, hi]
    }));
    let (mut y0, mut y1) = extent(s.points.iter().flat_map(|p| {
        let (lo, hi) = p.y_range.unwrap_or((p.y, p.y));
        [p.y, lo, hi]
    }));
    if s.diagonal {
        (x0, x1) = (x0.min(y0), x1.max(y1));
        (y0, y1) = (x0, x1);
    }
    let f = Frame { x0, x1, y0, y1 };
    axes(out, &s.title, &s.x_label, &s.y_label);
    y_ticks(out, &f);
    for i in 0..=4 {
        let v = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{:.3}</text>"#,
            n(f.px(v)),
            n(HEIGHT - BOTTOM + 18.0),
            if v.abs() < 5e-4 { 0.0 } else { v }
        );
    }
    if s.diagonal {
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="4 3"/>"##,
            n(f.px(x0)),
            n(f.py(x0)),
            n(f.px(x1)),
            n(f.py(x1))
        );
    }
    let color = PALETTE[0];
    for p in &s.points {
        let (x, y) = (f.px(p.x), f.py(p.y));
        if let Some((lo, hi)) = p.x_range {
            horizontal_whisker(out, y, f.px(lo), f.px(hi), color);
        }
        if let Some((lo, hi)) = p.y_range {
            vertical_whisker(out, x, f.py(lo), f.py(hi), color);
        }
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/><text x="{}" y="{}" font-size="11">{}</text>"#,
            n(x),
            n(y),
            n(x + 5.0),
            n(y - 5.0),
            escape(&p.label)
        );
    }
    if s.points.is_empty() {
        no_data(out);
    }
}

/// Panels stacked vertically in one document.
pub(super) fn document(panels: &[Panel]) -> String {
    let count = panels.len().max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT * count as f64
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let _ = writeln!(out, r#"<g transform="translate(0 {})">"#, n(HEIGHT * i as f64));
        match panel {
            Panel::Line(c) => line_chart(&mut out, c),
            Panel::Scatter(s) => scatter(&mut out, s),
        }
        out.push_str("</g>\n");
    }
    if panels.is_empty() {
        axes(&mut out, "", "", "");
        no_data(&mut out);
    }
    out.push_str("</svg>\n");
    out
}
