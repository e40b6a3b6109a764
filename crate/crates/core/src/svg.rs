//! Minimal self-contained SVG line charts.

use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 430.0;
const TICKS: usize = 5;

const COLORS: [&str; 4] = ["#1f4e9c", "#b03a2e", "#1e8449", "#7d3c98"];

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dashed: bool,
}

impl Line {
    pub fn solid(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            xs,
            ys,
            dashed: false,
        }
    }

    pub fn dashed(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            dashed: true,
            ..Self::solid(label, xs, ys)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub lines: Vec<Line>,
    /// Fixed y range; derived from the data when `None`.
    pub y_range: Option<(f64, f64)>,
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    let s = if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.2}")
    };
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Keeps the first, lowest, highest and last sample of each pixel column, in
/// index order.
pub fn decimate(xs: &[f64], ys: &[f64], x_min: f64, x_max: f64, columns: usize) -> Vec<(f64, f64)> {
    let span = x_max - x_min;
    let mut out = Vec::new();
    let mut start = 0;
    while start < xs.len() {
        let col = |x: f64| (((x - x_min) / span) * columns as f64).floor() as i64;
        let c = col(xs[start]);
        let mut end = start;
        while end + 1 < xs.len() && col(xs[end + 1]) == c {
            end += 1;
        }
        let bucket = start..=end;
        let lo = bucket.clone().min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
        let hi = bucket.clone().max_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
        let mut keep = vec![start, lo, hi, end];
        keep.sort_unstable();
        keep.dedup();
        out.extend(keep.into_iter().map(|i| (xs[i], ys[i])));
        start = end + 1;
    }
    out
}

impl LineChart {
    fn x_bounds(&self) -> (f64, f64) {
        let xs = self.lines.iter().flat_map(|l| l.xs.iter().copied());
        let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if lo < hi {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        }
    }

    fn y_bounds(&self) -> (f64, f64) {
        if let Some(r) = self.y_range {
            return r;
        }
        let ys = self.lines.iter().flat_map(|l| l.ys.iter().copied());
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let pad = 0.05 * (hi - lo).max(1e-12);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self.x_bounds();
        let (y0, y1) = self.y_bounds();
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
        let py = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            fmt((LEFT + RIGHT) / 2.0),
            escape(&self.title)
        );

        // axes
        let _ = writeln!(
            s,
            r#"<path d="M {LEFT} {TOP} L {LEFT} {BOTTOM} L {RIGHT} {BOTTOM}" fill="none" stroke="black"/>"#
        );
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (tx, ty) = (fmt(px(xv)), fmt(py(yv)));
            let _ = writeln!(
                s,
                r#"<path d="M {tx} {BOTTOM} L {tx} {}" stroke="black"/><text x="{tx}" y="{}" text-anchor="middle">{}</text>"#,
                BOTTOM + 5.0,
                BOTTOM + 20.0,
                tick_label(xv)
            );
            let _ = writeln!(
                s,
                r#"<path d="M {} {ty} L {LEFT} {ty}" stroke="black"/><text x="{}" y="{ty}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            fmt((LEFT + RIGHT) / 2.0),
            HEIGHT - 25.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
            fmt((TOP + BOTTOM) / 2.0),
            escape(&self.y_label)
        );

        let columns = (RIGHT - LEFT) as usize;
        for (i, line) in self.lines.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts = decimate(&line.xs, &line.ys, x0, x1, columns);
            let mut d = String::new();
            for (k, (x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{} {}", if k == 0 { "M " } else { " L " }, fmt(px(*x)), fmt(py(*y)));
            }
            let dash = if line.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"{dash}/>"#
            );
            let ly = TOP + 8.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<path d="M {} {ly} L {} {ly}" stroke="{color}" stroke-width="1.2"{dash}/><text x="{}" y="{ly}" dominant-baseline="middle">{}</text>"#,
                RIGHT - 170.0,
                RIGHT - 140.0,
                RIGHT - 132.0,
                escape(&line.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> LineChart {
        let xs: Vec<f64> = (0..5000).map(|i| i as f64 * 0.01).collect();
        let ys = xs.iter().map(|x| x.sin()).collect();
        LineChart {
            title: "C & D".into(),
            x_label: "t".into(),
            y_label: "C".into(),
            lines: vec![Line::solid("sin", xs.clone(), ys), Line::dashed("zero", xs, vec![0.0; 5000])],
            y_range: Some((-1.0, 1.0)),
        }
    }

    #[test]
    fn renders_fixed_viewbox() {
        let svg = chart().render();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\""));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("C &amp; D"));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg, chart().render());
    }

    #[test]
    fn decimation_keeps_extremes() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let mut ys = vec![0.0; 1000];
        ys[503] = 7.0;
        ys[504] = -3.0;
        let pts = decimate(&xs, &ys, 0.0, 999.0, 10);
        assert!(pts.len() <= 40);
        assert!(pts.contains(&(503.0, 7.0)) && pts.contains(&(504.0, -3.0)));
        assert!(pts.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(-0.0), "0.00");
        assert_eq!(tick_label(125.66), "126");
        assert_eq!(tick_label(12.566), "12.6");
        assert_eq!(tick_label(0.5), "0.50");
    }
}
