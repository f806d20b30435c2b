//! Minimal self-contained SVG line and scatter plots.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Scatter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Index into the palette; series sharing a color pair a measurement
    /// with its prediction.
    pub color: usize,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>, style: Style, color: usize) -> Self {
        Self { name: name.into(), points, style, color }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_log: false,
            y_log: false,
            series: Vec::new(),
        }
    }

    pub fn log_x(mut self) -> Self {
        self.x_log = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.y_log = true;
        self
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            if let Some(t) = transform(v, log) {
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.04 * (hi - lo);
        Self { log, lo: lo - pad, hi: hi + pad, px_lo, px_hi }
    }

    fn px(&self, v: f64) -> Option<f64> {
        transform(v, self.log).map(|t| self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo))
    }

    /// Tick positions in data units with labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 8).max(1);
            (a..=b).step_by(step as usize).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
            let mut t = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.hi + 1e-9 * step {
                let v = if t.abs() < 1e-12 * step { 0.0 } else { t };
                out.push((v, format!("{}", (v * 1e6).round() / 1e6)));
                t += step;
            }
            out
        }
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    if !v.is_finite() {
        return None;
    }
    if log {
        (v > 0.0).then(|| v.log10())
    } else {
        Some(v)
    }
}

/// Renders the plot as an SVG document.
pub fn render(plot: &Plot) -> String {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let pts = || plot.series.iter().flat_map(|s| s.points.iter());
    let xa = Axis::fit(pts().map(|p| p.0), plot.x_log, x0, x1);
    let ya = Axis::fit(pts().map(|p| p.1), plot.y_log, y0, y1);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (x0 + x1) / 2.0,
        escape(&plot.title)
    );

    let _ = writeln!(s, r##"<g stroke="#cccccc" stroke-width="0.5">"##);
    let xt = xa.ticks();
    let yt = ya.ticks();
    for (v, _) in &xt {
        if let Some(px) = xa.px(*v) {
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{y1}"/>"#);
        }
    }
    for (v, _) in &yt {
        if let Some(py) = ya.px(*v) {
            let _ = writeln!(s, r#"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ =
        writeln!(s, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for (v, label) in &xt {
        if let Some(px) = xa.px(*v) {
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 16.0, escape(label));
        }
    }
    for (v, label) in &yt {
        if let Some(py) = ya.px(*v) {
            let _ =
                writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, py + 4.0, escape(label));
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(&plot.y_label)
    );

    for (k, series) in plot.series.iter().enumerate() {
        let color = PALETTE[series.color % PALETTE.len()];
        let mapped: Vec<(f64, f64)> = series.points.iter().filter_map(|&(x, y)| Some((xa.px(x)?, ya.px(y)?))).collect();
        match series.style {
            Style::Scatter => {
                let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.5">"#);
                for (px, py) in &mapped {
                    let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.5"/>"#);
                }
                let _ = writeln!(s, "</g>");
            }
            Style::Line | Style::Dashed => {
                let dash = if series.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                let path: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    path.join(" ")
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = x1 + 12.0;
        let dash = if series.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
        if series.style == Style::Scatter {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{ly}" r="3" fill="{color}"/>"#, lx + 10.0);
        } else {
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                lx + 20.0
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&series.name));
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(plot: &Plot, path: &Path) -> io::Result<()> {
    if plot.series.iter().all(|s| s.points.is_empty()) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "nothing to plot"));
    }
    std::fs::write(path, render(plot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_valid_xml() {
        let p = Plot::new("one <point>", "x", "y").with(Series::new("p", vec![(0.0, 0.0)], Style::Scatter, 0));
        let doc = render(&p);
        let parsed = roxmltree::Document::parse(&doc).unwrap();
        assert_eq!(parsed.root_element().tag_name().name(), "svg");
    }

    #[test]
    fn scatter_points_stay_in_frame() {
        let pts: Vec<(f64, f64)> =
            (0..10_000).map(|i| ((i as f64).sin() * 3.0, (i as f64 * 0.37).cos() * 1e-3)).collect();
        let doc = render(&Plot::new("s", "x", "y").with(Series::new("s", pts, Style::Scatter, 1)));
        let parsed = roxmltree::Document::parse(&doc).unwrap();
        let circles: Vec<_> = parsed.descendants().filter(|n| n.has_tag_name("circle")).collect();
        assert_eq!(circles.len(), 10_001);
        for c in &circles[..10_000] {
            let x: f64 = c.attribute("cx").unwrap().parse().unwrap();
            let y: f64 = c.attribute("cy").unwrap().parse().unwrap();
            assert!((LEFT..=WIDTH - RIGHT).contains(&x) && (TOP..=HEIGHT - BOTTOM).contains(&y));
        }
    }

    #[test]
    fn log_axes_drop_nonpositive_values() {
        let p = Plot::new("l", "x", "y")
            .log_x()
            .log_y()
            .with(Series::new("a", vec![(0.01, 1e-4), (0.1, 1e-2), (0.0, 1.0)], Style::Line, 0))
            .with(Series::new("b", vec![(0.01, 3e-4), (0.1, 3e-2)], Style::Dashed, 0));
        let doc = render(&p);
        roxmltree::Document::parse(&doc).unwrap();
        assert!(doc.contains("stroke-dasharray"));
    }
}
