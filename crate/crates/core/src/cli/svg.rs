//! Minimal SVG plotting: line, scatter and bar panels with linear axes.

use std::fmt::Write;

pub const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A document made of stacked panels.
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height, body: String::new() }
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif">{}</text>"#,
            esc(s)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Data-to-pixel mapping for one rectangular plot area.
pub struct Panel {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Panel {
    /// Panel whose axes cover the given data ranges with a small margin.
    pub fn new(frame: (f64, f64, f64, f64), xs: (f64, f64), ys: (f64, f64)) -> Self {
        Self {
            left: frame.0,
            top: frame.1,
            width: frame.2,
            height: frame.3,
            x: nice_range(xs.0, xs.1),
            y: nice_range(ys.0, ys.1),
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    /// Frame, five ticks per axis and labels.
    pub fn axes(&self, svg: &mut Svg, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        let _ = writeln!(
            svg.body,
            r#"<rect x="{l:.1}" y="{t:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let (px, py) = (self.px(xv), self.py(yv));
            svg.line(px, t + h, px, t + h + 4.0, "black", 1.0);
            svg.text(px, t + h + 16.0, 10.0, "middle", &format!("{xv:.3}"));
            svg.line(l - 4.0, py, l, py, "black", 1.0);
            svg.text(l - 6.0, py + 3.0, 10.0, "end", &format!("{yv:.3}"));
        }
        svg.text(l + w / 2.0, t - 8.0, 13.0, "middle", title);
        svg.text(l + w / 2.0, t + h + 32.0, 11.0, "middle", xlabel);
        let _ = writeln!(
            svg.body,
            r#"<text transform="translate({:.1},{:.1}) rotate(-90)" font-size="11" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            l - 48.0,
            t + h / 2.0,
            esc(ylabel)
        );
    }

    pub fn polyline(&self, svg: &mut Svg, points: &[(f64, f64)], color: &str) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(
            svg.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            coords.join(" ")
        );
    }

    pub fn markers(&self, svg: &mut Svg, points: &[(f64, f64)], color: &str, radius: f64) {
        for &(x, y) in points {
            let _ = writeln!(
                svg.body,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}"/>"#,
                self.px(x),
                self.py(y)
            );
        }
    }

    /// Vertical error bars of half-length `err` around each point.
    pub fn error_bars(&self, svg: &mut Svg, points: &[(f64, f64, f64)], color: &str) {
        for &(x, y, e) in points {
            let px = self.px(x);
            svg.line(px, self.py(y - e), px, self.py(y + e), color, 1.2);
            svg.line(px - 4.0, self.py(y - e), px + 4.0, self.py(y - e), color, 1.2);
            svg.line(px - 4.0, self.py(y + e), px + 4.0, self.py(y + e), color, 1.2);
        }
    }

    /// Bars from zero, `width` in data units.
    pub fn bars(&self, svg: &mut Svg, bars: &[(f64, f64)], width: f64, color: &str) {
        for &(x, v) in bars {
            let (x0, x1) = (self.px(x - width / 2.0), self.px(x + width / 2.0));
            let (y0, y1) = (self.py(0.0f64.max(self.y.0)), self.py(v));
            let _ = writeln!(
                svg.body,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                x0,
                y0.min(y1),
                x1 - x0,
                (y0 - y1).abs()
            );
        }
    }

    pub fn legend(&self, svg: &mut Svg, entries: &[(&str, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = self.top + 14.0 + 14.0 * i as f64;
            let x = self.left + self.width - 90.0;
            let _ =
                writeln!(svg.body, r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#, y - 9.0);
            svg.text(x + 14.0, y, 10.0, "start", label);
        }
    }
}

/// `(min, max)` of an iterator, `(0, 1)` when empty.
pub fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_and_document() {
        let p = Panel::new((10.0, 10.0, 100.0, 50.0), (0.0, 1.0), (0.0, 2.0));
        assert!(p.px(0.0) > 10.0 && p.px(1.0) < 110.0);
        assert!(p.py(2.0) < p.py(0.0));
        let mut svg = Svg::new(200.0, 100.0);
        p.axes(&mut svg, "a<b", "x", "y");
        p.polyline(&mut svg, &[(0.0, 0.0), (1.0, 2.0)], PALETTE[0]);
        let doc = svg.finish();
        assert!(doc.starts_with("<svg") && doc.trim_end().ends_with("</svg>"));
        assert!(doc.contains("a&lt;b"));
    }
}
