//! Static SVG plots. Output depends only on the input data: numbers are
//! written with six significant digits and nothing else varies.

use std::fmt::Write as _;

use provar_core::cloud::PointCloud;
use provar_core::stats::CovarianceReport;
use provar_core::topology::PersistenceDiagram;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 50.0;
const DIM_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// `%.6g`-style formatting.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let s = fmt6(SIZE);
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="{s}" height="{s}" fill="white"/>"#).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            fmt6(SIZE / 2.0),
            escape(title)
        )
        .unwrap();
        Self { out }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        writeln!(
            self.out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"#,
            fmt6(x1),
            fmt6(y1),
            fmt6(x2),
            fmt6(y2)
        )
        .unwrap();
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, body: &str) {
        writeln!(
            self.out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            fmt6(x),
            fmt6(y),
            escape(body)
        )
        .unwrap();
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Maps data range `[lo, hi]` onto the plot area, with a flat range widened.
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Self {
        if hi > lo {
            Self { lo, hi }
        } else {
            Self {
                lo: lo - 0.5,
                hi: hi + 0.5,
            }
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.lo) / (self.hi - self.lo) * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.lo) / (self.hi - self.lo) * (SIZE - 2.0 * MARGIN)
    }
}

fn frame(c: &mut Canvas, xs: &Axis, ys: &Axis, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, SIZE - MARGIN, MARGIN, SIZE - MARGIN);
    c.line(l, b, r, b, r#"stroke="black""#);
    c.line(l, b, l, t, r#"stroke="black""#);
    c.text(l, b + 16.0, "middle", &fmt6(xs.lo));
    c.text(r, b + 16.0, "middle", &fmt6(xs.hi));
    c.text(l - 6.0, b, "end", &fmt6(ys.lo));
    c.text(l - 6.0, t + 4.0, "end", &fmt6(ys.hi));
    c.text(SIZE / 2.0, b + 34.0, "middle", xlabel);
    c.text(14.0, SIZE / 2.0, "middle", ylabel);
}

/// Scatter plot of the first two coordinates.
pub fn cloud_projection(cloud: &PointCloud) -> String {
    let coord = |p: &[f64], k: usize| p.get(k).copied().unwrap_or(0.0);
    let range = |k: usize| {
        cloud
            .points()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(coord(p, k)), hi.max(coord(p, k)))
            })
    };
    let (x0, x1) = range(0);
    let (y0, y1) = range(1);
    let (xs, ys) = (Axis::new(x0, x1), Axis::new(y0, y1));
    let mut c = Canvas::new(&format!(
        "point cloud ({} points, x1-x2 projection)",
        cloud.len()
    ));
    frame(&mut c, &xs, &ys, "x1", "x2");
    for p in cloud.points() {
        c.raw(&format!(
            r##"<circle cx="{}" cy="{}" r="1.5" fill="#1f77b4" fill-opacity="0.7"/>"##,
            fmt6(xs.x(coord(p, 0))),
            fmt6(ys.y(coord(p, 1)))
        ));
    }
    c.finish()
}

/// Blue for negative, red for positive, white at zero.
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let fade = |v: f64| (255.0 * (1.0 - v)).round() as u8;
    let (r, g, b) = if t >= 0.0 {
        (255, fade(t), fade(t))
    } else {
        (fade(-t), fade(-t), 255)
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn covariance_heatmap(report: &CovarianceReport) -> String {
    let d = report.dim();
    let scale = report
        .covariance
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let cell = (SIZE - 2.0 * MARGIN) / d.max(1) as f64;
    let mut c = Canvas::new(&format!("sample covariance (n = {})", report.n));
    for i in 0..d {
        c.text(
            MARGIN + (i as f64 + 0.5) * cell,
            MARGIN - 6.0,
            "middle",
            &format!("x{}", i + 1),
        );
        c.text(
            MARGIN - 6.0,
            MARGIN + (i as f64 + 0.5) * cell + 4.0,
            "end",
            &format!("x{}", i + 1),
        );
        for j in 0..d {
            let v = report.covariance[i][j];
            let t = if scale > 0.0 { v / scale } else { 0.0 };
            let (x, y) = (MARGIN + j as f64 * cell, MARGIN + i as f64 * cell);
            c.raw(&format!(
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="gray" data-value="{}"/>"#,
                fmt6(x),
                fmt6(y),
                fmt6(cell),
                fmt6(cell),
                diverging(t),
                fmt6(v)
            ));
            c.text(x + cell / 2.0, y + cell / 2.0 + 4.0, "middle", &fmt6(v));
        }
    }
    c.finish()
}

/// Birth on x, death on y, the diagonal drawn, infinite bars on a rule at
/// the top. Zero-length bars are omitted.
pub fn persistence_diagram(diag: &PersistenceDiagram) -> String {
    let top = if diag.max_scale > 0.0 {
        diag.max_scale
    } else {
        1.0
    };
    let axis = Axis::new(0.0, top * 1.1);
    let mut c = Canvas::new("persistence diagram");
    frame(&mut c, &axis, &axis, "birth", "death");
    c.line(
        axis.x(0.0),
        axis.y(0.0),
        axis.x(top),
        axis.y(top),
        r#"stroke="gray" stroke-dasharray="4 3""#,
    );
    let rule = axis.y(top * 1.05);
    c.line(
        axis.x(0.0),
        rule,
        axis.x(top * 1.1),
        rule,
        r#"stroke="gray""#,
    );
    c.text(MARGIN - 6.0, rule + 4.0, "end", "inf");
    for (k, bars) in diag.bars.iter().enumerate() {
        let color = DIM_COLORS[k % DIM_COLORS.len()];
        for bar in bars {
            let (y, death) = match bar.death {
                Some(d) if d > bar.birth => (axis.y(d), fmt6(d)),
                Some(_) => continue,
                None => (rule, "inf".to_string()),
            };
            c.raw(&format!(
                r#"<circle class="h{k}" cx="{}" cy="{}" r="3" fill="{color}" data-birth="{}" data-death="{death}"/>"#,
                fmt6(axis.x(bar.birth)),
                fmt6(y),
                fmt6(bar.birth)
            ));
        }
        let ly = MARGIN + 16.0 * k as f64;
        c.raw(&format!(
            r#"<circle cx="{}" cy="{}" r="4" fill="{color}"/>"#,
            fmt6(SIZE - MARGIN - 40.0),
            fmt6(ly)
        ));
        c.text(SIZE - MARGIN - 32.0, ly + 4.0, "start", &format!("H{k}"));
    }
    c.finish()
}
