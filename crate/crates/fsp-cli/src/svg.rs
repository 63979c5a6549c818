//! Minimal self-contained SVG charts: line charts for projection curves and
//! box plots for limb statistics. No styling dependencies; every document
//! stands alone.

use std::fmt::Write;

use fsp_core::formats::StatsFile;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct BoxSpec {
    pub label: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn esc(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if !(1e-3..1e4).contains(&magnitude) {
        return format!("{v:.2e}");
    }
    let mut s = format!("{v:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

/// Linear data-to-pixel mapping; degenerate ranges are padded so a single
/// value still lands mid-plot.
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(mut d0: f64, mut d1: f64, r0: f64, r1: f64) -> Scale {
        if !(d0.is_finite() && d1.is_finite()) {
            d0 = 0.0;
            d1 = 1.0;
        }
        if d0 == d1 {
            d0 -= 0.5;
            d1 += 0.5;
        }
        Scale { d0, d1, r0, r1 }
    }

    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.d0 + (self.d1 - self.d0) * i as f64 / n as f64)
            .collect()
    }
}

fn finite_bounds<I: Iterator<Item = f64>>(values: I) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 860.0;
    const H: f64 = 520.0;
    const L: f64 = 78.0;
    const R: f64 = 24.0;
    const T: f64 = 46.0;
    const B: f64 = 62.0;

    let (x0, x1) = finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = Scale::new(x0, x1, L, W - R);
    let sy = Scale::new(y0, y1, H - B, T);

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"26\" text-anchor=\"middle\" font-size=\"17\">{}</text>\n",
        W / 2.0,
        esc(title)
    );

    for t in sx.ticks(5) {
        let px = sx.map(t);
        let _ = write!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{T}\" x2=\"{px:.2}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{px:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            H - B,
            H - B + 18.0,
            fmt_num(t)
        );
    }
    for t in sy.ticks(5) {
        let py = sy.map(t);
        let _ = write!(
            out,
            "<line x1=\"{L}\" y1=\"{py:.2}\" x2=\"{:.1}\" y2=\"{py:.2}\" stroke=\"#ddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            W - R,
            L - 8.0,
            py + 4.0,
            fmt_num(t)
        );
    }
    let _ = write!(
        out,
        "<line x1=\"{L}\" y1=\"{0:.1}\" x2=\"{1:.1}\" y2=\"{0:.1}\" stroke=\"#333\"/>\n\
         <line x1=\"{L}\" y1=\"{T}\" x2=\"{L}\" y2=\"{0:.1}\" stroke=\"#333\"/>\n\
         <text x=\"{2:.1}\" y=\"{3:.1}\" text-anchor=\"middle\">{4}</text>\n\
         <text x=\"20\" y=\"{5:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {5:.1})\">{6}</text>\n",
        H - B,
        W - R,
        (L + W - R) / 2.0,
        H - 16.0,
        esc(x_label),
        (T + H - B) / 2.0,
        esc(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        // non-finite samples break the line into separate runs
        let mut run = String::new();
        let flush = |run: &mut String, out: &mut String| {
            // every point appends one trailing space; a drawable run needs two points
            if run.matches(' ').count() >= 2 {
                let _ = write!(
                    out,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                    run.trim_end()
                );
            }
            run.clear();
        };
        for (x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                let _ = write!(run, "{:.2},{:.2} ", sx.map(*x), sy.map(*y));
            } else {
                flush(&mut run, &mut out);
            }
        }
        flush(&mut run, &mut out);

        let ly = T + 16.0 + 18.0 * i as f64;
        let _ = write!(
            out,
            "<line x1=\"{0:.1}\" y1=\"{ly:.1}\" x2=\"{1:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\n\
             <text x=\"{2:.1}\" y=\"{3:.1}\">{4}</text>\n",
            L + 10.0,
            L + 34.0,
            L + 40.0,
            ly + 4.0,
            esc(&s.label)
        );
    }

    out.push_str("</svg>\n");
    out
}

/// One box-plot panel's inner markup, drawn relative to (0, 0); returns
/// (markup, width, height).
fn box_panel(title: &str, y_label: &str, boxes: &[BoxSpec]) -> (String, f64, f64) {
    const SLOT: f64 = 46.0;
    const BOX_W: f64 = 26.0;
    const L: f64 = 78.0;
    const R: f64 = 24.0;
    const T: f64 = 46.0;
    const B: f64 = 116.0;
    const PLOT_H: f64 = 300.0;

    let w = L + R + SLOT * boxes.len().max(1) as f64;
    let h = T + PLOT_H + B;
    let mut out = String::new();
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"26\" text-anchor=\"middle\" font-size=\"17\">{}</text>\n",
        w / 2.0,
        esc(title)
    );
    if boxes.is_empty() {
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#666\">no measured limbs</text>\n",
            w / 2.0,
            T + PLOT_H / 2.0
        );
        return (out, w, h);
    }

    let (lo, hi) = finite_bounds(boxes.iter().flat_map(|b| [b.min, b.max].into_iter()));
    let pad = (hi - lo).max(1e-9) * 0.05;
    let sy = Scale::new(lo - pad, hi + pad, T + PLOT_H, T);

    for t in sy.ticks(5) {
        let py = sy.map(t);
        let _ = write!(
            out,
            "<line x1=\"{L}\" y1=\"{py:.2}\" x2=\"{:.1}\" y2=\"{py:.2}\" stroke=\"#ddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\">{}</text>\n",
            w - R,
            L - 8.0,
            py + 4.0,
            fmt_num(t)
        );
    }
    let _ = write!(
        out,
        "<line x1=\"{L}\" y1=\"{0:.1}\" x2=\"{L}\" y2=\"{T}\" stroke=\"#333\"/>\n\
         <text x=\"20\" y=\"{1:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {1:.1})\">{2}</text>\n",
        T + PLOT_H,
        T + PLOT_H / 2.0,
        esc(y_label)
    );

    for (i, b) in boxes.iter().enumerate() {
        let cx = L + SLOT * (i as f64 + 0.5);
        let (y_min, y_max) = (sy.map(b.min), sy.map(b.max));
        let (y_q1, y_q3) = (sy.map(b.q1), sy.map(b.q3));
        let y_med = sy.map(b.median);
        let color = PALETTE[0];
        let _ = write!(
            out,
            "<line x1=\"{cx:.2}\" y1=\"{y_min:.2}\" x2=\"{cx:.2}\" y2=\"{y_max:.2}\" stroke=\"#555\"/>\n\
             <line x1=\"{0:.2}\" y1=\"{y_min:.2}\" x2=\"{1:.2}\" y2=\"{y_min:.2}\" stroke=\"#555\"/>\n\
             <line x1=\"{0:.2}\" y1=\"{y_max:.2}\" x2=\"{1:.2}\" y2=\"{y_max:.2}\" stroke=\"#555\"/>\n\
             <rect x=\"{2:.2}\" y=\"{y_q3:.2}\" width=\"{BOX_W}\" height=\"{3:.2}\" \
             fill=\"{color}\" fill-opacity=\"0.35\" stroke=\"{color}\"/>\n\
             <line x1=\"{2:.2}\" y1=\"{y_med:.2}\" x2=\"{4:.2}\" y2=\"{y_med:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{cx:.2}\" y=\"{5:.1}\" text-anchor=\"end\" font-size=\"11\" \
             transform=\"rotate(-45 {cx:.2} {5:.1})\">{6}</text>\n",
            cx - 7.0,
            cx + 7.0,
            cx - BOX_W / 2.0,
            (y_q1 - y_q3).max(0.5),
            cx + BOX_W / 2.0,
            T + PLOT_H + 16.0,
            esc(&b.label)
        );
    }
    (out, w, h)
}

pub fn box_plot(title: &str, y_label: &str, boxes: &[BoxSpec]) -> String {
    let (body, w, h) = box_panel(title, y_label, boxes);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.0} {h:.0}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n\
         <rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// One SVG with a limb-length box plot per person, stacked vertically.
pub fn stats_box_plots(stats: &StatsFile) -> String {
    let mut panels = Vec::new();
    for person in &stats.persons {
        let boxes: Vec<BoxSpec> = person
            .limbs
            .iter()
            .filter_map(|l| {
                Some(BoxSpec {
                    label: l.name.clone(),
                    min: l.min?,
                    q1: l.q1?,
                    median: l.median?,
                    q3: l.q3?,
                    max: l.max?,
                })
            })
            .collect();
        let title = format!(
            "person {} \u{2014} limb lengths over {} frames (m)",
            person.person_id, person.frames
        );
        panels.push(box_panel(&title, "length (m)", &boxes));
    }
    if panels.is_empty() {
        panels.push(box_panel("no persons", "length (m)", &[]));
    }

    let width = panels.iter().map(|p| p.1).fold(0.0, f64::max);
    let height: f64 = panels.iter().map(|p| p.2).sum();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.0} {height:.0}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n\
         <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    );
    let mut offset = 0.0;
    for (body, _, h) in panels {
        let _ = write!(out, "<g transform=\"translate(0 {offset:.0})\">\n{body}</g>\n");
        offset += h;
    }
    out.push_str("</svg>\n");
    out
}
