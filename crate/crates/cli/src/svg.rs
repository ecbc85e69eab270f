//! Minimal SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub log_x: bool,
    pub hline: Option<f64>,
    pub vline: Option<f64>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn t(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// Step from {1, 2, 5} × 10^k giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let m = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    let mults: &[f64] = if b - a <= 2 { &[1.0, 2.0, 5.0] } else { &[1.0] };
    let mut ticks = Vec::new();
    for e in a..=b {
        for m in mults {
            let v = m * 10f64.powi(e);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                ticks.push(v);
            }
        }
    }
    ticks
}

fn decimals_for(step: f64) -> usize {
    (-(step.abs().log10().floor())).clamp(0.0, 12.0) as usize
}

fn label(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render(plot: &LinePlot) -> String {
    let xs = plot.points.iter().map(|p| p.0);
    let ys = plot.points.iter().map(|p| p.1).filter(|y| y.is_finite());
    let (mut x_lo, mut x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let (mut y_lo, mut y_hi) = ys
        .chain(plot.hline)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
            (a.min(y), b.max(y))
        });
    if !(x_lo < x_hi) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if !(y_lo < y_hi) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let x = Axis {
        lo: x_lo,
        hi: x_hi,
        log: plot.log_x && x_lo > 0.0,
    };
    let y = Axis {
        lo: y_lo - pad,
        hi: y_hi + pad,
        log: false,
    };
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |v: f64| LEFT + x.t(v) * pw;
    let py = |v: f64| TOP + (1.0 - y.t(v)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        LEFT + pw / 2.0,
        esc(&plot.title)
    );
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );

    let xt = if x.log {
        log_ticks(x.lo, x.hi)
    } else {
        linear_ticks(x.lo, x.hi)
    };
    let x_step = if x.log {
        None
    } else {
        Some(nice_step(x.hi - x.lo, 6.0))
    };
    for t in xt {
        let p = px(t);
        let dec = decimals_for(x_step.unwrap_or(t));
        let _ = writeln!(
            s,
            "<line x1=\"{p:.2}\" y1=\"{:.2}\" x2=\"{p:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            TOP + ph,
            TOP + ph + 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{p:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            TOP + ph + 22.0,
            label(t, dec)
        );
    }
    let y_dec = decimals_for(nice_step(y.hi - y.lo, 6.0));
    for t in linear_ticks(y.lo, y.hi) {
        let p = py(t);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{p:.2}\" x2=\"{LEFT}\" y2=\"{p:.2}\" stroke=\"black\"/>",
            LEFT - 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 10.0,
            p + 4.0,
            label(t, y_dec)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        esc(&plot.x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        esc(&plot.y_label)
    );

    if let Some(h) = plot.hline.filter(|h| y.contains(*h)) {
        let p = py(h);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT}\" y1=\"{p:.2}\" x2=\"{:.2}\" y2=\"{p:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
            LEFT + pw
        );
    }
    if let Some(v) = plot.vline.filter(|v| x.contains(*v)) {
        let p = px(v);
        let _ = writeln!(
            s,
            "<line x1=\"{p:.2}\" y1=\"{TOP}\" x2=\"{p:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
            TOP + ph
        );
    }

    let pts: Vec<String> = plot
        .points
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b)))
        .collect();
    let _ = writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"{}\"/>",
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}
