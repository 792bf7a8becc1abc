//! Dependency-free SVG renderings: density heatmaps with trajectory
//! overlays, and line plots. Output is byte-deterministic for equal input.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const MAX_ROWS: usize = 256;
const LEVELS: usize = 64;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

/// Monotone colour ramp, u in [0, 1].
fn colour(u: f64) -> String {
    let u = u.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (u.floor() as usize).min(VIRIDIS.len() - 2);
    let f = u - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Round steps of 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
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

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(
    out: &mut String,
    f: &Frame,
    x_label: &str,
    y_label: &str,
    y_tick_text: impl Fn(f64) -> String,
) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for v in ticks(f.x0, f.x1, 8) {
        let x = f.px(v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            b + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            b + 18.0,
            label(v)
        );
    }
    for v in ticks(f.y0, f.y1, 6) {
        let y = f.py(v);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#,
            l - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 8.0,
            y + 4.0,
            y_tick_text(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Trajectory overlay: output times and positions[i][k].
pub struct Overlay<'a> {
    pub times: &'a [f64],
    pub positions: &'a [Vec<f64>],
}

/// Density heatmap, time horizontal, x vertical. Densities are clipped at
/// `clip_fraction` of the series-wide maximum before colouring.
pub fn render_heatmap(
    title: &str,
    times: &[f64],
    xs: &[f64],
    density: &[Vec<f64>],
    overlay: Option<Overlay<'_>>,
    clip_fraction: f64,
) -> Result<String> {
    let mut bad = Vec::new();
    if times.len() < 2 {
        bad.push("heatmap needs at least two snapshot times".to_string());
    }
    if density.len() != times.len() {
        bad.push(format!(
            "{} density rows for {} times",
            density.len(),
            times.len()
        ));
    }
    if density.iter().any(|r| r.len() != xs.len()) || xs.len() < 2 {
        bad.push("every density row must match the x axis".to_string());
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        bad.push("snapshot times must increase strictly".to_string());
    }
    if !(clip_fraction > 0.0 && clip_fraction <= 1.0) {
        bad.push(format!(
            "clip_fraction must lie in (0, 1], got {clip_fraction}"
        ));
    }
    if let (Some(o), Some(&t0), Some(&t1)) = (&overlay, times.first(), times.last()) {
        let eps = 1e-9 * (t1 - t0).abs().max(1.0);
        if o.times.iter().any(|&t| t < t0 - eps || t > t1 + eps) {
            bad.push("trajectory times fall outside the density time axis".to_string());
        }
        if o.positions.iter().any(|p| p.len() != o.times.len()) {
            bad.push("trajectory rows must match the trajectory time axis".to_string());
        }
    }
    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }

    let n = xs.len();
    let dx = xs[1] - xs[0];
    let frame = Frame {
        x0: times[0],
        x1: times[times.len() - 1],
        y0: xs[0],
        y1: xs[n - 1] + dx,
    };
    let global = density.iter().flatten().copied().fold(0.0, f64::max);
    let cap = clip_fraction * global;
    let rows = n.min(MAX_ROWS);
    let per_row = n.div_ceil(rows);

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for (k, col) in density.iter().enumerate() {
        // each column spans halfway to its neighbours
        let ta = if k == 0 {
            times[0]
        } else {
            0.5 * (times[k - 1] + times[k])
        };
        let tb = if k + 1 == times.len() {
            times[k]
        } else {
            0.5 * (times[k] + times[k + 1])
        };
        let (xa, xb) = (frame.px(ta), frame.px(tb));
        let levels: Vec<usize> = col
            .chunks(per_row)
            .map(|c| {
                let v = c.iter().copied().fold(0.0, f64::max).min(cap);
                if cap > 0.0 {
                    ((v / cap) * (LEVELS - 1) as f64).round() as usize
                } else {
                    0
                }
            })
            .collect();
        let mut start = 0;
        while start < levels.len() {
            let mut stop = start + 1;
            while stop < levels.len() && levels[stop] == levels[start] {
                stop += 1;
            }
            let lo = xs[0] + (start * per_row) as f64 * dx;
            let hi = xs[0] + ((stop * per_row).min(n)) as f64 * dx;
            let (ya, yb) = (frame.py(hi), frame.py(lo));
            let _ = writeln!(
                out,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                xb - xa,
                yb - ya,
                colour(levels[start] as f64 / (LEVELS - 1) as f64)
            );
            start = stop;
        }
    }
    let _ = writeln!(out, "</g>");
    if let Some(o) = overlay {
        let _ = writeln!(out, r#"<g fill="none" stroke="white" stroke-width="0.8">"#);
        for p in o.positions {
            let pts: Vec<String> = o
                .times
                .iter()
                .zip(p)
                .map(|(&t, &x)| {
                    format!(
                        "{:.2},{:.2}",
                        frame.px(t),
                        frame.py(x.clamp(frame.y0, frame.y1))
                    )
                })
                .collect();
            let _ = writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(out, "</g>");
    }
    axes(&mut out, &frame, "t / tau", "x / sigma", label);
    out.push_str("</svg>\n");
    Ok(out)
}

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

const STYLES: [(&str, &str); 4] = [
    ("black", ""),
    ("#d62728", "8 4"),
    ("#1f77b4", "2 3"),
    ("#2ca02c", "8 3 2 3"),
];

/// Line plot; NaN (and non-positive values on a log axis) break a line.
pub fn render_lines(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    log_y: bool,
) -> Result<String> {
    let mut bad = Vec::new();
    for s in series {
        if s.xs.len() != s.ys.len() {
            bad.push(format!(
                "series `{}`: {} x values for {} y values",
                s.label,
                s.xs.len(),
                s.ys.len()
            ));
        }
    }
    if series.is_empty() {
        bad.push("line plot needs at least one series".to_string());
    }
    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }
    let map_y = |y: f64| {
        if log_y {
            if y > 0.0 {
                y.log10()
            } else {
                f64::NAN
            }
        } else {
            y
        }
    };
    let finite = |v: &f64| v.is_finite();
    let all_x: Vec<f64> = series
        .iter()
        .flat_map(|s| s.xs.iter().copied())
        .filter(finite)
        .collect();
    let all_y: Vec<f64> = series
        .iter()
        .flat_map(|s| s.ys.iter().map(|&y| map_y(y)))
        .filter(finite)
        .collect();
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = span(&all_x);
    let (ylo, yhi) = span(&all_y);
    let pad = 0.05 * (yhi - ylo);
    let frame = Frame {
        x0,
        x1,
        y0: ylo - pad,
        y1: yhi + pad,
    };

    let mut out = String::new();
    header(&mut out, title);
    for (i, s) in series.iter().enumerate() {
        let (stroke, dash) = STYLES[i % STYLES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash_attr}/>"#,
                    seg.join(" ")
                );
            }
            seg.clear();
        };
        for (&x, &y) in s.xs.iter().zip(s.ys) {
            let y = map_y(y);
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", frame.px(x), frame.py(y)));
            } else {
                flush(&mut segment, &mut out);
            }
        }
        flush(&mut segment, &mut out);
        let ly = TOP + 18.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT - 170.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{stroke}" stroke-width="1.5"{dash_attr}/>"#,
            lx + 30.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 36.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    let tick_text = |v: f64| {
        if log_y {
            format!("1e{}", label(v))
        } else {
            label(v)
        }
    };
    axes(&mut out, &frame, x_label, y_label, tick_text);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 2.0, 8), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(ticks(-25.0, 25.0, 6), vec![-20.0, -10.0, 0.0, 10.0, 20.0]);
    }

    #[test]
    fn colour_ramp_endpoints() {
        assert_eq!(colour(0.0), "#440154");
        assert_eq!(colour(1.0), "#fde725");
    }

    #[test]
    fn mismatched_axes_are_rejected() {
        let xs = [0.0, 1.0, 2.0];
        let rows = vec![vec![0.0; 3], vec![0.0; 2]];
        assert!(matches!(
            render_heatmap("t", &[0.0, 1.0], &xs, &rows, None, 0.5),
            Err(Error::Config(_))
        ));
        let rows = vec![vec![1.0; 3], vec![2.0; 3]];
        let pos = vec![vec![0.0, 1.0, 2.0]];
        let o = Overlay {
            times: &[0.0, 1.0, 5.0],
            positions: &pos,
        };
        assert!(render_heatmap("t", &[0.0, 1.0], &xs, &rows, Some(o), 0.5).is_err());
        assert!(render_heatmap("t", &[0.0, 1.0], &xs, &rows, None, 0.5).is_ok());
    }
}
