//! Static SVG plot of a rank-citation curve with its baseline and hump.
//!
//! Output is a pure function of the inputs: coordinates are printed with
//! two decimals and elements are emitted in a fixed order.

use std::fmt::Write as _;

use crate::anomaly::{BaselineFit, HumpRegion};
use crate::error::RenderError;
use crate::metrics::{h_index, RankCitationCurve};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: u32,
    pub height: u32,
    /// Plot `log10(1 + c)` on the vertical axis.
    pub log_y: bool,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800,
            height: 500,
            log_y: false,
            title: None,
        }
    }
}

const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Frame {
    n: usize,
    w: f64,
    h: f64,
    y_max: f64,
    log_y: bool,
}

impl Frame {
    fn x(&self, rank: f64) -> f64 {
        let span = (self.n.max(2) - 1) as f64;
        LEFT + (rank - 1.0) / span * self.w
    }

    fn yv(&self, c: f64) -> f64 {
        if self.log_y {
            c.max(0.0).ln_1p() / std::f64::consts::LN_10
        } else {
            c.max(0.0)
        }
    }

    fn y(&self, c: f64) -> f64 {
        let v = self.yv(c).min(self.y_max);
        TOP + self.h - v / self.y_max * self.h
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// "Nice" tick step for a span, from the 1-2-5 series.
fn tick_step(span: f64, target: usize) -> f64 {
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn fmt_tick(v: f64) -> String {
    if v.fract().abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

pub fn render_curve_svg(
    curve: &RankCitationCurve,
    fit: Option<&BaselineFit>,
    hump: Option<&HumpRegion>,
    opts: &SvgOptions,
) -> Result<String, RenderError> {
    if curve.is_empty() {
        return Err(RenderError::EmptyCurve);
    }
    let n = curve.len();
    let (width, height) = (opts.width.max(200) as f64, opts.height.max(150) as f64);
    let mut f = Frame {
        n,
        w: width - LEFT - RIGHT,
        h: height - TOP - BOTTOM,
        y_max: 1.0,
        log_y: opts.log_y,
    };
    let c_max = curve.entries[0].citations as f64;
    f.y_max = (f.yv(c_max) * 1.05).max(1.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = width,
        h = height
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    if let Some(title) = &opts.title {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            width / 2.0,
            escape(title)
        );
    }

    if let Some(region) = hump {
        let (lo, hi) = region.rank_interval;
        let x0 = f.x(lo as f64 - 0.5).max(LEFT);
        let x1 = f.x(hi as f64 + 0.5).min(LEFT + f.w);
        let _ = writeln!(
            s,
            r##"<rect class="hump" x="{x0:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="#f4a261" fill-opacity="0.3"/>"##,
            (x1 - x0).max(0.5),
            f.h
        );
    }

    // axes
    let (x_axis_y, x_right) = (TOP + f.h, LEFT + f.w);
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{LEFT:.2}" y1="{x_axis_y:.2}" x2="{x_right:.2}" y2="{x_axis_y:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{x_axis_y:.2}" stroke="black"/>"#
    );
    let x_step = tick_step((n.max(2) - 1) as f64, 8).max(1.0);
    let mut t = 1.0;
    while t <= n as f64 + 1e-9 {
        let x = f.x(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{x_axis_y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x_axis_y + 5.0,
            x_axis_y + 18.0,
            fmt_tick(t)
        );
        t = if t == 1.0 && x_step > 1.0 {
            x_step
        } else {
            t + x_step
        };
    }
    let y_step = tick_step(f.y_max, 6);
    let mut v = 0.0;
    while v <= f.y_max + 1e-9 {
        let y = TOP + f.h - v / f.y_max * f.h;
        let label = if f.log_y {
            fmt_tick(10f64.powf(v) - 1.0)
        } else {
            fmt_tick(v)
        };
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
        v += y_step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Rank</text>"#,
        LEFT + f.w / 2.0,
        height - 10.0
    );
    let y_label = if f.log_y {
        "Citations (log scale)"
    } else {
        "Citations"
    };
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        TOP + f.h / 2.0,
        TOP + f.h / 2.0
    );

    if let Some(fit) = fit {
        let mut pts = String::new();
        for (i, &c) in fit.fitted.iter().enumerate().take(n) {
            if !pts.is_empty() {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.2},{:.2}", f.x((i + 1) as f64), f.y(c));
        }
        let _ = writeln!(
            s,
            r##"<polyline class="baseline" points="{pts}" fill="none" stroke="#2a6f97" stroke-width="1.5"/>"##
        );
    }

    let h = h_index(curve);
    if h > 0 {
        let x = f.x(h as f64);
        let _ = writeln!(
            s,
            r##"<line class="h-marker" x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{x_axis_y:.2}" stroke="#c1121f" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.2}" fill="#c1121f">h = {h}</text>"##,
            x + 4.0,
            TOP + 12.0
        );
    }

    let _ = writeln!(s, r#"<g class="points" fill="black">"#);
    for e in &curve.entries {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5"/>"#,
            f.x(e.rank as f64),
            f.y(e.citations as f64)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_curve_is_rejected() {
        let r = render_curve_svg(
            &RankCitationCurve::default(),
            None,
            None,
            &SvgOptions::default(),
        );
        assert!(matches!(r, Err(RenderError::EmptyCurve)));
    }

    #[test]
    fn three_points() {
        let curve = RankCitationCurve::from_citations(&[5, 3, 1]);
        let svg = render_curve_svg(&curve, None, None, &SvgOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("h = 2"));
    }

    #[test]
    fn single_point_and_zero_counts_render() {
        for counts in [vec![0u64], vec![7], vec![0, 0, 0]] {
            let curve = RankCitationCurve::from_citations(&counts);
            let opts = SvgOptions {
                log_y: true,
                ..SvgOptions::default()
            };
            let svg = render_curve_svg(&curve, None, None, &opts).unwrap();
            assert!(!svg.contains("NaN") && !svg.contains("inf"));
        }
    }

    #[test]
    fn title_is_escaped() {
        let curve = RankCitationCurve::from_citations(&[2, 1]);
        let opts = SvgOptions {
            title: Some("A & B <x>".into()),
            ..SvgOptions::default()
        };
        let svg = render_curve_svg(&curve, None, None, &opts).unwrap();
        assert!(svg.contains("A &amp; B &lt;x&gt;"));
    }
}
