//! Standalone SVG plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Plot {
    /// Density histogram of `sample` with a curve on top.
    Histogram {
        title: String,
        xlabel: String,
        sample: Vec<f64>,
        overlay: Vec<(f64, f64)>,
        overlay_label: String,
    },
    /// Two empirical CDFs.
    Ecdf {
        title: String,
        a: Vec<f64>,
        a_label: String,
        b: Vec<f64>,
        b_label: String,
    },
    /// Matched quantiles with the diagonal.
    Qq {
        title: String,
        xlabel: String,
        ylabel: String,
        x: Vec<f64>,
        y: Vec<f64>,
    },
    /// `y` against `N` on log-log axes, with an optional fit `(slope, intercept)`
    /// in natural logs.
    Rate {
        title: String,
        ylabel: String,
        points: Vec<(f64, f64)>,
        fit: Option<(f64, f64)>,
    },
}

impl Plot {
    pub fn histogram(
        title: impl Into<String>,
        xlabel: &str,
        sample: Vec<f64>,
        overlay: Vec<(f64, f64)>,
        overlay_label: &str,
    ) -> Self {
        Plot::Histogram {
            title: title.into(),
            xlabel: xlabel.into(),
            sample,
            overlay,
            overlay_label: overlay_label.into(),
        }
    }

    pub fn ecdf(title: impl Into<String>, a: Vec<f64>, a_label: &str, b: Vec<f64>, b_label: &str) -> Self {
        Plot::Ecdf {
            title: title.into(),
            a,
            a_label: a_label.into(),
            b,
            b_label: b_label.into(),
        }
    }

    pub fn qq(title: impl Into<String>, xlabel: &str, ylabel: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Plot::Qq {
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            x,
            y,
        }
    }

    pub fn rate(title: &str, ylabel: &str, points: Vec<(f64, f64)>, fit: Option<(f64, f64)>) -> Self {
        Plot::Rate {
            title: title.into(),
            ylabel: ylabel.into(),
            points,
            fit,
        }
    }

    pub fn to_svg(&self) -> String {
        match self {
            Plot::Histogram {
                title,
                xlabel,
                sample,
                overlay,
                overlay_label,
            } => histogram_svg(title, xlabel, sample, overlay, overlay_label),
            Plot::Ecdf {
                title,
                a,
                a_label,
                b,
                b_label,
            } => ecdf_svg(title, a, a_label, b, b_label),
            Plot::Qq {
                title,
                xlabel,
                ylabel,
                x,
                y,
            } => qq_svg(title, xlabel, ylabel, x, y),
            Plot::Rate {
                title,
                ylabel,
                points,
                fit,
            } => rate_svg(title, ylabel, points, *fit),
        }
    }
}

pub fn escape(s: &str) -> String {
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

/// Linear map from a data range onto the plot area.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new((x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Self {
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn finite_range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let r = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if r.0 <= r.1 {
        r
    } else {
        (0.0, 1.0)
    }
}

/// Roughly five round tick positions in `[a, b]`.
fn ticks(a: f64, b: f64) -> Vec<f64> {
    let span = b - a;
    if !(span > 0.0) {
        return vec![a];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (a / step).ceil() * step;
    let mut out = Vec::new();
    while t <= b + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, f: &Frame, xt: &[(f64, String)], yt: &[(f64, String)], xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for (x, lab) in xt {
        let p = f.px(*x);
        let _ = writeln!(
            s,
            r#"<line x1="{p:.2}" y1="{b}" x2="{p:.2}" y2="{:.1}" stroke="black"/><text x="{p:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            b + 5.0,
            b + 18.0,
            escape(lab)
        );
    }
    for (y, lab) in yt {
        let p = f.py(*y);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{p:.2}" x2="{l}" y2="{p:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 5.0,
            l - 8.0,
            p + 4.0,
            escape(lab)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn linear_ticks(a: f64, b: f64) -> Vec<(f64, String)> {
    ticks(a, b).into_iter().map(|t| (t, label(t))).collect()
}

fn polyline(s: &mut String, f: &Frame, pts: impl Iterator<Item = (f64, f64)>, color: &str, dash: bool) {
    let mut d = String::new();
    for (x, y) in pts.filter(|p| p.0.is_finite() && p.1.is_finite()) {
        let _ = write!(d, "{:.2},{:.2} ", f.px(x), f.py(y));
    }
    let extra = if dash { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{extra}/>"#,
        d.trim_end()
    );
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * i as f64;
        let x = W - RIGHT - 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 4.0,
            x + 20.0,
            y - 4.0,
            x + 26.0,
            y,
            escape(name)
        );
    }
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

fn histogram_svg(title: &str, xlabel: &str, sample: &[f64], overlay: &[(f64, f64)], overlay_label: &str) -> String {
    let mut s = open(title);
    let xr = finite_range(sample.iter().copied().chain(overlay.iter().map(|p| p.0)));
    let n = sample.len();
    let bins = ((n as f64).sqrt().round() as usize).clamp(10, 60);
    let width = if xr.1 > xr.0 { (xr.1 - xr.0) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in sample.iter().filter(|v| v.is_finite()) {
        let i = (((v - xr.0) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let dens: Vec<f64> = counts.iter().map(|&c| c as f64 / (n.max(1) as f64 * width)).collect();
    let ytop = dens
        .iter()
        .copied()
        .chain(overlay.iter().map(|p| p.1))
        .fold(0.0, f64::max)
        * 1.05;
    let f = Frame::new(xr, (0.0, ytop));
    axes(&mut s, &f, &linear_ticks(f.x0, f.x1), &linear_ticks(0.0, f.y1), xlabel, "density");
    for (i, d) in dens.iter().enumerate() {
        let x = xr.0 + i as f64 * width;
        let (px, py) = (f.px(x), f.py(*d));
        let _ = writeln!(
            s,
            r##"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>"##,
            f.px(x + width) - px,
            f.py(0.0) - py
        );
    }
    polyline(&mut s, &f, overlay.iter().copied(), "#d62728", false);
    legend(&mut s, &[("sample", "#3182bd"), (overlay_label, "#d62728")]);
    close(s)
}

/// ECDF as at most `max_points` steps.
fn ecdf_points(v: &[f64], max_points: usize) -> Vec<(f64, f64)> {
    let mut s: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let stride = n.div_ceil(max_points).max(1);
    let mut out = vec![(s[0], 0.0)];
    let mut i = 0;
    while i < n {
        out.push((s[i], (i + 1) as f64 / n as f64));
        i += stride;
    }
    out.push((s[n - 1], 1.0));
    out
}

fn ecdf_svg(title: &str, a: &[f64], a_label: &str, b: &[f64], b_label: &str) -> String {
    let mut s = open(title);
    let xr = finite_range(a.iter().chain(b).copied());
    let f = Frame::new(xr, (0.0, 1.0));
    axes(&mut s, &f, &linear_ticks(f.x0, f.x1), &linear_ticks(0.0, 1.0), "value", "cumulative probability");
    polyline(&mut s, &f, ecdf_points(a, 1000).into_iter(), "#3182bd", false);
    polyline(&mut s, &f, ecdf_points(b, 1000).into_iter(), "#d62728", true);
    legend(&mut s, &[(a_label, "#3182bd"), (b_label, "#d62728")]);
    close(s)
}

fn qq_svg(title: &str, xlabel: &str, ylabel: &str, x: &[f64], y: &[f64]) -> String {
    let mut s = open(title);
    let r = finite_range(x.iter().chain(y).copied());
    let f = Frame::new(r, r);
    axes(&mut s, &f, &linear_ticks(f.x0, f.x1), &linear_ticks(f.y0, f.y1), xlabel, ylabel);
    polyline(&mut s, &f, [(f.x0, f.x0), (f.x1, f.x1)].into_iter(), "#7f7f7f", true);
    for (a, b) in x.iter().zip(y).filter(|p| p.0.is_finite() && p.1.is_finite()) {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="#3182bd"/>"##,
            f.px(*a),
            f.py(*b)
        );
    }
    close(s)
}

fn rate_svg(title: &str, ylabel: &str, points: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let mut s = open(title);
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.log10(), p.1.log10()))
        .collect();
    let xr = finite_range(pts.iter().map(|p| p.0));
    let yr = finite_range(pts.iter().map(|p| p.1));
    let padx = 0.05 * (xr.1 - xr.0).max(0.1);
    let pady = 0.1 * (yr.1 - yr.0).max(0.1);
    let f = Frame::new((xr.0 - padx, xr.1 + padx), (yr.0 - pady, yr.1 + pady));
    let xt: Vec<(f64, String)> = points
        .iter()
        .filter(|p| p.0 > 0.0)
        .map(|p| (p.0.log10(), label(p.0)))
        .collect();
    let yt: Vec<(f64, String)> = ticks(f.y0, f.y1)
        .into_iter()
        .map(|t| (t, label(10f64.powf(t))))
        .collect();
    axes(&mut s, &f, &xt, &yt, "N (log scale)", &format!("{ylabel} (log scale)"));
    if let Some((slope, intercept)) = fit {
        let ln10 = std::f64::consts::LN_10;
        let line = [f.x0, f.x1].map(|lx| (lx, (intercept + slope * lx * ln10) / ln10));
        polyline(&mut s, &f, line.into_iter(), "#d62728", true);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">slope {}</text>"#,
            LEFT + 10.0,
            TOP + 16.0,
            escape(&format!("{slope:.3}"))
        );
    }
    polyline(&mut s, &f, pts.iter().copied(), "#3182bd", false);
    for (x, y) in &pts {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#3182bd"/>"##,
            f.px(*x),
            f.py(*y)
        );
    }
    close(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(-2.0, 2.0), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn degenerate_inputs_still_render() {
        for p in [
            Plot::histogram("t", "x", vec![], vec![], "l"),
            Plot::ecdf("t", vec![1.0], "a", vec![], "b"),
            Plot::qq("t", "x", "y", vec![0.0], vec![0.0]),
            Plot::rate("t", "y", vec![(10.0, 1.0)], None),
        ] {
            let s = p.to_svg();
            assert!(s.ends_with("</svg>\n") && !s.contains("NaN"));
        }
    }
}
