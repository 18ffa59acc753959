//! Performance profiles as a standalone SVG: relative profiles on a log2
//! axis on the left, absolute profiles on a log10 axis on the right.

use std::fmt::Write as _;

use crate::metrics::{Curve, Profiles};

const W: f64 = 420.0;
const H: f64 = 300.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Panel {
    x0: f64,
    lo: f64,
    hi: f64,
}

impl Panel {
    fn px(&self, v: f64) -> f64 {
        let span = (self.hi - self.lo).max(1e-12);
        self.x0 + PAD + (v - self.lo) / span * (W - 2.0 * PAD)
    }
    fn py(v: f64) -> f64 {
        H - PAD - v * (H - 2.0 * PAD)
    }
}

/// Range of `log(tau)` over all breakpoints, widened when degenerate.
fn range(curves: &[Curve], log: fn(f64) -> f64) -> (f64, f64) {
    let vals = curves.iter().flat_map(|c| c.taus.iter().map(|&t| log(t)));
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn panel(out: &mut String, curves: &[Curve], x0: f64, title: &str, xlabel: &str, log: fn(f64) -> f64) {
    let (lo, hi) = range(curves, log);
    let p = Panel { x0, lo, hi };
    let (l, r) = (p.px(lo), p.px(hi));
    let (b, t) = (Panel::py(0.0), Panel::py(1.0));
    let _ =
        writeln!(out, r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#888"/>"##, r - l, b - t);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{title}</text>"#,
        (l + r) / 2.0,
        t - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#,
        (l + r) / 2.0,
        b + 36.0
    );
    for (v, label) in [(lo, lo), (hi, hi)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{label:.2}</text>"#,
            p.px(v),
            b + 14.0
        );
    }
    for v in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{v:.1}</text>"#,
            l - 4.0,
            Panel::py(v) + 3.0
        );
    }
    for (i, c) in curves.iter().enumerate() {
        // Horizontal then vertical segments: the value jumps at each
        // breakpoint and holds until the next.
        let mut pts = format!("{l:.2},{b:.2}");
        let mut prev = 0.0;
        for (&tau, &v) in c.taus.iter().zip(&c.values) {
            let x = p.px(log(tau));
            let _ = write!(pts, " {x:.2},{:.2} {x:.2},{:.2}", Panel::py(prev), Panel::py(v));
            prev = v;
        }
        let _ = write!(pts, " {r:.2},{:.2}", Panel::py(prev));
        let _ = writeln!(
            out,
            r#"<polyline points="{pts}" fill="none" stroke="{}" stroke-width="2"/>"#,
            COLORS[i % COLORS.len()]
        );
    }
}

pub fn profiles_svg(solvers: &[String], prof: &Profiles) -> String {
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        2.0 * W,
        H + 30.0
    );
    out.push('\n');
    panel(&mut out, &prof.relative, 0.0, "Relative profile", "log2(tau)", f64::log2);
    panel(&mut out, &prof.absolute, W, "Absolute profile", "log10(seconds)", f64::log10);
    for (i, name) in solvers.iter().enumerate() {
        let x = PAD + 140.0 * i as f64;
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(out, r#"<rect x="{x}" y="{}" width="14" height="4" fill="{color}"/>"#, H + 12.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12">{name}</text>"#, x + 20.0, H + 18.0);
    }
    out.push_str("</svg>\n");
    out
}
