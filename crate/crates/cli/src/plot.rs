//! Static SVG convergence plots.

use std::fmt::Write;

use ratlog_core::aak::{DistanceSide, RatioRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn colour(side: DistanceSide) -> &'static str {
    match side {
        DistanceSide::Minus => "#1f77b4",
        DistanceSide::Plus => "#d62728",
        DistanceSide::Merged => "#2ca02c",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `n^gamma rho_n` against `n` on a log axis, one polyline per side, with a
/// dashed horizontal line at each predicted limit.
pub fn convergence_svg(title: &str, gamma: f64, rows: &[RatioRow], limits: &[(DistanceSide, f64)]) -> String {
    let pts: Vec<&RatioRow> = rows
        .iter()
        .filter(|r| r.n >= 1 && r.scaled.is_finite())
        .collect();
    let lims: Vec<(DistanceSide, f64)> = limits.iter().copied().filter(|(_, a)| a.is_finite()).collect();

    let n_hi = pts.iter().map(|r| r.n).max().unwrap_or(2).max(2) as f64;
    let x_hi = n_hi.ln();
    let mut y_lo = 0.0f64;
    let mut y_hi = pts
        .iter()
        .map(|r| r.scaled)
        .chain(lims.iter().map(|l| l.1))
        .fold(0.0f64, f64::max);
    for r in &pts {
        y_lo = y_lo.min(r.scaled);
    }
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    y_hi *= 1.1;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |n: f64| LEFT + pw * n.ln() / x_hi;
    let sy = |y: f64| TOP + ph * (1.0 - (y - y_lo) / (y_hi - y_lo));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    // decade-style ticks at powers of two
    let mut n = 1.0;
    while n <= n_hi {
        let x = sx(n);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{n}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0
        );
        n *= 2.0;
    }
    for i in 0..=4 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let py = sy(y);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">n (log scale)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">n^{gamma} rho_n</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (side, a) in &lims {
        let y = sy(*a);
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{}" stroke-dasharray="6 4"/>"#,
            LEFT + pw,
            colour(*side)
        );
    }

    let mut legend_y = TOP + 10.0;
    for side in [DistanceSide::Minus, DistanceSide::Plus, DistanceSide::Merged] {
        let line: Vec<String> = pts
            .iter()
            .filter(|r| r.side == side)
            .map(|r| format!("{:.2},{:.2}", sx(r.n as f64), sy(r.scaled)))
            .collect();
        let has_limit = lims.iter().any(|l| l.0 == side);
        if line.is_empty() && !has_limit {
            continue;
        }
        if !line.is_empty() {
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                line.join(" "),
                colour(side)
            );
        }
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            colour(side),
            lx + 26.0,
            legend_y + 4.0,
            side.as_str()
        );
        legend_y += 18.0;
    }
    out.push_str("</svg>\n");
    out
}
