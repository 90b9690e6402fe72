//! Deterministic standalone SVG line plots of error-curve tables.
//!
//! One polyline per lambda series, sample count on the x axis, error on a
//! log10 y axis. All coordinates are formatted with fixed precision, so
//! identical input tables produce identical bytes.

use std::fmt::Write as _;

use crate::error::{PfrError, Result};
use crate::experiment::MeanErrorTable;

/// Plot geometry and labeling.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            title: "L2 error vs sample count".to_string(),
            width: 800,
            height: 560,
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
/// Errors at or below this are drawn on the log floor.
const LOG_FLOOR: f64 = 1e-16;

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Render an error-curve table as a standalone SVG document. The table must
/// provide (N, lambda, l2_error) rows; one line is drawn per distinct
/// lambda, largest first.
pub fn render_svg(table: &MeanErrorTable, spec: &PlotSpec) -> Result<String> {
    if table.rows.is_empty() {
        return Err(PfrError::invalid("cannot plot an empty table"));
    }
    let mut lambdas: Vec<u64> = table.rows.iter().map(|r| r.lambda.to_bits()).collect();
    lambdas.sort_unstable_by(|a, b| {
        f64::from_bits(*b)
            .partial_cmp(&f64::from_bits(*a))
            .unwrap()
    });
    lambdas.dedup();

    let n_min = table.rows.iter().map(|r| r.n).min().unwrap();
    let n_max = table.rows.iter().map(|r| r.n).max().unwrap();
    let log_err = |e: f64| e.max(LOG_FLOOR).log10();
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for r in &table.rows {
        let v = log_err(r.l2_error);
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    // pad degenerate ranges so the projection below stays finite
    if (y_max - y_min).abs() < 1e-9 {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let x_span = (n_max - n_min).max(1) as f64;

    let w = spec.width as f64;
    let h = spec.height as f64;
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |n: usize| MARGIN_LEFT + (n - n_min) as f64 / x_span * plot_w;
    let y_of = |e: f64| MARGIN_TOP + (y_max - log_err(e)) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{}" height="{}" fill="white"/>"#,
        spec.width, spec.height
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        fmt2(MARGIN_LEFT + plot_w / 2.0),
        xml_escape(&spec.title)
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP),
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP + plot_h)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP + plot_h),
        fmt2(MARGIN_LEFT + plot_w),
        fmt2(MARGIN_TOP + plot_h)
    );

    // y ticks at integer powers of ten
    let tick_lo = y_min.floor() as i64;
    let tick_hi = y_max.ceil() as i64;
    let step = (((tick_hi - tick_lo) as usize / 8) + 1) as i64;
    let mut tick = tick_lo;
    while tick <= tick_hi {
        let y = MARGIN_TOP + (y_max - tick as f64) / (y_max - y_min) * plot_h;
        if y >= MARGIN_TOP - 1.0 && y <= MARGIN_TOP + plot_h + 1.0 {
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#cccccc" stroke-width="0.5"/>"##,
                fmt2(MARGIN_LEFT),
                fmt2(y),
                fmt2(MARGIN_LEFT + plot_w),
                fmt2(y)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">1e{}</text>"#,
                fmt2(MARGIN_LEFT - 6.0),
                fmt2(y + 4.0),
                tick
            );
        }
        tick += step;
    }

    // x ticks on round sample counts
    let x_step = ((n_max - n_min) / 8).max(1);
    let mut n = n_min;
    while n <= n_max {
        let x = x_of(n);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            fmt2(x),
            fmt2(MARGIN_TOP + plot_h + 18.0),
            n
        );
        n += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">N</text>"#,
        fmt2(MARGIN_LEFT + plot_w / 2.0),
        fmt2(h - 12.0)
    );

    // one polyline per lambda, plus a legend entry
    for (idx, lambda_bits) in lambdas.iter().enumerate() {
        let lambda = f64::from_bits(*lambda_bits);
        let color = PALETTE[idx % PALETTE.len()];
        let mut points: Vec<(usize, f64)> = table
            .rows
            .iter()
            .filter(|r| r.lambda.to_bits() == *lambda_bits)
            .map(|r| (r.n, r.l2_error))
            .collect();
        points.sort_by_key(|(n, _)| *n);
        let coords: Vec<String> = points
            .iter()
            .map(|&(n, e)| format!("{},{}", fmt2(x_of(n)), fmt2(y_of(e))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color,
            coords.join(" ")
        );
        let ly = MARGIN_TOP + 14.0 + idx as f64 * 18.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.5"/>"#,
            fmt2(w - MARGIN_RIGHT + 10.0),
            fmt2(ly - 4.0),
            fmt2(w - MARGIN_RIGHT + 34.0),
            fmt2(ly - 4.0),
            color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">lambda={lambda:e}</text>"#,
            fmt2(w - MARGIN_RIGHT + 40.0),
            fmt2(ly)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
