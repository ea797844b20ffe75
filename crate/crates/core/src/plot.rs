//! Minimal SVG line charts of a monitor series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::MonitorRow;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlotOptions {
    /// Logarithmic y axis for the criteria panels.
    pub log_criteria: bool,
}

pub struct Curve<'a> {
    pub label: &'a str,
    pub values: Vec<f64>,
}

/// Renders one chart. With `log_y`, nonpositive samples are drawn at the
/// smallest positive value; if there is none the axis stays linear.
pub fn render_chart(title: &str, t: &[f64], curves: &[Curve], log_y: bool) -> String {
    let floor = curves
        .iter()
        .flat_map(|c| c.values.iter().copied())
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let log_y = log_y && floor.is_finite();
    let map_y = |v: f64| if log_y { v.max(floor).log10() } else { v };

    let ys: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.values.iter().map(|&v| map_y(v)))
        .filter(|v| v.is_finite())
        .collect();
    let (mut y0, mut y1) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(y0.is_finite() && y1.is_finite()) {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 - y0 <= 0.0 {
        let pad = if y0 == 0.0 { 1.0 } else { 0.5 * y0.abs() };
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let (t0, t1) = (t[0], t[t.len() - 1]);
    let span_t = if t1 > t0 { t1 - t0 } else { 1.0 };
    let px = |x: f64| MARGIN + (x - t0) / span_t * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    // axes
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black"><line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}"/></g>"#
    );
    let label = |v: f64| if log_y { format!("1e{v:.2}") } else { format!("{v:.4e}") };
    let _ = writeln!(
        s,
        r#"<g class="ticks" font-family="sans-serif" font-size="11"><text x="{}" y="{}" text-anchor="end">{}</text><text x="{}" y="{}" text-anchor="end">{}</text><text x="{left}" y="{}">{t0:.4}</text><text x="{right}" y="{}" text-anchor="end">{t1:.4}</text><text x="{}" y="{}" text-anchor="middle">t</text></g>"#,
        left - 4.0,
        bottom,
        label(y0),
        left - 4.0,
        top + 4.0,
        label(y1),
        bottom + 16.0,
        bottom + 16.0,
        WIDTH / 2.0,
        bottom + 32.0,
    );
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut points = String::new();
        for (&ti, &v) in t.iter().zip(&c.values) {
            let y = map_y(v);
            if y.is_finite() {
                let _ = write!(points, "{:.3},{:.3} ", px(ti), py(y));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(c.label),
            points.trim_end()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            right - 120.0,
            top + 16.0 * (k as f64 + 1.0),
            escape(c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `energy.svg`, `dissipation.svg`, `criteria.svg`,
/// `criteria_int.svg` and `swirl_sup.svg` into `dir`.
pub fn emit_plots(rows: &[MonitorRow], dir: &Path, opts: PlotOptions) -> Result<Vec<PathBuf>> {
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            found: rows.len(),
        });
    }
    fs::create_dir_all(dir)?;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let col = |f: fn(&MonitorRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let charts: [(&str, &str, Vec<Curve>, bool); 5] = [
        ("energy.svg", "energy E(t)", vec![Curve { label: "E", values: col(|r| r.energy) }], false),
        (
            "dissipation.svg",
            "dissipation D(t)",
            vec![Curve { label: "D", values: col(|r| r.dissipation) }],
            false,
        ),
        (
            "criteria.svg",
            "regularity criteria",
            vec![
                Curve { label: "critA", values: col(|r| r.crit_a) },
                Curve { label: "critB", values: col(|r| r.crit_b) },
            ],
            opts.log_criteria,
        ),
        (
            "criteria_int.svg",
            "time-integrated criteria",
            vec![
                Curve { label: "critA_int", values: col(|r| r.crit_a_int) },
                Curve { label: "critB_int", values: col(|r| r.crit_b_int) },
            ],
            opts.log_criteria,
        ),
        (
            "swirl_sup.svg",
            "max |r v_phi|",
            vec![Curve { label: "swirl_sup", values: col(|r| r.swirl_sup) }],
            false,
        ),
    ];
    let mut written = Vec::new();
    for (name, title, curves, log_y) in charts {
        let path = dir.join(name);
        fs::write(&path, render_chart(title, &t, &curves, log_y))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polylines(svg: &str) -> Vec<(String, Vec<(f64, f64)>)> {
        let doc = roxmltree::Document::parse(svg).expect("well-formed xml");
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .map(|n| {
                let pts = n
                    .attribute("points")
                    .unwrap()
                    .split_whitespace()
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect();
                (n.attribute("data-label").unwrap().to_string(), pts)
            })
            .collect()
    }

    fn rows(n: usize) -> Vec<MonitorRow> {
        (0..n)
            .map(|k| {
                let t = k as f64 * 0.1;
                MonitorRow {
                    t,
                    energy: (-t).exp(),
                    crit_a: 1.0 + t,
                    crit_b: 2.0 + t * t,
                    crit_a_int: t + 0.5 * t * t,
                    crit_b_int: 2.0 * t,
                    ..MonitorRow::default()
                }
            })
            .collect()
    }

    #[test]
    fn two_rows_parse_as_xml() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plots(&rows(2), dir.path(), PlotOptions::default()).unwrap();
        assert_eq!(files.len(), 5);
        for f in files {
            polylines(&fs::read_to_string(f).unwrap());
        }
    }

    #[test]
    fn too_few_rows() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_plots(&rows(1), dir.path(), PlotOptions::default()),
            Err(Error::TooFewRows { needed: 2, found: 1 })
        ));
    }

    #[test]
    fn monotone_integral_plots_monotone() {
        for log in [false, true] {
            let dir = tempfile::tempdir().unwrap();
            emit_plots(&rows(20), dir.path(), PlotOptions { log_criteria: log }).unwrap();
            let svg = fs::read_to_string(dir.path().join("criteria_int.svg")).unwrap();
            let lines = polylines(&svg);
            let (_, pts) = lines.iter().find(|(l, _)| l == "critA_int").unwrap();
            assert_eq!(pts.len(), 20);
            // screen y grows downward
            assert!(pts.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
        }
    }

    #[test]
    fn zero_series_is_flat() {
        let dir = tempfile::tempdir().unwrap();
        let zero: Vec<MonitorRow> = (0..3).map(|k| MonitorRow { t: k as f64, ..Default::default() }).collect();
        emit_plots(&zero, dir.path(), PlotOptions { log_criteria: true }).unwrap();
        let svg = fs::read_to_string(dir.path().join("swirl_sup.svg")).unwrap();
        let (_, pts) = &polylines(&svg)[0];
        assert!(pts.iter().all(|p| p.1 == pts[0].1));
    }
}
