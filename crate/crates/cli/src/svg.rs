//! Hand-rolled SVG scatter/line plots. No plotting crate guarantees
//! byte-deterministic output, so coordinates are formatted with fixed
//! precision and every collection is sorted before rendering.

use anyhow::{bail, Result};
use std::fmt::Write as _;

use crate::record::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const ML: f64 = 72.0;
const MR: f64 = 24.0;
const MT: f64 = 24.0;
const MB: f64 = 56.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// phase label in the (log10 gamma/nu^2, log10 nu) plane, from a sweep CSV
    PhaseDiagram,
    /// occupied fraction vs log10 gamma/nu^2, model and numerical series
    Lambda,
    /// spectral gap vs sigma * m_omega (log-log), finite-sigma rows
    Gap,
    /// std/mean of e0_num/e_gc along the nu ladder, from a convergence CSV
    Convergence,
}

fn phase_color(phase: &str) -> &'static str {
    match phase {
        "DELOCALIZED" => "#1b9e77",
        "TRANSITION" => "#d95f02",
        "LOCALIZED" => "#7570b3",
        "FEW_INTERVALS" => "#e7298a",
        _ => "#777777",
    }
}

struct Series {
    label: String,
    color: &'static str,
    points: Vec<(f64, f64)>,
    line: bool,
}

struct Plot {
    x_label: String,
    y_label: String,
    series: Vec<Series>,
}

fn extract(table: &Table, kind: PlotKind) -> Result<Plot> {
    match kind {
        PlotKind::PhaseDiagram => {
            let (ig, inu, iph) = (
                table.column("gamma")?,
                table.column("nu")?,
                table.column("phase")?,
            );
            let mut by_phase: std::collections::BTreeMap<String, Vec<(f64, f64)>> =
                Default::default();
            for row in &table.rows {
                let phase = &row[iph];
                if phase == "NA" {
                    continue;
                }
                let (Some(g), Some(nu)) = (table.value(row, ig), table.value(row, inu)) else {
                    continue;
                };
                if g <= 0.0 || nu <= 0.0 {
                    continue;
                }
                by_phase
                    .entry(phase.clone())
                    .or_default()
                    .push(((g / (nu * nu)).log10(), nu.log10()));
            }
            let series = by_phase
                .into_iter()
                .map(|(label, points)| Series {
                    color: phase_color(&label),
                    label,
                    points,
                    line: false,
                })
                .collect();
            Ok(Plot {
                x_label: "log10(gamma / nu^2)".into(),
                y_label: "log10(nu)".into(),
                series,
            })
        }
        PlotKind::Lambda => {
            let (ig, inu) = (table.column("gamma")?, table.column("nu")?);
            let igc = table.column("lambda_gc")?;
            let inum = table.column("lambda_num")?;
            let mut model = Vec::new();
            let mut numerical = Vec::new();
            for row in &table.rows {
                let (Some(g), Some(nu)) = (table.value(row, ig), table.value(row, inu)) else {
                    continue;
                };
                if g <= 0.0 || nu <= 0.0 {
                    continue;
                }
                let x = (g / (nu * nu)).log10();
                if let Some(l) = table.value(row, igc) {
                    model.push((x, l));
                }
                if let Some(l) = table.value(row, inum) {
                    numerical.push((x, l));
                }
            }
            let mut series = Vec::new();
            if !model.is_empty() {
                series.push(Series {
                    label: "model".into(),
                    color: "#1f78b4",
                    points: model,
                    line: false,
                });
            }
            if !numerical.is_empty() {
                series.push(Series {
                    label: "numerical".into(),
                    color: "#e31a1c",
                    points: numerical,
                    line: false,
                });
            }
            Ok(Plot {
                x_label: "log10(gamma / nu^2)".into(),
                y_label: "occupied fraction".into(),
                series,
            })
        }
        PlotKind::Gap => {
            let (is, im) = (table.column("sigma")?, table.column("m_omega")?);
            let igap = table.column("gap")?;
            let mut points = Vec::new();
            for row in &table.rows {
                let (Some(s), Some(m), Some(gap)) = (
                    table.value(row, is),
                    table.value(row, im),
                    table.value(row, igap),
                ) else {
                    continue;
                };
                if s * m > 0.0 && gap > 0.0 {
                    points.push(((s * m).log10(), gap.log10()));
                }
            }
            Ok(Plot {
                x_label: "log10(sigma * m_omega)".into(),
                y_label: "log10(gap)".into(),
                series: vec![Series {
                    label: "gap".into(),
                    color: "#33a02c",
                    points,
                    line: false,
                }],
            })
        }
        PlotKind::Convergence => {
            let (inu, icv) = (table.column("nu")?, table.column("cv")?);
            let mut points = Vec::new();
            for row in &table.rows {
                let (Some(nu), Some(cv)) = (table.value(row, inu), table.value(row, icv)) else {
                    continue;
                };
                points.push((nu.log10(), cv));
            }
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(Plot {
                x_label: "log10(nu)".into(),
                y_label: "std/mean of e0/e_gc".into(),
                series: vec![Series {
                    label: "cv".into(),
                    color: "#6a3d9a",
                    points,
                    line: true,
                }],
            })
        }
    }
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    } * mag;
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        // avoid "-0"
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn render(table: &Table, kind: PlotKind) -> Result<String> {
    let plot = extract(table, kind)?;
    let n_points: usize = plot.series.iter().map(|s| s.points.len()).sum();
    if n_points == 0 {
        bail!("no plottable points for this kind in the CSV");
    }

    let mut xlo = f64::INFINITY;
    let mut xhi = f64::NEG_INFINITY;
    let mut ylo = f64::INFINITY;
    let mut yhi = f64::NEG_INFINITY;
    for s in &plot.series {
        for &(x, y) in &s.points {
            xlo = xlo.min(x);
            xhi = xhi.max(x);
            ylo = ylo.min(y);
            yhi = yhi.max(y);
        }
    }
    // pad degenerate and ordinary ranges alike
    let xpad = 0.05 * (xhi - xlo) + 0.05;
    let ypad = 0.05 * (yhi - ylo) + 0.05;
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;

    let px = |x: f64| ML + (x - xlo) / (xhi - xlo) * (WIDTH - ML - MR);
    let py = |y: f64| HEIGHT - MB - (y - ylo) / (yhi - ylo) * (HEIGHT - MT - MB);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<desc>{kind:?}</desc>\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    );
    // frame
    let _ = write!(
        svg,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"#000000\"/>\n",
        WIDTH - ML - MR,
        HEIGHT - MT - MB
    );
    for t in nice_ticks(xlo, xhi) {
        let x = px(t);
        let _ = write!(
            svg,
            "<line x1=\"{x:.3}\" y1=\"{:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"#000000\"/>\n\
             <text x=\"{x:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MB,
            HEIGHT - MB + 6.0,
            HEIGHT - MB + 20.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(ylo, yhi) {
        let y = py(t);
        let _ = write!(
            svg,
            "<line x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{ML}\" y2=\"{y:.3}\" stroke=\"#000000\"/>\n\
             <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"end\">{}</text>\n",
            ML - 6.0,
            ML - 9.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        (ML + WIDTH - MR) / 2.0,
        HEIGHT - 12.0,
        plot.x_label
    );
    let _ = write!(
        svg,
        "<text x=\"16\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {:.3})\">{}</text>\n",
        (MT + HEIGHT - MB) / 2.0,
        (MT + HEIGHT - MB) / 2.0,
        plot.y_label
    );

    for s in &plot.series {
        if s.line && s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
                .collect();
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                pts.join(" "),
                s.color
            );
        }
        for &(x, y) in &s.points {
            let _ = write!(
                svg,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\"/>\n",
                px(x),
                py(y),
                s.color
            );
        }
    }

    // legend: one entry per series, top-right corner of the frame
    for (i, s) in plot.series.iter().enumerate() {
        let y = MT + 18.0 + 18.0 * i as f64;
        let _ = write!(
            svg,
            "<circle class=\"legend\" cx=\"{:.3}\" cy=\"{y:.3}\" r=\"5\" fill=\"{}\"/>\n\
             <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            WIDTH - MR - 150.0,
            s.color,
            WIDTH - MR - 140.0,
            y + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
