//! Minimal SVG line plots for experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qpairs::ExperimentReport;

use crate::{CliError, CliResult, Context};

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD_L: f64 = 70.0;
const PAD_R: f64 = 20.0;
const PAD_T: f64 = 36.0;
const PAD_B: f64 = 50.0;
const COLOURS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    fn transformed(&self) -> Vec<Vec<(f64, f64)>> {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };
        self.series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_x || *x > 0.0) && (!self.log_y || *y > 0.0))
                    .map(|&(x, y)| (tx(x), ty(y)))
                    .collect()
            })
            .collect()
    }

    pub fn to_svg(&self) -> String {
        let data = self.transformed();
        let all: Vec<(f64, f64)> = data.iter().flatten().copied().collect();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if all.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pw = W - PAD_L - PAD_R;
        let ph = H - PAD_T - PAD_B;
        let sx = |x: f64| PAD_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| PAD_T + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&self.title));
        let _ = writeln!(
            s,
            r#"<rect x="{PAD_L}" y="{PAD_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let xl = if self.log_x { 10f64.powf(xv) } else { xv };
            let yl = if self.log_y { 10f64.powf(yv) } else { yv };
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                H - PAD_B + 16.0,
                fmt_tick(xl)
            );
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, PAD_L - 6.0, sy(yv) + 4.0, fmt_tick(yl));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, PAD_L + pw / 2.0, H - 10.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            PAD_T + ph / 2.0,
            PAD_T + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, (ser, pts)) in self.series.iter().zip(&data).enumerate() {
            let colour = COLOURS[i % COLOURS.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            if path.len() > 1 {
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#, path.join(" "));
            }
            if !ser.dashed && pts.len() <= 60 {
                for &(x, y) in pts {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, sx(x), sy(y));
                }
            }
            let ly = PAD_T + 14.0 + 16.0 * i as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#, W - PAD_R - 8.0, escape(&ser.name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn paired(rep: &ExperimentReport, x: &str, y: &str) -> Vec<(f64, f64)> {
    let (Some(i), Some(j)) = (rep.columns.iter().position(|c| c == x), rep.columns.iter().position(|c| c == y)) else {
        return Vec::new();
    };
    rep.rows.iter().filter_map(|r| Some((r[i].as_f64()?, r[j].as_f64()?))).collect()
}

/// Figures suited to the report kind; other kinds plot every numeric column
/// against the first.
pub fn figures_for(rep: &ExperimentReport) -> Vec<(String, Figure)> {
    let fig = |title: &str, x: &str, y: &str, log_x, log_y, series| Figure {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        log_x,
        log_y,
        series,
    };
    match rep.kind.as_str() {
        "asymptotic" => {
            let pts = paired(rep, "B", "ratio");
            let one = pts.iter().map(|&(b, _)| (b, 1.0)).collect();
            vec![(
                "ratio".into(),
                fig(
                    "N(B) / main term",
                    "B",
                    "ratio",
                    true,
                    false,
                    vec![
                        Series { name: "ratio".into(), points: pts, dashed: false },
                        Series { name: "1".into(), points: one, dashed: true },
                    ],
                ),
            )]
        }
        "delta_check" => vec![(
            "residual".into(),
            fig(
                "delta reconstruction residual",
                "n",
                "residual",
                false,
                false,
                vec![Series { name: "residual".into(), points: paired(rep, "n", "residual"), dashed: false }],
            ),
        )],
        "oscint" => {
            let pts = paired(rep, "u", "abs_I");
            let slope = rep.summary.get("exponent").and_then(|v| v.as_f64()).unwrap_or(1.0);
            let mut series = vec![Series { name: "|I(u)|".into(), points: pts.clone(), dashed: false }];
            if let Some(&(u0, v0)) = pts.iter().find(|p| p.1 > 0.0) {
                let reference = pts.iter().map(|&(u, _)| (u, v0 * (u / u0).powf(-slope))).collect();
                series.push(Series { name: format!("slope -{slope}"), points: reference, dashed: true });
            }
            vec![("decay".into(), fig("oscillatory integral decay", "|u|", "|I(u)|", true, true, series))]
        }
        _ => {
            let Some(x) = rep.columns.first() else { return Vec::new() };
            let series: Vec<Series> = rep.columns[1..]
                .iter()
                .map(|c| Series { name: c.clone(), points: paired(rep, x, c), dashed: false })
                .filter(|s| !s.points.is_empty())
                .collect();
            if series.is_empty() {
                return Vec::new();
            }
            vec![("plot".into(), fig(&rep.kind, x, "value", false, false, series))]
        }
    }
}

/// Writes `<stem>_<name>.svg` for every figure of the report.
pub fn emit_plots(rep: &ExperimentReport, dir: &Path, stem: &str) -> CliResult<Vec<PathBuf>> {
    rep.ensure_rows().ctx("plot")?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.into(), source: e })?;
    let mut out = Vec::new();
    for (name, figure) in figures_for(rep) {
        let path = dir.join(format!("{stem}_{name}.svg"));
        fs::write(&path, figure.to_svg()).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        out.push(path);
    }
    Ok(out)
}
