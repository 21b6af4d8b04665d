//! Static SVG figures rendered from the CSV reports.
//!
//! Every figure is a pure function of CSV text: re-rendering the same files
//! produces the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::io::{parse_meta, Meta, OBSERVATIONS_FILE, TARGETS_FILE};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Csv {
    meta: Meta,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut meta = Meta::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
        while let Some(l) = lines.peek() {
            if !l.starts_with('#') {
                break;
            }
            meta.extend(parse_meta(l));
            lines.next();
        }
        let columns = lines
            .next()
            .ok_or_else(|| Error::Parse {
                path: origin.into(),
                message: "missing column header".into(),
            })?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Ok(Self { meta, columns, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| Error::Parse {
            path: name.into(),
            message: format!("column `{name}` not found"),
        })
    }

    /// Column as numbers; empty cells become `None`.
    fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.col(name)?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r.get(i).map(|s| s.trim()).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse().map(Some).map_err(|_| Error::Parse {
                        path: name.into(),
                        message: format!("bad number `{cell}`"),
                    })
                }
            })
            .collect()
    }

    fn subtitle(&self) -> String {
        let get = |k: &str| self.meta.get(k).map(String::as_str).unwrap_or("?");
        format!("seed {} / config {}", get("seed"), get("config_hash"))
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 { 1.0 } else if r < 3.5 { 2.0 } else if r < 7.5 { 5.0 } else { 10.0 }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Panel {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Panel {
    fn sx(&self, v: f64) -> f64 {
        self.left + (v - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn sy(&self, v: f64) -> f64 {
        self.top + self.height - (v - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
            self.left, self.top, self.width, self.height
        );
        for (axis, (lo, hi)) in [(0, self.x), (1, self.y)] {
            let step = nice_step(hi - lo);
            let mut v = (lo / step).ceil() * step;
            while v <= hi + 1e-9 * step {
                let label = format!("{}", (v / step).round() * step);
                if axis == 0 {
                    let x = self.sx(v);
                    let y = self.top + self.height;
                    let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##, y + 4.0);
                    let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{label}</text>"#, y + 16.0);
                } else {
                    let y = self.sy(v);
                    let _ = writeln!(out, r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#333"/>"##, self.left - 4.0, self.left);
                    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#, self.left - 6.0, y + 4.0);
                }
                v += step;
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{title}</text>"#,
            self.left + self.width / 2.0,
            self.top - 8.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x_label}</text>"#,
            self.left + self.width / 2.0,
            self.top + self.height + 32.0
        );
        let (lx, ly) = (self.left - 44.0, self.top + self.height / 2.0);
        let _ = writeln!(
            out,
            r#"<text x="{lx:.2}" y="{ly:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{y_label}</text>"#
        );
    }

    fn polyline(&self, out: &mut String, pts: &[(f64, f64)], color: &str, width: f64, opacity: f64) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.sx(x), self.sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}" stroke-opacity="{opacity}"/>"#,
            coords.join(" ")
        );
    }

    fn dots(&self, out: &mut String, pts: &[(f64, f64)], color: &str, radius: f64) {
        for &(x, y) in pts {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}"/>"#,
                self.sx(x),
                self.sy(y)
            );
        }
    }
}

fn document(width: f64, height: f64, body: &str, subtitle: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"#666\" text-anchor=\"end\">{subtitle}</text>\n</svg>\n",
        width - 8.0,
        height - 6.0
    )
}

/// Observed signals of every link versus time.
pub fn observations_svg(csv_text: &str) -> Result<String> {
    let csv = Csv::parse(csv_text, OBSERVATIONS_FILE)?;
    let steps: Vec<f64> = csv.numbers("step")?.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let links: Vec<Vec<f64>> = (1..csv.columns.len())
        .map(|c| csv.numbers(&csv.columns[c]).map(|v| v.into_iter().map(|x| x.unwrap_or(0.0)).collect()))
        .collect::<Result<_>>()?;
    let panel = Panel {
        left: 70.0,
        top: 30.0,
        width: 620.0,
        height: 320.0,
        x: padded_range(steps.iter().copied()),
        y: padded_range(links.iter().flatten().copied()),
    };
    let mut body = String::new();
    panel.axes(&mut body, "Observed link signals", "time step", "RSS attenuation");
    for (i, series) in links.iter().enumerate() {
        let pts: Vec<(f64, f64)> = steps.iter().copied().zip(series.iter().copied()).collect();
        panel.polyline(&mut body, &pts, PALETTE[i % PALETTE.len()], 0.6, 0.25);
    }
    Ok(document(740.0, 400.0, &body, &csv.subtitle()))
}

/// Estimated x and y positions versus time, over the ground truth.
pub fn tracks_svg(tracks_text: &str, truth_text: &str) -> Result<String> {
    let tracks = Csv::parse(tracks_text, "tracks.csv")?;
    let truth = Csv::parse(truth_text, TARGETS_FILE)?;
    let mut body = String::new();
    let t_step = truth.numbers("step")?;
    let t_target = truth.numbers("target")?;
    let t_active = truth.numbers("active")?;
    let e_step = tracks.numbers("step")?;
    let e_target = tracks.numbers("target")?;
    let e_active = tracks.numbers("active")?;
    let n_steps = t_step.iter().flatten().fold(1.0f64, |a, &b| a.max(b));
    for (k, (coord, label)) in [("x_m", "x [m]"), ("y_m", "y [m]")].into_iter().enumerate() {
        let t_val = truth.numbers(coord)?;
        let e_val = tracks.numbers(coord)?;
        let panel = Panel {
            left: 70.0,
            top: 30.0 + k as f64 * 260.0,
            width: 620.0,
            height: 200.0,
            x: (0.0, n_steps),
            y: padded_range(t_val.iter().chain(e_val.iter()).flatten().copied()),
        };
        panel.axes(&mut body, &format!("Estimated {label} versus time"), "time step", label);
        // truth: one segment per contiguous active run
        let n_truth = t_target.iter().flatten().fold(0.0f64, |a, &b| a.max(b + 1.0)) as usize;
        for i in 0..n_truth {
            let mut run: Vec<(f64, f64)> = Vec::new();
            for r in 0..t_step.len() {
                if t_target[r] != Some(i as f64) {
                    continue;
                }
                match (t_active[r], t_step[r], t_val[r]) {
                    (Some(a), Some(s), Some(v)) if a > 0.0 => run.push((s, v)),
                    _ => {
                        panel.polyline(&mut body, &run, "#000", 1.5, 0.8);
                        run.clear();
                    }
                }
            }
            panel.polyline(&mut body, &run, "#000", 1.5, 0.8);
        }
        let n_models = e_target.iter().flatten().fold(0.0f64, |a, &b| a.max(b + 1.0)) as usize;
        for j in 0..n_models {
            let pts: Vec<(f64, f64)> = (0..e_step.len())
                .filter(|&r| e_target[r] == Some(j as f64) && e_active[r] == Some(1.0))
                .filter_map(|r| Some((e_step[r]?, e_val[r]?)))
                .collect();
            panel.dots(&mut body, &pts, PALETTE[j % PALETTE.len()], 1.8);
        }
    }
    Ok(document(740.0, 560.0, &body, &tracks.subtitle()))
}

/// Per-step OSPA of a single run.
pub fn ospa_time_svg(csv_text: &str) -> Result<String> {
    let csv = Csv::parse(csv_text, "ospa.csv")?;
    let pts: Vec<(f64, f64)> = csv
        .numbers("step")?
        .into_iter()
        .zip(csv.numbers("ospa_m")?)
        .filter_map(|(s, o)| Some((s?, o?)))
        .collect();
    let panel = Panel {
        left: 70.0,
        top: 30.0,
        width: 620.0,
        height: 280.0,
        x: padded_range(pts.iter().map(|p| p.0)),
        y: (0.0, padded_range(pts.iter().map(|p| p.1)).1.max(1.0)),
    };
    let mut body = String::new();
    panel.axes(&mut body, "OSPA versus time", "time step", "OSPA [m]");
    panel.polyline(&mut body, &pts, PALETTE[0], 1.2, 1.0);
    Ok(document(740.0, 360.0, &body, &csv.subtitle()))
}

/// Mean OSPA versus SNR with one-standard-deviation error bars.
pub fn sweep_svg(csv_text: &str) -> Result<String> {
    let csv = Csv::parse(csv_text, "sweep.csv")?;
    let rows: Vec<(f64, f64, f64)> = csv
        .numbers("snr_db")?
        .into_iter()
        .zip(csv.numbers("ospa_mean_m")?)
        .zip(csv.numbers("ospa_std_m")?)
        .filter_map(|((s, m), d)| Some((s?, m?, d?)))
        .collect();
    let panel = Panel {
        left: 70.0,
        top: 30.0,
        width: 520.0,
        height: 320.0,
        x: padded_range(rows.iter().map(|r| r.0)),
        y: (0.0, padded_range(rows.iter().map(|r| r.1 + r.2)).1.max(1.0)),
    };
    let mut body = String::new();
    panel.axes(&mut body, "OSPA versus SNR", "SNR [dB]", "OSPA [m]");
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    panel.polyline(&mut body, &pts, PALETTE[1], 1.5, 1.0);
    panel.dots(&mut body, &pts, PALETTE[1], 3.0);
    for &(s, m, d) in &rows {
        let x = panel.sx(s);
        let (y0, y1) = (panel.sy(m - d), panel.sy(m + d));
        let _ = writeln!(body, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="{}"/>"#, PALETTE[1]);
        for y in [y0, y1] {
            let _ = writeln!(body, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}"/>"#, x - 4.0, x + 4.0, PALETTE[1]);
        }
    }
    Ok(document(640.0, 410.0, &body, &csv.subtitle()))
}

/// Renders every figure whose input CSVs exist in `input` into `out`.
/// Returns the written paths.
pub fn render_dir(input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let read = |name: &str| -> Option<String> { fs::read_to_string(input.join(name)).ok() };
    let mut written = Vec::new();
    let mut emit = |name: &str, svg: String| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, svg)?;
        written.push(path);
        Ok(())
    };
    if let Some(obs) = read(OBSERVATIONS_FILE) {
        emit("observations.svg", observations_svg(&obs)?)?;
    }
    if let (Some(tracks), Some(truth)) = (read("tracks.csv"), read(TARGETS_FILE)) {
        emit("tracks.svg", tracks_svg(&tracks, &truth)?)?;
    }
    if let Some(o) = read("ospa.csv") {
        emit("ospa_time.svg", ospa_time_svg(&o)?)?;
    }
    if let Some(s) = read("sweep.csv") {
        emit("ospa_snr.svg", sweep_svg(&s)?)?;
    }
    Ok(written)
}
