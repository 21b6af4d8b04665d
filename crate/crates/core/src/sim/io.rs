//! CSV dump and replay of generated ground truth.
//!
//! Two files per dump, both starting with `#` header lines:
//!
//! `truth_targets.csv`
//! ```text
//! # tbdpf truth v1
//! # key=value ...
//! step,target,active,x_m,vx_mps,y_m,vy_mps
//! ```
//! `truth_observations.csv`
//! ```text
//! # tbdpf observations v1
//! # key=value ...
//! step,z_0,...,z_{n_z-1}
//! ```
//! Floats are written in shortest round-trip form, so a replayed truth is
//! bit-identical to the generated one.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::observation::Observation;
use crate::state::ContinuousState;

use super::GroundTruth;

pub const TARGETS_FILE: &str = "truth_targets.csv";
pub const OBSERVATIONS_FILE: &str = "truth_observations.csv";
pub const FORMAT_VERSION: u32 = 1;

/// `key=value` metadata carried in dump headers.
pub type Meta = BTreeMap<String, String>;

pub fn format_meta(meta: &Meta) -> String {
    let mut line = String::from("#");
    for (k, v) in meta {
        let _ = write!(line, " {k}={v}");
    }
    line
}

pub fn parse_meta(line: &str) -> Meta {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn truth_meta(truth: &GroundTruth, extra: &Meta) -> Meta {
    let mut meta = extra.clone();
    meta.insert("n_steps".into(), truth.n_steps().to_string());
    meta.insert("n_truth".into(), truth.n_truth().to_string());
    meta.insert(
        "n_z".into(),
        truth.observations.first().map_or(0, Observation::len).to_string(),
    );
    meta.insert("sigma_v".into(), truth.sigma_v.to_string());
    meta.insert(
        "realized_snr_db".into(),
        truth.realized_snr_db.map_or("none".into(), |v| v.to_string()),
    );
    meta
}

pub fn targets_csv(truth: &GroundTruth, extra: &Meta) -> String {
    let mut out = format!("# tbdpf truth v{FORMAT_VERSION}\n{}\n", format_meta(&truth_meta(truth, extra)));
    out.push_str("step,target,active,x_m,vx_mps,y_m,vy_mps\n");
    for (t, (states, active)) in truth.states.iter().zip(&truth.activity).enumerate() {
        for (i, (s, &a)) in states.iter().zip(active).enumerate() {
            let _ = write!(out, "{},{},{}", t + 1, i, a as u8);
            for v in s.as_slice() {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn observations_csv(truth: &GroundTruth, extra: &Meta) -> String {
    let n_z = truth.observations.first().map_or(0, Observation::len);
    let mut out = format!(
        "# tbdpf observations v{FORMAT_VERSION}\n{}\nstep",
        format_meta(&truth_meta(truth, extra))
    );
    for i in 0..n_z {
        let _ = write!(out, ",z_{i}");
    }
    out.push('\n');
    for (t, z) in truth.observations.iter().enumerate() {
        let _ = write!(out, "{}", t + 1);
        for v in z.as_slice() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_truth(dir: &Path, truth: &GroundTruth, extra: &Meta) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TARGETS_FILE), targets_csv(truth, extra))?;
    fs::write(dir.join(OBSERVATIONS_FILE), observations_csv(truth, extra))?;
    Ok(())
}

struct Table {
    meta: Meta,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table(path: &Path, kind: &str) -> Result<Table> {
    let bad = |line: usize, message: String| Error::Parse {
        path: format!("{}:{line}", path.display()),
        message,
    };
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let magic = format!("# tbdpf {kind} v{FORMAT_VERSION}");
    match lines.next() {
        Some((_, l)) if l.trim() == magic => {}
        Some((_, l)) => return Err(bad(1, format!("expected `{magic}`, found `{l}`"))),
        None => return Err(bad(1, "empty file".into())),
    }
    let meta = lines.next().map(|(_, l)| parse_meta(l)).unwrap_or_default();
    let _header = lines.next().ok_or_else(|| bad(3, "missing column header".into()))?;
    let rows = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| (n + 1, l.split(',').map(str::to_string).collect()))
        .collect();
    Ok(Table { meta, rows })
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, value: &str, name: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse {
        path: format!("{}:{line}", path.display()),
        message: format!("invalid {name} `{value}`"),
    })
}

fn meta_field<T: std::str::FromStr>(path: &Path, meta: &Meta, key: &str) -> Result<T> {
    let value = meta.get(key).ok_or_else(|| Error::Parse {
        path: format!("{}:2", path.display()),
        message: format!("header is missing `{key}`"),
    })?;
    field(path, 2, value, key)
}

/// Reads a dump written by [`write_truth`], returning the truth and the
/// header metadata.
pub fn read_truth(dir: &Path) -> Result<(GroundTruth, Meta)> {
    let tpath = dir.join(TARGETS_FILE);
    let opath = dir.join(OBSERVATIONS_FILE);
    let targets = read_table(&tpath, "truth")?;
    let obs = read_table(&opath, "observations")?;
    let n_steps: usize = meta_field(&tpath, &targets.meta, "n_steps")?;
    let n_truth: usize = meta_field(&tpath, &targets.meta, "n_truth")?;
    let n_z: usize = meta_field(&opath, &obs.meta, "n_z")?;
    let sigma_v: f64 = meta_field(&tpath, &targets.meta, "sigma_v")?;
    let realized_snr_db = match targets.meta.get("realized_snr_db").map(String::as_str) {
        None | Some("none") => None,
        Some(v) => Some(field(&tpath, 2, v, "realized_snr_db")?),
    };

    let mut states = vec![Vec::with_capacity(n_truth); n_steps];
    let mut activity = vec![Vec::with_capacity(n_truth); n_steps];
    for (line, row) in &targets.rows {
        if row.len() < 3 {
            return Err(Error::Parse {
                path: format!("{}:{line}", tpath.display()),
                message: format!("expected at least 3 columns, found {}", row.len()),
            });
        }
        let t: usize = field(&tpath, *line, &row[0], "step")?;
        let i: usize = field(&tpath, *line, &row[1], "target")?;
        let a: u8 = field(&tpath, *line, &row[2], "active")?;
        if t == 0 || t > n_steps || i != states[t - 1].len() {
            return Err(Error::Parse {
                path: format!("{}:{line}", tpath.display()),
                message: format!("row (step {t}, target {i}) out of order"),
            });
        }
        let values = row[3..]
            .iter()
            .map(|v| field::<f64>(&tpath, *line, v, "state value"))
            .collect::<Result<Vec<_>>>()?;
        states[t - 1].push(ContinuousState::new(values)?);
        activity[t - 1].push(a != 0);
    }
    if states.iter().any(|s| s.len() != n_truth) {
        return Err(Error::Parse {
            path: tpath.display().to_string(),
            message: format!("expected {n_truth} targets at each of {n_steps} steps"),
        });
    }

    let mut observations = Vec::with_capacity(obs.rows.len());
    for (line, row) in &obs.rows {
        if row.len() != n_z + 1 {
            return Err(Error::Parse {
                path: format!("{}:{line}", opath.display()),
                message: format!("expected {} columns, found {}", n_z + 1, row.len()),
            });
        }
        let values = row[1..]
            .iter()
            .map(|v| field::<f64>(&opath, *line, v, "observation"))
            .collect::<Result<Vec<_>>>()?;
        observations.push(Observation::new(values)?);
    }
    if observations.len() != n_steps {
        return Err(Error::Parse {
            path: opath.display().to_string(),
            message: format!("expected {n_steps} observation rows, found {}", observations.len()),
        });
    }

    Ok((
        GroundTruth {
            states,
            activity,
            observations,
            sigma_v,
            realized_snr_db,
        },
        targets.meta,
    ))
}
