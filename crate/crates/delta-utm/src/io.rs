//! CSV and JSON artifacts.
//!
//! Floats are written with 17 significant digits, which round-trips binary64 exactly.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use delta_utm_core::model::{FieldSource, SolutionField, SpaceTimeGrid};
use delta_utm_core::oracle::BoundaryTraces;
use num_complex::Complex64;
use serde::Serialize;

pub const FIELD_COLUMNS: [&str; 5] = ["t", "x", "re_u", "im_u", "abs_u"];
pub const TRACE_COLUMNS: [&str; 5] = ["t", "re_g1", "im_g1", "re_phi1", "im_phi1"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Files written by one command; removed again if the command fails.
#[derive(Debug, Default)]
pub struct Outputs {
    created: Vec<PathBuf>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `path` before it is written, creating parent directories.
    pub fn claim(&mut self, path: &Path) -> anyhow::Result<PathBuf> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        self.created.push(path.to_path_buf());
        Ok(path.to_path_buf())
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.created
    }

    pub fn discard(&mut self) {
        for p in self.created.drain(..) {
            let _ = fs::remove_file(&p);
        }
    }
}

pub fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_csv(path: &Path, field: &SolutionField) -> anyhow::Result<()> {
    let grid = field.grid();
    let rows = field.values().iter().enumerate().map(|(i, u)| {
        let (t, x) = grid.point(i);
        [t, x, u.re, u.im, u.norm()].map(fmt_f64)
    });
    write_rows(path, &FIELD_COLUMNS, rows)
}

/// Reads a field written by [`write_field_csv`]: rows ordered by `t`, then `x`,
/// covering a full rectangular grid.
pub fn read_field_csv(path: &Path, source: FieldSource) -> anyhow::Result<SolutionField> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != FIELD_COLUMNS {
        bail!("{}: expected columns {:?}, found {:?}", path.display(), FIELD_COLUMNS, header);
    }
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> anyhow::Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{} row {}: bad number `{}`", path.display(), line + 2, &rec[i]))
        };
        points.push((num(0)?, num(1)?, Complex64::new(num(2)?, num(3)?)));
    }
    if points.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let mut ts: Vec<f64> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    for &(t, x, _) in &points {
        if ts.last() != Some(&t) {
            ts.push(t);
        }
        if ts.len() == 1 {
            xs.push(x);
        }
    }
    if points.len() != ts.len() * xs.len() {
        bail!("{}: rows do not form a rectangular t-by-x grid", path.display());
    }
    for (i, &(t, x, _)) in points.iter().enumerate() {
        if t != ts[i / xs.len()] || x != xs[i % xs.len()] {
            bail!("{}: row {} breaks the t-major grid order", path.display(), i + 2);
        }
    }
    let grid = SpaceTimeGrid::new(xs, ts)?;
    Ok(SolutionField::new(grid, points.into_iter().map(|p| p.2).collect(), source)?)
}

pub fn write_traces_csv(path: &Path, traces: &BoundaryTraces) -> anyhow::Result<()> {
    let rows = traces
        .t_values
        .iter()
        .zip(&traces.g1)
        .zip(&traces.phi1)
        .map(|((&t, g), p)| [t, g.re, g.im, p.re, p.im].map(fmt_f64));
    write_rows(path, &TRACE_COLUMNS, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
