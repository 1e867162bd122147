use std::path::{Path, PathBuf};

use delta_utm_core::analysis::compare_fields;
use delta_utm_core::model::FieldSource;

use super::{guarded, Outcome};
use crate::io::{fmt_f64, read_field_csv, write_json, write_rows};

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub report: PathBuf,
    pub table: PathBuf,
    /// Largest acceptable relative L∞ difference.
    pub tolerance: Option<f64>,
}

/// Compares field `a` against the reference field `b`.
pub fn run_compare(a: &Path, b: &Path, opts: &CompareOptions) -> anyhow::Result<Outcome> {
    let fa = read_field_csv(a, FieldSource::Utm)?;
    let fb = read_field_csv(b, FieldSource::Oracle)?;
    let report = compare_fields(&fa, &fb)?;
    guarded(|out| {
        let rpath = out.claim(&opts.report)?;
        write_json(&rpath, &report)?;
        let tpath = out.claim(&opts.table)?;
        let rows = report.points.iter().map(|p| {
            [p.t, p.x, p.value.re, p.value.im, p.reference.re, p.reference.im, p.abs_error, p.rel_error].map(fmt_f64)
        });
        write_rows(&tpath, &["t", "x", "re_a", "im_a", "re_b", "im_b", "abs_error", "rel_error"], rows)?;
        let mut violations = Vec::new();
        if let Some(tol) = opts.tolerance {
            if report.linf_rel > tol {
                violations.push(format!("relative L∞ difference {:.3e} exceeds {tol:e}", report.linf_rel));
            }
        }
        let summary = format!(
            "compare: {} points, L∞ abs {:.3e}, L∞ rel {:.3e}, L2 abs {:.3e}, L2 rel {:.3e}, mean abs {:.3e}",
            report.points.len(),
            report.linf_abs,
            report.linf_rel,
            report.l2_abs,
            report.l2_rel,
            report.mean_abs
        );
        Ok((summary, violations))
    })
}
