use delta_utm_core::analysis::jump_residual;
use delta_utm_core::model::SpaceTimeGrid;
use delta_utm_core::oracle::{fd_solve, FdConfig};
use delta_utm_core::utm::{global_relation_residual, UtmSolver};
use serde::Serialize;

use super::{build_profile, guarded, write_manifest, Outcome};
use crate::config::RunConfig;
use crate::io::{fmt_f64, write_json, write_rows};
use crate::parallel::evaluate_field;

#[derive(Debug, Serialize)]
struct JumpRow {
    t: f64,
    utm: f64,
    oracle: f64,
}

#[derive(Debug, Serialize)]
struct RelationRow {
    k: f64,
    t: f64,
    first: [f64; 2],
    second: [f64; 2],
    first_abs: f64,
    second_abs: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    jump: Vec<JumpRow>,
    global_relation: Vec<RelationRow>,
}

/// Interface jump residuals of both solvers and the global-relation residuals of
/// the transform solution against the oracle's interface traces.
pub fn run_diagnose(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let opts = &cfg.diagnose;
    let profile = build_profile(cfg)?;
    let params = cfg.potential;
    let solver = UtmSolver::new(profile.clone(), params, cfg.quadrature)?;

    let horizon = opts.jump_times.iter().copied().fold(opts.relation_time, f64::max);
    let fd = FdConfig { final_time: cfg.fd.final_time.max(horizon), ..cfg.fd };
    let probe = SpaceTimeGrid::new(vec![params.a], vec![horizon])?;
    let (_, traces) = fd_solve(&profile, &params, &fd, &probe)?;

    let worker = solver.worker();
    let mut jump = Vec::new();
    for &t in &opts.jump_times {
        let utm = jump_residual(|x| worker.evaluate(x, t), &params, opts.step)?;
        let n = ((t / fd.dt).round() as usize).min(traces.t_values.len() - 1);
        jump.push(JumpRow { t, utm, oracle: traces.jump_residual[n] });
    }

    let half = (opts.relation_half_width / opts.relation_dx).round() as i64;
    let xs: Vec<f64> = (-half..=half).map(|j| params.a + j as f64 * opts.relation_dx).collect();
    let grid = SpaceTimeGrid::new(xs, vec![0.0, opts.relation_time])?;
    let field = evaluate_field(&solver, &grid)?;
    let mut global_relation = Vec::new();
    for &k in &opts.k_values {
        let (r1, r2) = global_relation_residual(&field, &traces, &params, k, opts.relation_time)?;
        global_relation.push(RelationRow {
            k,
            t: opts.relation_time,
            first: [r1.re, r1.im],
            second: [r2.re, r2.im],
            first_abs: r1.norm(),
            second_abs: r2.norm(),
        });
    }

    let mut violations = Vec::new();
    for row in &jump {
        for (name, v) in [("transform", row.utm), ("oracle", row.oracle)] {
            if v > opts.jump_tol {
                violations.push(format!("{name} jump residual {v:.3e} at t = {} exceeds {:e}", row.t, opts.jump_tol));
            }
        }
    }
    for row in &global_relation {
        let worst = row.first_abs.max(row.second_abs);
        if worst > opts.relation_tol {
            violations
                .push(format!("global relation residual {worst:.3e} at k = {} exceeds {:e}", row.k, opts.relation_tol));
        }
    }
    let summary = format!(
        "diagnose: max jump residual {:.3e} (transform) / {:.3e} (oracle); max global-relation residual {:.3e}",
        jump.iter().fold(0.0f64, |a, r| a.max(r.utm)),
        jump.iter().fold(0.0f64, |a, r| a.max(r.oracle)),
        global_relation.iter().fold(0.0f64, |a, r| a.max(r.first_abs).max(r.second_abs))
    );
    let report = Report { jump, global_relation };
    guarded(|out| {
        let rpath = out.claim(&cfg.output.path(&cfg.output.report))?;
        write_json(&rpath, &report)?;
        let tpath = out.claim(&cfg.output.path(&cfg.output.table))?;
        let mut rows: Vec<[String; 4]> = Vec::new();
        for r in &report.jump {
            rows.push(["jump_transform".into(), fmt_f64(r.t), String::new(), fmt_f64(r.utm)]);
            rows.push(["jump_oracle".into(), fmt_f64(r.t), String::new(), fmt_f64(r.oracle)]);
        }
        for r in &report.global_relation {
            rows.push(["relation_first".into(), fmt_f64(r.t), fmt_f64(r.k), fmt_f64(r.first_abs)]);
            rows.push(["relation_second".into(), fmt_f64(r.t), fmt_f64(r.k), fmt_f64(r.second_abs)]);
        }
        write_rows(&tpath, &["quantity", "t", "k", "residual"], rows)?;
        write_manifest(out, cfg, "diagnose", toml::Table::new())?;
        Ok((summary, violations))
    })
}
