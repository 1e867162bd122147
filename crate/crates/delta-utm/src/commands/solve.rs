use delta_utm_core::utm::UtmSolver;

use super::{build_profile, guarded, write_manifest, Outcome};
use crate::config::RunConfig;
use crate::io::write_field_csv;
use crate::parallel::evaluate_field;

/// Evaluates the transform representation on the configured grid.
pub fn run_solve(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let profile = build_profile(cfg)?;
    let grid = cfg.grid.build()?;
    let solver = UtmSolver::new(profile, cfg.potential, cfg.quadrature)?;
    let field = evaluate_field(&solver, &grid)?;
    guarded(|out| {
        let path = out.claim(&cfg.output.path(&cfg.output.field))?;
        write_field_csv(&path, &field)?;
        let mut m = toml::Table::new();
        m.insert("source".into(), "utm".into());
        m.insert("abs_tol".into(), cfg.quadrature.abs_tol.into());
        m.insert("tail_tol".into(), cfg.quadrature.tail_tol.into());
        m.insert("points".into(), (grid.len() as i64).into());
        if let Some(b) = solver.bound_state() {
            m.insert("bound_state_re".into(), b.coefficient.re.into());
            m.insert("bound_state_im".into(), b.coefficient.im.into());
        }
        write_manifest(out, cfg, "solve", m)?;
        let peak = field.values().iter().fold(0.0f64, |a, v| a.max(v.norm()));
        Ok((format!("solve: {} points written to {}, max |u| = {peak:.6e}", grid.len(), path.display()), Vec::new()))
    })
}
