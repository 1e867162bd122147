use delta_utm_core::oracle::fd_solve;

use super::{build_profile, guarded, write_manifest, Outcome};
use crate::config::RunConfig;
use crate::io::{write_field_csv, write_traces_csv};

/// Runs the Crank–Nicolson solver and writes the sampled field and interface traces.
pub fn run_oracle(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let profile = build_profile(cfg)?;
    let grid = cfg.grid.build()?;
    let (field, traces) = fd_solve(&profile, &cfg.potential, &cfg.fd, &grid)?;
    guarded(|out| {
        let fpath = out.claim(&cfg.output.path(&cfg.output.field))?;
        write_field_csv(&fpath, &field)?;
        let tpath = out.claim(&cfg.output.path(&cfg.output.traces))?;
        write_traces_csv(&tpath, &traces)?;
        let mut m = toml::Table::new();
        m.insert("source".into(), "oracle".into());
        m.insert("steps".into(), (traces.t_values.len() as i64 - 1).into());
        // the datum itself need not satisfy the interface condition, so t = 0 is left out
        let jump = traces.jump_residual.iter().skip(1).fold(0.0f64, |a, &b| a.max(b));
        m.insert("max_jump_residual".into(), jump.into());
        write_manifest(out, cfg, "oracle", m)?;
        Ok((
            format!(
                "oracle: {} points written to {}, traces ({} samples) to {}, max interface jump residual for t > 0 {jump:.3e}",
                grid.len(),
                fpath.display(),
                traces.t_values.len(),
                tpath.display()
            ),
            Vec::new(),
        ))
    })
}
