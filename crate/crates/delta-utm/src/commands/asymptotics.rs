use delta_utm_core::analysis::{bound_state_report_from_samples, log_spaced, DecayFit};
use delta_utm_core::utm::UtmSolver;
use serde::Serialize;

use super::{build_profile, guarded, write_manifest, Outcome};
use crate::config::RunConfig;
use crate::io::{fmt_f64, write_json, write_rows};
use crate::parallel::evaluate_points;

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Report {
    Decay(DecayFit),
    BoundState(delta_utm_core::analysis::BoundStateReport),
}

/// Long-time behaviour at `x_probe`: a decay fit, or for `q > 0` the bound-state
/// amplitude, phase rate and remainder decay.
pub fn run_asymptotics(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let opts = &cfg.asymptotics;
    let profile = build_profile(cfg)?;
    let solver = UtmSolver::new(profile, cfg.potential, cfg.quadrature)?;
    let ts = log_spaced(opts.t_start, opts.t_end, opts.n_samples)?;
    let points: Vec<(f64, f64)> = ts.iter().map(|&t| (opts.x_probe, t)).collect();
    let values = evaluate_points(&solver, &points)?;
    let bound = solver.bound_state().copied();
    let remainder: Vec<f64> = ts
        .iter()
        .zip(&values)
        .map(|(&t, &u)| (u - bound.map_or(0.0.into(), |b| b.value(opts.x_probe, t))).norm())
        .collect();

    let mut violations = Vec::new();
    let window = |p: f64, what: &str, v: &mut Vec<String>| {
        if !(opts.exponent_min..=opts.exponent_max).contains(&p) {
            v.push(format!("{what} exponent {p:.4} outside [{}, {}]", opts.exponent_min, opts.exponent_max));
        }
    };
    let (report, summary) = match bound {
        Some(_) => {
            let r = bound_state_report_from_samples(&solver, opts.x_probe, &ts, &values)?;
            let amp_err = (r.measured_amplitude - r.predicted_amplitude).norm();
            if amp_err > opts.amplitude_tol {
                violations
                    .push(format!("amplitude differs from prediction by {amp_err:.3e} > {:e}", opts.amplitude_tol));
            }
            let rate_err = (r.phase_rate - r.predicted_phase_rate).abs() / r.predicted_phase_rate;
            if rate_err > opts.phase_rate_tol {
                violations.push(format!("phase rate off by {rate_err:.3e} relative > {:e}", opts.phase_rate_tol));
            }
            let rem = match &r.remainder_envelope {
                Some(fit) => {
                    window(fit.fitted_exponent, "remainder", &mut violations);
                    format!("remainder exponent {:.4} (rms {:.2e})", fit.fitted_exponent, fit.residual_rms)
                }
                None => format!("remainder below fitting floor, max {:.3e}", r.remainder_max),
            };
            let s = format!(
                "asymptotics: bound state at x = {}: measured {:.6e}{:+.6e}i, predicted {:.6e}{:+.6e}i, phase rate {:.6} (q² = {:.6}), {rem}",
                opts.x_probe,
                r.measured_amplitude.re,
                r.measured_amplitude.im,
                r.predicted_amplitude.re,
                r.predicted_amplitude.im,
                r.phase_rate,
                r.predicted_phase_rate
            );
            (Report::BoundState(r), s)
        }
        None => {
            let fit = DecayFit::from_samples(&ts, &remainder)?;
            window(fit.fitted_exponent, "decay", &mut violations);
            let s = format!(
                "asymptotics: |u({}, t)| ~ t^-{:.4} over [{}, {}] (rms {:.2e}, {} samples dropped)",
                opts.x_probe, fit.fitted_exponent, opts.t_start, opts.t_end, fit.residual_rms, fit.discarded
            );
            (Report::Decay(fit), s)
        }
    };
    guarded(|out| {
        let rpath = out.claim(&cfg.output.path(&cfg.output.report))?;
        write_json(&rpath, &report)?;
        let tpath = out.claim(&cfg.output.path(&cfg.output.table))?;
        let rows =
            ts.iter().zip(&values).zip(&remainder).map(|((&t, u), &r)| [t, u.re, u.im, u.norm(), r].map(fmt_f64));
        write_rows(&tpath, &["t", "re_u", "im_u", "abs_u", "abs_remainder"], rows)?;
        write_manifest(out, cfg, "asymptotics", toml::Table::new())?;
        Ok((summary, violations))
    })
}
