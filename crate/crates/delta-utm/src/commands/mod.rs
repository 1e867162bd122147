//! The subcommands. Each returns the files it wrote, a human-readable summary and
//! any tolerance violations; on error every file it created is removed.

mod asymptotics;
mod compare;
mod diagnose;
mod oracle;
mod solve;

use std::path::PathBuf;

use delta_utm_core::model::{make_profile, validate_inputs, InitialProfile};

use crate::config::RunConfig;
use crate::io::Outputs;

pub use asymptotics::run_asymptotics;
pub use compare::{run_compare, CompareOptions};
pub use diagnose::run_diagnose;
pub use oracle::run_oracle;
pub use solve::run_solve;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// Tolerance checks that failed; turned into a nonzero exit under `--strict`.
    pub violations: Vec<String>,
}

/// Runs `body` and removes its outputs if it fails.
fn guarded<F>(body: F) -> anyhow::Result<Outcome>
where
    F: FnOnce(&mut Outputs) -> anyhow::Result<(String, Vec<String>)>,
{
    let mut out = Outputs::new();
    match body(&mut out) {
        Ok((summary, violations)) => Ok(Outcome { files: out.files().to_vec(), summary, violations }),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn build_profile(cfg: &RunConfig) -> anyhow::Result<InitialProfile> {
    let profile = make_profile(cfg.profile.clone())?;
    let report = validate_inputs(&profile, &cfg.potential);
    for check in report.failures() {
        log::warn!("input check `{}` failed: {}", check.name, check.note);
    }
    Ok(profile)
}

/// Writes the configuration followed by a `[manifest]` table describing the run.
fn write_manifest(out: &mut Outputs, cfg: &RunConfig, command: &str, mut extra: toml::Table) -> anyhow::Result<()> {
    let path = out.claim(&cfg.output.path(&cfg.output.manifest))?;
    extra.insert("command".into(), command.into());
    extra.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    let files: Vec<toml::Value> =
        out.files().iter().filter(|p| **p != path).map(|p| toml::Value::String(p.display().to_string())).collect();
    extra.insert("files".into(), toml::Value::Array(files));
    let mut text = cfg.to_toml()?;
    let mut wrapper = toml::Table::new();
    wrapper.insert("manifest".into(), toml::Value::Table(extra));
    text.push('\n');
    text.push_str(&toml::to_string(&wrapper)?);
    std::fs::write(&path, text)?;
    Ok(())
}
