//! The run configuration document and flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use delta_utm_core::model::{PotentialParams, ProfileSpec, SpaceTimeGrid};
use delta_utm_core::oracle::FdConfig;
use delta_utm_core::quadrature::QuadratureConfig;
use serde::{Deserialize, Serialize};

/// One axis of the evaluation grid: explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, stop, count } => SpaceTimeGrid::linspace(*start, *stop, *count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: Axis,
    pub t: Axis,
}

impl GridSpec {
    pub fn build(&self) -> anyhow::Result<SpaceTimeGrid> {
        Ok(SpaceTimeGrid::new(self.x.values(), self.t.values())?)
    }
}

/// Output file names, relative to `dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub field: PathBuf,
    pub traces: PathBuf,
    pub report: PathBuf,
    pub table: PathBuf,
    pub manifest: PathBuf,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            field: PathBuf::from("field.csv"),
            traces: PathBuf::from("traces.csv"),
            report: PathBuf::from("report.json"),
            table: PathBuf::from("report.csv"),
            manifest: PathBuf::from("manifest.toml"),
        }
    }
}

impl OutputPaths {
    pub fn path(&self, name: &Path) -> PathBuf {
        self.dir.join(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticsOptions {
    pub x_probe: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
    /// Acceptable window for the fitted decay exponent (of the remainder when `q > 0`).
    pub exponent_min: f64,
    pub exponent_max: f64,
    /// Absolute tolerance on the bound-state amplitude.
    pub amplitude_tol: f64,
    /// Relative tolerance on the phase rotation rate.
    pub phase_rate_tol: f64,
}

impl Default for AsymptoticsOptions {
    fn default() -> Self {
        Self {
            x_probe: 0.0,
            t_start: 10.0,
            t_end: 100.0,
            n_samples: 16,
            exponent_min: 1.3,
            exponent_max: 1.7,
            amplitude_tol: 1e-3,
            phase_rate_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseOptions {
    /// Times at which the interface jump is checked.
    pub jump_times: Vec<f64>,
    pub step: f64,
    pub jump_tol: f64,
    /// Spectral parameters for the global relations.
    pub k_values: Vec<f64>,
    pub relation_time: f64,
    /// The space transforms are taken over `[a - w, a + w]` with spacing `relation_dx`.
    pub relation_half_width: f64,
    pub relation_dx: f64,
    pub relation_tol: f64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            jump_times: vec![0.5, 1.0],
            step: 1e-4,
            jump_tol: 1e-3,
            k_values: vec![0.5, 1.0, 2.0, 4.0],
            relation_time: 0.5,
            relation_half_width: 20.0,
            relation_dx: 0.01,
            relation_tol: 1e-3,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    pub potential: PotentialParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub fd: FdConfig,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub asymptotics: AsymptoticsOptions,
    #[serde(default)]
    pub diagnose: DiagnoseOptions,
    /// Run record appended to written manifests; ignored on input.
    #[serde(default, skip_serializing)]
    pub manifest: Option<toml::Table>,
}

impl Default for RunConfig {
    /// Unit Gaussian at the origin, `q = 1`, `a = 0`, on the benchmark grid.
    fn default() -> Self {
        Self {
            profile: ProfileSpec::Gaussian { center: 0.0, width: 1.0, amplitude: 1.0 },
            potential: PotentialParams { q: 1.0, a: 0.0 },
            grid: GridSpec {
                x: Axis::Values(vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]),
                t: Axis::Values(vec![0.1, 0.5, 1.0]),
            },
            quadrature: QuadratureConfig::default(),
            fd: FdConfig::default(),
            output: OutputPaths::default(),
            asymptotics: AsymptoticsOptions::default(),
            diagnose: DiagnoseOptions::default(),
            manifest: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Loads `path` (or the defaults) and applies `--name value` overrides.
    pub fn resolve(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Self> {
        let base = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        base.with_overrides(overrides)
    }

    /// Applies `--name value` or `--name=value` pairs. `name` is a dotted path such
    /// as `potential.q`, or a bare field name when it is unique in the document.
    /// Values are read as TOML (`1e-3`, `true`, `[0.5, 1.0]`), falling back to a string.
    pub fn with_overrides(&self, overrides: &[String]) -> anyhow::Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut doc = toml::Table::try_from(self)?;
        let mut args = overrides.iter();
        while let Some(flag) = args.next() {
            let body = flag.strip_prefix("--").ok_or_else(|| anyhow!("expected `--name value`, got `{flag}`"))?;
            let (name, raw) = match body.split_once('=') {
                Some((n, v)) => (n.to_string(), v.to_string()),
                None => {
                    let v = args.next().ok_or_else(|| anyhow!("flag `--{body}` needs a value"))?;
                    (body.to_string(), v.clone())
                }
            };
            let path = resolve_name(&doc, &name)?;
            set_path(&mut doc, &path, parse_value(&raw))?;
        }
        let merged: Self = toml::Value::Table(doc).try_into().context("applying overrides")?;
        Ok(merged)
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn collect_paths(table: &toml::Table, prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    for (k, v) in table {
        prefix.push(k.clone());
        out.push(prefix.clone());
        if let toml::Value::Table(t) = v {
            collect_paths(t, prefix, out);
        }
        prefix.pop();
    }
}

fn resolve_name(doc: &toml::Table, name: &str) -> anyhow::Result<Vec<String>> {
    let wanted: Vec<String> = name.split('.').map(str::to_string).collect();
    let mut all = Vec::new();
    collect_paths(doc, &mut Vec::new(), &mut all);
    if all.contains(&wanted) {
        return Ok(wanted);
    }
    let hits: Vec<&Vec<String>> = all.iter().filter(|p| p.ends_with(&wanted)).collect();
    match hits.len() {
        1 => Ok(hits[0].clone()),
        0 if wanted.len() > 1 => Ok(wanted),
        0 => bail!("unknown setting `--{name}`"),
        _ => bail!(
            "`--{name}` is ambiguous; use one of {}",
            hits.iter().map(|p| format!("--{}", p.join("."))).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn set_path(doc: &mut toml::Table, path: &[String], value: toml::Value) -> anyhow::Result<()> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = doc;
    for key in parents {
        let entry = table.entry(key.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| anyhow!("`{key}` is not a table"))?;
    }
    table.insert(last.clone(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn overrides_by_leaf_and_path() {
        let c = RunConfig::default()
            .with_overrides(&["--q".into(), "-1".into(), "--k_max=150".into(), "--output.dir".into(), "run7".into()])
            .unwrap();
        assert_eq!(c.potential.q, -1.0);
        assert_eq!(c.quadrature.k_max, 150.0);
        assert_eq!(c.output.dir, PathBuf::from("run7"));
    }

    #[test]
    fn ambiguous_and_unknown_names() {
        let err = RunConfig::default().with_overrides(&["--dir".into(), "x".into()]);
        assert!(err.is_ok());
        let err = RunConfig::default().with_overrides(&["--nonsense".into(), "1".into()]).unwrap_err();
        assert!(err.to_string().contains("unknown"));
        // `x` names both the grid axis and nothing else, but `a` exists once
        let c = RunConfig::default().with_overrides(&["--a".into(), "0.25".into()]).unwrap();
        assert_eq!(c.potential.a, 0.25);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut text = RunConfig::default().to_toml().unwrap();
        text.push_str("\n[extra]\nz = 1\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn manifest_table_is_accepted() {
        let mut text = RunConfig::default().to_toml().unwrap();
        text.push_str("\n[manifest]\ncommand = \"solve\"\n");
        let c = RunConfig::from_toml(&text).unwrap();
        assert!(c.manifest.is_some());
    }
}
