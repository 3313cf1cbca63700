//! Layered experiment configuration: shipped defaults, then `--config`, then
//! `--threshold-file`, then command-line flags. Files are flat `key = value` text or a JSON
//! object (a nested `thresholds` object maps to `threshold.*` keys).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

pub const DEFAULTS: &str = include_str!("../defaults.conf");

pub type RawConfig = BTreeMap<String, String>;

pub fn parse_text(text: &str) -> Result<RawConfig> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut out = RawConfig::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_json(text: &str) -> Result<RawConfig> {
    let v: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let obj = v.as_object().ok_or_else(|| anyhow!("JSON config must be an object"))?;
    let mut out = RawConfig::new();
    for (k, v) in obj {
        match v {
            serde_json::Value::Object(inner) if k == "thresholds" => {
                for (tk, tv) in inner {
                    out.insert(format!("threshold.{tk}"), scalar(tv)?);
                }
            }
            _ => {
                out.insert(k.clone(), scalar(v)?);
            }
        }
    }
    Ok(out)
}

fn scalar(v: &serde_json::Value) -> Result<String> {
    Ok(match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::Bool(b) => b.to_string(),
        other => bail!("unsupported config value {other}"),
    })
}

pub fn read_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Threshold files may omit the `threshold.` prefix.
pub fn read_threshold_file(path: &Path) -> Result<RawConfig> {
    Ok(read_file(path)?
        .into_iter()
        .map(|(k, v)| if k.starts_with("threshold.") { (k, v) } else { (format!("threshold.{k}"), v) })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub kind: String,
    pub group: Option<String>,
    pub k: usize,
    pub directed: bool,
    pub seed: u64,
    pub trials: u64,
    pub grid: String,
    pub epsilon: f64,
    pub seeds: u64,
    pub strategy: String,
    pub time: String,
    pub suite: String,
    pub d: u32,
    pub thresholds: BTreeMap<String, f64>,
    pub defaults_version: u32,
    #[serde(skip)]
    pub out: PathBuf,
}

fn get<T: std::str::FromStr>(raw: &RawConfig, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let v = raw.get(key).ok_or_else(|| anyhow!("missing config key `{key}`"))?;
    v.parse::<T>().map_err(|e| anyhow!("config key `{key}` = `{v}`: {e}"))
}

const KNOWN: [&str; 14] = [
    "defaults_version", "kind", "group", "k", "directed", "seed", "trials", "grid", "epsilon", "seeds", "strategy",
    "time", "suite", "d",
];

impl ExperimentConfig {
    pub fn from_raw(kind: &str, raw: &RawConfig, out: PathBuf) -> Result<Self> {
        if let Some(bad) = raw.keys().find(|k| !k.starts_with("threshold.") && !KNOWN.contains(&k.as_str())) {
            bail!("unknown config key `{bad}`");
        }
        let thresholds = raw
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("threshold.").map(|t| (t, v)))
            .map(|(t, v)| Ok((t.to_string(), v.parse::<f64>().map_err(|e| anyhow!("threshold `{t}` = `{v}`: {e}"))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let cfg = ExperimentConfig {
            kind: kind.to_string(),
            group: raw.get("group").cloned(),
            k: get(raw, "k")?,
            directed: get(raw, "directed")?,
            seed: get(raw, "seed")?,
            trials: get(raw, "trials")?,
            grid: get(raw, "grid")?,
            epsilon: get(raw, "epsilon")?,
            seeds: get(raw, "seeds")?,
            strategy: get(raw, "strategy")?,
            time: get(raw, "time")?,
            suite: get(raw, "suite")?,
            d: get(raw, "d")?,
            thresholds,
            defaults_version: get(raw, "defaults_version")?,
            out,
        };
        if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
            bail!("epsilon must lie in (0, 1), got {}", cfg.epsilon);
        }
        Ok(cfg)
    }

    pub fn threshold(&self, name: &str) -> Result<f64> {
        self.thresholds.get(name).copied().ok_or_else(|| anyhow!("missing threshold `{name}`"))
    }

    pub fn group(&self) -> Result<cayley_cutoff::groups::GroupDescriptor> {
        let g = self.group.as_deref().ok_or_else(|| anyhow!("--group is required for {}", self.kind))?;
        Ok(g.parse()?)
    }
}

/// Times from a grid spec, given `t_*` for the relative forms.
///
/// `auto:N` (0 plus N log-spaced points on [0.2, 4]·t_*), `tstar:a:b:N` (N points linear in
/// multiples of t_*), `lin:a:b:N`, or a comma-separated list. `t_star` is only consulted by
/// the relative forms.
pub fn resolve_grid(spec: &str, t_star: Option<f64>) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let need = || t_star.ok_or_else(|| anyhow!("grid `{spec}` needs t_*, which is unavailable here"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| anyhow!("grid `{spec}`: `{s}` is not a number"));
    let count = |s: &str| s.trim().parse::<usize>().map_err(|_| anyhow!("grid `{spec}`: `{s}` is not a count"));
    let linear = |a: f64, b: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            return vec![a];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    };
    let times = match parts.as_slice() {
        ["auto"] => cayley_cutoff::mixing::default_grid(need()?, 40),
        ["auto", n] => cayley_cutoff::mixing::default_grid(need()?, count(n)?),
        ["tstar", a, b, n] => linear(num(a)? * need()?, num(b)? * need()?, count(n)?),
        ["lin", a, b, n] => linear(num(a)?, num(b)?, count(n)?),
        [list] => list.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<_>>()?,
        _ => bail!("unrecognised grid `{spec}`"),
    };
    if let Some(t) = times.iter().find(|&&t| !(t >= 0.0) || !t.is_finite()) {
        bail!("grid `{spec}` contains invalid time {t}");
    }
    Ok(times)
}

/// `tstar:c` (a multiple of t_*) or an absolute time.
pub fn resolve_time(spec: &str, t_star: f64) -> Result<f64> {
    let t = match spec.split_once(':') {
        Some(("tstar", c)) => c.trim().parse::<f64>()? * t_star,
        None => spec.trim().parse::<f64>()?,
        _ => bail!("unrecognised time `{spec}`"),
    };
    if !(t >= 0.0) {
        bail!("time must be >= 0, got {t}");
    }
    Ok(t)
}
