//! Artifact writing: CSV and JSON files, the plot-bundle index and the run manifest.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Seed, thresholds and version, embedded in every JSON artifact.
#[derive(Serialize)]
pub struct Provenance<'a> {
    pub library_version: &'static str,
    pub seed: u64,
    pub thresholds: &'a std::collections::BTreeMap<String, f64>,
    pub config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct WithProvenance<'a, T: Serialize> {
    provenance: Provenance<'a>,
    #[serde(flatten)]
    body: &'a T,
}

pub struct OutputDir<'a> {
    root: PathBuf,
    cfg: &'a ExperimentConfig,
    written: Vec<String>,
    plots: Vec<(String, String, String)>,
}

impl<'a> OutputDir<'a> {
    pub fn create(cfg: &'a ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        Ok(OutputDir { root: cfg.out.clone(), cfg, written: Vec::new(), plots: Vec::new() })
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(rel.to_string());
        Ok(())
    }

    pub fn provenance(&self) -> Provenance<'a> {
        Provenance {
            library_version: cayley_cutoff::VERSION,
            seed: self.cfg.seed,
            thresholds: &self.cfg.thresholds,
            config: self.cfg,
        }
    }

    /// JSON object with a `provenance` block merged in front of `body`'s fields.
    pub fn json<T: Serialize>(&mut self, rel: &str, body: &T) -> Result<()> {
        let doc = WithProvenance { provenance: self.provenance(), body };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        self.write(rel, s.as_bytes())
    }

    pub fn csv(&mut self, rel: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        let mut s = String::from(header);
        s.push('\n');
        for r in rows {
            s.push_str(&r);
            s.push('\n');
        }
        self.write(rel, s.as_bytes())
    }

    pub fn raw(&mut self, rel: &str, text: &str) -> Result<()> {
        self.write(rel, text.as_bytes())
    }

    /// Register a curve file for the plot bundle.
    pub fn plot(&mut self, name: &str, rel: &str, kind: &str) {
        self.plots.push((name.to_string(), rel.to_string(), kind.to_string()));
    }

    /// Writes `plots/index.csv` (always, possibly empty) and `manifest.json`.
    pub fn finish(mut self, wall_clock: f64) -> Result<PathBuf> {
        let rows: Vec<String> = self.plots.iter().map(|(n, f, k)| format!("{n},{f},{k}")).collect();
        self.csv("plots/index.csv", "name,file,kind", rows)?;
        let mut outputs = self.written.clone();
        outputs.sort();
        let manifest = Manifest {
            tool: "cayley-cutoff",
            library_version: cayley_cutoff::VERSION,
            kind: &self.cfg.kind,
            config: self.cfg,
            wall_clock_seconds: wall_clock,
            outputs,
        };
        let path = self.root.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    library_version: &'static str,
    kind: &'a str,
    config: &'a ExperimentConfig,
    wall_clock_seconds: f64,
    outputs: Vec<String>,
}

