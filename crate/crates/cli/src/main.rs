use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod config;
mod experiments;
mod output;

use config::{parse_text, read_file, read_threshold_file, ExperimentConfig, RawConfig, DEFAULTS};

#[derive(Parser)]
#[command(name = "cayley-cutoff", version, about = "Cutoff experiments for random walks on random Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropic times t_0(γ, |G/γG|), t_*, window and regime checks.
    EntropicTimes(Common),
    /// Exact tv/l2/sep curve for one generator draw.
    MixCurve(Common),
    /// Exact curves over many seeds with a median summary.
    CutoffScan(Common),
    /// Mixing times of a nilpotent group against its abelianised companion.
    CompareNilpotent(Common),
    /// Monte Carlo gcd law and modified-L2 bound.
    GcdBound(Common),
    /// Separation curve with the sep ≥ tv check.
    SepCurve(Common),
    /// Spectral gap, isoperimetric constant and Cheeger check over seeds.
    Expander(Common),
    /// Maximality of t_*(k, Z_2^d) among Abelian groups of order ≤ 2^d.
    WilsonScan(Common),
    /// Exact invariant suites.
    Verify(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// e.g. `abelian:2,12` or `heisenberg:m=3,d=3`
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// `auto:N`, `tstar:a:b:N`, `lin:a:b:N` or `t1,t2,…`
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    threshold_file: Option<PathBuf>,
    /// key = value or JSON file layered over the shipped defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// number of seeds for scans, starting at --seed
    #[arg(long)]
    seeds: Option<u64>,
    /// approach1 | approach2 | approach3 | none
    #[arg(long)]
    strategy: Option<String>,
    /// `tstar:c` or an absolute time
    #[arg(long)]
    time: Option<String>,
    /// suite name or `all`
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    d: Option<u32>,
}

impl Common {
    fn layer(&self) -> Result<RawConfig> {
        let mut raw = parse_text(DEFAULTS)?;
        if let Some(p) = &self.config {
            raw.extend(read_file(p)?);
        }
        if let Some(p) = &self.threshold_file {
            raw.extend(read_threshold_file(p)?);
        }
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                raw.insert(k.to_string(), v);
            }
        };
        set("group", self.group.clone());
        set("k", self.k.map(|x| x.to_string()));
        set("directed", self.directed.then(|| "true".to_string()));
        set("seed", self.seed.map(|x| x.to_string()));
        set("trials", self.trials.map(|x| x.to_string()));
        set("grid", self.grid.clone());
        set("epsilon", self.epsilon.map(|x| x.to_string()));
        set("seeds", self.seeds.map(|x| x.to_string()));
        set("strategy", self.strategy.clone());
        set("time", self.time.clone());
        set("suite", self.suite.clone());
        set("d", self.d.map(|x| x.to_string()));
        raw.remove("kind");
        Ok(raw)
    }
}

/// `Ok(false)` only when a verification suite fails; soft checks in other experiments are
/// recorded in their artifacts.
fn run(kind: &str, common: &Common) -> Result<bool> {
    let cfg = ExperimentConfig::from_raw(kind, &common.layer()?, common.out.clone())?;
    log::info!("running {kind} into {}", cfg.out.display());
    let start = Instant::now();
    let mut out = output::OutputDir::create(&cfg)?;
    let ok = experiments::dispatch(&cfg, &mut out)?;
    let manifest = out.finish(start.elapsed().as_secs_f64())?;
    println!("{kind}: {} (manifest {})", if ok { "checks ok" } else { "checks failed" }, manifest.display());
    Ok(ok || kind != "verify")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::EntropicTimes(c) => ("entropic-times", c),
        Command::MixCurve(c) => ("mix-curve", c),
        Command::CutoffScan(c) => ("cutoff-scan", c),
        Command::CompareNilpotent(c) => ("compare-nilpotent", c),
        Command::GcdBound(c) => ("gcd-bound", c),
        Command::SepCurve(c) => ("sep-curve", c),
        Command::Expander(c) => ("expander", c),
        Command::WilsonScan(c) => ("wilson-scan", c),
        Command::Verify(c) => ("verify", c),
    };
    match run(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
