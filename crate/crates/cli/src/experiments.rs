//! One function per experiment kind. Each writes its artifacts and returns whether every
//! recorded check passed.

use anyhow::{bail, Context, Result};
use rand::Rng;
use serde::Serialize;

use cayley_cutoff::bounds::mc::chunk_rng;
use cayley_cutoff::bounds::nilpotent::median;
use cayley_cutoff::bounds::typicality::{build_typicality, Strategy, TypicalityParams};
use cayley_cutoff::bounds::{compare_nilpotent_abelian, modified_l2_estimate, wilson_scan};
use cayley_cutoff::entropic::{cutoff_times, t_star};
use cayley_cutoff::groups::{GroupDescriptor, InvariantFactorGroup, NilpotentPresentation};
use cayley_cutoff::lattice_walk::{coord_law, Modulus, WalkKind};
use cayley_cutoff::mixing::{
    abelian_kernel, heat_kernel_general, isoperimetric_exhaustive, mixing_time, spectrum, DistanceCurve,
    KernelMethod, MixingTime,
};
use cayley_cutoff::regime::{regime_check, Thresholds};
use cayley_cutoff::verify::{self, Suite};

use crate::config::{resolve_grid, resolve_time, ExperimentConfig};
use crate::output::OutputDir;

fn kind(cfg: &ExperimentConfig) -> WalkKind {
    WalkKind::from_directed(cfg.directed)
}

pub fn entropic_times(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let g = cfg.group()?.abelian()?;
    let times = cutoff_times(cfg.k, &g, kind(cfg), cfg.threshold("varsigma")?)?;
    let regime = regime_check(cfg.k, &g, Thresholds { divergence: cfg.threshold("divergence")? });
    #[derive(Serialize)]
    struct Doc<'a> {
        cutoff_times: &'a cayley_cutoff::entropic::CutoffTimes,
        regime: &'a cayley_cutoff::regime::RegimeReport,
    }
    out.json("cutoff_times.json", &Doc { cutoff_times: &times, regime: &regime })?;
    out.csv(
        "entropic_table.csv",
        "gamma,index,t0",
        times.table.iter().map(|e| format!("{},{},{:?}", e.gamma, e.index, e.t)),
    )?;
    let law = coord_law(Modulus::Infinite, times.t_star / cfg.k as f64, kind(cfg))?;
    out.csv("law.csv", "j,p", law.support().map(|(j, p)| format!("{j},{p:?}")))?;
    Ok(true)
}

/// Generators and exact curve for one seed.
struct SeedCurve {
    generators: Vec<String>,
    curve: DistanceCurve,
    gap: Option<f64>,
}

enum Walkable {
    Abelian(InvariantFactorGroup),
    General(NilpotentPresentation),
}

impl Walkable {
    fn from(desc: &GroupDescriptor) -> Result<Self> {
        Ok(match desc {
            GroupDescriptor::Abelian(_) => Walkable::Abelian(desc.abelian()?),
            GroupDescriptor::Heisenberg { .. } => Walkable::General(desc.nilpotent()?),
        })
    }

    /// `t_*(k, G)`, or `t_*(k, Ḡ)` for a non-Abelian group.
    fn t_star(&self, k: usize, kind: WalkKind) -> Result<f64> {
        let g = match self {
            Walkable::Abelian(g) => g.clone(),
            Walkable::General(n) => n.bar_group(),
        };
        Ok(t_star(k, &g, kind).with_context(|| format!("t_* for {g} at k = {k}"))?.t_star)
    }

    fn curve(&self, k: usize, directed: bool, seed: u64, times: &[f64]) -> Result<SeedCurve> {
        let mut rng = chunk_rng(seed, 0);
        Ok(match self {
            Walkable::Abelian(g) => {
                let z = g.sample_generators(k, directed, &mut rng);
                let gap = spectrum(g, &z)?.gap;
                let curve = DistanceCurve::from_distributions(&abelian_kernel(g, &z, times)?, KernelMethod::Character);
                let generators = z.elements.iter().map(|e| format!("{:?}", e.residues)).collect();
                SeedCurve { generators, curve, gap: Some(gap) }
            }
            Walkable::General(n) => {
                let z: Vec<u64> = (0..k).map(|_| rng.random_range(0..n.size())).collect();
                let d = heat_kernel_general(n, &z, directed, times)?;
                let curve = DistanceCurve::from_distributions(&d, KernelMethod::Uniformization);
                SeedCurve { generators: z.iter().map(|x| x.to_string()).collect(), curve, gap: None }
            }
        })
    }
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    group: String,
    k: usize,
    directed: bool,
    t_star: Option<f64>,
    epsilon: f64,
    generators: &'a [String],
    spectral_gap: Option<f64>,
    t_mix_tv: MixingTime,
    t_mix_sep: MixingTime,
    sep_tv_violation: f64,
    sep_dominates_tv: bool,
    method: KernelMethod,
}

fn curve_experiment(cfg: &ExperimentConfig, out: &mut OutputDir, stem: &str) -> Result<bool> {
    let desc = cfg.group()?;
    let w = Walkable::from(&desc)?;
    let ts = w.t_star(cfg.k, kind(cfg)).inspect_err(|e| log::warn!("{e:#}")).ok();
    let times = resolve_grid(&cfg.grid, ts)?;
    let sc = w.curve(cfg.k, cfg.directed, cfg.seed, &times)?;
    let tol = cfg.threshold("sep_tolerance")?;
    let violation = sc.curve.sep_tv_violation();
    let doc = CurveDoc {
        group: desc.to_string(),
        k: cfg.k,
        directed: cfg.directed,
        t_star: ts,
        epsilon: cfg.epsilon,
        generators: &sc.generators,
        spectral_gap: sc.gap,
        t_mix_tv: mixing_time(&sc.curve.times, &sc.curve.tv, cfg.epsilon),
        t_mix_sep: mixing_time(&sc.curve.times, &sc.curve.sep, cfg.epsilon),
        sep_tv_violation: violation,
        sep_dominates_tv: violation <= tol,
        method: sc.curve.method,
    };
    out.raw(&format!("{stem}.csv"), &sc.curve.to_csv())?;
    out.json(&format!("{stem}.json"), &doc)?;
    out.plot(stem, &format!("{stem}.csv"), "curve");
    Ok(doc.sep_dominates_tv)
}

pub fn mix_curve(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    curve_experiment(cfg, out, "curve")
}

pub fn sep_curve(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    curve_experiment(cfg, out, "sep_curve")
}

pub fn cutoff_scan(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let desc = cfg.group()?;
    let w = Walkable::from(&desc)?;
    let ts = w.t_star(cfg.k, kind(cfg))?;
    let times = resolve_grid(&cfg.grid, Some(ts))?;
    let probe = [0.5 * ts, 2.0 * ts];
    let seeds: Vec<u64> = (cfg.seed..cfg.seed + cfg.seeds).collect();
    #[derive(Serialize)]
    struct SeedRow {
        seed: u64,
        t_mix_tv: MixingTime,
        tv_half: f64,
        tv_double: f64,
        sep_tv_violation: f64,
    }
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &seed in &seeds {
        let sc = w.curve(cfg.k, cfg.directed, seed, &times)?;
        let p = w.curve(cfg.k, cfg.directed, seed, &probe)?;
        rows.push(SeedRow {
            seed,
            t_mix_tv: mixing_time(&sc.curve.times, &sc.curve.tv, cfg.epsilon),
            tv_half: p.curve.tv[0],
            tv_double: p.curve.tv[1],
            sep_tv_violation: sc.curve.sep_tv_violation().max(p.curve.sep_tv_violation()),
        });
        let rel = format!("curves/curve_seed{seed}.csv");
        out.raw(&rel, &sc.curve.to_csv())?;
        out.plot(&format!("seed{seed}"), &rel, "curve");
        curves.push(sc.curve);
    }
    if !curves.is_empty() {
        let summary = (0..times.len()).map(|i| {
            let tv = median(&mut curves.iter().map(|c| c.tv[i]).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            let sep = median(&mut curves.iter().map(|c| c.sep[i]).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            format!("{:?},{tv:?},{sep:?}", times[i])
        });
        out.csv("summary.csv", "t,median_tv,median_sep", summary)?;
        out.plot("median", "summary.csv", "summary");
    }
    let (early_min, late_max) = (cfg.threshold("early_tv_min")?, cfg.threshold("late_tv_max")?);
    let med_half = median(&mut rows.iter().map(|r| r.tv_half).collect::<Vec<_>>());
    let med_double = median(&mut rows.iter().map(|r| r.tv_double).collect::<Vec<_>>());
    let shape_ok = match (med_half, med_double) {
        (Some(a), Some(b)) => a > early_min && b < late_max,
        _ => true,
    };
    #[derive(Serialize)]
    struct Doc<'a> {
        group: String,
        k: usize,
        t_star: f64,
        seeds: &'a [SeedRow],
        median_tv_half: Option<f64>,
        median_tv_double: Option<f64>,
        early_tv_min: f64,
        late_tv_max: f64,
        shape_ok: bool,
    }
    out.json(
        "cutoff_scan.json",
        &Doc {
            group: desc.to_string(),
            k: cfg.k,
            t_star: ts,
            seeds: &rows,
            median_tv_half: med_half,
            median_tv_double: med_double,
            early_tv_min: early_min,
            late_tv_max: late_max,
            shape_ok,
        },
    )?;
    Ok(shape_ok)
}

pub fn compare_nilpotent(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let n = cfg.group()?.nilpotent()?;
    let seeds: Vec<u64> = (cfg.seed..cfg.seed + cfg.seeds).collect();
    let c = compare_nilpotent_abelian(&n, cfg.k, &[cfg.epsilon], &seeds, cfg.directed)?;
    let max = cfg.threshold("median_ratio_max")?;
    let ok = c.summary.iter().all(|(_, m, _)| m.is_none_or(|m| m <= max));
    out.csv(
        "ratios.csv",
        "seed,eps,t_mix,t_mix_bar,ratio",
        c.rows.iter().map(|r| {
            let f = |m: MixingTime| m.value().map_or("censored".to_string(), |t| format!("{t:?}"));
            let ratio = r.ratio.map_or(String::new(), |x| format!("{x:?}"));
            format!("{},{:?},{},{},{ratio}", r.seed, r.eps, f(r.t_mix), f(r.t_mix_bar))
        }),
    )?;
    #[derive(Serialize)]
    struct Doc<'a> {
        comparison: &'a cayley_cutoff::bounds::NilpotentComparison,
        median_ratio_max: f64,
        ok: bool,
    }
    out.json("comparison.json", &Doc { comparison: &c, median_ratio_max: max, ok })?;
    Ok(ok)
}

pub fn gcd_bound(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let g = cfg.group()?.abelian()?;
    let kd = kind(cfg);
    let ts = t_star(cfg.k, &g, kd)?.t_star;
    let t = resolve_time(&cfg.time, ts)?;
    let params = match cfg.strategy.as_str() {
        "none" => TypicalityParams::unrestricted(&g, cfg.k, t, kd),
        s => {
            let strategy: Strategy = s.parse()?;
            build_typicality(&g, cfg.k, t, cfg.epsilon, strategy, kd, cfg.threshold("c_eps_factor")?)?
        }
    };
    let r = modified_l2_estimate(&g, cfg.k, t, kd, &params, cfg.trials, cfg.seed)?;
    let (d_max, tv_max) = (cfg.threshold("d_hat_max")?, cfg.threshold("tv_bound_max")?);
    let ok = r.d_hat < d_max && r.tv_upper_bound < tv_max && r.d_hat + 3.0 * r.d_se >= 0.0;
    out.csv(
        "gcd_counts.csv",
        "gamma,count,index,contribution",
        r.components.iter().map(|c| format!("{},{},{},{:?}", c.gamma, c.count, c.index, c.contribution)),
    )?;
    #[derive(Serialize)]
    struct Doc<'a> {
        t_star: f64,
        report: &'a cayley_cutoff::bounds::BoundReport,
        typicality: &'a TypicalityParams,
        d_hat_max: f64,
        tv_bound_max: f64,
        ok: bool,
    }
    out.json(
        "bound_report.json",
        &Doc { t_star: ts, report: &r, typicality: &params, d_hat_max: d_max, tv_bound_max: tv_max, ok },
    )?;
    Ok(ok)
}

pub fn expander(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let g = cfg.group()?.abelian()?;
    let n = g.size() as f64;
    let pres = NilpotentPresentation::from_abelian(g.clone());
    let exhaustive = g.size() <= cayley_cutoff::mixing::isoperimetric::ISOPERIMETRIC_CAP;
    #[derive(Serialize)]
    struct Row {
        seed: u64,
        gap: f64,
        gap_scaled: f64,
        relaxation_time: f64,
        phi: Option<f64>,
        cheeger_holds: Option<bool>,
    }
    let mut rows = Vec::new();
    for seed in cfg.seed..cfg.seed + cfg.seeds {
        let z = g.sample_generators(cfg.k, false, &mut chunk_rng(seed, 0));
        let s = spectrum(&g, &z)?;
        let (phi, holds) = if exhaustive {
            let idx: Vec<u64> = z.elements.iter().map(|e| g.index(e)).collect();
            let (phi, _) = isoperimetric_exhaustive(&pres, &idx)?;
            (Some(phi), Some(s.gap / 2.0 <= phi + 1e-12 && phi <= (2.0 * s.gap).sqrt() + 1e-12))
        } else {
            (None, None)
        };
        rows.push(Row {
            seed,
            gap: s.gap,
            gap_scaled: s.gap * n.powf(2.0 / cfg.k as f64),
            relaxation_time: s.relaxation_time,
            phi,
            cheeger_holds: holds,
        });
    }
    let band = cfg.threshold("gap_band")?;
    let lo = rows.iter().map(|r| r.gap_scaled).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.gap_scaled).fold(0.0, f64::max);
    let band_ok = rows.is_empty() || (lo > 0.0 && hi / lo <= band);
    let cheeger_ok = rows.iter().all(|r| r.cheeger_holds != Some(false));
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:?}"));
    out.csv(
        "expander.csv",
        "seed,gap,gap_scaled,relaxation_time,phi,cheeger_holds",
        rows.iter().map(|r| {
            let h = r.cheeger_holds.map_or(String::new(), |b| b.to_string());
            format!("{},{:?},{:?},{:?},{},{h}", r.seed, r.gap, r.gap_scaled, r.relaxation_time, opt(r.phi))
        }),
    )?;
    #[derive(Serialize)]
    struct Doc<'a> {
        group: String,
        k: usize,
        rows: &'a [Row],
        gap_scaled_min: f64,
        gap_scaled_max: f64,
        gap_band: f64,
        band_ok: bool,
        cheeger_ok: bool,
    }
    out.json(
        "expander.json",
        &Doc {
            group: g.to_string(),
            k: cfg.k,
            rows: &rows,
            gap_scaled_min: lo,
            gap_scaled_max: hi,
            gap_band: band,
            band_ok,
            cheeger_ok,
        },
    )?;
    Ok(band_ok && cheeger_ok)
}

pub fn wilson(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let s = wilson_scan(cfg.d, cfg.k)?;
    let opt = |x: Option<f64>| x.map_or("saturated".to_string(), |v| format!("{v:?}"));
    out.csv(
        "wilson.csv",
        "group,size,t_star,argmax",
        s.rows.iter().map(|r| {
            format!("{},{},{},{}", r.group, r.size, opt(r.t_star), r.argmax.map_or(String::new(), |a| a.to_string()))
        }),
    )?;
    out.json("wilson.json", &s)?;
    Ok(s.dominance != Some(false))
}

pub fn verify_suites(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    let suites = Suite::parse_selector(&cfg.suite)?;
    let reports = verify::run_all(&suites)?;
    for r in &reports {
        println!("{:<22} {} ({} cases) {}", r.suite.name(), if r.passed { "PASS" } else { "FAIL" }, r.cases, r.detail);
        for f in &r.failures {
            println!("    {f}");
        }
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        passed: bool,
        suites: &'a [verify::SuiteReport],
    }
    let passed = reports.iter().all(|r| r.passed);
    out.json("verify.json", &Doc { passed, suites: &reports })?;
    Ok(passed)
}

pub fn dispatch(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<bool> {
    match cfg.kind.as_str() {
        "entropic-times" => entropic_times(cfg, out),
        "mix-curve" => mix_curve(cfg, out),
        "cutoff-scan" => cutoff_scan(cfg, out),
        "compare-nilpotent" => compare_nilpotent(cfg, out),
        "gcd-bound" => gcd_bound(cfg, out),
        "sep-curve" => sep_curve(cfg, out),
        "expander" => expander(cfg, out),
        "wilson-scan" => wilson(cfg, out),
        "verify" => verify_suites(cfg, out),
        other => bail!("unknown experiment kind `{other}`"),
    }
}
