//! Exact invariant suites run by `cayley-cutoff verify` and the acceptance target.

use rand::Rng;
use serde::Serialize;

use crate::bounds::mc::chunk_rng;
use crate::bounds::nilpotent::prod_decomp_check;
use crate::bounds::wilson::wilson_scan;
use crate::error::{Error, Result};
use crate::groups::{GeneratorMultiset, InvariantFactorGroup, NilpotentPresentation};
use crate::lattice_walk::{coord_law_spectral, WalkKind};
use crate::mixing::{abelian_kernel, isoperimetric_exhaustive, spectrum, DistanceCurve, KernelMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CoordinateLaw,
    GcdUniformity,
    SubgroupIndex,
    ProductDecomposition,
    Separation,
    Cheeger,
    Wilson,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::CoordinateLaw,
        Suite::GcdUniformity,
        Suite::SubgroupIndex,
        Suite::ProductDecomposition,
        Suite::Separation,
        Suite::Cheeger,
        Suite::Wilson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CoordinateLaw => "coordinate-law",
            Suite::GcdUniformity => "gcd-uniformity",
            Suite::SubgroupIndex => "subgroup-index",
            Suite::ProductDecomposition => "product-decomposition",
            Suite::Separation => "separation",
            Suite::Cheeger => "cheeger",
            Suite::Wilson => "wilson",
        }
    }

    /// `"all"` expands to every suite.
    pub fn parse_selector(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .map(|x| vec![x])
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub cases: u64,
    /// At most 20 failing cases, described.
    pub failures: Vec<String>,
    pub detail: String,
}

impl SuiteReport {
    fn new(suite: Suite, cases: u64, failures: Vec<String>, detail: String) -> Self {
        let passed = failures.is_empty();
        let failures = failures.into_iter().take(20).collect();
        SuiteReport { suite, passed, cases, failures, detail }
    }
}

pub fn run(suite: Suite) -> Result<SuiteReport> {
    match suite {
        Suite::CoordinateLaw => coordinate_law(64, 50.0),
        Suite::GcdUniformity => gcd_uniformity(
            &[
                InvariantFactorGroup::cyclic(6)?,
                InvariantFactorGroup::cyclic(12)?,
                InvariantFactorGroup::from_factors(&[2, 4])?,
            ],
            3,
            4,
        ),
        Suite::SubgroupIndex => subgroup_index(1000, 2024),
        Suite::ProductDecomposition => product_decomposition(&NilpotentPresentation::heisenberg(2, 3)?, 2, 2),
        Suite::Separation => separation(),
        Suite::Cheeger => cheeger(16, 3, 20),
        Suite::Wilson => wilson(6),
    }
}

pub fn run_all(suites: &[Suite]) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|&s| run(s)).collect()
}

/// Spectral closed form against uniformisation of the `γ`-cycle generator.
pub fn coordinate_law(gamma_max: u64, s_max: f64) -> Result<SuiteReport> {
    let mut fails = Vec::new();
    let mut cases = 0;
    let mut worst = 0.0f64;
    let times = [0.0, 0.3, 1.0, 2.5, 7.0, 19.0, s_max];
    for gamma in 2..=gamma_max {
        for kind in [WalkKind::Srw, WalkKind::Drw] {
            for &s in &times {
                let law = coord_law_spectral(gamma, s, kind)?;
                let oracle = uniformised_cycle(gamma, s, kind);
                let err = law.pmf.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(err);
                cases += 1;
                if !(err < 1e-10) {
                    fails.push(format!("γ={gamma} s={s} {kind:?}: max error {err:e}"));
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::CoordinateLaw, cases, fails, format!("max abs error {worst:e}")))
}

/// `e^{−s} Σ_j s^j/j! δ_0 P^j` for the ±1 (or +1) step on `Z_γ`.
fn uniformised_cycle(gamma: u64, s: f64, kind: WalkKind) -> Vec<f64> {
    let g = gamma as usize;
    let mut mu = vec![0.0; g];
    mu[0] = 1.0;
    let mut out = vec![0.0; g];
    let jmax = crate::arith::poisson_cutoff(s);
    let mut log_w = -s;
    for j in 0..=jmax {
        if j > 0 {
            log_w += s.ln() - (j as f64).ln();
        }
        let w = log_w.exp();
        out.iter_mut().zip(&mu).for_each(|(o, &m)| *o += w * m);
        let mut next = vec![0.0; g];
        for (x, &m) in mu.iter().enumerate() {
            match kind {
                WalkKind::Srw => {
                    next[(x + 1) % g] += 0.5 * m;
                    next[(x + g - 1) % g] += 0.5 * m;
                }
                WalkKind::Drw => next[(x + 1) % g] += m,
            }
        }
        mu = next;
    }
    out
}

/// For every `v ∈ [−r, r]^k`, `v·Z` is exactly uniform on `γG` with `γ = gcd(v, n)`.
pub fn gcd_uniformity(groups: &[InvariantFactorGroup], k_max: usize, r: i64) -> Result<SuiteReport> {
    let mut fails = Vec::new();
    let mut cases = 0u64;
    for g in groups {
        let n = g.size() as usize;
        let elems: Vec<_> = g.elements().collect();
        let add: Vec<usize> = (0..n * n).map(|i| g.index(&g.add(&elems[i / n], &elems[i % n])) as usize).collect();
        let scale = |a: usize, c: i64| g.index(&g.scale(&elems[a], c)) as usize;
        for k in 1..=k_max {
            let width = (2 * r + 1) as usize;
            for code in 0..width.pow(k as u32) {
                let v: Vec<i64> = (0..k).map(|i| (code / width.pow(i as u32) % width) as i64 - r).collect();
                let gamma = crate::arith::gcd_vector_with(&v, n as u64);
                let mut target = vec![false; n];
                (0..n).for_each(|a| target[scale(a, gamma as i64)] = true);
                let sub = target.iter().filter(|&&b| b).count();
                let scaled: Vec<Vec<usize>> = v.iter().map(|&c| (0..n).map(|a| scale(a, c)).collect()).collect();
                let mut counts = vec![0u64; n];
                let mut idx = vec![0usize; k];
                loop {
                    let s = idx.iter().enumerate().fold(0usize, |acc, (i, &a)| add[acc * n + scaled[i][a]]);
                    counts[s] += 1;
                    let mut j = 0;
                    while j < k {
                        idx[j] += 1;
                        if idx[j] < n {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == k {
                        break;
                    }
                }
                let total = (n as u64).pow(k as u32);
                let each = total / sub as u64;
                let ok = total % sub as u64 == 0
                    && counts.iter().zip(&target).all(|(&c, &t)| if t { c == each } else { c == 0 });
                cases += 1;
                if !ok {
                    fails.push(format!("{g} v={v:?}: not uniform on {gamma}G"));
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::GcdUniformity, cases, fails, "exact integer counts".into()))
}

/// `|G/γG| ≤ γ^{d(G)}` and `γ_H | γ` over random groups and scales.
pub fn subgroup_index(instances: u64, seed: u64) -> Result<SuiteReport> {
    let mut rng = chunk_rng(seed, 0);
    let mut fails = Vec::new();
    for i in 0..instances {
        let r = rng.random_range(1..=4);
        let ms: Vec<u64> = (0..r).map(|_| rng.random_range(1..=60)).collect();
        let g = InvariantFactorGroup::from_factors(&ms)?;
        let gamma = rng.random_range(1..=240u64);
        let idx = g.scale_subgroup(gamma).index as u128;
        if idx > (gamma as u128).pow(g.rank() as u32) {
            fails.push(format!("#{i} {g} γ={gamma}: index {idx} > γ^d"));
        }
        for c in g.subgroup_classes(g.size()).classes {
            for &m in &c.members {
                if m % c.gamma_h != 0 || g.scale_subgroup(m).gcds != c.gcds {
                    fails.push(format!("#{i} {g}: class {:?} member {m}", c.gcds));
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::SubgroupIndex, instances, fails, format!("seed {seed}")))
}

pub fn product_decomposition(n: &NilpotentPresentation, k: usize, max_len: usize) -> Result<SuiteReport> {
    let cases = prod_decomp_check(n, k, max_len, max_len)?;
    let fails = cases
        .iter()
        .filter(|c| !c.holds || !c.index_identity)
        .map(|c| format!("{:?} vs {:?}: lhs {} rhs {}", c.word, c.word2, c.lhs, c.rhs))
        .collect();
    let strict = cases.iter().filter(|c| c.lhs < c.rhs).count();
    Ok(SuiteReport::new(
        Suite::ProductDecomposition,
        cases.len() as u64,
        fails,
        format!("{strict} strict cases"),
    ))
}

/// `sep(t) ≥ tv(t)` at every grid point of exact curves on small groups.
pub fn separation() -> Result<SuiteReport> {
    let mut fails = Vec::new();
    let mut cases = 0;
    let times: Vec<f64> = (0..=60).map(|i| 0.25 * i as f64).collect();
    for ms in [vec![101u64], vec![2, 2, 2, 2], vec![4, 12], vec![3, 9, 9]] {
        let g = InvariantFactorGroup::from_factors(&ms)?;
        for seed in 0..5 {
            for directed in [false, true] {
                let z = g.sample_generators(4, directed, &mut chunk_rng(seed, 0));
                let c = DistanceCurve::from_distributions(&abelian_kernel(&g, &z, &times)?, KernelMethod::Character);
                cases += c.len() as u64;
                let v = c.sep_tv_violation();
                if v > 1e-12 {
                    fails.push(format!("{g} seed {seed} directed {directed}: tv exceeds sep by {v:e}"));
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::Separation, cases, fails, "tolerance 1e-12".into()))
}

/// `gap/2 ≤ Φ_* ≤ √(2·gap)` on every Abelian group of order `≤ n_max`.
pub fn cheeger(n_max: u64, k_max: usize, seeds: u64) -> Result<SuiteReport> {
    let mut fails = Vec::new();
    let mut cases = 0;
    for n in 2..=n_max {
        for g in InvariantFactorGroup::all_of_order(n) {
            let pres = NilpotentPresentation::from_abelian(g.clone());
            for k in 1..=k_max {
                for seed in 0..seeds {
                    let z = g.sample_generators(k, false, &mut chunk_rng(seed, k as u64));
                    let (ok, msg) = cheeger_case(&g, &pres, &z)?;
                    cases += 1;
                    if !ok {
                        fails.push(format!("{g} k={k} seed={seed}: {msg}"));
                    }
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::Cheeger, cases, fails, "non-lazy and lazy, tolerance 1e-12".into()))
}

fn cheeger_case(g: &InvariantFactorGroup, pres: &NilpotentPresentation, z: &GeneratorMultiset) -> Result<(bool, String)> {
    let gap = spectrum(g, z)?.gap;
    let idx: Vec<u64> = z.elements.iter().map(|e| g.index(e)).collect();
    let (phi, _) = isoperimetric_exhaustive(pres, &idx)?;
    let tol = 1e-12;
    // the lazy chain halves both the gap and Φ
    let ok = gap / 2.0 <= phi + tol
        && phi <= (2.0 * gap).sqrt() + tol
        && gap / 4.0 <= phi / 2.0 + tol
        && phi / 2.0 <= gap.sqrt() + tol;
    Ok((ok, format!("gap {gap} Φ {phi}")))
}

pub fn wilson(d_max: u32) -> Result<SuiteReport> {
    let mut fails = Vec::new();
    for d in 1..=d_max {
        let s = wilson_scan(d, d as usize + 4)?;
        if s.dominance != Some(true) {
            fails.push(format!("d={d}: max at {:?} ({:?}) vs Z_2^d {:?}", s.max_group, s.max_t, s.z2d_t));
        }
    }
    Ok(SuiteReport::new(Suite::Wilson, d_max as u64, fails, "k = d + 4".into()))
}
