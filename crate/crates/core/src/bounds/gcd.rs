//! Law of `g = gcd(V_1, …, V_k, n)` for `V = W − W′` and the modified-L2 quantity
//! `D(t) = n P(S(t) = S′(t) | typ) − 1 = Σ_γ P(g = γ | typ)·|G/γG| − 1`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::lower::{gaussian_tail, lower_bound_value, LowerBoundEstimate};
use super::mc::{proportion, run_chunks};
use super::typicality::{Strategy, TypicalityEvaluator, TypicalityParams};
use crate::arith::gcd_vector_with;
use crate::entropic::cutoff_window;
use crate::error::{Error, Result};
use crate::groups::{InvariantFactorGroup, SubgroupLattice};
use crate::lattice_walk::{coord_law, difference_law, Modulus, WalkKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcdDistribution {
    pub trials: u64,
    /// `(γ, occurrences)` over accepted pairs, sorted by `γ`; `V = 0` lands on `γ = n`.
    pub counts: Vec<(u64, u64)>,
    /// Accepted pairs with `V = 0` exactly (a subset of `counts[n]`).
    pub zero_count: u64,
    pub rejected: u64,
    /// Single walks drawn and single walks passing typicality.
    pub walks: u64,
    pub walks_passed: u64,
    /// `n·Π_i P(V_i = 0)`, unconditioned.
    pub v_zero: f64,
    /// Running sums of `y = |G/g G|·[V ≠ 0]` and `y²` over accepted pairs.
    sum_y: f64,
    sum_y2: f64,
    /// Same with `V = 0` counted at `n`.
    sum_y_emp: f64,
    sum_y2_emp: f64,
}

impl GcdDistribution {
    pub fn accepted(&self) -> u64 {
        self.trials - self.rejected
    }

    pub fn count(&self, gamma: u64) -> u64 {
        self.counts.iter().find(|c| c.0 == gamma).map_or(0, |c| c.1)
    }
}

#[derive(Default)]
struct Acc {
    counts: BTreeMap<u64, u64>,
    zero: u64,
    rejected: u64,
    walks_passed: u64,
    sum_y: f64,
    sum_y2: f64,
    sum_y_emp: f64,
    sum_y2_emp: f64,
}

/// `ln(n·p0^k)` with `p0 = P(V_1 = 0)`.
fn ln_v_zero(n: u64, k: usize, t: f64, kind: WalkKind) -> Result<f64> {
    let p0 = difference_law(Modulus::Infinite, t / k as f64, kind)?.prob(0);
    Ok((n as f64).ln() + k as f64 * p0.ln())
}

pub fn gcd_distribution_mc(
    g: &InvariantFactorGroup,
    k: usize,
    t: f64,
    kind: WalkKind,
    params: &TypicalityParams,
    trials: u64,
    seed: u64,
) -> Result<GcdDistribution> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    if params.n != g.size() || params.k != k || params.kind != kind || params.t != t {
        return Err(Error::InvalidInput("typicality parameters were built for another (G, k, t, kind)".into()));
    }
    let n = g.size();
    let eval = TypicalityEvaluator::new(params)?;
    let sampler = eval.law.sampler();
    let lattice = match params.strategy {
        Some(Strategy::Approach2) => Some(g.subgroup_classes(params.n_star.unwrap_or(n - 1))),
        _ => None,
    };
    let chunks = run_chunks(seed, trials, |rng, count| {
        let mut a = Acc::default();
        let mut w = vec![0i64; k];
        let mut w2 = vec![0i64; k];
        for _ in 0..count {
            w.iter_mut().for_each(|x| *x = sampler.sample(rng));
            w2.iter_mut().for_each(|x| *x = sampler.sample(rng));
            let (p1, p2) = (eval.passes(&w), eval.passes(&w2));
            a.walks_passed += p1 as u64 + p2 as u64;
            if !(p1 && p2) {
                a.rejected += 1;
                continue;
            }
            let v: Vec<i64> = w.iter().zip(&w2).map(|(x, y)| x - y).collect();
            if let Some(l) = &lattice {
                assert!(class_collapse_holds(l, &v), "class collapse violated for V = {v:?}");
            }
            let gamma = gcd_vector_with(&v, n);
            *a.counts.entry(gamma).or_default() += 1;
            let index = g.scale_subgroup(gamma).index as f64;
            if v.iter().all(|&x| x == 0) {
                a.zero += 1;
                a.sum_y_emp += n as f64;
                a.sum_y2_emp += (n as f64).powi(2);
            } else {
                a.sum_y += index;
                a.sum_y2 += index * index;
                a.sum_y_emp += index;
                a.sum_y2_emp += index * index;
            }
        }
        a
    });
    let mut total = Acc::default();
    for c in chunks {
        for (gm, cnt) in c.counts {
            *total.counts.entry(gm).or_default() += cnt;
        }
        total.zero += c.zero;
        total.rejected += c.rejected;
        total.walks_passed += c.walks_passed;
        total.sum_y += c.sum_y;
        total.sum_y2 += c.sum_y2;
        total.sum_y_emp += c.sum_y_emp;
        total.sum_y2_emp += c.sum_y2_emp;
    }
    Ok(GcdDistribution {
        trials,
        counts: total.counts.into_iter().collect(),
        zero_count: total.zero,
        rejected: total.rejected,
        walks: 2 * trials,
        walks_passed: total.walks_passed,
        v_zero: ln_v_zero(n, k, t, kind)?.exp(),
        sum_y: total.sum_y,
        sum_y2: total.sum_y2,
        sum_y_emp: total.sum_y_emp,
        sum_y2_emp: total.sum_y2_emp,
    })
}

/// `V ≡ 0 mod γ` for some member `γ` of a class implies `V ≡ 0 mod γ_H`.
pub fn class_collapse_holds(lattice: &SubgroupLattice, v: &[i64]) -> bool {
    lattice.classes.iter().all(|c| {
        let hit = c.members.iter().any(|&gm| v.iter().all(|&x| x.rem_euclid(gm as i64) == 0));
        !hit || v.iter().all(|&x| x.rem_euclid(c.gamma_h as i64) == 0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaComponent {
    pub gamma: u64,
    /// Accepted pairs with `g = γ` and `V ≠ 0`.
    pub count: u64,
    pub index: u64,
    /// `count/accepted · |G/γG|`
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub t: f64,
    pub k: usize,
    pub n: u64,
    pub kind: WalkKind,
    pub strategy: Option<Strategy>,
    pub epsilon: f64,
    pub c_eps: f64,
    pub r_star: f64,
    pub omega: f64,
    pub seed: u64,
    pub trials: u64,
    pub accepted: u64,
    pub pair_pass_rate: f64,
    pub walk_pass_rate: f64,
    /// Uses the analytic `V = 0` proxy.
    pub d_hat: f64,
    pub d_se: f64,
    /// Uses the Monte Carlo `V = 0` frequency instead.
    pub d_hat_empirical_atom: f64,
    pub d_se_empirical_atom: f64,
    /// `n·Π P(V_i = 0)`, unconditioned (an upper proxy only when typicality is off).
    pub v_zero_proxy: f64,
    /// Bound on `n P(V = 0 | typ)` from the global typicality budgets.
    pub v_zero_bound: Option<f64>,
    pub components: Vec<GammaComponent>,
    /// `½√max(D̂, 0) + P(W ∉ typ)`
    pub tv_upper_bound: f64,
    pub lower_bound: LowerBoundEstimate,
    /// `Ψ(α)` at the `α` with `t = t_α`.
    pub psi_reference: f64,
    pub alpha: f64,
}

pub fn modified_l2_estimate(
    g: &InvariantFactorGroup,
    k: usize,
    t: f64,
    kind: WalkKind,
    params: &TypicalityParams,
    trials: u64,
    seed: u64,
) -> Result<BoundReport> {
    let dist = gcd_distribution_mc(g, k, t, kind, params, trials, seed)?;
    let acc = dist.accepted();
    if acc == 0 {
        return Err(Error::ZeroAccepted { trials });
    }
    let n = g.size();
    let af = acc as f64;
    let mean_se = |s: f64, s2: f64| {
        let m = s / af;
        let var = if acc > 1 { ((s2 - af * m * m) / (af - 1.0)).max(0.0) } else { 0.0 };
        (m, (var / af).sqrt())
    };
    let (m, d_se) = mean_se(dist.sum_y, dist.sum_y2);
    let (m_emp, d_se_emp) = mean_se(dist.sum_y_emp, dist.sum_y2_emp);
    let d_hat = m + dist.v_zero - 1.0;
    let (walk_pass_rate, _) = proportion(dist.walks_passed, dist.walks);
    let (pair_pass_rate, _) = proportion(acc, trials);
    let components = dist
        .counts
        .iter()
        .map(|&(gamma, c)| {
            let count = if gamma == n { c - dist.zero_count } else { c };
            let index = g.scale_subgroup(gamma).index;
            GammaComponent { gamma, count, index, contribution: count as f64 / af * index as f64 }
        })
        .filter(|c| c.count > 0)
        .collect();
    let v_zero_bound = match params.strategy {
        None => Some(dist.v_zero),
        Some(Strategy::Approach1) => Some((-params.omega).exp() / walk_pass_rate),
        Some(_) => params
            .gammas
            .iter()
            .map(|b| n as f64 * b.delta / (b.index as f64 * walk_pass_rate))
            .min_by(f64::total_cmp),
    };
    let window = cutoff_window(k, n as f64, kind)?;
    let h = k as f64 * coord_law(Modulus::Infinite, t / k as f64, kind)?.moments().entropy;
    let alpha = (h - window.ln_n) / (window.v * k as f64).sqrt();
    let lower_bound = lower_bound_value(k, n as f64, t, window.omega, kind, trials, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(BoundReport {
        t,
        k,
        n,
        kind,
        strategy: params.strategy,
        epsilon: params.epsilon,
        c_eps: params.c_eps,
        r_star: params.r_star,
        omega: params.omega,
        seed,
        trials,
        accepted: acc,
        pair_pass_rate,
        walk_pass_rate,
        d_hat,
        d_se,
        d_hat_empirical_atom: m_emp - 1.0,
        d_se_empirical_atom: d_se_emp,
        v_zero_proxy: dist.v_zero,
        v_zero_bound,
        components,
        tv_upper_bound: 0.5 * d_hat.max(0.0).sqrt() + (1.0 - walk_pass_rate),
        lower_bound,
        psi_reference: gaussian_tail(alpha),
        alpha,
    })
}
