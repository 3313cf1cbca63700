//! Entropic times: `t_0(γ, N)`, the table over `γ` and its maximum `t_*`, the CLT window
//! `t_α`, adjusted times, L2 times and closed-form comparands.
//!
//! `h_γ(t) = k·H_γ(t/k)` is the entropy of the rate-1 walk on `Z_γ^k`; it increases strictly
//! from 0 to `k log γ`, so `t_0(γ, N) = h_γ^{-1}(log N)` is found by bisection.

use std::f64::consts::{E, PI};

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{bisect_increasing, divisors};
use crate::error::{Error, Result};
use crate::groups::{GroupDescriptor, InvariantFactorGroup};
use crate::lattice_walk::{coord_law, return_probability, Modulus, WalkKind};

/// Relative tolerance of every bisection.
pub const REL_TOL: f64 = 1e-9;
/// Default floor `ς` for adjusted times.
pub const DEFAULT_VARSIGMA: f64 = 0.05;
const MAX_UPPER: f64 = 1e15;

/// `h_γ(t) = k·H_γ(t/k)`
pub fn walk_entropy(modulus: Modulus, t: f64, k: usize, kind: WalkKind) -> Result<f64> {
    Ok(k as f64 * coord_law(modulus, t / k as f64, kind)?.moments().entropy)
}

fn saturated(modulus: Modulus, ln_n: f64, k: usize) -> Option<Error> {
    let g = modulus.finite()?;
    let sup = k as f64 * (g as f64).ln();
    (ln_n >= sup).then(|| Error::Saturated { gamma: g, target: ln_n, supremum: sup })
}

/// Exact saturation test `N >= γ^k` in integers.
fn saturated_exact(modulus: Modulus, n: u64, k: usize) -> Option<Error> {
    let g = modulus.finite()?;
    let reach = (g as u128).checked_pow(k as u32).map_or(true, |gk| (n as u128) < gk);
    (!reach).then(|| Error::Saturated {
        gamma: g,
        target: (n as f64).ln(),
        supremum: k as f64 * (g as f64).ln(),
    })
}

/// Smallest doubling of `k` at which `f` is nonnegative.
fn upper_bracket<F: FnMut(f64) -> Result<f64>>(k: usize, mut f: F, modulus: Modulus, target: f64) -> Result<f64> {
    let mut hi = k.max(1) as f64;
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > MAX_UPPER {
            // only reachable when the target sits within roundoff of log γ^k
            return Err(Error::Saturated {
                gamma: modulus.finite().unwrap_or(0),
                target,
                supremum: target,
            });
        }
    }
    Ok(hi)
}

/// Solve `h_γ(t) = ln_n` for a target given in nats.
pub fn entropic_time_ln(modulus: Modulus, ln_n: f64, k: usize, kind: WalkKind) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if !(ln_n >= 0.0) {
        return Err(Error::Domain(format!("entropy target must be >= 0 (got {ln_n})")));
    }
    if ln_n == 0.0 {
        return Ok(0.0);
    }
    if let Some(e) = saturated(modulus, ln_n, k) {
        return Err(e);
    }
    let f = |t: f64| walk_entropy(modulus, t, k, kind).map(|h| h - ln_n);
    let hi = upper_bracket(k, f, modulus, ln_n)?;
    let mut err = None;
    let t = bisect_increasing(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        0.0,
        hi,
        REL_TOL,
    );
    err.map_or(Ok(t), Err)
}

/// `t_0(γ, N) = h_γ^{-1}(log N)`.
pub fn entropic_time(modulus: Modulus, n: u64, k: usize, kind: WalkKind) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    if k > 0 {
        if let Some(e) = saturated_exact(modulus, n, k) {
            return Err(e);
        }
    }
    entropic_time_ln(modulus, (n as f64).ln(), k, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableEntry {
    pub gamma: u64,
    /// `|G/γG|`
    pub index: u64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturatedEntry {
    pub gamma: u64,
    pub index: u64,
}

/// `t_0(γ, |G/γG|)` over divisors `γ` of the exponent and its maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TStarTable {
    pub table: Vec<TableEntry>,
    pub saturated: Vec<SaturatedEntry>,
    pub t_star: f64,
    pub argmax: u64,
    /// `t_0(∞, |G|)`
    pub t0_inf: f64,
}

pub fn t_star(k: usize, g: &InvariantFactorGroup, kind: WalkKind) -> Result<TStarTable> {
    let divs = divisors(g.exponent());
    let results: Vec<(u64, u64, Result<f64>)> = divs
        .par_iter()
        .map(|&gamma| {
            let index = g.scale_subgroup(gamma).index;
            let t = if gamma == 1 { Ok(0.0) } else { entropic_time(Modulus::Finite(gamma), index, k, kind) };
            (gamma, index, t)
        })
        .collect();
    let mut table = Vec::new();
    let mut sat = Vec::new();
    for (gamma, index, r) in results {
        match r {
            Ok(t) => table.push(TableEntry { gamma, index, t }),
            Err(Error::Saturated { .. }) => {
                warn!("t_0({gamma}, {index}) saturates at k = {k}; skipped");
                sat.push(SaturatedEntry { gamma, index });
            }
            Err(e) => return Err(e),
        }
    }
    if table.iter().all(|e| e.gamma == 1) && !sat.is_empty() {
        return Err(Error::Saturated {
            gamma: sat[0].gamma,
            target: (sat[0].index as f64).ln(),
            supremum: k as f64 * (sat[0].gamma as f64).ln(),
        });
    }
    // ties go to the smallest γ
    let best = table
        .iter()
        .fold(None::<&TableEntry>, |b, e| match b {
            Some(b) if b.t >= e.t => Some(b),
            _ => Some(e),
        })
        .expect("γ = 1 always present");
    let (t_star, argmax) = (best.t, best.gamma);
    let t0_inf = entropic_time(Modulus::Infinite, g.size(), k, kind)?;
    Ok(TStarTable { t_star, argmax, table, saturated: sat, t0_inf })
}

/// CLT window at `γ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffWindow {
    pub k: usize,
    pub ln_n: f64,
    pub kind: WalkKind,
    pub t0: f64,
    /// `Var Q_1(t_0)`
    pub v: f64,
    /// `(vk)^{1/4}`
    pub omega: f64,
}

impl CutoffWindow {
    /// `t_α`: solves `h_∞(t) = log n + α√(vk)`.
    pub fn t_alpha(&self, alpha: f64) -> Result<f64> {
        if alpha == 0.0 {
            return Ok(self.t0);
        }
        let target = self.ln_n + alpha * (self.v * self.k as f64).sqrt();
        if target < 0.0 {
            return Err(Error::Domain(format!("window target log n + α√(vk) = {target} is negative")));
        }
        entropic_time_ln(Modulus::Infinite, target, self.k, self.kind)
    }
}

pub fn cutoff_window(k: usize, n: f64, kind: WalkKind) -> Result<CutoffWindow> {
    if !(n >= 2.0) || k == 0 {
        return Err(Error::InvalidInput(format!("window needs n >= 2 and k >= 1 (got n={n}, k={k})")));
    }
    let ln_n = n.ln();
    let t0 = entropic_time_ln(Modulus::Infinite, ln_n, k, kind)?;
    let v = coord_law(Modulus::Infinite, t0 / k as f64, kind)?.moments().variance;
    Ok(CutoffWindow { k, ln_n, kind, t0, v, omega: (v * k as f64).powf(0.25) })
}

/// `t_γ = k·max(s_0(γ, |G/γG|), ς)` over the raw table.
pub fn adjusted_times(k: usize, table: &TStarTable, varsigma: f64) -> Result<Vec<TableEntry>> {
    if !(varsigma >= 0.0) {
        return Err(Error::Domain("ς must be >= 0".into()));
    }
    Ok(table
        .table
        .iter()
        .map(|e| TableEntry { t: (e.t / k as f64).max(varsigma) * k as f64, ..*e })
        .collect())
}

/// `t̃`: solves `P(V_1(t) = 0) = N^{−1/k}` where `V = W − W′` is the SRW at coordinate time `2t/k`.
pub fn l2_time(modulus: Modulus, n: u64, k: usize) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("N and k must be >= 1".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    if let Some(e) = saturated_exact(modulus, n, k) {
        return Err(e);
    }
    let target = (-(n as f64).ln() / k as f64).exp();
    let f = |t: f64| return_probability(modulus, 2.0 * t / k as f64, WalkKind::Srw).map(|p| target - p);
    let hi = upper_bracket(k, f, modulus, (n as f64).ln())?;
    let mut err = None;
    let t = bisect_increasing(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        0.0,
        hi,
        REL_TOL,
    );
    err.map_or(Ok(t), Err)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L2Table {
    pub table: Vec<TableEntry>,
    pub saturated: Vec<SaturatedEntry>,
    pub t_star: f64,
    pub argmax: u64,
}

pub fn l2_times(k: usize, g: &InvariantFactorGroup) -> Result<L2Table> {
    let mut table = Vec::new();
    let mut sat = Vec::new();
    for gamma in divisors(g.exponent()) {
        let index = g.scale_subgroup(gamma).index;
        match l2_time(Modulus::Finite(gamma.max(2)), index, k) {
            Ok(t) => table.push(TableEntry { gamma, index, t }),
            Err(Error::Saturated { .. }) => sat.push(SaturatedEntry { gamma, index }),
            Err(e) => return Err(e),
        }
    }
    let best = table.iter().fold(table[0], |b, e| if e.t > b.t { *e } else { b });
    Ok(L2Table { t_star: best.t, argmax: best.gamma, table, saturated: sat })
}

/// `k n^{2/k} / (2πe)`
pub fn asymptotic_t0(k: usize, n: f64) -> f64 {
    k as f64 * n.powf(2.0 / k as f64) / (2.0 * PI * E)
}

/// `T(k, n) = log n / log(k / log n)`, defined for `k > e·log n`.
pub fn roichman_time(k: usize, n: f64) -> Result<f64> {
    let ln_n = n.ln();
    if !(n > 1.0) || (k as f64) <= E * ln_n {
        return Err(Error::Domain(format!("T(k, n) needs k > e·log n (k={k}, e·log n={:.4})", E * ln_n)));
    }
    Ok(ln_n / (k as f64 / ln_n).ln())
}

/// Everything the CLI reports for `(k, G)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffTimes {
    pub k: usize,
    pub group: GroupDescriptor,
    pub kind: WalkKind,
    pub table: Vec<TableEntry>,
    pub saturated: Vec<SaturatedEntry>,
    pub t_star: f64,
    pub argmax: u64,
    pub t0_inf: f64,
    pub window: Option<CutoffWindow>,
    pub varsigma: f64,
    pub adjusted: Vec<TableEntry>,
    pub l2: Option<L2Table>,
}

pub fn cutoff_times(k: usize, g: &InvariantFactorGroup, kind: WalkKind, varsigma: f64) -> Result<CutoffTimes> {
    let ts = t_star(k, g, kind)?;
    let window = if g.size() >= 2 { Some(cutoff_window(k, g.size() as f64, kind)?) } else { None };
    let adjusted = adjusted_times(k, &ts, varsigma)?;
    let l2 = match l2_times(k, g) {
        Ok(t) => Some(t),
        Err(e) => {
            warn!("L2 times unavailable: {e}");
            None
        }
    };
    Ok(CutoffTimes {
        k,
        group: GroupDescriptor::from(g),
        kind,
        table: ts.table,
        saturated: ts.saturated,
        t_star: ts.t_star,
        argmax: ts.argmax,
        t0_inf: ts.t0_inf,
        window,
        varsigma,
        adjusted,
        l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab(ms: &[u64]) -> InvariantFactorGroup {
        InvariantFactorGroup::from_factors(ms).unwrap()
    }

    #[test]
    fn trivial_and_saturated_targets() {
        assert_eq!(entropic_time(Modulus::Infinite, 1, 5, WalkKind::Srw).unwrap(), 0.0);
        assert_eq!(entropic_time(Modulus::Finite(3), 1, 5, WalkKind::Drw).unwrap(), 0.0);
        assert!(matches!(
            entropic_time(Modulus::Finite(2), 1 << 6, 6, WalkKind::Srw),
            Err(Error::Saturated { .. })
        ));
        assert!(entropic_time(Modulus::Finite(2), (1 << 6) - 1, 6, WalkKind::Srw).is_ok());
    }

    #[test]
    fn solver_hits_target() {
        for kind in [WalkKind::Srw, WalkKind::Drw] {
            for (m, n, k) in [(Modulus::Infinite, 1_000_000u64, 8usize), (Modulus::Finite(5), 400, 6)] {
                let t = entropic_time(m, n, k, kind).unwrap();
                let h = walk_entropy(m, t, k, kind).unwrap();
                assert!((h - (n as f64).ln()).abs() < 1e-7, "{m:?} {kind:?}");
            }
        }
    }

    #[test]
    fn asymptotic_ratio_k10() {
        // independent oracle: locate h_∞ = log n on a fine grid
        let (k, n) = (10usize, 1e12f64);
        let t = entropic_time_ln(Modulus::Infinite, n.ln(), k, WalkKind::Srw).unwrap();
        let mut grid_t = 0.0;
        let mut s = 0.0;
        while walk_entropy(Modulus::Infinite, s, k, WalkKind::Srw).unwrap() < n.ln() {
            grid_t = s;
            s += 0.01;
        }
        assert!(t >= grid_t && t <= grid_t + 0.01);
        let ratio = t / asymptotic_t0(k, n);
        assert!((0.8..=1.25).contains(&ratio), "{ratio}");
    }

    #[test]
    fn cyclic_prime_table() {
        let ts = t_star(6, &ab(&[13]), WalkKind::Srw).unwrap();
        assert_eq!(ts.table.len(), 2);
        assert_eq!(ts.table[0].t, 0.0);
        assert_eq!(ts.argmax, 13);
        let t13 = entropic_time(Modulus::Finite(13), 13, 6, WalkKind::Srw).unwrap();
        assert_eq!(ts.t_star, t13);
    }

    #[test]
    fn boolean_cube_argmax_two() {
        for d in 1..=5usize {
            let ts = t_star(d + 3, &InvariantFactorGroup::power(2, d).unwrap(), WalkKind::Srw).unwrap();
            assert_eq!(ts.argmax, 2);
        }
    }

    #[test]
    fn heisenberg_abelianisation_argmax_m() {
        // Z_m^{2d-4} with d = 3, m large, k ≍ k - 2
        let g = InvariantFactorGroup::power(101, 2).unwrap();
        let ts = t_star(40, &g, WalkKind::Srw).unwrap();
        assert_eq!(ts.argmax, 101);
        assert!((ts.t_star / ts.t0_inf - 1.0).abs() < 0.05, "{} vs {}", ts.t_star, ts.t0_inf);
    }

    #[test]
    fn window_basics() {
        let w = cutoff_window(16, 1e10, WalkKind::Srw).unwrap();
        assert_eq!(w.t_alpha(0.0).unwrap(), w.t0);
        assert!((w.omega - (w.v * 16.0).powf(0.25)).abs() < 1e-15);
        let ts: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|&a| w.t_alpha(a).unwrap()).collect();
        assert!(ts.windows(2).all(|p| p[0] < p[1]));
        assert!(matches!(w.t_alpha(-1e6), Err(Error::Domain(_))));
    }

    #[test]
    fn adjusted_examples() {
        let g = ab(&[12]);
        let ts = t_star(8, &g, WalkKind::Srw).unwrap();
        let adj = adjusted_times(8, &ts, DEFAULT_VARSIGMA).unwrap();
        assert!((adj[0].t - DEFAULT_VARSIGMA * 8.0).abs() < 1e-15);
        let max = adj.iter().map(|e| e.t).fold(0.0, f64::max);
        assert!(ts.t_star >= DEFAULT_VARSIGMA * 8.0);
        assert_eq!(max, ts.t_star);
        assert_eq!(adjusted_times(8, &ts, 0.0).unwrap(), ts.table);
    }

    #[test]
    fn l2_time_closed_form_two_cycle() {
        let k = 5;
        for n in [2u64, 5, 17, 31] {
            let p = (-(n as f64).ln() / k as f64).exp();
            let s = -0.25 * (2.0 * p - 1.0).ln();
            // coordinate time of V is 2t/k, and the γ = 2 return probability at time u is ½(1+e^{-2u})
            let t_closed = s * k as f64;
            let t = l2_time(Modulus::Finite(2), n, k).unwrap();
            assert!((t - t_closed).abs() < 1e-8 * t_closed.max(1.0), "n={n}: {t} vs {t_closed}");
        }
        assert_eq!(l2_time(Modulus::Finite(7), 1, 3).unwrap(), 0.0);
        assert!(matches!(l2_time(Modulus::Finite(2), 32, 5), Err(Error::Saturated { .. })));
    }

    #[test]
    fn closed_forms() {
        let a = asymptotic_t0(10, 1e12);
        assert!((a - 10.0 * 10f64.powf(2.4) / (2.0 * PI * E)).abs() < 1e-9);
        let n = 1e30f64;
        let ln = n.ln();
        let t = roichman_time((ln * ln).ceil() as usize, n).unwrap();
        assert!((t / (ln / ln.ln()) - 1.0).abs() < 0.01);
        assert!(roichman_time(ln as usize, n).is_err());
    }

    #[test]
    fn divisor_restriction_is_sound() {
        for ms in [vec![12], vec![2, 6], vec![3, 9], vec![2, 2, 4], vec![36], vec![5, 10], vec![4, 4]] {
            let g = ab(&ms);
            let k = g.rank() + 6;
            let ts = t_star(k, &g, WalkKind::Srw).unwrap();
            for gamma in 2..=4 * g.exponent() {
                let idx = g.scale_subgroup(gamma).index;
                if let Ok(t) = entropic_time(Modulus::Finite(gamma), idx, k, WalkKind::Srw) {
                    assert!(t <= ts.t_star * (1.0 + 1e-8), "{ms:?} γ={gamma}");
                }
            }
        }
    }

    #[test]
    fn t_star_bracketing() {
        // ratio t_*/(k n^{2/k}) ∈ [1/C, C log k]; observed range on this grid is 0.028..0.099
        const C: f64 = 40.0;
        for ms in [vec![1000], vec![2, 2, 2, 2, 2, 2], vec![7, 7, 7], vec![30, 30], vec![100_000]] {
            let g = ab(&ms);
            for k in [g.rank() + 2, g.rank() + 5, 3 * g.rank() + 8] {
                let ts = t_star(k, &g, WalkKind::Srw).unwrap();
                let r = ts.t_star / (k as f64 * (g.size() as f64).powf(2.0 / k as f64));
                assert!(r >= 1.0 / C && r <= C * (k as f64).ln(), "{ms:?} k={k} r={r}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn l2_time_dominates_entropy_time(gamma in 2u64..20, n in 2u64..400, k in 2usize..10) {
            let m = Modulus::Finite(gamma);
            if let (Ok(t2), Ok(t0)) = (l2_time(m, n, k), entropic_time(m, n, k, WalkKind::Srw)) {
                prop_assert!(t2 >= t0 * (1.0 - 1e-8));
            }
        }

        #[test]
        fn entropy_is_strictly_increasing(t in 0.0f64..50.0, dt in 0.01f64..5.0, k in 1usize..12) {
            let a = walk_entropy(Modulus::Infinite, t, k, WalkKind::Drw).unwrap();
            let b = walk_entropy(Modulus::Infinite, t + dt, k, WalkKind::Drw).unwrap();
            prop_assert!(b > a);
        }
    }
}
