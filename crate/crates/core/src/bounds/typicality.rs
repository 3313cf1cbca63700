//! Typicality conditions on the auxiliary walk.
//!
//! Local: `|w_i − E W_1(t)| ≤ r_*` with `r_* = ½ n^{1/k} (log k)²`.
//! Global, approach 1: `P(W(t) = w) ≤ n^{-1} e^{−ω}`.
//! Global, approaches 2 and 3: `P(W_γ(t) = w mod γ) ≤ δ_γ / |G/γG|` for every `γ ∈ Γ`,
//! with `δ_γ = exp(−c_ε min(ζ_γ, 1) k)` and `ζ_γ = (k − d)/k · log γ`.

use serde::{Deserialize, Serialize};

use crate::arith::divisors;
use crate::entropic::cutoff_window;
use crate::error::{Error, Result};
use crate::groups::InvariantFactorGroup;
use crate::lattice_walk::{coord_law, CoordinateLaw, Modulus, WalkKind};

/// `c_ε = C_EPS_FACTOR · ε` unless configured otherwise.
pub const C_EPS_FACTOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Approach1,
    Approach2,
    Approach3,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approach1" | "1" => Ok(Strategy::Approach1),
            "approach2" | "2" => Ok(Strategy::Approach2),
            "approach3" | "3" => Ok(Strategy::Approach3),
            other => Err(Error::Parse(format!("unknown typicality strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaBudget {
    pub gamma: u64,
    /// `|G/γG|`
    pub index: u64,
    pub zeta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityParams {
    /// `None` disables every check.
    pub strategy: Option<Strategy>,
    pub n: u64,
    pub k: usize,
    pub d: usize,
    pub t: f64,
    pub kind: WalkKind,
    pub epsilon: f64,
    pub c_eps: f64,
    pub r_star: f64,
    pub omega: f64,
    /// `E W_1(t)`
    pub center: f64,
    pub gammas: Vec<GammaBudget>,
    pub n_star: Option<u64>,
    pub big_m: Option<f64>,
    pub m_l: Option<u64>,
}

impl TypicalityParams {
    /// Parameters that accept every `w`.
    pub fn unrestricted(g: &InvariantFactorGroup, k: usize, t: f64, kind: WalkKind) -> Self {
        TypicalityParams {
            strategy: None,
            n: g.size(),
            k,
            d: g.rank(),
            t,
            kind,
            epsilon: 0.0,
            c_eps: 0.0,
            r_star: f64::INFINITY,
            omega: f64::INFINITY,
            center: center(t, k, kind),
            gammas: Vec::new(),
            n_star: None,
            big_m: None,
            m_l: None,
        }
    }

    pub fn delta(&self, gamma: u64) -> f64 {
        delta(self.c_eps, self.k, self.d, gamma)
    }
}

fn center(t: f64, k: usize, kind: WalkKind) -> f64 {
    match kind {
        WalkKind::Srw => 0.0,
        WalkKind::Drw => t / k as f64,
    }
}

fn delta(c_eps: f64, k: usize, d: usize, gamma: u64) -> f64 {
    let zeta = (k as f64 - d as f64) / k as f64 * (gamma as f64).ln();
    (-c_eps * zeta.min(1.0) * k as f64).exp().min(1.0)
}

pub fn build_typicality(
    g: &InvariantFactorGroup,
    k: usize,
    t: f64,
    epsilon: f64,
    strategy: Strategy,
    kind: WalkKind,
    c_eps_factor: f64,
) -> Result<TypicalityParams> {
    let n = g.size();
    if n < 2 || k < 2 {
        return Err(Error::InvalidInput("typicality needs |G| >= 2 and k >= 2".into()));
    }
    let ln_n = (n as f64).ln();
    let r_star = 0.5 * (ln_n / k as f64).exp() * (k as f64).ln().powi(2);
    let omega = cutoff_window(k, n as f64, kind)?.omega;
    let c_eps = c_eps_factor * epsilon;
    let mut p = TypicalityParams {
        strategy: Some(strategy),
        epsilon,
        c_eps,
        r_star,
        omega,
        ..TypicalityParams::unrestricted(g, k, t, kind)
    };
    let gammas: Vec<u64> = match strategy {
        Strategy::Approach1 => Vec::new(),
        Strategy::Approach2 => {
            let n_star = (n - 1).min((2.0 * r_star).floor() as u64);
            p.n_star = Some(n_star);
            let mut gs = g.subgroup_classes(n_star).representatives();
            gs.push(n);
            gs.sort_unstable();
            gs.dedup();
            gs
        }
        Strategy::Approach3 => {
            let lln = ln_n.ln();
            if !(lln > 1.0) {
                return Err(Error::Domain(format!("approach3 needs log log n > 1 (got {lln:.4})")));
            }
            let big_m = (ln_n / lln).sqrt().exp();
            let m_l = g.factors().iter().copied().filter(|&m| (m as f64) <= big_m).max().unwrap_or(1);
            p.big_m = Some(big_m);
            p.m_l = Some(m_l);
            let rmax = (k as f64).sqrt().floor() as u64;
            let mut gs: Vec<u64> = (1..=rmax)
                .flat_map(|r| divisors(m_l).into_iter().map(move |m| r * m))
                .filter(|&x| x > 1 && n % x == 0)
                .collect();
            gs.sort_unstable();
            gs.dedup();
            gs
        }
    };
    p.gammas = gammas
        .into_iter()
        .map(|gamma| GammaBudget {
            gamma,
            index: g.scale_subgroup(gamma).index,
            zeta: (k as f64 - g.rank() as f64) / k as f64 * (gamma as f64).ln(),
            delta: delta(c_eps, k, g.rank(), gamma),
        })
        .collect();
    Ok(p)
}

/// Laws needed to evaluate the conditions at one time.
pub struct TypicalityEvaluator<'a> {
    pub params: &'a TypicalityParams,
    pub law: CoordinateLaw,
    /// `(γ, law on Z_γ, threshold on Σ −log ν_γ)`
    mod_laws: Vec<(u64, CoordinateLaw, f64)>,
    threshold_inf: f64,
}

impl<'a> TypicalityEvaluator<'a> {
    pub fn new(params: &'a TypicalityParams) -> Result<Self> {
        let s = params.t / params.k as f64;
        let law = coord_law(Modulus::Infinite, s, params.kind)?;
        let mod_laws = params
            .gammas
            .iter()
            .map(|b| {
                let l = coord_law(Modulus::Finite(b.gamma), s, params.kind)?;
                Ok((b.gamma, l, (b.index as f64).ln() - b.delta.ln()))
            })
            .collect::<Result<Vec<_>>>()?;
        let threshold_inf = (params.n as f64).ln() + params.omega;
        Ok(TypicalityEvaluator { params, law, mod_laws, threshold_inf })
    }

    pub fn local(&self, w: &[i64]) -> bool {
        w.iter().all(|&x| (x as f64 - self.params.center).abs() <= self.params.r_star)
    }

    pub fn global(&self, w: &[i64]) -> bool {
        match self.params.strategy {
            None => true,
            Some(Strategy::Approach1) => neg_log_mass(&self.law, w) >= self.threshold_inf,
            Some(_) => self.mod_laws.iter().all(|(_, l, th)| neg_log_mass(l, w) >= *th),
        }
    }

    pub fn passes(&self, w: &[i64]) -> bool {
        self.params.strategy.is_none() || (self.local(w) && self.global(w))
    }
}

/// `−log Π_i ν(w_i)`
fn neg_log_mass(law: &CoordinateLaw, w: &[i64]) -> f64 {
    w.iter().map(|&x| -law.prob(x).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approach1_has_no_gamma_set() {
        let g = InvariantFactorGroup::cyclic(1000).unwrap();
        let p = build_typicality(&g, 8, 10.0, 0.5, Strategy::Approach1, WalkKind::Srw, C_EPS_FACTOR).unwrap();
        assert!(p.gammas.is_empty());
        assert!(p.r_star > 0.0 && p.omega > 0.0);
        assert!((p.r_star - 0.5 * 1000f64.powf(1.0 / 8.0) * 8f64.ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn approach2_uses_class_representatives() {
        let g = InvariantFactorGroup::cyclic(12).unwrap();
        let p = build_typicality(&g, 6, 3.0, 0.5, Strategy::Approach2, WalkKind::Srw, C_EPS_FACTOR).unwrap();
        let n_star = p.n_star.unwrap();
        let mut expect = g.subgroup_classes(n_star).representatives();
        expect.push(12);
        expect.sort_unstable();
        expect.dedup();
        assert_eq!(p.gammas.iter().map(|b| b.gamma).collect::<Vec<_>>(), expect);
        assert!(p.gammas.iter().all(|b| b.delta > 0.0 && b.delta <= 1.0));
    }

    #[test]
    fn delta_decreasing_in_gamma() {
        let g = InvariantFactorGroup::cyclic(720_720).unwrap();
        let p = build_typicality(&g, 20, 50.0, 1.0, Strategy::Approach2, WalkKind::Srw, C_EPS_FACTOR).unwrap();
        let mut prev = 1.0;
        for gamma in 2..200 {
            let d = p.delta(gamma);
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn approach3_gamma_grid() {
        let g = InvariantFactorGroup::from_factors(&[2, 2, 1000]).unwrap();
        let p = build_typicality(&g, 16, 10.0, 0.5, Strategy::Approach3, WalkKind::Srw, C_EPS_FACTOR).unwrap();
        assert_eq!(p.m_l, Some(2));
        let gs: Vec<u64> = p.gammas.iter().map(|b| b.gamma).collect();
        // r ∈ [1,4], m | 2, rm | 4000, rm > 1
        assert_eq!(gs, vec![2, 4, 8]);
        let tiny = InvariantFactorGroup::cyclic(10).unwrap();
        assert!(build_typicality(&tiny, 4, 1.0, 0.5, Strategy::Approach3, WalkKind::Srw, C_EPS_FACTOR).is_err());
    }

    #[test]
    fn unrestricted_accepts_everything() {
        let g = InvariantFactorGroup::cyclic(5).unwrap();
        let p = TypicalityParams::unrestricted(&g, 3, 1.0, WalkKind::Srw);
        let e = TypicalityEvaluator::new(&p).unwrap();
        assert!(e.passes(&[1000, -5, 0]));
    }

    proptest::proptest! {
        #[test]
        fn params_invariants(ms in proptest::collection::vec(1u64..40, 1..4), k in 3usize..30, t in 0.5f64..50.0, eps in 0.05f64..1.0) {
            let g = InvariantFactorGroup::from_factors(&ms).unwrap();
            proptest::prop_assume!(g.size() >= 2);
            let p = build_typicality(&g, k, t, eps, Strategy::Approach2, WalkKind::Srw, C_EPS_FACTOR).unwrap();
            proptest::prop_assert!(p.r_star > 0.0 && p.omega > 0.0);
            for b in &p.gammas {
                proptest::prop_assert!(b.delta > 0.0 && b.delta <= 1.0);
                proptest::prop_assert!(b.gamma >= 2 && b.gamma <= g.size());
                proptest::prop_assert_eq!(b.index, g.scale_subgroup(b.gamma).index);
            }
            proptest::prop_assert!(p.gammas.iter().any(|b| b.gamma == g.size()));
        }
    }
}
