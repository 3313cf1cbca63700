//! Finite-size proxies for the regime hypotheses on `(k, G)`.
//!
//! Finite inequalities are evaluated as stated. Asymptotic conditions become threshold
//! checks: "→ ∞" or "≫" means ratio ≥ `T`, "limsup < ∞" means ratio ≤ `T`,
//! "liminf > 0" means ratio ≥ `1/T`, and "→ 0" means ratio ≤ `1/T`.

use serde::{Deserialize, Serialize};

use crate::groups::InvariantFactorGroup;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub divergence: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { divergence: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub holds: bool,
}

impl Condition {
    fn new(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let holds = match relation {
            Relation::AtLeast => lhs >= rhs,
            Relation::AtMost => lhs <= rhs,
        };
        Condition { name, lhs, relation, rhs, holds }
    }

    /// Recompute the verdict from the recorded sides.
    pub fn recheck(&self) -> bool {
        Condition::new(self.name, self.lhs, self.relation, self.rhs).holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub conditions: Vec<Condition>,
    pub holds: bool,
}

impl Hypothesis {
    fn new(conditions: Vec<Condition>) -> Self {
        let holds = conditions.iter().all(|c| c.holds);
        Hypothesis { conditions, holds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub k: usize,
    pub n: u64,
    pub d: usize,
    pub thresholds: Thresholds,
    /// Number of subgroup classes used in `hyp_b`.
    pub h_size: usize,
    pub hyp_a: Hypothesis,
    pub hyp_b: Hypothesis,
    pub hyp_c: Hypothesis,
    pub hyp_sep: Hypothesis,
}

pub fn regime_check(k: usize, g: &InvariantFactorGroup, th: Thresholds) -> RegimeReport {
    use Relation::*;
    let t = th.divergence;
    let kf = k as f64;
    let n = g.size();
    let d = g.rank();
    let ln_n = (n as f64).ln();
    let gap = kf - d as f64;

    let hyp_a = Hypothesis::new(vec![
        Condition::new("k - d", gap, AtLeast, t),
        Condition::new(
            "(k-d-1)/k vs 5k/log n + 2d loglog k/log n",
            (gap - 1.0) / kf,
            AtLeast,
            5.0 * kf / ln_n + 2.0 * d as f64 * kf.ln().ln() / ln_n,
        ),
    ]);

    let n_star = ((ln_n / kf).exp() * kf.ln().powi(2)).floor();
    let n_star = if n_star.is_finite() && n_star >= 0.0 { n_star as u64 } else { 0 };
    let h_size = if n_star >= 2 { g.subgroup_classes(n_star).classes.len() } else { 0 };
    let ln_h = (h_size as f64).ln();
    let hyp_b = Hypothesis::new(vec![
        Condition::new("k / log n", kf / ln_n, AtMost, t),
        Condition::new("k - d", gap, AtLeast, t),
        Condition::new("k / log|H|", if h_size <= 1 { f64::INFINITY } else { kf / ln_h }, AtLeast, t),
    ]);

    let lll = ln_n.ln().ln();
    let c1 = if lll > 0.0 { kf / (ln_n / lll).sqrt() } else { f64::NAN };
    let hyp_c = Hypothesis::new(vec![
        Condition::new("k / sqrt(log n / logloglog n)", c1, AtLeast, 1.0 / t),
        Condition::new("k / sqrt(log n)", kf / ln_n.sqrt(), AtMost, t),
        Condition::new("k - d", gap, AtLeast, t),
        Condition::new("(k - d) / k", gap / kf, AtMost, 1.0 / t),
    ]);

    let hyp_sep = Hypothesis::new(vec![
        Condition::new(
            "(k - d) / max((log n / k)^2, sqrt(log n))",
            gap / (ln_n / kf).powi(2).max(ln_n.sqrt()),
            AtLeast,
            t,
        ),
        Condition::new("log k / log n", kf.ln() / ln_n, AtMost, 1.0 / t),
    ]);

    RegimeReport { k, n, d, thresholds: th, h_size, hyp_a, hyp_b, hyp_c, hyp_sep }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_with_one_spare_generator_fails_a() {
        let g = InvariantFactorGroup::power(2, 10).unwrap();
        let r = regime_check(11, &g, Thresholds::default());
        assert!(!r.hyp_a.holds);
        assert_eq!(r.hyp_a.conditions[1].lhs, 0.0);
    }

    #[test]
    fn reported_sides_reproduce_verdicts() {
        let g = InvariantFactorGroup::cyclic(1_000_000).unwrap();
        let r = regime_check(12, &g, Thresholds::default());
        let ln = 1e6f64.ln();
        let a = &r.hyp_a.conditions[1];
        assert!((a.lhs - 10.0 / 12.0).abs() < 1e-15);
        assert!((a.rhs - (60.0 / ln + 2.0 * 12f64.ln().ln() / ln)).abs() < 1e-12);
        for h in [&r.hyp_a, &r.hyp_b, &r.hyp_c, &r.hyp_sep] {
            for c in &h.conditions {
                assert_eq!(c.recheck(), c.holds);
            }
            assert_eq!(h.holds, h.conditions.iter().all(Condition::recheck));
        }
    }

    #[test]
    fn tiny_group_has_undefined_triple_log() {
        let r = regime_check(3, &InvariantFactorGroup::cyclic(10).unwrap(), Thresholds::default());
        assert!(r.hyp_c.conditions[0].lhs.is_nan());
        assert!(!r.hyp_c.holds);
    }
}
