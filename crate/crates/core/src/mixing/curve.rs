//! Distances from uniformity and mixing times read off a time grid.

use serde::Serialize;

use super::kernel::{DistributionVector, KernelMethod};
use crate::arith::compensated_sum;

/// `½ Σ |p_g − 1/n|`
pub fn tv_distance(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * compensated_sum(p.iter().map(|&x| (x - u).abs()))
}

/// `‖p/π − 1‖_{2,π} = sqrt(n Σ (p_g − 1/n)²)`
pub fn l2_distance(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let u = 1.0 / n;
    (n * compensated_sum(p.iter().map(|&x| (x - u) * (x - u)))).sqrt()
}

/// `max_g (1 − n p_g)`, clamped to `[0, 1]`.
pub fn separation_distance(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    p.iter().map(|&x| 1.0 - n * x).fold(0.0, f64::max).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCurve {
    pub times: Vec<f64>,
    pub tv: Vec<f64>,
    pub l2: Vec<f64>,
    pub sep: Vec<f64>,
    pub method: KernelMethod,
}

impl DistanceCurve {
    pub fn from_distributions(dists: &[DistributionVector], method: KernelMethod) -> Self {
        DistanceCurve {
            times: dists.iter().map(|d| d.t).collect(),
            tv: dists.iter().map(|d| tv_distance(&d.probs)).collect(),
            l2: dists.iter().map(|d| l2_distance(&d.probs)).collect(),
            sep: dists.iter().map(|d| separation_distance(&d.probs)).collect(),
            method,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn tv_nonincreasing(&self, tol: f64) -> bool {
        self.tv.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// Largest violation of `sep ≥ tv` (≤ 0 when the relation holds).
    pub fn sep_tv_violation(&self) -> f64 {
        self.tv.iter().zip(&self.sep).map(|(t, s)| t - s).fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `t,tv,l2,sep`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,tv,l2,sep\n");
        for i in 0..self.len() {
            s.push_str(&format!("{:?},{:?},{:?},{:?}\n", self.times[i], self.tv[i], self.l2[i], self.sep[i]));
        }
        s
    }
}

/// `t = 0` plus `points` log-spaced times from `0.2·t_*` to `4·t_*`.
pub fn default_grid(t_star: f64, points: usize) -> Vec<f64> {
    let (lo, hi) = (0.2 * t_star, 4.0 * t_star);
    let mut out = vec![0.0];
    if t_star > 0.0 && points > 0 {
        let step = if points > 1 { (hi / lo).ln() / (points - 1) as f64 } else { 0.0 };
        out.extend((0..points).map(|i| lo * (step * i as f64).exp()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum MixingTime {
    Reached { t: f64 },
    /// The curve never dropped to `ε` on the grid; `t_max` is the last grid time.
    Censored { t_max: f64 },
}

impl MixingTime {
    pub fn value(self) -> Option<f64> {
        match self {
            MixingTime::Reached { t } => Some(t),
            MixingTime::Censored { .. } => None,
        }
    }
}

/// First crossing of `d(t) ≤ ε`, linearly interpolated between bracketing grid points.
pub fn mixing_time(times: &[f64], d: &[f64], eps: f64) -> MixingTime {
    match d.iter().position(|&x| x <= eps) {
        None => MixingTime::Censored { t_max: times.last().copied().unwrap_or(0.0) },
        Some(0) => MixingTime::Reached { t: times[0] },
        Some(i) => {
            let (t0, t1, d0, d1) = (times[i - 1], times[i], d[i - 1], d[i]);
            let t = if d0 == d1 { t1 } else { t0 + (d0 - eps) / (d0 - d1) * (t1 - t0) };
            MixingTime::Reached { t }
        }
    }
}

/// Refine a grid crossing by bisection on an exact distance function `f`.
pub fn refine_mixing_time<F: FnMut(f64) -> f64>(
    times: &[f64],
    d: &[f64],
    eps: f64,
    mut f: F,
    rel_tol: f64,
) -> MixingTime {
    match d.iter().position(|&x| x <= eps) {
        None => MixingTime::Censored { t_max: times.last().copied().unwrap_or(0.0) },
        Some(0) => MixingTime::Reached { t: times[0] },
        Some(i) => {
            let (mut lo, mut hi) = (times[i - 1], times[i]);
            while hi - lo > rel_tol * hi {
                let mid = 0.5 * (lo + hi);
                if f(mid) <= eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            MixingTime::Reached { t: hi }
        }
    }
}
