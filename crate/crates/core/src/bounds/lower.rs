//! Entropy lower bound `d(t) ≥ P(Q(t) ≤ log n − ω) − e^{−ω}`, with
//! `Q(t) = Σ_i −log ν(W_i(t))` over the walk on `Z^k`.

use serde::Serialize;
use statrs::function::erf::erfc;

use super::mc::{proportion, run_chunks};
use crate::error::Result;
use crate::lattice_walk::{coord_law, Modulus, WalkKind};

/// Standard Gaussian upper tail `Ψ(α) = P(N(0,1) > α)`.
pub fn gaussian_tail(alpha: f64) -> f64 {
    0.5 * erfc(alpha / std::f64::consts::SQRT_2)
}

/// `trials` iid samples of `Q(t)`.
pub fn q_distribution_mc(k: usize, t: f64, kind: WalkKind, trials: u64, seed: u64) -> Result<Vec<f64>> {
    let law = coord_law(Modulus::Infinite, t / k as f64, kind)?;
    let sampler = law.sampler();
    let neg_log: Vec<f64> = law.pmf.iter().map(|&p| if p > 0.0 { -p.ln() } else { f64::INFINITY }).collect();
    let chunks = run_chunks(seed, trials, |rng, count| {
        (0..count)
            .map(|_| (0..k).map(|_| neg_log[(sampler.sample(rng) - law.offset) as usize]).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundEstimate {
    pub t: f64,
    pub omega: f64,
    /// `P̂(Q(t) ≤ log n − ω)`
    pub prob: f64,
    pub value: f64,
    pub se: f64,
    pub trials: u64,
}

pub fn lower_bound_value(
    k: usize,
    n: f64,
    t: f64,
    omega: f64,
    kind: WalkKind,
    trials: u64,
    seed: u64,
) -> Result<LowerBoundEstimate> {
    let thresh = n.ln() - omega;
    let qs = q_distribution_mc(k, t, kind, trials, seed)?;
    let hits = qs.iter().filter(|&&q| q <= thresh).count() as u64;
    let (prob, se) = proportion(hits, trials);
    Ok(LowerBoundEstimate { t, omega, prob, value: prob - (-omega).exp(), se, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropic::cutoff_window;

    #[test]
    fn gaussian_tail_values() {
        assert_eq!(gaussian_tail(0.0), 0.5);
        assert!((gaussian_tail(-10.0) - 1.0).abs() < 1e-15);
        // oracle: trapezoid quadrature of the density on [α, 12]
        let a = 1.959964;
        let steps = 200_000;
        let h = (12.0 - a) / steps as f64;
        let dens = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let quad: f64 = (0..=steps)
            .map(|i| {
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                w * dens(a + i as f64 * h)
            })
            .sum::<f64>()
            * h;
        assert!((gaussian_tail(a) - quad).abs() < 1e-9);
        assert!((gaussian_tail(a) - 0.025).abs() < 1e-6);
    }

    #[test]
    fn q_at_zero_and_mean() {
        assert!(q_distribution_mc(5, 0.0, WalkKind::Srw, 100, 1).unwrap().iter().all(|&q| q == 0.0));
        let (k, t) = (12, 30.0);
        let qs = q_distribution_mc(k, t, WalkKind::Drw, 50_000, 3).unwrap();
        let m = coord_law(Modulus::Infinite, t / k as f64, WalkKind::Drw).unwrap().moments();
        let mean = qs.iter().sum::<f64>() / qs.len() as f64;
        let sd = (m.variance * k as f64).sqrt();
        assert!((mean - k as f64 * m.entropy).abs() < 4.0 * sd / (qs.len() as f64).sqrt());
    }

    #[test]
    fn vacuous_well_after_t0() {
        let w = cutoff_window(20, 1e8, WalkKind::Srw).unwrap();
        let lb = lower_bound_value(20, 1e8, 3.0 * w.t0, w.omega, WalkKind::Srw, 20_000, 5).unwrap();
        assert!(lb.value <= 3.0 * lb.se);
    }

    #[test]
    fn early_window_value() {
        let (k, n) = (40usize, 1e30f64);
        let w = cutoff_window(k, n, WalkKind::Srw).unwrap();
        let t = w.t_alpha(-1.0).unwrap();
        let lb = lower_bound_value(k, n, t, w.omega, WalkKind::Srw, 40_000, 9).unwrap();
        // finite-k proxy; the limit is Ψ(−1) − e^{−ω}
        let target = gaussian_tail(-1.0) - (-w.omega).exp();
        assert!((lb.value - target).abs() < 0.2, "{} vs {}", lb.value, target);
    }
}
