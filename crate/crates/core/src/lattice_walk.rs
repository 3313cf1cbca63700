//! One-coordinate laws of the auxiliary lattice walk.
//!
//! A coordinate of `W(t)` is a rate-1/k walk; parameterised by the coordinate time
//! `s = t/k` it is the rate-1 walk at time `s`. SRW steps ±1 with probability ½,
//! DRW only steps +1 (so on Z its law is Poisson(s)).
//!
//! Laws on `Z` are stored on a finite window with a certified bound on the mass outside
//! it. Laws on `Z_γ` use the spectral closed form when `γ` is small relative to the
//! window and otherwise wrap the `Z` law modulo `γ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{compensated_sum, ln_poisson_upper_tail_bound, poisson_cutoff, CompensatedSum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Srw,
    Drw,
}

impl WalkKind {
    pub fn from_directed(directed: bool) -> Self {
        if directed {
            WalkKind::Drw
        } else {
            WalkKind::Srw
        }
    }

    pub fn is_directed(self) -> bool {
        self == WalkKind::Drw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulus {
    Finite(u64),
    Infinite,
}

impl Modulus {
    pub fn finite(self) -> Option<u64> {
        match self {
            Modulus::Finite(g) => Some(g),
            Modulus::Infinite => None,
        }
    }
}

/// Use the spectral sum when `γ² <= SPECTRAL_COST_FACTOR · window`.
const SPECTRAL_COST_FACTOR: u64 = 64;
/// Imaginary residue allowed in the directed spectral sum.
const IMAG_TOL: f64 = 1e-10;

/// Law of one coordinate at coordinate time `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateLaw {
    pub modulus: Modulus,
    pub time: f64,
    pub kind: WalkKind,
    /// Value carried by `pmf[0]`.
    pub offset: i64,
    pub pmf: Vec<f64>,
    /// Upper bound on the probability mass not represented in `pmf`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QMoments {
    /// `H = E[−log ν(X)]` in nats.
    pub entropy: f64,
    /// `v = Var(−log ν(X))`.
    pub variance: f64,
    /// Rough size of the entropy contribution of the truncated tail (0 when exact).
    pub truncation_error: f64,
}

impl CoordinateLaw {
    fn point_mass(modulus: Modulus, kind: WalkKind) -> Self {
        CoordinateLaw { modulus, time: 0.0, kind, offset: 0, pmf: vec![1.0], tail_bound: 0.0 }
    }

    /// `P(X = j)`; for finite `γ`, `j` is read modulo `γ`.
    pub fn prob(&self, j: i64) -> f64 {
        let idx = match self.modulus {
            Modulus::Finite(g) => (j as i128 - self.offset as i128).rem_euclid(g as i128) as usize,
            Modulus::Infinite => {
                let d = j as i128 - self.offset as i128;
                if d < 0 {
                    return 0.0;
                }
                d as usize
            }
        };
        self.pmf.get(idx).copied().unwrap_or(0.0)
    }

    /// `(value, probability)` over the stored window.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.pmf.iter().enumerate().map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.pmf.iter().copied())
    }

    pub fn window(&self) -> (i64, i64) {
        (self.offset, self.offset + self.pmf.len() as i64 - 1)
    }

    pub fn moments(&self) -> QMoments {
        entropy_and_qmoments(self)
    }

    /// Inverse-CDF sampler over the stored vector.
    pub fn sampler(&self) -> LawSampler {
        let mut acc = CompensatedSum::new();
        let cdf: Vec<f64> = self
            .pmf
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect();
        let total = *cdf.last().unwrap_or(&1.0);
        LawSampler { offset: self.offset, cdf, total }
    }
}

#[derive(Debug, Clone)]
pub struct LawSampler {
    offset: i64,
    cdf: Vec<f64>,
    total: f64,
}

impl LawSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random::<f64>() * self.total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.offset + i as i64
    }
}

/// `count` iid draws from `law`.
pub fn sample_coordinate<R: Rng + ?Sized>(law: &CoordinateLaw, rng: &mut R, count: usize) -> Vec<i64> {
    let s = law.sampler();
    (0..count).map(|_| s.sample(rng)).collect()
}

fn check_time(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("coordinate time must be finite and >= 0 (got {s})")));
    }
    Ok(())
}

fn check_modulus(modulus: Modulus) -> Result<()> {
    if let Modulus::Finite(g) = modulus {
        if g < 2 {
            return Err(Error::Domain(format!("modulus must be >= 2 (got {g})")));
        }
    }
    Ok(())
}

/// Law of one coordinate at coordinate time `s`.
pub fn coord_law(modulus: Modulus, s: f64, kind: WalkKind) -> Result<CoordinateLaw> {
    check_time(s)?;
    check_modulus(modulus)?;
    match modulus {
        Modulus::Infinite => Ok(infinite_law(s, kind)),
        Modulus::Finite(g) => {
            let window = 2 * poisson_cutoff(s) as u64 + 1;
            if g.saturating_mul(g) <= SPECTRAL_COST_FACTOR.saturating_mul(window) {
                coord_law_spectral(g, s, kind)
            } else {
                coord_law_wrapped(g, s, kind)
            }
        }
    }
}

/// Law of one coordinate of `V = W − W′`: the SRW law at time `2s`, for either kind.
pub fn difference_law(modulus: Modulus, s: f64, _kind: WalkKind) -> Result<CoordinateLaw> {
    check_time(s)?;
    coord_law(modulus, 2.0 * s, WalkKind::Srw)
}

fn infinite_law(s: f64, kind: WalkKind) -> CoordinateLaw {
    if s == 0.0 {
        return CoordinateLaw::point_mass(Modulus::Infinite, kind);
    }
    let cut = poisson_cutoff(s);
    // |X_s| is at most the number of clock rings, which is Poisson(s)
    let tail_bound = ln_poisson_upper_tail_bound(s, (cut + 1) as f64).exp();
    match kind {
        WalkKind::Drw => CoordinateLaw {
            modulus: Modulus::Infinite,
            time: s,
            kind,
            offset: 0,
            pmf: poisson_pmf(s, cut),
            tail_bound,
        },
        WalkKind::Srw => {
            let half = scaled_bessel_i(s, cut);
            let mut pmf = Vec::with_capacity(2 * cut + 1);
            pmf.extend(half.iter().skip(1).rev());
            pmf.extend(half.iter());
            CoordinateLaw { modulus: Modulus::Infinite, time: s, kind, offset: -(cut as i64), pmf, tail_bound }
        }
    }
}

/// Poisson(λ) pmf on `0..=cut`, by ratio recurrence out from the mode.
fn poisson_pmf(lambda: f64, cut: usize) -> Vec<f64> {
    let mode = (lambda.floor() as usize).min(cut);
    let mut p = vec![0.0; cut + 1];
    p[mode] = 1.0;
    for j in mode + 1..=cut {
        p[j] = p[j - 1] * lambda / j as f64;
    }
    for j in (0..mode).rev() {
        p[j] = p[j + 1] * (j + 1) as f64 / lambda;
    }
    // the window misses < 1e-15 of the mass, so normalising by the window sum is exact enough
    let total = compensated_sum(p.iter().copied());
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// `e^{−s} I_j(s)` for `j = 0..=cut` by Miller's backward recurrence,
/// normalised with `I_0 + 2 Σ_{j≥1} I_j = e^s`.
fn scaled_bessel_i(s: f64, cut: usize) -> Vec<f64> {
    let start = cut + 60 + (s.sqrt() as usize);
    let mut v = vec![0.0f64; start + 2];
    v[start] = 1e-300;
    for j in (1..=start).rev() {
        let next = v[j + 1] + (2.0 * j as f64 / s) * v[j];
        v[j - 1] = next;
        if next > 1e250 {
            v.iter_mut().for_each(|x| *x *= 1e-250);
        }
    }
    let norm = v[0] + 2.0 * compensated_sum(v[1..].iter().copied());
    v.truncate(cut + 1);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Finite-`γ` law from the spectral closed form.
pub fn coord_law_spectral(gamma: u64, s: f64, kind: WalkKind) -> Result<CoordinateLaw> {
    check_time(s)?;
    check_modulus(Modulus::Finite(gamma))?;
    if s == 0.0 {
        let mut pmf = vec![0.0; gamma as usize];
        pmf[0] = 1.0;
        return Ok(CoordinateLaw { modulus: Modulus::Finite(gamma), time: 0.0, kind, offset: 0, pmf, tail_bound: 0.0 });
    }
    let g = gamma as usize;
    let angle = |r: usize| 2.0 * PI * r as f64 / gamma as f64;
    let pmf = match kind {
        WalkKind::Srw => {
            let w: Vec<f64> = (0..g).map(|r| (s * (angle(r).cos() - 1.0)).exp()).collect();
            (0..g)
                .map(|j| compensated_sum((0..g).map(|r| w[r] * angle((r * j) % g).cos())) / gamma as f64)
                .collect::<Vec<_>>()
        }
        WalkKind::Drw => {
            let w: Vec<Complex64> =
                (0..g).map(|r| (Complex64::from_polar(1.0, angle(r)) - 1.0).scale(s).exp()).collect();
            let mut out = Vec::with_capacity(g);
            for j in 0..g {
                let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
                for (r, wr) in w.iter().enumerate() {
                    let z = wr * Complex64::from_polar(1.0, -angle((r * j) % g));
                    re.add(z.re);
                    im.add(z.im);
                }
                let im = im.value() / gamma as f64;
                if im.abs() > IMAG_TOL {
                    return Err(Error::Domain(format!("directed spectral sum left imaginary part {im:e}")));
                }
                out.push(re.value() / gamma as f64);
            }
            out
        }
    };
    // roundoff can leave entries like -1e-17
    let pmf = pmf.into_iter().map(|p| p.max(0.0)).collect();
    Ok(CoordinateLaw { modulus: Modulus::Finite(gamma), time: s, kind, offset: 0, pmf, tail_bound: 0.0 })
}

/// Finite-`γ` law by summing the `Z` law over residue classes.
pub fn coord_law_wrapped(gamma: u64, s: f64, kind: WalkKind) -> Result<CoordinateLaw> {
    check_time(s)?;
    check_modulus(Modulus::Finite(gamma))?;
    let inf = infinite_law(s, kind);
    let len = inf.pmf.len() as u64;
    let (offset, pmf) = if len < gamma {
        // window already injective mod γ
        (inf.offset, inf.pmf.clone())
    } else {
        let mut acc = vec![CompensatedSum::new(); gamma as usize];
        for (j, p) in inf.support() {
            acc[j.rem_euclid(gamma as i64) as usize].add(p);
        }
        (0, acc.iter().map(CompensatedSum::value).collect())
    };
    Ok(CoordinateLaw { modulus: Modulus::Finite(gamma), time: s, kind, offset, pmf, tail_bound: inf.tail_bound })
}

/// Entropy and variance of `−log ν(X)`.
pub fn entropy_and_qmoments(law: &CoordinateLaw) -> QMoments {
    let terms: Vec<(f64, f64)> = law.pmf.iter().filter(|&&p| p > 0.0).map(|&p| (p, -p.ln())).collect();
    let h = compensated_sum(terms.iter().map(|&(p, q)| p * q));
    let v = compensated_sum(terms.iter().map(|&(p, q)| p * (q - h) * (q - h)));
    let eps = law.tail_bound;
    let truncation_error = if eps > 0.0 {
        eps * (1.0 - eps.ln() + (law.pmf.len() as f64 + 1.0).ln())
    } else {
        0.0
    };
    QMoments { entropy: h.max(0.0), variance: v.max(0.0), truncation_error }
}

/// `H_γ(s)`
pub fn entropy(modulus: Modulus, s: f64, kind: WalkKind) -> Result<f64> {
    Ok(coord_law(modulus, s, kind)?.moments().entropy)
}

/// `R_γ(s) = log γ − H_γ(s)`.
pub fn relative_entropy(modulus: Modulus, s: f64, kind: WalkKind) -> Result<f64> {
    let g = modulus
        .finite()
        .ok_or_else(|| Error::Domain("relative entropy needs a finite modulus".into()))?;
    Ok(((g as f64).ln() - entropy(modulus, s, kind)?).max(0.0))
}

/// `P(X_s = 0)`.
pub fn return_probability(modulus: Modulus, s: f64, kind: WalkKind) -> Result<f64> {
    check_time(s)?;
    check_modulus(modulus)?;
    match modulus {
        Modulus::Infinite => Ok(match kind {
            WalkKind::Drw => (-s).exp(),
            WalkKind::Srw => infinite_law(s, kind).prob(0),
        }),
        Modulus::Finite(g) => {
            if s == 0.0 {
                return Ok(1.0);
            }
            // O(γ) single spectral coefficient
            let terms = (0..g).map(|r| {
                let th = 2.0 * PI * r as f64 / g as f64;
                let base = (s * (th.cos() - 1.0)).exp();
                match kind {
                    WalkKind::Srw => base,
                    WalkKind::Drw => base * (s * th.sin()).cos(),
                }
            });
            Ok((compensated_sum(terms) / g as f64).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: `e^{−s} Σ_n s^n/n! P^n δ_0` on the γ-cycle.
    fn uniformization_oracle(gamma: usize, s: f64, kind: WalkKind) -> Vec<f64> {
        let mut v = vec![0.0; gamma];
        v[0] = 1.0;
        let mut out = vec![0.0; gamma];
        let nmax = (s + 12.0 * (s + 1.0).sqrt() + 40.0) as usize;
        for n in 0..=nmax {
            let w = (-s + n as f64 * s.ln() - statrs::function::gamma::ln_gamma(n as f64 + 1.0)).exp();
            let w = if s == 0.0 { if n == 0 { 1.0 } else { 0.0 } } else { w };
            for j in 0..gamma {
                out[j] += w * v[j];
            }
            let mut next = vec![0.0; gamma];
            for j in 0..gamma {
                match kind {
                    WalkKind::Drw => next[(j + 1) % gamma] += v[j],
                    WalkKind::Srw => {
                        next[(j + 1) % gamma] += 0.5 * v[j];
                        next[(j + gamma - 1) % gamma] += 0.5 * v[j];
                    }
                }
            }
            v = next;
        }
        out
    }

    fn max_diff(law: &CoordinateLaw, oracle: &[f64]) -> f64 {
        (0..oracle.len()).map(|j| (law.prob(j as i64) - oracle[j]).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn point_mass_at_zero() {
        for m in [Modulus::Finite(2), Modulus::Finite(9), Modulus::Infinite] {
            for kind in [WalkKind::Srw, WalkKind::Drw] {
                let law = coord_law(m, 0.0, kind).unwrap();
                assert_eq!(law.prob(0), 1.0);
                assert_eq!(law.total_mass(), 1.0);
                assert_eq!(law.moments().entropy, 0.0);
                assert_eq!(law.moments().variance, 0.0);
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                assert!(sample_coordinate(&law, &mut rng, 100).iter().all(|&x| x == 0));
            }
        }
        assert!(coord_law(Modulus::Infinite, -1.0, WalkKind::Srw).is_err());
    }

    #[test]
    fn two_cycle_closed_form() {
        for s in [0.01, 0.3, 1.0, 4.0] {
            let law = coord_law(Modulus::Finite(2), s, WalkKind::Srw).unwrap();
            assert!((law.prob(0) - 0.5 * (1.0 + (-2.0 * s).exp())).abs() < 1e-14);
            assert!((law.prob(1) - 0.5 * (1.0 - (-2.0 * s).exp())).abs() < 1e-14);
            let diff = difference_law(Modulus::Finite(2), s, WalkKind::Drw).unwrap();
            assert!((diff.prob(0) - 0.5 * (1.0 + (-4.0 * s).exp())).abs() < 1e-14);
            let rp = return_probability(Modulus::Finite(2), s, WalkKind::Srw).unwrap();
            assert!((rp - 0.5 * (1.0 + (-2.0 * s).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn poisson_on_z() {
        let law = coord_law(Modulus::Infinite, 1.0, WalkKind::Drw).unwrap();
        assert!((law.prob(0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((law.prob(3) - (-1.0f64).exp() / 6.0).abs() < 1e-15);
        assert!(law.tail_bound < 1e-15);
        assert!((law.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bessel_matches_series() {
        // e^{-s} I_j(s) = e^{-s} Σ_m (s/2)^{2m+j} / (m! (m+j)!)
        for s in [0.05, 1.0, 7.5, 30.0] {
            let law = coord_law(Modulus::Infinite, s, WalkKind::Srw).unwrap();
            for j in 0..8i64 {
                let series: f64 = (0..200)
                    .map(|m| {
                        let ln = (2 * m + j) as f64 * (s / 2.0).ln()
                            - statrs::function::gamma::ln_gamma(m as f64 + 1.0)
                            - statrs::function::gamma::ln_gamma((m + j) as f64 + 1.0)
                            - s;
                        ln.exp()
                    })
                    .sum();
                assert!((law.prob(j) - series).abs() < 1e-13 * series.max(1e-3), "s={s} j={j}");
                assert_eq!(law.prob(j), law.prob(-j));
            }
            let rp = return_probability(Modulus::Infinite, s, WalkKind::Srw).unwrap();
            assert_eq!(rp, law.prob(0));
        }
    }

    #[test]
    fn skellam_is_srw_at_double_time() {
        for s in [0.2, 2.0, 11.0] {
            let p = coord_law(Modulus::Infinite, s, WalkKind::Drw).unwrap();
            let d = difference_law(Modulus::Infinite, s, WalkKind::Drw).unwrap();
            for j in -10i64..=10 {
                let sk: f64 = p.support().map(|(a, pa)| pa * p.prob(a - j)).sum();
                assert!((sk - d.prob(j)).abs() < 1e-12, "s={s} j={j}");
            }
        }
    }

    #[test]
    fn spectral_and_wrap_match_oracle() {
        for gamma in [2usize, 3, 5, 8, 17, 64] {
            for s in [0.0, 0.1, 1.0, 5.0, 50.0] {
                for kind in [WalkKind::Srw, WalkKind::Drw] {
                    let oracle = uniformization_oracle(gamma, s, kind);
                    let sp = coord_law_spectral(gamma as u64, s, kind).unwrap();
                    let wr = coord_law_wrapped(gamma as u64, s, kind).unwrap();
                    assert!(max_diff(&sp, &oracle) < 1e-10, "spectral γ={gamma} s={s} {kind:?}");
                    assert!(max_diff(&wr, &oracle) < 1e-10, "wrap γ={gamma} s={s} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn large_modulus_uses_sparse_window() {
        let law = coord_law(Modulus::Finite(100_000), 2.0, WalkKind::Srw).unwrap();
        assert!(law.pmf.len() < 200);
        let inf = coord_law(Modulus::Infinite, 2.0, WalkKind::Srw).unwrap();
        assert_eq!(law.prob(-3), inf.prob(-3));
        assert_eq!(law.prob(99_997), inf.prob(-3));
    }

    #[test]
    fn entropy_limits() {
        let g = 7u64;
        let law = coord_law(Modulus::Finite(g), 200.0, WalkKind::Srw).unwrap();
        let m = law.moments();
        assert!(((g as f64).ln() - m.entropy).abs() < 1e-12);
        assert!(m.variance < 1e-12);
        let h = entropy(Modulus::Infinite, 1e4, WalkKind::Drw).unwrap();
        let target = 0.5 * (2.0 * PI * std::f64::consts::E * 1e4).ln();
        assert!((h - target).abs() / target < 0.01);
        assert!((h - target).abs() < 1e-4);
        assert!(relative_entropy(Modulus::Finite(2), 20.0, WalkKind::Srw).unwrap() < 1e-10);
        assert!((relative_entropy(Modulus::Finite(5), 0.0, WalkKind::Srw).unwrap() - 5f64.ln()).abs() < 1e-15);
        assert!(relative_entropy(Modulus::Infinite, 1.0, WalkKind::Srw).is_err());
    }

    #[test]
    fn relative_entropy_monotone_on_grid() {
        for gamma in 2..=32u64 {
            for kind in [WalkKind::Srw, WalkKind::Drw] {
                let mut prev = f64::INFINITY;
                for i in 0..=500 {
                    let r = relative_entropy(Modulus::Finite(gamma), i as f64 * 0.1, kind).unwrap();
                    assert!(r <= prev + 1e-13, "γ={gamma} s={} {kind:?}", i as f64 * 0.1);
                    prev = r;
                }
            }
        }
    }

    #[test]
    fn sampler_frequencies() {
        let law = coord_law(Modulus::Finite(2), 0.4, WalkKind::Srw).unwrap();
        let n = 1_000_000;
        let xs = sample_coordinate(&law, &mut ChaCha8Rng::seed_from_u64(9), n);
        let ones = xs.iter().filter(|&&x| x == 1).count() as f64;
        let p = law.prob(1);
        assert!((ones - n as f64 * p).abs() < 4.0 * (n as f64 * p * (1.0 - p)).sqrt());
        assert_eq!(xs, sample_coordinate(&law, &mut ChaCha8Rng::seed_from_u64(9), n));
    }

    proptest! {
        #[test]
        fn infinite_laws_are_normalised_and_unimodal(s in 0.0f64..300.0) {
            let srw = coord_law(Modulus::Infinite, s, WalkKind::Srw).unwrap();
            prop_assert!((srw.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(srw.tail_bound < 1e-15);
            let (lo, hi) = srw.window();
            prop_assert_eq!(lo, -hi);
            for j in 0..hi {
                prop_assert_eq!(srw.prob(j), srw.prob(-j));
                prop_assert!(srw.prob(j + 1) <= srw.prob(j));
            }
            let drw = coord_law(Modulus::Infinite, s, WalkKind::Drw).unwrap();
            prop_assert!((drw.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(drw.pmf.iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn wrap_matches_spectral(gamma in 2u64..40, s in 0.0f64..40.0, directed in any::<bool>()) {
            let kind = WalkKind::from_directed(directed);
            let a = coord_law_spectral(gamma, s, kind).unwrap();
            let b = coord_law_wrapped(gamma, s, kind).unwrap();
            for j in 0..gamma as i64 {
                prop_assert!((a.prob(j) - b.prob(j)).abs() < 1e-10);
            }
            let rp = return_probability(Modulus::Finite(gamma), s, kind).unwrap();
            prop_assert!((rp - a.prob(0)).abs() < 1e-12);
        }

        #[test]
        fn entropy_increasing_in_time(gamma in 2u64..30, s in 0.0f64..10.0, ds in 0.01f64..1.0) {
            let m = Modulus::Finite(gamma);
            let h0 = entropy(m, s, WalkKind::Srw).unwrap();
            let h1 = entropy(m, s + ds, WalkKind::Srw).unwrap();
            prop_assert!(h1 > h0 || (gamma as f64).ln() - h0 < 1e-12);
        }
    }
}
