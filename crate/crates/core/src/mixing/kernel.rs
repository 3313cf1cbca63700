//! Exact time-`t` laws of the continuous-time walk started at the identity.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::spectrum::{pairing, spectrum, SpectralTable, UnitTable};
use crate::arith::{ln_factorial, poisson_cutoff};
use crate::error::{Error, Result};
use crate::groups::nilpotent::ELEMENT_CAP;
use crate::groups::{GeneratorMultiset, InvariantFactorGroup, NilpotentPresentation};

/// Largest group for the O(n²) direct character sum.
pub const DIRECT_CAP: u64 = 1 << 14;
/// Largest group for uniformisation.
pub const GENERAL_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    pub t: f64,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    /// Inverse character transform via a multi-dimensional FFT.
    Character,
    /// Inverse character transform by direct summation.
    Direct,
    Uniformization,
}

/// `p_t(g) = (1/n) Σ_x e^{t(λ_x − 1)} e^{−2πi⟨x,g⟩}` for every `t`.
pub fn heat_kernel_abelian(
    g: &InvariantFactorGroup,
    spec: &SpectralTable,
    times: &[f64],
    method: KernelMethod,
) -> Result<Vec<DistributionVector>> {
    let n = g.size();
    match method {
        KernelMethod::Direct if n > DIRECT_CAP => {
            return Err(Error::SizeCap { what: "direct character transform", size: n, cap: DIRECT_CAP })
        }
        KernelMethod::Uniformization => {
            return Err(Error::InvalidInput("use heat_kernel_general for uniformisation".into()))
        }
        _ => {}
    }
    let mut planner = FftPlanner::<f64>::new();
    let units = UnitTable::new(g.exponent());
    let elems: Vec<Vec<u64>> = if method == KernelMethod::Direct {
        g.elements().map(|e| e.residues).collect()
    } else {
        Vec::new()
    };
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be >= 0 (got {t})")));
        }
        let phi: Vec<Complex64> = spec.eigen.iter().map(|&l| ((l - 1.0) * t).exp()).collect();
        let probs = match method {
            KernelMethod::Direct => elems
                .iter()
                .map(|gv| {
                    let s: Complex64 = elems
                        .iter()
                        .zip(&phi)
                        .map(|(x, &f)| f * units.get(pairing(g, x, gv)).conj())
                        .sum();
                    s.re / n as f64
                })
                .collect(),
            _ => fft_inverse(g, phi, &mut planner),
        };
        out.push(DistributionVector { t, probs });
    }
    Ok(out)
}

/// Forward DFT along every factor axis of the mixed-radix layout, divided by `n`.
fn fft_inverse(g: &InvariantFactorGroup, mut data: Vec<Complex64>, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = g.size() as usize;
    for (&m, &stride) in g.factors().iter().zip(&g.strides()) {
        let (m, stride) = (m as usize, stride as usize);
        let fft = planner.plan_fft_forward(m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let block = m * stride;
        for base in (0..n).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (i, b) in buf.iter_mut().enumerate() {
                    *b = data[start + i * stride];
                }
                fft.process(&mut buf);
                for (i, b) in buf.iter().enumerate() {
                    data[start + i * stride] = *b;
                }
            }
        }
    }
    data.into_iter().map(|c| c.re / n as f64).collect()
}

/// Convenience wrapper: spectrum plus FFT kernel.
pub fn abelian_kernel(g: &InvariantFactorGroup, z: &GeneratorMultiset, times: &[f64]) -> Result<Vec<DistributionVector>> {
    let spec = spectrum(g, z)?;
    heat_kernel_abelian(g, &spec, times, KernelMethod::Character)
}

/// Right-multiplication moves `g ↦ g·z` (and `g·z^{-1}` when undirected), one permutation each.
fn move_tables(group: &NilpotentPresentation, z: &[u64], directed: bool) -> Vec<Vec<u32>> {
    let n = group.size();
    let mut moves = Vec::new();
    for &zi in z {
        moves.push((0..n).map(|g| group.mul(g, zi) as u32).collect());
        if !directed {
            let inv = group.inv(zi);
            moves.push((0..n).map(|g| group.mul(g, inv) as u32).collect());
        }
    }
    moves
}

/// `p_t = e^{−t} Σ_j t^j/j! δ_id P^j`, truncated where the Poisson tail is below 1e-15.
pub fn heat_kernel_general(
    group: &NilpotentPresentation,
    z: &[u64],
    directed: bool,
    times: &[f64],
) -> Result<Vec<DistributionVector>> {
    let n = group.size();
    if n > GENERAL_CAP {
        return Err(Error::SizeCap { what: "uniformisation kernel", size: n, cap: GENERAL_CAP });
    }
    if z.is_empty() {
        return Err(Error::InvalidInput("need at least one generator".into()));
    }
    if let Some(&t) = times.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::Domain(format!("time must be >= 0 (got {t})")));
    }
    let moves = move_tables(group, z, directed);
    let w = 1.0 / moves.len() as f64;
    let n = n as usize;
    let jmax = times.iter().map(|&t| poisson_cutoff(t)).max().unwrap_or(0);
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; n]; times.len()];
    let mut mu = vec![0.0; n];
    mu[0] = 1.0;
    for j in 0..=jmax {
        for (ti, &t) in times.iter().enumerate() {
            let weight = poisson_weight(t, j);
            if weight > 0.0 {
                out[ti].iter_mut().zip(&mu).for_each(|(o, &m)| *o += weight * m);
            }
        }
        let mut next = vec![0.0; n];
        for mv in &moves {
            for (g, &m) in mu.iter().enumerate() {
                next[mv[g] as usize] += w * m;
            }
        }
        mu = next;
    }
    Ok(times.iter().zip(out).map(|(&t, probs)| DistributionVector { t, probs }).collect())
}

fn poisson_weight(t: f64, j: usize) -> f64 {
    if t == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (-t + j as f64 * t.ln() - ln_factorial(j as u64)).exp()
}

/// Dense `n`-vector guard for Abelian kernels.
pub fn check_dense(g: &InvariantFactorGroup) -> Result<()> {
    if g.size() > ELEMENT_CAP {
        return Err(Error::SizeCap { what: "dense distribution", size: g.size(), cap: ELEMENT_CAP });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::nilpotent::heisenberg_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Dense `expm(t(P − I))` by scaling and squaring a Taylor series.
    fn expm_row0(p: &[Vec<f64>], t: f64) -> Vec<f64> {
        let n = p.len();
        let mut a: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| t * (p[i][j] - if i == j { 1.0 } else { 0.0 })).collect()).collect();
        let squarings = 10;
        let scale = 2f64.powi(-squarings);
        a.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x *= scale));
        let matmul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| x[i][l] * y[l][j]).sum()).collect()).collect()
        };
        let mut result: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let mut term = result.clone();
        for m in 1..30 {
            term = matmul(&term, &a);
            term.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x /= m as f64));
            for i in 0..n {
                for j in 0..n {
                    result[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            result = matmul(&result, &result);
        }
        result[0].clone()
    }

    #[test]
    fn zero_time_is_point_mass() {
        let g = InvariantFactorGroup::from_factors(&[3, 6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = g.sample_generators(3, false, &mut rng);
        let p = &abelian_kernel(&g, &z, &[0.0]).unwrap()[0];
        assert!((p.probs[0] - 1.0).abs() < 1e-14);
        assert!(p.probs[1..].iter().all(|x| x.abs() < 1e-14));
        let h = NilpotentPresentation::heisenberg(2, 3).unwrap();
        let q = &heat_kernel_general(&h, &[1, 2], false, &[0.0]).unwrap()[0];
        assert_eq!(q.probs[0], 1.0);
    }

    #[test]
    fn two_cycle_closed_form() {
        let g = InvariantFactorGroup::cyclic(2).unwrap();
        let z = GeneratorMultiset { elements: vec![g.element(&[1]).unwrap()], directed: false };
        for t in [0.1, 1.0, 3.0] {
            let p = &abelian_kernel(&g, &z, &[t]).unwrap()[0];
            assert!((p.probs[0] - 0.5 * (1.0 + (-2.0 * t).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn fft_matches_direct_and_uniformization() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for ms in [vec![7], vec![2, 4], vec![3, 3, 6], vec![5, 10]] {
            let g = InvariantFactorGroup::from_factors(&ms).unwrap();
            let nil = NilpotentPresentation::from_abelian(g.clone());
            for directed in [false, true] {
                let z = g.sample_generators(3, directed, &mut rng);
                let spec = spectrum(&g, &z).unwrap();
                let times = [0.3, 2.0, 7.5];
                let a = heat_kernel_abelian(&g, &spec, &times, KernelMethod::Character).unwrap();
                let b = heat_kernel_abelian(&g, &spec, &times, KernelMethod::Direct).unwrap();
                let zi: Vec<u64> = z.elements.iter().map(|e| g.index(e)).collect();
                let c = heat_kernel_general(&nil, &zi, directed, &times).unwrap();
                for ((a, b), c) in a.iter().zip(&b).zip(&c) {
                    for i in 0..a.probs.len() {
                        assert!((a.probs[i] - b.probs[i]).abs() < 1e-12);
                        assert!((a.probs[i] - c.probs[i]).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_matches_dense_expm() {
        let h = NilpotentPresentation::heisenberg(2, 3).unwrap();
        let z = [heisenberg_element(2, &[1], &[0], 0), heisenberg_element(2, &[0], &[1], 0), heisenberg_element(2, &[1], &[1], 1)];
        for directed in [false, true] {
            let mut p = vec![vec![0.0; 8]; 8];
            let moves = move_tables(&h, &z, directed);
            for mv in &moves {
                for g in 0..8 {
                    p[g][mv[g] as usize] += 1.0 / moves.len() as f64;
                }
            }
            let oracle = expm_row0(&p, 5.0);
            let got = &heat_kernel_general(&h, &z, directed, &[5.0]).unwrap()[0];
            for g in 0..8 {
                assert!((got.probs[g] - oracle[g]).abs() < 1e-8, "directed={directed} g={g}");
            }
        }
    }

    #[test]
    fn normalised_on_fuzz_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for ms in [vec![97], vec![2, 2, 2, 2], vec![6, 12], vec![1000]] {
            let g = InvariantFactorGroup::from_factors(&ms).unwrap();
            for k in [1, 2, 5] {
                let z = g.sample_generators(k, k % 2 == 0, &mut rng);
                for p in abelian_kernel(&g, &z, &[0.0, 0.5, 4.0, 50.0]).unwrap() {
                    let s: f64 = p.probs.iter().sum();
                    assert!((s - 1.0).abs() < 1e-10);
                    assert!(p.probs.iter().all(|&x| x >= -1e-12));
                }
            }
        }
    }

    #[test]
    fn caps_are_enforced() {
        let g = InvariantFactorGroup::cyclic(DIRECT_CAP + 1).unwrap();
        let z = GeneratorMultiset { elements: vec![g.element(&[1]).unwrap()], directed: false };
        let spec = spectrum(&g, &z).unwrap();
        assert!(matches!(
            heat_kernel_abelian(&g, &spec, &[1.0], KernelMethod::Direct),
            Err(Error::SizeCap { cap: DIRECT_CAP, .. })
        ));
        let big = NilpotentPresentation::heisenberg(7, 5).unwrap();
        assert!(matches!(heat_kernel_general(&big, &[1], false, &[1.0]), Err(Error::SizeCap { .. })));
    }
}
