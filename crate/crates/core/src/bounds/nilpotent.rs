//! Product decomposition of `P(S = S′)` along the lower central series, and mixing-time
//! comparison between a nilpotent group and its abelianised companion `Ḡ = ⊕_ℓ Q_ℓ`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mc::chunk_rng;
use crate::arith::gcd_vector_with;
use crate::entropic::t_star;
use crate::error::{Error, Result};
use crate::groups::NilpotentPresentation;
use crate::lattice_walk::WalkKind;
use crate::mixing::curve::refine_mixing_time;
use crate::mixing::{abelian_kernel, heat_kernel_general, tv_distance, MixingTime};

/// Largest `|G|^k` enumerated exactly.
pub const DECOMP_CAP: u64 = 1 << 16;

/// A word `z_{σ_1}^{η_1} ⋯ z_{σ_M}^{η_M}`; `true` marks an inverse.
pub type Word = Vec<(usize, bool)>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompCase {
    pub word: Word,
    pub word2: Word,
    /// `#{Z ∈ G^k : S = S′}`
    pub lhs_count: u64,
    /// `#{Z_ℓ ∈ R_ℓ^k : S_ℓ G_ℓ = S′_ℓ G_ℓ}` per level.
    pub level_counts: Vec<u64>,
    /// `|G|^k`, the common denominator of both sides.
    pub denominator: u128,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs ≤ rhs`, compared as integers.
    pub holds: bool,
    /// `n·rhs = |Ḡ/gḠ|` with `g = gcd(V, n)` and `V` the abelianised exponent vector.
    pub index_identity: bool,
}

/// All words of length `≤ max_len` over `k` letters and their inverses.
pub fn all_words(k: usize, max_len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..k).flat_map(move |i| {
                    [false, true].into_iter().map(move |inv| {
                        let mut w = w.clone();
                        w.push((i, inv));
                        w
                    })
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn eval_word(n: &NilpotentPresentation, w: &Word, z: &[u64]) -> u64 {
    w.iter().fold(n.identity(), |acc, &(i, inv)| n.mul(acc, if inv { n.inv(z[i]) } else { z[i] }))
}

fn exponent_vector(k: usize, w: &Word, w2: &Word) -> Vec<i64> {
    let mut v = vec![0i64; k];
    for &(i, inv) in w {
        v[i] += if inv { -1 } else { 1 };
    }
    for &(i, inv) in w2 {
        v[i] -= if inv { -1 } else { 1 };
    }
    v
}

/// Calls `f` on every tuple in `pool^k`.
fn for_each_tuple(pool: &[u64], k: usize, mut f: impl FnMut(&[u64])) {
    let mut idx = vec![0usize; k];
    let mut z: Vec<u64> = vec![pool[0]; k];
    loop {
        f(&z);
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            idx[j] += 1;
            if idx[j] < pool.len() {
                z[j] = pool[idx[j]];
                break;
            }
            idx[j] = 0;
            z[j] = pool[0];
            j += 1;
        }
    }
}

/// Exact check of `P(S = S′) ≤ Π_ℓ P(S_ℓ G_ℓ = S′_ℓ G_ℓ)` over every pair of words of lengths
/// `≤ max_len`, `≤ max_len2`, with generators uniform on `G` (equivalently, products of
/// uniform quotient representatives).
pub fn prod_decomp_check(
    n: &NilpotentPresentation,
    k: usize,
    max_len: usize,
    max_len2: usize,
) -> Result<Vec<DecompCase>> {
    let size = n.size();
    let tuples = u32::try_from(k).ok().and_then(|k| size.checked_pow(k)).unwrap_or(u64::MAX);
    if k == 0 || tuples > DECOMP_CAP {
        return Err(Error::SizeCap { what: "product decomposition enumeration", size: tuples, cap: DECOMP_CAP });
    }
    let all: Vec<u64> = (0..size).collect();
    let reps: Vec<Vec<u64>> = (1..=n.step()).map(|l| n.representatives(l)).collect::<Result<_>>()?;
    let bar = n.bar_group();
    let words = all_words(k, max_len);
    let words2 = all_words(k, max_len2);
    let pairs: Vec<(&Word, &Word)> = words.iter().flat_map(|a| words2.iter().map(move |b| (a, b))).collect();
    let denominator = (size as u128).pow(k as u32);
    Ok(pairs
        .par_iter()
        .map(|&(w, w2)| {
            let mut lhs_count = 0u64;
            for_each_tuple(&all, k, |z| lhs_count += (eval_word(n, w, z) == eval_word(n, w2, z)) as u64);
            let level_counts: Vec<u64> = reps
                .iter()
                .enumerate()
                .map(|(l, r)| {
                    let mut c = 0u64;
                    for_each_tuple(r, k, |z| {
                        c += (n.coset_key(l + 1, eval_word(n, w, z)) == n.coset_key(l + 1, eval_word(n, w2, z))) as u64
                    });
                    c
                })
                .collect();
            let rhs_num: u128 = level_counts.iter().map(|&c| c as u128).product();
            let g = gcd_vector_with(&exponent_vector(k, w, w2), size);
            let gbar_index = bar.scale_subgroup(g).index as u128;
            DecompCase {
                word: w.clone(),
                word2: w2.clone(),
                lhs_count,
                level_counts,
                denominator,
                lhs: lhs_count as f64 / denominator as f64,
                rhs: rhs_num as f64 / denominator as f64,
                holds: (lhs_count as u128) <= rhs_num,
                index_identity: rhs_num * size as u128 == gbar_index * denominator,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub seed: u64,
    pub eps: f64,
    pub t_mix: MixingTime,
    pub t_mix_bar: MixingTime,
    /// `None` if either side is censored.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NilpotentComparison {
    pub group_size: u64,
    pub bar_group: String,
    pub k: usize,
    pub directed: bool,
    pub t_max: f64,
    pub rows: Vec<ComparisonRow>,
    /// `(ε, median ratio over uncensored seeds, censored count)`
    pub summary: Vec<(f64, Option<f64>, usize)>,
}

pub fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m] } else { 0.5 * (xs[m - 1] + xs[m]) })
}

/// Exact `t_mix(G_k, ε)` against `t_mix(Ḡ_k, ε)` with independently drawn uniform generators.
///
/// Grid: 0 and 160 log-spaced points up to `8·t_*(k, Ḡ)`, then bisection to relative 1e-6.
pub fn compare_nilpotent_abelian(
    n: &NilpotentPresentation,
    k: usize,
    eps_grid: &[f64],
    seeds: &[u64],
    directed: bool,
) -> Result<NilpotentComparison> {
    let bar = n.bar_group();
    let kind = WalkKind::from_directed(directed);
    let ts = t_star(k, &bar, kind)?.t_star.max(1.0);
    let t_max = 8.0 * ts;
    let points = 160;
    let times: Vec<f64> = std::iter::once(0.0)
        .chain((0..points).map(|i| t_max * (1e-3f64).powf(1.0 - i as f64 / (points - 1) as f64)))
        .collect();
    let rows: Vec<Vec<ComparisonRow>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = chunk_rng(seed, 0);
            let z: Vec<u64> = (0..k).map(|_| rng.random_range(0..n.size())).collect();
            let mut rng_bar = chunk_rng(seed, 1);
            let zb = bar.sample_generators(k, directed, &mut rng_bar);
            let tv_g = |t: &[f64]| -> Result<Vec<f64>> {
                Ok(heat_kernel_general(n, &z, directed, t)?.iter().map(|d| tv_distance(&d.probs)).collect())
            };
            let tv_b = |t: &[f64]| -> Result<Vec<f64>> {
                Ok(abelian_kernel(&bar, &zb, t)?.iter().map(|d| tv_distance(&d.probs)).collect())
            };
            let (dg, db) = (tv_g(&times)?, tv_b(&times)?);
            eps_grid
                .iter()
                .map(|&eps| {
                    let t_mix = refine(&times, &dg, eps, |t| tv_g(&[t]).map(|v| v[0]))?;
                    let t_mix_bar = refine(&times, &db, eps, |t| tv_b(&[t]).map(|v| v[0]))?;
                    let ratio = match (t_mix.value(), t_mix_bar.value()) {
                        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                        _ => None,
                    };
                    Ok(ComparisonRow { seed, eps, t_mix, t_mix_bar, ratio })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ComparisonRow> = rows.into_iter().flatten().collect();
    let summary = eps_grid
        .iter()
        .map(|&eps| {
            let mut rs: Vec<f64> = rows.iter().filter(|r| r.eps == eps).filter_map(|r| r.ratio).collect();
            let censored = rows.iter().filter(|r| r.eps == eps && r.ratio.is_none()).count();
            (eps, median(&mut rs), censored)
        })
        .collect();
    Ok(NilpotentComparison {
        group_size: n.size(),
        bar_group: bar.to_string(),
        k,
        directed,
        t_max,
        rows,
        summary,
    })
}

fn refine(times: &[f64], d: &[f64], eps: f64, f: impl Fn(f64) -> Result<f64>) -> Result<MixingTime> {
    let mut err = None;
    let out = refine_mixing_time(
        times,
        d,
        eps,
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        1e-6,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
