//! Exhaustive isoperimetric constant of small Cayley graphs.
//!
//! Edges are the multiset `{g, g·z_i}` over all `g` and `i`, so every vertex has degree `2k`
//! (a loop counts twice, an order-2 generator gives two parallel edges). Then
//! `Φ(S) = |∂S| / (2k|S|)` with `|∂S| = Σ_{g∈S} Σ_i ([g z_i ∉ S] + [g z_i^{-1} ∉ S])`.
//! The directed graph has the same profile, so only the undirected graph is used.

use crate::error::{Error, Result};
use crate::groups::NilpotentPresentation;

pub const ISOPERIMETRIC_CAP: u64 = 16;

/// `Φ_* = min_{1 ≤ |S| ≤ n/2} Φ(S)` and a minimising set as a bitmask.
pub fn isoperimetric_exhaustive(group: &NilpotentPresentation, z: &[u64]) -> Result<(f64, u32)> {
    let n = group.size();
    if n > ISOPERIMETRIC_CAP {
        return Err(Error::SizeCap { what: "exhaustive isoperimetry", size: n, cap: ISOPERIMETRIC_CAP });
    }
    if z.is_empty() {
        return Err(Error::InvalidInput("need at least one generator".into()));
    }
    if n == 1 {
        return Ok((0.0, 0));
    }
    let nbrs: Vec<Vec<u64>> = (0..n)
        .map(|g| z.iter().flat_map(|&zi| [group.mul(g, zi), group.mul(g, group.inv(zi))]).collect())
        .collect();
    let deg = 2.0 * z.len() as f64;
    let mut best = (f64::INFINITY, 0u32);
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as u64;
        if 2 * size > n {
            continue;
        }
        let boundary: usize = (0..n)
            .filter(|&g| mask >> g & 1 == 1)
            .map(|g| nbrs[g as usize].iter().filter(|&&h| mask >> h & 1 == 0).count())
            .sum();
        let phi = boundary as f64 / (deg * size as f64);
        if phi < best.0 {
            best = (phi, mask);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::InvariantFactorGroup;

    fn cyclic(n: u64) -> NilpotentPresentation {
        NilpotentPresentation::from_abelian(InvariantFactorGroup::cyclic(n).unwrap())
    }

    #[test]
    fn examples() {
        let (phi, set) = isoperimetric_exhaustive(&cyclic(4), &[1]).unwrap();
        assert_eq!(phi, 0.5);
        assert_eq!(set.count_ones(), 2);
        assert_eq!(isoperimetric_exhaustive(&cyclic(4), &[0]).unwrap().0, 0.0);
        assert_eq!(isoperimetric_exhaustive(&cyclic(2), &[1]).unwrap().0, 1.0);
        assert!(isoperimetric_exhaustive(&cyclic(17), &[1]).is_err());
    }

    #[test]
    fn even_cycle_value() {
        // arcs of length n/2 cut 2 edges
        for n in [6u64, 8, 10, 16] {
            let phi = isoperimetric_exhaustive(&cyclic(n), &[1]).unwrap().0;
            assert!((phi - 2.0 / (2.0 * (n / 2) as f64)).abs() < 1e-15);
        }
    }
}
