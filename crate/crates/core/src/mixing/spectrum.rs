//! Character diagonalisation of Abelian Cayley kernels.
//!
//! For character `x`, the jump kernel has eigenvalue `λ_x = (1/k) Σ_i χ_x(z_i)` (directed)
//! or its real part (undirected). Phases are computed exactly in `Z_{m_d}`:
//! `⟨x, z⟩ = Σ_j x_j z_j (m_d / m_j) mod m_d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::nilpotent::ELEMENT_CAP;
use crate::groups::{GeneratorMultiset, InvariantFactorGroup};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralTable {
    pub directed: bool,
    /// `λ_x` in character-index order.
    #[serde(skip)]
    pub eigen: Vec<Complex64>,
    /// `min_{x≠0} (1 − Re λ_x)`
    pub gap: f64,
    pub relaxation_time: f64,
}

/// `e^{2πi r / m}` for `r ∈ [0, m)`.
pub(crate) struct UnitTable {
    m: u64,
    table: Vec<Complex64>,
}

impl UnitTable {
    pub(crate) fn new(m: u64) -> Self {
        let table = if m <= 1 << 22 {
            (0..m).map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64)).collect()
        } else {
            Vec::new()
        };
        UnitTable { m, table }
    }

    pub(crate) fn get(&self, r: u64) -> Complex64 {
        if self.table.is_empty() {
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / self.m as f64)
        } else {
            self.table[r as usize]
        }
    }
}

/// `⟨x, z⟩` as an integer in `Z_{m_d}`.
pub(crate) fn pairing(g: &InvariantFactorGroup, x: &[u64], z: &[u64]) -> u64 {
    let e = g.exponent() as u128;
    let mut acc = 0u128;
    for ((&xj, &zj), &m) in x.iter().zip(z).zip(g.factors()) {
        acc = (acc + (xj as u128 * zj as u128 % m as u128) * (e / m as u128)) % e;
    }
    acc as u64
}

pub fn spectrum(g: &InvariantFactorGroup, z: &GeneratorMultiset) -> Result<SpectralTable> {
    if g.size() > ELEMENT_CAP {
        return Err(Error::SizeCap { what: "character table", size: g.size(), cap: ELEMENT_CAP });
    }
    if z.k() == 0 {
        return Err(Error::InvalidInput("need at least one generator".into()));
    }
    let units = UnitTable::new(g.exponent());
    let k = z.k() as f64;
    let zs: Vec<&[u64]> = z.elements.iter().map(|e| e.residues.as_slice()).collect();
    let eigen: Vec<Complex64> = g
        .elements()
        .map(|x| {
            let s: Complex64 = zs.iter().map(|zi| units.get(pairing(g, &x.residues, zi))).sum();
            let s = s / k;
            if z.directed {
                s
            } else {
                Complex64::new(s.re, 0.0)
            }
        })
        .collect();
    let gap = eigen.iter().skip(1).map(|l| 1.0 - l.re).fold(f64::INFINITY, f64::min);
    // trivial group: no nontrivial character
    let gap = if gap.is_finite() { gap.max(0.0) } else { 1.0 };
    Ok(SpectralTable { directed: z.directed, eigen, gap, relaxation_time: 1.0 / gap })
}
