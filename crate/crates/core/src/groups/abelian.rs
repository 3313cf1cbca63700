//! Finite Abelian groups in invariant-factor form `Z_{m_1} ⊕ … ⊕ Z_{m_d}` with `m_1 | … | m_d`.
//!
//! Elements are residue vectors. The mixed-radix index (first factor fastest) gives a
//! bijection with `[0, n)` and is the layout used by every dense distribution vector.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, gcd, lcm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct InvariantFactorGroup {
    factors: Vec<u64>,
    size: u64,
}

impl TryFrom<Vec<u64>> for InvariantFactorGroup {
    type Error = Error;
    fn try_from(ms: Vec<u64>) -> Result<Self> {
        Self::from_factors(&ms)
    }
}

impl From<InvariantFactorGroup> for Vec<u64> {
    fn from(g: InvariantFactorGroup) -> Self {
        g.factors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub residues: Vec<u64>,
}

/// `Z = [Z_1, …, Z_k]`. Repeated elements are kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorMultiset {
    pub elements: Vec<GroupElement>,
    pub directed: bool,
}

impl GeneratorMultiset {
    pub fn k(&self) -> usize {
        self.elements.len()
    }
}

/// Result of [`InvariantFactorGroup::scale_subgroup`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledSubgroup {
    /// `gcd(γ, m_j)` per factor; this vector identifies the subgroup `γG`.
    pub gcds: Vec<u64>,
    /// `|γG|`
    pub size: u64,
    /// `|G/γG|`
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupClass {
    pub gcds: Vec<u64>,
    /// Smallest scale producing this subgroup; divides every member.
    pub gamma_h: u64,
    pub members: Vec<u64>,
    pub index: u64,
}

/// Proper subgroups `γG ≠ G` for `γ | n`, `2 ≤ γ ≤ n_*`, grouped by the subgroup they produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupLattice {
    pub classes: Vec<SubgroupClass>,
    pub scan_bound: u64,
}

impl SubgroupLattice {
    pub fn representatives(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.gamma_h).collect()
    }

    pub fn class_of(&self, gamma: u64) -> Option<&SubgroupClass> {
        self.classes.iter().find(|c| c.members.contains(&gamma))
    }
}

impl InvariantFactorGroup {
    /// Canonical invariant-factor form of `⊕ Z_{ms_j}`. Factors equal to 1 are dropped.
    pub fn from_factors(ms: &[u64]) -> Result<Self> {
        if ms.contains(&0) {
            return Err(Error::InvalidInput("cyclic factor must be >= 1".into()));
        }
        let mut size: u64 = 1;
        for &m in ms {
            size = size.checked_mul(m).ok_or(Error::Overflow("multiplying group factors"))?;
        }
        // prime -> exponents, largest first
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &m in ms {
            for (p, e) in factorize(m) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let d = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; d];
        for (p, mut es) in by_prime {
            es.sort_unstable_by(|a, b| b.cmp(a));
            for (i, e) in es.into_iter().enumerate() {
                factors[d - 1 - i] *= p.pow(e);
            }
        }
        Ok(Self { factors, size })
    }

    pub fn trivial() -> Self {
        Self { factors: Vec::new(), size: 1 }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::from_factors(&[n])
    }

    /// `Z_m^r`
    pub fn power(m: u64, r: usize) -> Result<Self> {
        Self::from_factors(&vec![m; r])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// `d(G)`, the number of invariant factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Largest invariant factor `m_d` (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.rank()] }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.residues.len() == self.rank() && a.residues.iter().zip(&self.factors).all(|(&r, &m)| r < m)
    }

    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "expected {} residues, got {}",
                self.rank(),
                residues.len()
            )));
        }
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &m)| r.rem_euclid(m as i64) as u64)
                .collect(),
        })
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| ((x as u128 + y as u128) % m as u128) as u64)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| if x == 0 { 0 } else { m - x })
                .collect(),
        }
    }

    /// `c·a` for any integer `c`.
    pub fn scale(&self, a: &GroupElement, c: i64) -> GroupElement {
        GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| {
                    let c = (c as i128).rem_euclid(m as i128) as u128;
                    ((x as u128 * c) % m as u128) as u64
                })
                .collect(),
        }
    }

    /// `Σ_i v_i Z_i`
    pub fn combination(&self, v: &[i64], zs: &[GroupElement]) -> GroupElement {
        v.iter()
            .zip(zs)
            .fold(self.identity(), |acc, (&c, z)| self.add(&acc, &self.scale(z, c)))
    }

    pub fn index(&self, a: &GroupElement) -> u64 {
        let mut idx = 0u64;
        for (&r, &m) in a.residues.iter().zip(&self.factors).rev() {
            idx = idx * m + r;
        }
        idx
    }

    pub fn from_index(&self, index: u64) -> Result<GroupElement> {
        if index >= self.size {
            return Err(Error::IndexOutOfRange { index, size: self.size });
        }
        let mut rest = index;
        let residues = self
            .factors
            .iter()
            .map(|&m| {
                let r = rest % m;
                rest /= m;
                r
            })
            .collect();
        Ok(GroupElement { residues })
    }

    /// Mixed-radix stride of each factor in the index layout.
    pub fn strides(&self) -> Vec<u64> {
        let mut s = Vec::with_capacity(self.rank());
        let mut acc = 1u64;
        for &m in &self.factors {
            s.push(acc);
            acc *= m;
        }
        s
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size).map(move |i| self.from_index(i).expect("index in range"))
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.residues
            .iter()
            .zip(&self.factors)
            .fold(1, |acc, (&r, &m)| lcm(acc, m / gcd(r, m)).expect("order divides exponent"))
    }

    /// `(gcd vector, |γG|, |G/γG|)`.
    pub fn scale_subgroup(&self, gamma: u64) -> ScaledSubgroup {
        assert!(gamma >= 1, "scale must be positive");
        let gcds: Vec<u64> = self.factors.iter().map(|&m| gcd(gamma, m)).collect();
        let index: u64 = gcds.iter().product();
        ScaledSubgroup { size: self.size / index, index, gcds }
    }

    pub fn subgroup_classes(&self, scan_bound: u64) -> SubgroupLattice {
        let mut classes: BTreeMap<Vec<u64>, SubgroupClass> = BTreeMap::new();
        for gamma in divisors(self.size) {
            if gamma < 2 || gamma > scan_bound {
                continue;
            }
            let sc = self.scale_subgroup(gamma);
            if sc.index == 1 {
                continue;
            }
            let entry = classes.entry(sc.gcds.clone()).or_insert_with(|| SubgroupClass {
                gamma_h: sc.gcds.iter().fold(1, |a, &h| lcm(a, h).expect("divides exponent")),
                gcds: sc.gcds.clone(),
                members: Vec::new(),
                index: sc.index,
            });
            entry.members.push(gamma);
        }
        let mut classes: Vec<SubgroupClass> = classes.into_values().collect();
        classes.sort_by_key(|c| c.gamma_h);
        SubgroupLattice { classes, scan_bound }
    }

    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        GroupElement { residues: self.factors.iter().map(|&m| rng.random_range(0..m)).collect() }
    }

    /// `k` iid uniform generators.
    pub fn sample_generators<R: Rng + ?Sized>(&self, k: usize, directed: bool, rng: &mut R) -> GeneratorMultiset {
        GeneratorMultiset { elements: (0..k).map(|_| self.sample_element(rng)).collect(), directed }
    }

    /// Every Abelian group of order `n` up to isomorphism.
    pub fn all_of_order(n: u64) -> Vec<Self> {
        let mut out = vec![Vec::<u64>::new()];
        for (p, e) in factorize(n) {
            let mut next = Vec::new();
            for part in partitions(e) {
                for prev in &out {
                    let mut ms = prev.clone();
                    ms.extend(part.iter().map(|&a| p.pow(a)));
                    next.push(ms);
                }
            }
            out = next;
        }
        out.iter().map(|ms| Self::from_factors(ms).expect("divides n")).collect()
    }
}

/// Integer partitions of `e`, each in nonincreasing order.
pub fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for a in (1..=rest.min(max)).rev() {
            cur.push(a);
            rec(rest - a, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for InvariantFactorGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "Z_1");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("Z_{m}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}
