//! Concrete nilpotent groups with their lower central series.
//!
//! Elements are `u64` indices with the identity at 0. Three backends:
//! structured Heisenberg arithmetic, an Abelian group viewed as step-1 nilpotent,
//! and an explicit multiplication table (series computed exhaustively from commutators).
//!
//! Heisenberg index layout: coordinates `x_1..x_r, y_1..y_r, z` (r = d − 2) in base `m`,
//! first coordinate least significant. So `z` is the top digit and `{(x, y, 0)}` is the
//! index range `[0, m^{2r})`.

use std::collections::BTreeSet;

use rand::Rng;

use super::abelian::InvariantFactorGroup;
use crate::arith::factorize;
use crate::error::{Error, Result};

/// Largest group stored as a multiplication table.
pub const TABLE_CAP: u64 = 1 << 12;
/// Largest element set materialised in memory.
pub const ELEMENT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupLaw {
    Abelian(InvariantFactorGroup),
    Heisenberg { m: u64, d: u32 },
    /// Row-major `n × n` table; `mul[a * n + b] = a·b`.
    Table { n: usize, mul: Vec<u32>, inv: Vec<u32> },
}

/// One step `Q_ℓ = G_{ℓ-1}/G_ℓ` of the lower central series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub quotient: InvariantFactorGroup,
    /// `|G_ℓ|`
    pub subgroup_size: u64,
}

#[derive(Debug, Clone)]
pub struct NilpotentPresentation {
    law: GroupLaw,
    size: u64,
    levels: Vec<Level>,
    table: Option<TableSeries>,
}

/// Series data for table-backed groups.
#[derive(Debug, Clone)]
struct TableSeries {
    /// `member[ℓ][g]`: g ∈ G_ℓ, for ℓ = 0..=L.
    member: Vec<Vec<bool>>,
    /// `coset_key[ℓ-1][g]`: least element of g·G_ℓ for g ∈ G_{ℓ-1}.
    coset_key: Vec<Vec<u32>>,
    /// `reps[ℓ-1]`: the least element of each coset, sorted.
    reps: Vec<Vec<u32>>,
}

impl NilpotentPresentation {
    /// Heisenberg group `H_{m,d}` of triples in `Z_m^{d−2} × Z_m^{d−2} × Z_m`.
    pub fn heisenberg(m: u64, d: u32) -> Result<Self> {
        if m < 2 || d < 3 {
            return Err(Error::InvalidInput(format!("heisenberg needs m >= 2, d >= 3 (got m={m}, d={d})")));
        }
        let r = (d - 2) as usize;
        let size = m.checked_pow(2 * d - 3).ok_or(Error::Overflow("computing m^(2d-3)"))?;
        let levels = vec![
            Level { quotient: InvariantFactorGroup::power(m, 2 * r)?, subgroup_size: m },
            Level { quotient: InvariantFactorGroup::cyclic(m)?, subgroup_size: 1 },
        ];
        Ok(Self { law: GroupLaw::Heisenberg { m, d }, size, levels, table: None })
    }

    /// An Abelian group as a step-1 nilpotent group (step 0 if trivial).
    pub fn from_abelian(g: InvariantFactorGroup) -> Self {
        let levels = if g.is_trivial() {
            Vec::new()
        } else {
            vec![Level { quotient: g.clone(), subgroup_size: 1 }]
        };
        Self { size: g.size(), law: GroupLaw::Abelian(g), levels, table: None }
    }

    /// Build from a multiplication table with identity at index 0.
    pub fn from_table(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n as u64 > TABLE_CAP {
            return Err(Error::SizeCap { what: "multiplication table", size: n as u64, cap: TABLE_CAP });
        }
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= n)) {
            return Err(Error::InvalidInput("table must be square with entries in range".into()));
        }
        let mul: Vec<u32> = rows.into_iter().flatten().collect();
        for a in 0..n {
            if mul[a] as usize != a || mul[a * n] as usize != a {
                return Err(Error::InvalidInput("index 0 must be the identity".into()));
            }
        }
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::InvalidInput(format!("element {a} has no inverse")));
            }
        }
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    let ab = mul[a * n + b] as usize;
                    for c in 0..n {
                        let bc = mul[b * n + c] as usize;
                        if mul[ab * n + c] != mul[a * n + bc] {
                            return Err(Error::InvalidInput("table is not associative".into()));
                        }
                    }
                }
            }
        }
        let law = GroupLaw::Table { n, mul, inv };
        let mut out = Self { law, size: n as u64, levels: Vec::new(), table: None };
        out.compute_table_series()?;
        Ok(out)
    }

    /// Multiplication table of this group (for cross-validation against structured backends).
    pub fn to_table(&self) -> Result<Self> {
        if self.size > TABLE_CAP {
            return Err(Error::SizeCap { what: "multiplication table", size: self.size, cap: TABLE_CAP });
        }
        let n = self.size;
        let rows = (0..n).map(|a| (0..n).map(|b| self.mul(a, b) as u32).collect()).collect();
        Self::from_table(rows)
    }

    pub fn law(&self) -> &GroupLaw {
        &self.law
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// `L`, the length of the lower central series.
    pub fn step(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn is_table_backed(&self) -> bool {
        self.table.is_some()
    }

    pub fn identity(&self) -> u64 {
        0
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.law {
            GroupLaw::Abelian(g) => {
                let (x, y) = (g.from_index(a).expect("in range"), g.from_index(b).expect("in range"));
                g.index(&g.add(&x, &y))
            }
            GroupLaw::Heisenberg { m, d } => {
                let (u, v) = (heis_decode(a, *m, *d), heis_decode(b, *m, *d));
                let r = (*d - 2) as usize;
                let mut w: Vec<u64> = u.iter().zip(&v).map(|(p, q)| (p + q) % m).collect();
                let dot = (0..r).fold(0u128, |acc, i| (acc + u[i] as u128 * v[r + i] as u128) % *m as u128);
                w[2 * r] = ((w[2 * r] as u128 + dot) % *m as u128) as u64;
                heis_encode(&w, *m)
            }
            GroupLaw::Table { n, mul, .. } => mul[a as usize * n + b as usize] as u64,
        }
    }

    pub fn inv(&self, a: u64) -> u64 {
        match &self.law {
            GroupLaw::Abelian(g) => g.index(&g.neg(&g.from_index(a).expect("in range"))),
            GroupLaw::Heisenberg { m, d } => {
                let u = heis_decode(a, *m, *d);
                let r = (*d - 2) as usize;
                let dot = (0..r).fold(0u128, |acc, i| (acc + u[i] as u128 * u[r + i] as u128) % *m as u128) as u64;
                let mut w: Vec<u64> = u.iter().map(|&c| (m - c) % m).collect();
                w[2 * r] = (w[2 * r] + dot) % m;
                heis_encode(&w, *m)
            }
            GroupLaw::Table { inv, .. } => inv[a as usize] as u64,
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 0u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^{-1} b^{-1} a b`
    pub fn commutator(&self, a: u64, b: u64) -> u64 {
        let ab = self.mul(a, b);
        self.mul(self.inv(a), self.mul(self.inv(b), ab))
    }

    /// Whether `g ∈ G_ℓ` (ℓ = 0 is the whole group).
    pub fn in_level(&self, level: usize, g: u64) -> bool {
        if level == 0 {
            return true;
        }
        if level >= self.step() {
            return g == 0;
        }
        match &self.law {
            GroupLaw::Heisenberg { m, d } => g % m.pow(2 * (d - 2)) == 0,
            GroupLaw::Table { .. } => self.table.as_ref().expect("table series")
                .member[level][g as usize],
            GroupLaw::Abelian(_) => unreachable!("step 1"),
        }
    }

    /// Canonical label of the coset `g·G_ℓ` for `g ∈ G_{ℓ-1}`, `1 ≤ ℓ ≤ L`.
    pub fn coset_key(&self, level: usize, g: u64) -> u64 {
        debug_assert!(level >= 1 && level <= self.step());
        match &self.law {
            GroupLaw::Abelian(_) => g,
            GroupLaw::Heisenberg { m, d } => {
                if level == 1 {
                    g % m.pow(2 * (d - 2))
                } else {
                    g
                }
            }
            GroupLaw::Table { .. } => {
                self.table.as_ref().expect("table series").coset_key[level - 1][g as usize] as u64
            }
        }
    }

    /// The `i`-th representative in `R_ℓ`, `0 ≤ i < |Q_ℓ|`.
    pub fn representative(&self, level: usize, i: u64) -> u64 {
        match &self.law {
            GroupLaw::Abelian(_) => i,
            GroupLaw::Heisenberg { m, d } => {
                if level == 1 {
                    i
                } else {
                    i * m.pow(2 * (d - 2))
                }
            }
            GroupLaw::Table { .. } => self.table.as_ref().expect("table series").reps[level - 1][i as usize] as u64,
        }
    }

    pub fn representatives(&self, level: usize) -> Result<Vec<u64>> {
        let q = self.levels[level - 1].quotient.size();
        if q > ELEMENT_CAP {
            return Err(Error::SizeCap { what: "representative set", size: q, cap: ELEMENT_CAP });
        }
        Ok((0..q).map(|i| self.representative(level, i)).collect())
    }

    /// Element list of `G_ℓ`.
    pub fn level_elements(&self, level: usize) -> Result<Vec<u64>> {
        if self.size > ELEMENT_CAP {
            return Err(Error::SizeCap { what: "element set", size: self.size, cap: ELEMENT_CAP });
        }
        Ok((0..self.size).filter(|&g| self.in_level(level, g)).collect())
    }

    /// `Ḡ = ⊕_ℓ Q_ℓ`, canonicalised.
    pub fn bar_group(&self) -> InvariantFactorGroup {
        let ms: Vec<u64> = self.levels.iter().flat_map(|l| l.quotient.factors().to_vec()).collect();
        InvariantFactorGroup::from_factors(&ms).expect("product equals |G|")
    }

    /// `|γQ_ℓ|`, counted directly as the number of distinct cosets `r^γ G_ℓ`.
    pub fn scaled_quotient_size(&self, level: usize, gamma: u64) -> Result<u64> {
        let keys: BTreeSet<u64> = self
            .representatives(level)?
            .into_iter()
            .map(|r| self.coset_key(level, self.pow(r, gamma)))
            .collect();
        Ok(keys.len() as u64)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.size)
    }

    /// `Z = Z_1 ⋯ Z_L` with `Z_ℓ` uniform on `R_ℓ`; returns the product and its parts.
    pub fn sample_via_quotients<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, Vec<u64>) {
        let parts: Vec<u64> = self
            .levels
            .iter()
            .enumerate()
            .map(|(l, lv)| self.representative(l + 1, rng.random_range(0..lv.quotient.size())))
            .collect();
        let prod = parts.iter().fold(0, |acc, &p| self.mul(acc, p));
        (prod, parts)
    }

    /// Exhaustive structural check of the series (table-sized groups only).
    pub fn check_series(&self) -> Result<()> {
        if self.size > TABLE_CAP {
            return Err(Error::SizeCap { what: "series check", size: self.size, cap: TABLE_CAP });
        }
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        let total: u64 = self.levels.iter().map(|l| l.quotient.size()).product();
        if total != self.size {
            return fail(format!("quotient sizes multiply to {total}, not {}", self.size));
        }
        let all: Vec<u64> = (0..self.size).collect();
        for l in 1..=self.step() {
            let prev = self.level_elements(l - 1)?;
            let cur = self.level_elements(l)?;
            if cur.len() as u64 != self.levels[l - 1].subgroup_size {
                return fail(format!("level {l} has {} elements", cur.len()));
            }
            let gens: BTreeSet<u64> =
                prev.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).map(|(a, b)| self.commutator(a, b)).collect();
            let generated = self.closure(&gens.into_iter().collect::<Vec<_>>());
            if generated != cur {
                return fail(format!("level {l} is not [G_{}, G]", l - 1));
            }
            for &g in &all {
                for &h in &cur {
                    if !self.in_level(l, self.mul(self.mul(g, h), self.inv(g))) {
                        return fail(format!("level {l} is not normal"));
                    }
                }
            }
            let reps = self.representatives(l)?;
            let keys: BTreeSet<u64> = reps.iter().map(|&r| self.coset_key(l, r)).collect();
            if keys.len() != reps.len() || reps.iter().any(|&r| !self.in_level(l - 1, r)) {
                return fail(format!("level {l} representatives do not cover the quotient"));
            }
        }
        if self.step() > 0 && self.level_elements(self.step())? != vec![0] {
            return fail("last level is not trivial".into());
        }
        Ok(())
    }

    /// Sorted elements of the subgroup generated by `gens`.
    fn closure(&self, gens: &[u64]) -> Vec<u64> {
        let mut seen = vec![false; self.size as usize];
        seen[0] = true;
        let mut stack = vec![0u64];
        let mut out = vec![0u64];
        while let Some(a) = stack.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    stack.push(b);
                    out.push(b);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn compute_table_series(&mut self) -> Result<()> {
        let n = self.size as usize;
        let all: Vec<u64> = (0..self.size).collect();
        let mut member = vec![vec![true; n]];
        let mut current = all.clone();
        while current.len() > 1 {
            let gens: BTreeSet<u64> = current
                .iter()
                .flat_map(|&a| all.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.commutator(a, b))
                .collect();
            let next = self.closure(&gens.into_iter().collect::<Vec<_>>());
            if next.len() == current.len() {
                return Err(Error::InvalidInput("group is not nilpotent".into()));
            }
            let mut mask = vec![false; n];
            for &g in &next {
                mask[g as usize] = true;
            }
            member.push(mask);
            current = next;
        }
        let step = member.len() - 1;
        let mut coset_key = Vec::with_capacity(step);
        let mut reps = Vec::with_capacity(step);
        let mut levels = Vec::with_capacity(step);
        for l in 1..=step {
            let sub: Vec<u64> = (0..n as u64).filter(|&g| member[l][g as usize]).collect();
            let mut key = vec![u32::MAX; n];
            let mut rs = Vec::new();
            for g in 0..n as u64 {
                if !member[l - 1][g as usize] || key[g as usize] != u32::MAX {
                    continue;
                }
                // g is the least element of its coset since we scan in order
                rs.push(g as u32);
                for &h in &sub {
                    key[self.mul(g, h) as usize] = g as u32;
                }
            }
            let quotient = self.quotient_type(&rs, &member[l])?;
            levels.push(Level { quotient, subgroup_size: sub.len() as u64 });
            coset_key.push(key);
            reps.push(rs);
        }
        self.levels = levels;
        self.table = Some(TableSeries { member, coset_key, reps });
        Ok(())
    }

    /// Isomorphism type of an Abelian quotient from its p-power torsion counts:
    /// `|Q[p^i]| / |Q[p^{i-1}]| = p^{#(parts ≥ i)}`.
    fn quotient_type(&self, reps: &[u32], sub_mask: &[bool]) -> Result<InvariantFactorGroup> {
        let q = reps.len() as u64;
        let mut factors = Vec::new();
        for (p, e) in factorize(q) {
            let mut prev_count = 1u64;
            let mut parts_at_least = Vec::new();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                let count = reps.iter().filter(|&&r| sub_mask[self.pow(r as u64, pk) as usize]).count() as u64;
                let ratio = count / prev_count;
                parts_at_least.push(ratio.trailing_zeros_base(p));
                prev_count = count;
            }
            // parts_at_least[i] = number of cyclic p-parts of exponent > i
            let num_parts = parts_at_least.first().copied().unwrap_or(0);
            for j in 0..num_parts {
                let exp = parts_at_least.iter().filter(|&&c| c > j).count() as u32;
                factors.push(p.pow(exp));
            }
        }
        let out = InvariantFactorGroup::from_factors(&factors)?;
        if out.size() != q {
            return Err(Error::InvalidInput("quotient is not Abelian of the expected order".into()));
        }
        Ok(out)
    }
}

trait LogBase {
    fn trailing_zeros_base(self, p: u64) -> u32;
}

impl LogBase for u64 {
    /// Exponent `e` with `self = p^e` (self is a power of p here).
    fn trailing_zeros_base(mut self, p: u64) -> u32 {
        let mut e = 0;
        while self > 1 && self % p == 0 {
            self /= p;
            e += 1;
        }
        e
    }
}

fn heis_decode(mut a: u64, m: u64, d: u32) -> Vec<u64> {
    let len = 2 * (d - 2) as usize + 1;
    let mut out = vec![0u64; len];
    for c in out.iter_mut() {
        *c = a % m;
        a /= m;
    }
    out
}

fn heis_encode(c: &[u64], m: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &x| acc * m + x)
}

/// Index of the Heisenberg element with coordinates `(x, y, z)`.
pub fn heisenberg_element(m: u64, x: &[u64], y: &[u64], z: u64) -> u64 {
    let mut c: Vec<u64> = x.iter().chain(y).map(|v| v % m).collect();
    c.push(z % m);
    heis_encode(&c, m)
}
