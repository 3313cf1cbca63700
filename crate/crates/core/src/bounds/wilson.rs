//! Exhaustive check that `Z_2^d` maximises `t_*(k, G)` over Abelian groups with `|G| ≤ 2^d`.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropic::t_star;
use crate::error::{Error, Result};
use crate::groups::InvariantFactorGroup;
use crate::lattice_walk::WalkKind;

pub const WILSON_MAX_D: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilsonRow {
    pub group: String,
    pub size: u64,
    /// `None` when some `t_0(γ, |G/γG|)` saturates.
    pub t_star: Option<f64>,
    pub argmax: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilsonScan {
    pub d: u32,
    pub k: usize,
    pub rows: Vec<WilsonRow>,
    pub max_group: Option<String>,
    pub max_t: Option<f64>,
    pub z2d_t: Option<f64>,
    /// `Some(true)` when no group beats `Z_2^d` (relative slack 1e-9); `None` if `Z_2^d` saturates.
    pub dominance: Option<bool>,
    pub obstruction: Option<String>,
}

fn row(g: &InvariantFactorGroup, k: usize) -> Result<WilsonRow> {
    let (t, arg) = match t_star(k, g, WalkKind::Srw) {
        Ok(tab) if tab.saturated.is_empty() => (Some(tab.t_star), Some(tab.argmax)),
        Ok(_) | Err(Error::Saturated { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(WilsonRow { group: g.to_string(), size: g.size(), t_star: t, argmax: arg })
}

pub fn wilson_scan(d: u32, k: usize) -> Result<WilsonScan> {
    if d == 0 || d > WILSON_MAX_D {
        return Err(Error::InvalidInput(format!("wilson scan needs 1 <= d <= {WILSON_MAX_D} (got {d})")));
    }
    let groups: Vec<InvariantFactorGroup> = (2..=1u64 << d).flat_map(InvariantFactorGroup::all_of_order).collect();
    let rows: Vec<WilsonRow> = groups.par_iter().map(|g| row(g, k)).collect::<Result<_>>()?;
    let z2d = InvariantFactorGroup::power(2, d as usize)?.to_string();
    let z2d_t = rows.iter().find(|r| r.group == z2d).and_then(|r| r.t_star);
    let best = rows
        .iter()
        .filter_map(|r| r.t_star.map(|t| (t, r)))
        .fold(None::<(f64, &WilsonRow)>, |b, x| match b {
            Some(b) if b.0 >= x.0 => Some(b),
            _ => Some(x),
        });
    let (dominance, obstruction) = match z2d_t {
        None => (None, Some(format!("{z2d} saturates at k = {k}: k·log 2 <= log |G|"))),
        Some(t) => {
            let others_saturate = rows.iter().any(|r| r.t_star.is_none());
            let beaten = rows.iter().filter_map(|r| r.t_star).any(|x| x > t * (1.0 + 1e-9));
            (Some(!beaten && !others_saturate), None)
        }
    };
    Ok(WilsonScan {
        d,
        k,
        max_group: best.map(|b| b.1.group.clone()),
        max_t: best.map(|b| b.0),
        z2d_t,
        dominance,
        obstruction,
        rows,
    })
}

/// `t_*(k, Z_2^d)` for `d = 1..=d_max`.
pub fn z2_power_times(k: usize, d_max: u32) -> Result<Vec<(u32, f64)>> {
    (1..=d_max)
        .map(|d| Ok((d, t_star(k, &InvariantFactorGroup::power(2, d as usize)?, WalkKind::Srw)?.t_star)))
        .collect()
}
