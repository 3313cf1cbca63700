//! Text descriptors such as `abelian:2,12` and `heisenberg:m=3,d=4`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::abelian::InvariantFactorGroup;
use super::nilpotent::NilpotentPresentation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupDescriptor {
    Abelian(Vec<u64>),
    Heisenberg { m: u64, d: u32 },
}

impl GroupDescriptor {
    pub fn abelian(&self) -> Result<InvariantFactorGroup> {
        match self {
            GroupDescriptor::Abelian(ms) => InvariantFactorGroup::from_factors(ms),
            GroupDescriptor::Heisenberg { .. } => Err(Error::NonAbelian),
        }
    }

    pub fn nilpotent(&self) -> Result<NilpotentPresentation> {
        match self {
            GroupDescriptor::Abelian(ms) => Ok(NilpotentPresentation::from_abelian(InvariantFactorGroup::from_factors(ms)?)),
            GroupDescriptor::Heisenberg { m, d } => NilpotentPresentation::heisenberg(*m, *d),
        }
    }
}

impl From<&InvariantFactorGroup> for GroupDescriptor {
    fn from(g: &InvariantFactorGroup) -> Self {
        GroupDescriptor::Abelian(g.factors().to_vec())
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("group descriptor `{s}`: {why}"));
        let (kind, body) = s.trim().split_once(':').ok_or_else(|| bad("missing `kind:`"))?;
        match kind.trim() {
            "abelian" => {
                let body = body.trim();
                if body.is_empty() {
                    return Ok(GroupDescriptor::Abelian(Vec::new()));
                }
                let ms = body
                    .split(',')
                    .map(|t| t.trim().parse::<u64>().map_err(|_| bad("factors must be positive integers")))
                    .collect::<Result<Vec<_>>>()?;
                if ms.contains(&0) {
                    return Err(bad("factors must be positive integers"));
                }
                Ok(GroupDescriptor::Abelian(ms))
            }
            "heisenberg" => {
                let (mut m, mut d) = (None, None);
                for kv in body.split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected m=..,d=.."))?;
                    match k.trim() {
                        "m" => m = Some(v.trim().parse::<u64>().map_err(|_| bad("bad m"))?),
                        "d" => d = Some(v.trim().parse::<u32>().map_err(|_| bad("bad d"))?),
                        other => return Err(bad(&format!("unknown key `{other}`"))),
                    }
                }
                match (m, d) {
                    (Some(m), Some(d)) if m >= 2 && d >= 3 => Ok(GroupDescriptor::Heisenberg { m, d }),
                    (Some(_), Some(_)) => Err(bad("need m >= 2 and d >= 3")),
                    _ => Err(bad("need both m and d")),
                }
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Abelian(ms) => {
                let parts: Vec<String> = ms.iter().map(u64::to_string).collect();
                write!(f, "abelian:{}", parts.join(","))
            }
            GroupDescriptor::Heisenberg { m, d } => write!(f, "heisenberg:m={m},d={d}"),
        }
    }
}

impl TryFrom<String> for GroupDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupDescriptor> for String {
    fn from(d: GroupDescriptor) -> Self {
        d.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let a: GroupDescriptor = "abelian:2,12".parse().unwrap();
        assert_eq!(a, GroupDescriptor::Abelian(vec![2, 12]));
        assert_eq!(a.to_string(), "abelian:2,12");
        let h: GroupDescriptor = "heisenberg:m=3,d=4".parse().unwrap();
        assert_eq!(h, GroupDescriptor::Heisenberg { m: 3, d: 4 });
        assert_eq!(h.to_string(), "heisenberg:m=3,d=4");
        assert_eq!(h.nilpotent().unwrap().size(), 243);
        assert!(matches!(h.abelian(), Err(Error::NonAbelian)));
        let t: GroupDescriptor = "abelian:".parse().unwrap();
        assert!(t.abelian().unwrap().is_trivial());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abelian", "abelian:0", "abelian:x", "heisenberg:m=1,d=3", "heisenberg:m=3", "cyclic:5"] {
            assert!(s.parse::<GroupDescriptor>().is_err(), "{s}");
        }
    }
}
