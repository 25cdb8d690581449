//! The Brieskorn–Pham and Yau–Yu type II/III threefold families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector, TorusWeights};
use crate::error::{Error, Result};
use crate::lattice::gcd;
use crate::rational::{int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `uv + z^p + w^q`
    #[serde(rename = "BP")]
    BrieskornPham,
    /// `uv + z^p + z w^q`
    #[serde(rename = "YY2")]
    YauYuII,
    /// `uv + z^p w + z w^q`
    #[serde(rename = "YY3")]
    YauYuIII,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::BrieskornPham, FamilyKind::YauYuII, FamilyKind::YauYuIII];

    pub fn short_name(self) -> &'static str {
        match self {
            FamilyKind::BrieskornPham => "BP",
            FamilyKind::YauYuII => "YY2",
            FamilyKind::YauYuIII => "YY3",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bp" | "brieskorn-pham" | "i" => Ok(FamilyKind::BrieskornPham),
            "yy2" | "ii" => Ok(FamilyKind::YauYuII),
            "yy3" | "iii" => Ok(FamilyKind::YauYuIII),
            _ => Err(Error::InvalidInput(format!("unknown family '{s}' (expected BP, YY2 or YY3)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyTag {
    pub kind: FamilyKind,
    pub p: i64,
    pub q: i64,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.kind, self.p, self.q)
    }
}

#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub tag: FamilyTag,
    pub variety: ConeVariety,
    /// The two equivariant degenerations, as weights on `(u, v, z, w)`.
    pub degenerations: [Vec<i64>; 2],
}

impl FamilyInstance {
    pub fn kind(&self) -> FamilyKind {
        self.tag.kind
    }

    /// Reeb field whose ambient weights are the unnormalized minimizer:
    /// `(pq, pq, 2q, 2p)`, `(pq, pq, 2q, 2(p-1))` and
    /// `(pq-1, pq-1, 2(q-1), 2(p-1))`.
    pub fn reference_reeb(&self) -> ReebVector {
        let FamilyTag { kind, p, q } = self.tag;
        match kind {
            FamilyKind::BrieskornPham => ReebVector::from_ints(&[p * q, 2 * gcd(p, q)]),
            FamilyKind::YauYuII => ReebVector::from_ints(&[p * q, 2]),
            FamilyKind::YauYuIII => ReebVector::from_ints(&[p * q - 1, 2]),
        }
    }

    pub fn link_topology(&self) -> i64 {
        link_topology(self.tag.kind, self.tag.p, self.tag.q)
    }

    pub fn expected_stable(&self) -> bool {
        expected_stable(self.tag.kind, self.tag.p, self.tag.q)
    }
}

pub fn validate_parameters(kind: FamilyKind, p: i64, q: i64) -> Result<()> {
    if p < 2 || q < 2 {
        return Err(Error::OutOfRange(format!("{kind}({p},{q}): need p, q >= 2")));
    }
    if kind == FamilyKind::BrieskornPham && p.max(q) <= 2 {
        return Err(Error::OutOfRange(format!("{kind}({p},{q}): need max(p, q) > 2")));
    }
    if p > 1_000 || q > 1_000 {
        return Err(Error::OutOfRange(format!("{kind}({p},{q}): parameters above 1000")));
    }
    Ok(())
}

pub fn make_family(kind: FamilyKind, p: i64, q: i64) -> Result<FamilyInstance> {
    validate_parameters(kind, p, q)?;
    let (pu, qu) = (p as u32, q as u32);
    let (e2, support, degenerations) = match kind {
        FamilyKind::BrieskornPham => {
            let m = gcd(p, q);
            (
                vec![0, p * q / m, q / m, p / m],
                vec![vec![1, 1, 0, 0], vec![0, 0, pu, 0], vec![0, 0, 0, qu]],
                [vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            )
        }
        FamilyKind::YauYuII => (
            vec![0, p * q, q, p - 1],
            vec![vec![1, 1, 0, 0], vec![0, 0, pu, 0], vec![0, 0, 1, qu]],
            [vec![0, 0, 0, 1], vec![0, 0, q, -1]],
        ),
        FamilyKind::YauYuIII => (
            vec![0, p * q - 1, q - 1, p - 1],
            vec![vec![1, 1, 0, 0], vec![0, 0, pu, 1], vec![0, 0, 1, qu]],
            [vec![0, 0, -1, p], vec![0, 0, q, -1]],
        ),
    };
    let weights = TorusWeights::new(vec![vec![1, -1, 0, 0], e2])?;
    let tag = FamilyTag { kind, p, q };
    let variety = ConeVariety::hypersurface(tag.to_string(), weights, support)?.with_family(tag);
    Ok(FamilyInstance { tag, variety, degenerations })
}

/// `m` with link diffeomorphic to `#m (S^2 x S^3)`; `m = 0` is `S^5`.
pub fn link_topology(kind: FamilyKind, p: i64, q: i64) -> i64 {
    match kind {
        FamilyKind::BrieskornPham => gcd(p, q) - 1,
        FamilyKind::YauYuII => gcd(p - 1, q),
        FamilyKind::YauYuIII => gcd(p - 1, q - 1) + 1,
    }
}

/// Closed-form stability conditions, used only for regression checks.
pub fn expected_stable(kind: FamilyKind, p: i64, q: i64) -> bool {
    match kind {
        FamilyKind::BrieskornPham => 2 * p > q && 2 * q > p,
        FamilyKind::YauYuII => 3 * (p - 1) > q + p - 1 && 2 * q * p + 1 > p * p + q,
        FamilyKind::YauYuIII => {
            3 * (p - 1) * (p - 1) * (q - 1) > (p + q - 2) * (p * q - 2 * p + 1)
                && 3 * (q - 1) * (q - 1) * (p - 1) > (p + q - 2) * (p * q - 2 * q + 1)
        }
    }
}

/// Closed-form minimal volume `a_0`, where one is known.
pub fn expected_volume(kind: FamilyKind, p: i64, q: i64) -> Option<Rational> {
    match kind {
        FamilyKind::BrieskornPham => {
            let s = int(p + q);
            Some(int(2) * &s * &s * &s / int(27 * p * p * q * q))
        }
        FamilyKind::YauYuII => {
            let s = int(p + q - 1);
            Some(int(2) * &s * &s * &s / int(27 * p * q * q * (p - 1)))
        }
        FamilyKind::YauYuIII => None,
    }
}

/// Closed-form scale taking the reference Reeb field to the normalized one.
pub fn expected_scale(kind: FamilyKind, p: i64, q: i64) -> Rational {
    match kind {
        FamilyKind::BrieskornPham => rat(3, 2 * (p + q)),
        FamilyKind::YauYuII => rat(3, 2 * (p + q - 1)),
        FamilyKind::YauYuIII => rat(3, 2 * (p + q - 2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_ranges() {
        assert!(matches!(
            make_family(FamilyKind::BrieskornPham, 2, 2),
            Err(Error::OutOfRange(_))
        ));
        assert!(make_family(FamilyKind::YauYuII, 2, 2).is_ok());
        assert!(make_family(FamilyKind::YauYuIII, 1, 4).is_err());
    }

    #[test]
    fn topology_values() {
        assert_eq!(link_topology(FamilyKind::BrieskornPham, 3, 2), 0);
        assert_eq!(link_topology(FamilyKind::YauYuIII, 3, 3), 3);
        for m in 1..5 {
            for p in 2..6 {
                assert_eq!(link_topology(FamilyKind::YauYuII, m * (p - 1) + 1, m * p), m);
            }
        }
    }

    #[test]
    fn expected_conditions() {
        assert!(expected_stable(FamilyKind::BrieskornPham, 3, 2));
        assert!(!expected_stable(FamilyKind::BrieskornPham, 6, 3));
        assert!(!expected_stable(FamilyKind::YauYuII, 6, 3));
    }

    #[test]
    fn parse_names() {
        assert_eq!("bp".parse::<FamilyKind>().unwrap(), FamilyKind::BrieskornPham);
        assert_eq!("YY3".parse::<FamilyKind>().unwrap(), FamilyKind::YauYuIII);
        assert!("x".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn supports_are_homogeneous() {
        for kind in FamilyKind::ALL {
            for (p, q) in [(3, 2), (4, 6), (5, 5), (2, 7)] {
                let f = make_family(kind, p, q).unwrap();
                let g = match kind {
                    FamilyKind::BrieskornPham => p * q / gcd(p, q),
                    FamilyKind::YauYuII => p * q,
                    FamilyKind::YauYuIII => p * q - 1,
                };
                assert_eq!(f.variety.fcharacter().unwrap().0, vec![0, g]);
            }
        }
    }
}
