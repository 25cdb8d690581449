//! Polarized affine hypersurface cones with a diagonal torus action.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyTag;
use crate::polyhedra::{find_feasible_point, Inequality};
use crate::rational::{int, Rational};

/// Upper limit on monomials visited by [`ConeVariety::hilbert_count_bruteforce`].
pub const HILBERT_POINT_LIMIT: usize = 10_000;

/// `r x N` integer matrix; column `i` is the multi-weight of coordinate `z_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusWeights {
    rows: Vec<Vec<i64>>,
}

impl TorusWeights {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidInput("torus weight matrix needs at least one row".into()));
        };
        let n = first.len();
        if n < 2 {
            return Err(Error::InvalidInput("need at least two coordinates".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("weight rows have different lengths".into()));
        }
        Ok(TorusWeights { rows })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn column(&self, i: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// The torus enlarged by one extra one-parameter subgroup.
    pub fn with_row(&self, w: &[i64]) -> Self {
        let mut rows = self.rows.clone();
        rows.push(w.to_vec());
        TorusWeights { rows }
    }

    /// `W^T t`: the diagonal action on `C^N` of a Lie algebra element `t`.
    pub fn ambient(&self, t: &[Rational]) -> Vec<Rational> {
        assert_eq!(t.len(), self.rank(), "Lie algebra element has wrong length");
        (0..self.ambient_dim())
            .map(|i| {
                self.rows
                    .iter()
                    .zip(t)
                    .map(|(row, c)| c * int(row[i]))
                    .sum()
            })
            .collect()
    }
}

/// Element of the torus Lie algebra, in the coordinates of a [`TorusWeights`] basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebVector(#[serde(with = "crate::rational::serde_vec")] pub Vec<Rational>);

impl ReebVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        ReebVector(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        ReebVector(coords.iter().map(|&x| int(x)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        ReebVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &ReebVector) -> Self {
        ReebVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// Appends zero coordinates for extra torus directions.
    pub fn extended(&self, extra: usize) -> Self {
        let mut c = self.0.clone();
        c.extend(std::iter::repeat_n(Rational::zero(), extra));
        ReebVector(c)
    }
}

impl fmt::Display for ReebVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Element of the weight lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn pair(&self, xi: &ReebVector) -> Rational {
        self.0.iter().zip(xi.coords()).map(|(&c, x)| x * int(c)).sum()
    }
}

/// Hypersurface `{f = 0}` in `C^N` (or `C^N` itself when `f` is absent),
/// recorded through the monomial support of `f`; coefficients are generic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeVariety {
    pub name: String,
    pub variables: Vec<String>,
    weights: TorusWeights,
    fsupport: Vec<Vec<u32>>,
    fcharacter: Option<Character>,
    gorenstein_index: u32,
    family: Option<FamilyTag>,
}

fn default_variables(n: usize) -> Vec<String> {
    match n {
        4 => ["u", "v", "z", "w"].iter().map(|s| s.to_string()).collect(),
        _ => (1..=n).map(|i| format!("z{i}")).collect(),
    }
}

impl ConeVariety {
    pub fn hypersurface(
        name: impl Into<String>,
        weights: TorusWeights,
        fsupport: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n = weights.ambient_dim();
        if fsupport.is_empty() {
            return Err(Error::InvalidInput("hypersurface needs at least one monomial".into()));
        }
        if let Some(bad) = fsupport.iter().find(|e| e.len() != n) {
            return Err(Error::InvalidInput(format!("exponent vector {bad:?} has wrong length")));
        }
        let fcharacter = Some(support_character(&weights, &fsupport)?);
        Ok(ConeVariety {
            name: name.into(),
            variables: default_variables(n),
            weights,
            fsupport,
            fcharacter,
            gorenstein_index: 1,
            family: None,
        })
    }

    pub fn affine_space(name: impl Into<String>, weights: TorusWeights) -> Self {
        let n = weights.ambient_dim();
        ConeVariety {
            name: name.into(),
            variables: default_variables(n),
            weights,
            fsupport: Vec::new(),
            fcharacter: None,
            gorenstein_index: 1,
            family: None,
        }
    }

    pub fn with_variables(mut self, variables: Vec<String>) -> Result<Self> {
        if variables.len() != self.ambient_dim() {
            return Err(Error::InvalidInput(format!(
                "{} variable names for {} coordinates",
                variables.len(),
                self.ambient_dim()
            )));
        }
        self.variables = variables;
        Ok(self)
    }

    pub(crate) fn with_family(mut self, tag: FamilyTag) -> Self {
        self.family = Some(tag);
        self
    }

    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }

    pub fn weights(&self) -> &TorusWeights {
        &self.weights
    }

    pub fn fsupport(&self) -> &[Vec<u32>] {
        &self.fsupport
    }

    pub fn is_hypersurface(&self) -> bool {
        !self.fsupport.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.weights.ambient_dim()
    }

    pub fn torus_rank(&self) -> usize {
        self.weights.rank()
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        if self.is_hypersurface() {
            self.ambient_dim() - 1
        } else {
            self.ambient_dim()
        }
    }

    pub fn gorenstein_index(&self) -> u32 {
        self.gorenstein_index
    }

    /// Central fiber of a degeneration: new support, torus enlarged by `w`.
    pub(crate) fn degenerate(&self, w: &[i64], support: Vec<Vec<u32>>) -> Result<Self> {
        let weights = self.weights.with_row(w);
        let mut y = if support.is_empty() {
            ConeVariety::affine_space(format!("{} (central fiber)", self.name), weights)
        } else {
            ConeVariety::hypersurface(format!("{} (central fiber)", self.name), weights, support)?
        };
        y.variables = self.variables.clone();
        Ok(y)
    }

    /// `(a_1, ..., a_N) = W^T xi`.
    pub fn coordinate_weights(&self, xi: &ReebVector) -> Vec<Rational> {
        self.weights.ambient(xi.coords())
    }

    /// Every coordinate weight strictly positive.
    pub fn reeb_cone_contains(&self, xi: &ReebVector) -> bool {
        self.coordinate_weights(xi).iter().all(Signed::is_positive)
    }

    /// The common character of the monomials of `f`.
    pub fn fcharacter(&self) -> Option<&Character> {
        self.fcharacter.as_ref()
    }

    /// `d(xi) = <chi_f, xi>`; `None` for an affine space.
    pub fn degree(&self, xi: &ReebVector) -> Option<Rational> {
        self.fcharacter.as_ref().map(|c| c.pair(xi))
    }

    /// Character of the equivariant volume form: sum of columns minus `chi_f`.
    pub fn canonical_character(&self) -> Character {
        let mut k: Vec<i64> = (0..self.torus_rank())
            .map(|row| self.weights.rows[row].iter().sum())
            .collect();
        if let Some(c) = &self.fcharacter {
            for (x, y) in k.iter_mut().zip(&c.0) {
                *x -= y;
            }
        }
        Character(k)
    }

    /// `l(xi) = sum a_i(xi) - d(xi)`.
    pub fn canonical_weight(&self, xi: &ReebVector) -> Rational {
        self.canonical_character().pair(xi)
    }

    /// Some Reeb field in the open cone, or `None` when the cone is empty.
    pub fn find_interior_reeb(&self) -> Option<ReebVector> {
        // W^T xi >= 1 componentwise
        let r = self.torus_rank();
        let system: Vec<Inequality> = (0..self.ambient_dim())
            .map(|i| {
                let col = self.weights.column(i);
                Inequality::new(col.iter().map(|&c| int(-c)).collect(), int(-1))
            })
            .collect();
        find_feasible_point(&system, r).map(ReebVector)
    }

    /// Dimensions of the graded pieces of the coordinate ring by lattice
    /// enumeration, for integer weights: `#monomials(w) - #monomials(w - d)`.
    pub fn hilbert_count_bruteforce(&self, xi: &ReebVector, cutoff: u64) -> Result<BTreeMap<u64, u64>> {
        let weights: Vec<u64> = self
            .coordinate_weights(xi)
            .iter()
            .map(|a| {
                if a.is_integer() && a.is_positive() {
                    a.to_integer().to_u64().ok_or_else(|| Error::NonIntegralWeights(a.to_string()))
                } else {
                    Err(Error::NonIntegralWeights(a.to_string()))
                }
            })
            .collect::<Result<_>>()?;
        let degree = match self.degree(xi) {
            None => None,
            Some(d) if d.is_integer() && d.is_positive() => d.to_integer().to_u64(),
            Some(d) => return Err(Error::NonIntegralWeights(format!("degree {d}"))),
        };

        let mut ambient = vec![0u64; cutoff as usize + 1];
        let mut visited = 0usize;
        enumerate_monomials(&weights, 0, 0, cutoff, &mut ambient, &mut visited)?;

        Ok((0..=cutoff)
            .map(|w| {
                let below = match degree {
                    Some(d) if w >= d => ambient[(w - d) as usize],
                    _ => 0,
                };
                (w, ambient[w as usize] - below)
            })
            .collect())
    }
}

fn enumerate_monomials(
    weights: &[u64],
    idx: usize,
    acc: u64,
    cutoff: u64,
    counts: &mut [u64],
    visited: &mut usize,
) -> Result<()> {
    if idx == weights.len() {
        *visited += 1;
        if *visited > HILBERT_POINT_LIMIT {
            return Err(Error::LatticeTooLarge { limit: HILBERT_POINT_LIMIT });
        }
        counts[acc as usize] += 1;
        return Ok(());
    }
    let mut w = acc;
    while w <= cutoff {
        enumerate_monomials(weights, idx + 1, w, cutoff, counts, visited)?;
        w += weights[idx];
    }
    Ok(())
}

fn support_character(weights: &TorusWeights, support: &[Vec<u32>]) -> Result<Character> {
    let chars: Vec<Vec<i64>> = support
        .iter()
        .map(|e| {
            weights
                .rows()
                .iter()
                .map(|row| row.iter().zip(e).map(|(&w, &x)| w * i64::from(x)).sum())
                .collect()
        })
        .collect();
    if let Some(bad) = chars.iter().position(|c| c != &chars[0]) {
        return Err(Error::NotSemiInvariant(format!(
            "monomial {:?} has character {:?}, monomial {:?} has {:?}",
            support[0], chars[0], support[bad], chars[bad]
        )));
    }
    Ok(Character(chars[0].clone()))
}
