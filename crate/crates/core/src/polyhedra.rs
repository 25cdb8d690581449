//! Exact polyhedral computations at small sizes: Fourier–Motzkin elimination
//! with witness recovery, extreme rays of pointed cones, basic-solution vertex
//! enumeration and redundancy pruning.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, mat_vec, nullspace, rank, solve, RMatrix};
use crate::rational::{int, Rational};

/// One inequality `coeffs . x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coeffs, rhs }
    }

    fn scaled(&self, f: &Rational) -> Self {
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
            rhs: &self.rhs * f,
        }
    }

    fn plus(&self, o: &Inequality) -> Self {
        Inequality {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
            rhs: &self.rhs + &o.rhs,
        }
    }

    /// Scales so the first nonzero coefficient has absolute value 1.
    fn normalized(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) => self.scaled(&c.abs().recip()),
            None => self.clone(),
        }
    }
}

/// Finds a point of `{x in Q^dim : A x <= b}` or proves the system infeasible.
pub fn find_feasible_point(system: &[Inequality], dim: usize) -> Option<Vec<Rational>> {
    // stages[k] involves only x_0..x_{k-1}
    let mut stages: Vec<Vec<Inequality>> = vec![Vec::new(); dim + 1];
    let mut current: BTreeSet<Inequality> = system.iter().map(Inequality::normalized).collect();
    for k in (0..dim).rev() {
        stages[k + 1] = current.iter().cloned().collect();
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), BTreeSet::new());
        for row in &current {
            let c = &row.coeffs[k];
            if c.is_positive() {
                pos.push(row.scaled(&c.recip()));
            } else if c.is_negative() {
                neg.push(row.scaled(&(-c).recip()));
            } else {
                next.insert(row.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                let mut combined = p.plus(n);
                combined.coeffs[k] = Rational::zero();
                next.insert(combined.normalized());
            }
        }
        current = next;
    }
    if current.iter().any(|row| row.rhs.is_negative()) {
        return None;
    }
    let mut x: Vec<Rational> = Vec::with_capacity(dim);
    for k in 0..dim {
        let (mut lower, mut upper): (Option<Rational>, Option<Rational>) = (None, None);
        for row in &stages[k + 1] {
            let c = &row.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let rest: Rational = row.coeffs[..k].iter().zip(&x).map(|(a, b)| a * b).sum();
            let bound = (&row.rhs - rest) / c;
            if c.is_positive() {
                upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
            } else {
                lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
            }
        }
        let v = match (lower, upper) {
            (Some(l), Some(u)) => (l + u) / int(2),
            (Some(l), None) => l + Rational::one(),
            (None, Some(u)) => u - Rational::one(),
            (None, None) => Rational::zero(),
        };
        x.push(v);
    }
    Some(x)
}

/// Scales a rational vector to a primitive integer vector.
pub fn primitive_integer(v: &[Rational]) -> Vec<i64> {
    let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.iter()
        .map(|c| {
            let q = if g.is_zero() { c.clone() } else { c / &g };
            q.to_i64().expect("ray coordinate overflows i64")
        })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Rational polyhedral cone given by primitive integer generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCone {
    pub rays: Vec<Vec<i64>>,
}

impl RationalCone {
    /// Extreme rays of the pointed cone `{y : A y >= 0}`.
    pub fn from_inequalities(a: &[Vec<Rational>], dim: usize) -> Result<Self> {
        if rank(a) < dim {
            return Err(Error::ConeNotPointed);
        }
        let mut rays = BTreeSet::new();
        for rows in subsets(a.len(), dim - 1) {
            let sub: RMatrix = rows.iter().map(|&i| a[i].clone()).collect();
            let ns = nullspace(&sub, dim);
            if ns.len() != 1 {
                continue;
            }
            for sign in [1, -1] {
                let v: Vec<Rational> = ns[0].iter().map(|x| x * int(sign)).collect();
                if mat_vec(a, &v).iter().all(|x| !x.is_negative()) {
                    rays.insert(primitive_integer(&v));
                }
            }
        }
        Ok(RationalCone { rays: rays.into_iter().collect() })
    }

    pub fn dim(&self) -> usize {
        self.rays.first().map_or(0, Vec::len)
    }

    pub fn rational_rays(&self) -> Vec<Vec<Rational>> {
        self.rays
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    /// The dual cone `{w : <w, r> >= 0 for every ray r}`.
    pub fn dual(&self) -> Result<Self> {
        RationalCone::from_inequalities(&self.rational_rays(), self.dim())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        in_polyhedron(v, &[vec![Rational::zero(); v.len()]], &self.rational_rays())
    }
}

/// Tests `v in conv(points) + cone(rays)` by Fourier–Motzkin.
pub fn in_polyhedron(v: &[Rational], points: &[Vec<Rational>], rays: &[Vec<Rational>]) -> bool {
    if points.is_empty() {
        return false;
    }
    let (np, nr) = (points.len(), rays.len());
    let dim = np + nr;
    let mut sys = Vec::new();
    // sum_i l_i p_i + sum_j m_j r_j = v
    for c in 0..v.len() {
        let row: Vec<Rational> = points
            .iter()
            .map(|p| p[c].clone())
            .chain(rays.iter().map(|r| r[c].clone()))
            .collect();
        sys.push(Inequality::new(row.clone(), v[c].clone()));
        sys.push(Inequality::new(row.iter().map(|x| -x).collect(), -v[c].clone()));
    }
    let mut ones = vec![Rational::zero(); dim];
    for x in ones.iter_mut().take(np) {
        *x = Rational::one();
    }
    sys.push(Inequality::new(ones.clone(), Rational::one()));
    sys.push(Inequality::new(ones.iter().map(|x| -x).collect(), -Rational::one()));
    for i in 0..dim {
        let mut row = vec![Rational::zero(); dim];
        row[i] = -Rational::one();
        sys.push(Inequality::new(row, Rational::zero()));
    }
    find_feasible_point(&sys, dim).is_some()
}

/// Vertices of `{x >= 0 : P x = rhs}` (basic feasible solutions).
pub fn fiber_vertices(p: &[Vec<Rational>], rhs: &[Rational], n: usize) -> Vec<Vec<Rational>> {
    let k = p.len();
    let mut out = BTreeSet::new();
    for basis in subsets(n, k) {
        let sub: RMatrix = p
            .iter()
            .map(|row| basis.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let Some(xb) = solve(&sub, rhs) else {
            continue;
        };
        if xb.iter().any(Signed::is_negative) {
            continue;
        }
        let mut x = vec![Rational::zero(); n];
        for (&j, v) in basis.iter().zip(xb) {
            x[j] = v;
        }
        out.insert(x);
    }
    out.into_iter().collect()
}

/// Drops the points that are not vertices of `conv(points) + cone(rays)`.
pub fn prune_to_vertices(points: Vec<Vec<Rational>>, rays: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut pts: Vec<Vec<Rational>> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut i = 0;
    while i < pts.len() {
        let others: Vec<Vec<Rational>> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if in_polyhedron(&pts[i], &others, rays) {
            pts.remove(i);
        } else {
            i += 1;
        }
    }
    pts
}

/// Minimum of `<w, u>` over the given points.
pub fn min_pairing(w: &[Rational], points: &[Vec<Rational>]) -> Option<Rational> {
    points.iter().map(|u| dot(w, u)).min()
}
