//! Minimization of `a_0` over the normalized Reeb slice.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector};
use crate::error::{Error, Result};
use crate::gauge::verify_normalized;
use crate::index_character::build_index_character;
use crate::linalg::{nullspace, solve, RMatrix};
use crate::polyhedra::{find_feasible_point, primitive_integer, Inequality};
use crate::rational::{factorial, int, rat, round_to_bits, to_f64, Rational};
use crate::roots::{isolate_roots, Root};

/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 1_000;
/// Mantissa bits kept on Newton iterates.
pub const ITERATE_BITS: u32 = 192;
/// Default gradient-norm tolerance of the numeric solver.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// `{ base + sum_j u_j directions[j] }` intersected with the open Reeb cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicePolytope {
    pub base: ReebVector,
    pub directions: Vec<ReebVector>,
    /// Row `i`: `a_i(base) + sum_j coeffs[j] u_j > 0`.
    pub constraints: Vec<SliceConstraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceConstraint {
    #[serde(with = "crate::rational::serde_str")]
    pub constant: Rational,
    #[serde(with = "crate::rational::serde_vec")]
    pub coeffs: Vec<Rational>,
}

impl SlicePolytope {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn point(&self, u: &[Rational]) -> ReebVector {
        let mut xi = self.base.clone();
        for (d, c) in self.directions.iter().zip(u) {
            xi = xi.add(&d.scaled(c));
        }
        xi
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        self.constraints.iter().all(|c| {
            let v: Rational = &c.constant + c.coeffs.iter().zip(u).map(|(a, b)| a * b).sum::<Rational>();
            v.is_positive()
        })
    }

    /// Open parameter interval of a one-dimensional slice; `None` marks an
    /// unbounded side.
    pub fn interval(&self) -> Result<(Option<Rational>, Option<Rational>)> {
        if self.dim() != 1 {
            return Err(Error::SliceDimension { found: self.dim(), expected: 1 });
        }
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for c in &self.constraints {
            let g = &c.coeffs[0];
            if g.is_zero() {
                continue;
            }
            let bound = -&c.constant / g;
            if g.is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            }
        }
        Ok((lo, hi))
    }
}

/// The normalized slice `{ l(xi) = n }` of the Reeb cone.
pub fn build_slice(v: &ConeVariety) -> Result<SlicePolytope> {
    let r = v.torus_rank();
    let kappa: Vec<Rational> = v.canonical_character().0.iter().map(|&k| int(k)).collect();
    // W^T xi >= 1 and l(xi) >= 1
    let mut system: Vec<Inequality> = (0..v.ambient_dim())
        .map(|i| Inequality::new(v.weights().column(i).iter().map(|&c| int(-c)).collect(), int(-1)))
        .collect();
    system.push(Inequality::new(kappa.iter().map(|k| -k).collect(), int(-1)));
    let xi0 = find_feasible_point(&system, r).ok_or(Error::NoNormalizedSlice)?;
    let xi0 = ReebVector::new(xi0);
    let l0 = v.canonical_weight(&xi0);
    let base = xi0.scaled(&(int(v.dim() as i64) / l0));
    verify_normalized(v, &base)?;

    let directions: Vec<ReebVector> = nullspace(&[kappa], r)
        .iter()
        .map(|d| ReebVector::from_ints(&primitive_integer(d)))
        .collect();
    let a0 = v.coordinate_weights(&base);
    let dirs: Vec<Vec<Rational>> = directions.iter().map(|d| v.coordinate_weights(d)).collect();
    let constraints = (0..v.ambient_dim())
        .map(|i| SliceConstraint {
            constant: a0[i].clone(),
            coeffs: dirs.iter().map(|d| d[i].clone()).collect(),
        })
        .collect();
    Ok(SlicePolytope { base, directions, constraints })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    /// Irrational critical point inside `(lo, hi)` in the slice parameter.
    Isolated {
        #[serde(with = "crate::rational::serde_str")]
        lo: Rational,
        #[serde(with = "crate::rational::serde_str")]
        hi: Rational,
    },
    Numeric { gradient_norm: f64, iterations: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub xi_star: ReebVector,
    #[serde(with = "crate::rational::serde_vec")]
    pub parameters: Vec<Rational>,
    pub exactness: Exactness,
    /// `a_0(xi_star)`; approximate unless `exactness` is `Exact`.
    #[serde(with = "crate::rational::serde_str")]
    pub volume: Rational,
}

impl Minimizer {
    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }
}

/// `a_0(xi)`.
pub fn volume(v: &ConeVariety, xi: &ReebVector) -> Result<Rational> {
    build_index_character(v, xi, None)?.leading_coefficient()
}

/// Exact minimization on a one-dimensional slice: the critical points of
/// `a_0(s)` are the real roots of `num' den - num den'`.
pub fn minimize_volume_exact_1d(v: &ConeVariety, slice: &SlicePolytope) -> Result<Minimizer> {
    let (lo, hi) = slice.interval()?;
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::UnboundedSlice(format!("slice of {} is unbounded", v.name)));
    };
    let w = v.coordinate_weights(&slice.directions[0]);
    let a0 = build_index_character(v, &slice.base, Some(&w))?.laurent_ratfuns()?.a0;
    let critical = &(&a0.num().derivative() * a0.den()) - &(a0.num() * &a0.den().derivative());
    let roots = isolate_roots(&critical, &lo, &hi, &rat(1, 1_000_000_000_000));

    let mut best: Option<(Rational, Root)> = None;
    for root in roots {
        let value = a0.eval(&root.midpoint())?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, root));
        }
    }
    let (_, root) = best.ok_or(Error::BoundaryMinimum)?;
    let (u, exactness) = match root {
        Root::Exact(r) => (r, Exactness::Exact),
        Root::Interval { lo, hi } => ((&lo + &hi) / int(2), Exactness::Isolated { lo, hi }),
    };
    let xi_star = slice.point(std::slice::from_ref(&u));
    let volume = volume(v, &xi_star)?;
    Ok(Minimizer { xi_star, parameters: vec![u], exactness, volume })
}

/// `a_0`, its gradient and Hessian in slice parameters at `u`.
pub fn a0_derivatives(v: &ConeVariety, slice: &SlicePolytope, u: &[Rational]) -> Result<(Rational, Vec<Rational>, RMatrix)> {
    let xi = slice.point(u);
    if !v.reeb_cone_contains(&xi) {
        return Err(Error::OutsideReebCone(xi.to_string()));
    }
    let k = slice.dim();
    let m = v.coordinate_weights(&xi);
    let dirs: Vec<Vec<Rational>> = slice.directions.iter().map(|d| v.coordinate_weights(d)).collect();
    // numerator forms: the degree, when present
    let l: Vec<Rational> = v.degree(&xi).into_iter().collect();
    let e: Vec<Vec<Rational>> = match v.degree(&xi) {
        Some(_) => vec![slice.directions.iter().map(|d| v.degree(d).unwrap()).collect()],
        None => vec![],
    };
    let n = v.dim() as u64;
    let a0 = l.iter().product::<Rational>() / m.iter().product::<Rational>() / factorial(n - 1);

    let g: Vec<Rational> = (0..k)
        .map(|j| {
            let plus: Rational = l.iter().zip(&e).map(|(lv, ev)| &ev[j] / lv).sum();
            let minus: Rational = m.iter().enumerate().map(|(i, mi)| &dirs[j][i] / mi).sum();
            plus - minus
        })
        .collect();
    let grad = g.iter().map(|x| &a0 * x).collect();
    let hess = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let mut h = &g[a] * &g[b];
                    for (lv, ev) in l.iter().zip(&e) {
                        h -= &ev[a] * &ev[b] / (lv * lv);
                    }
                    for (i, mi) in m.iter().enumerate() {
                        h += &dirs[a][i] * &dirs[b][i] / (mi * mi);
                    }
                    &a0 * h
                })
                .collect()
        })
        .collect();
    Ok((a0, grad, hess))
}

fn norm(v: &[Rational]) -> f64 {
    v.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt()
}

/// Damped Newton iteration from the slice base point.
pub fn minimize_volume_numeric(v: &ConeVariety, slice: &SlicePolytope, tol: f64) -> Result<Minimizer> {
    minimize_volume_numeric_from(v, slice, &vec![Rational::zero(); slice.dim()], tol)
}

/// Damped Newton iteration from the slice parameters `start`.
pub fn minimize_volume_numeric_from(
    v: &ConeVariety,
    slice: &SlicePolytope,
    start: &[Rational],
    tol: f64,
) -> Result<Minimizer> {
    if slice.dim() == 0 {
        let volume = volume(v, &slice.base)?;
        return Ok(Minimizer {
            xi_star: slice.base.clone(),
            parameters: vec![],
            exactness: Exactness::Exact,
            volume,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    if !slice.contains(start) {
        return Err(Error::OutsideReebCone(format!("start point {}", slice.point(start))));
    }
    let mut u: Vec<Rational> = start.to_vec();
    let mut last_norm = f64::INFINITY;
    for iteration in 0..MAX_ITERATIONS {
        let (a0, grad, hess) = a0_derivatives(v, slice, &u)?;
        last_norm = norm(&grad);
        if last_norm < tol {
            return Ok(Minimizer {
                xi_star: slice.point(&u),
                parameters: u,
                exactness: Exactness::Numeric { gradient_norm: last_norm, iterations: iteration },
                volume: a0,
            });
        }
        let neg: Vec<Rational> = grad.iter().map(|x| -x).collect();
        let mut step = solve(&hess, &neg).unwrap_or_else(|| neg.clone());
        let mut slope: Rational = grad.iter().zip(&step).map(|(a, b)| a * b).sum();
        if !slope.is_negative() {
            step = neg.clone();
            slope = grad.iter().zip(&step).map(|(a, b)| a * b).sum();
        }
        let mut t = int(1);
        let mut accepted = None;
        for _ in 0..200 {
            let cand: Vec<Rational> = u
                .iter()
                .zip(&step)
                .map(|(x, d)| round_to_bits(&(x + &t * d), ITERATE_BITS))
                .collect();
            if slice.contains(&cand) {
                let value = volume(v, &slice.point(&cand))?;
                if value <= &a0 + rat(1, 10_000) * &t * &slope {
                    accepted = Some(cand);
                    break;
                }
            }
            t /= int(2);
        }
        match accepted {
            Some(c) => u = c,
            None => break,
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        gradient_norm: last_norm,
        last: slice.point(&u).coords().iter().map(ToString::to_string).collect(),
    })
}

/// Exact solver for one-dimensional slices, Newton otherwise.
pub fn minimize_volume(v: &ConeVariety, slice: &SlicePolytope, tol: f64) -> Result<Minimizer> {
    match slice.dim() {
        1 => minimize_volume_exact_1d(v, slice),
        _ => minimize_volume_numeric(v, slice, tol),
    }
}
