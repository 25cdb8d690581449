//! Equivariant test configurations given by initial-term degenerations,
//! their Futaki invariants and the resulting K-stability verdict.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector};
use crate::error::{Error, Result};
use crate::gauge::{normalize_direction, verify_normalized, NormalizedReeb};
use crate::index_character::build_index_character;
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "source", rename_all = "snake_case")]
pub enum Normality {
    /// A degeneration of one of the built-in families.
    KnownFamily(String),
    /// Normality asserted by the caller.
    Asserted(String),
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestConfiguration {
    /// Weights of the one-parameter subgroup on the ambient coordinates.
    pub w: Vec<i64>,
    pub central_fiber: ConeVariety,
    pub normality: Normality,
    /// The degeneration leaves `f` untouched, so `Y = X`.
    pub product: bool,
}

/// Monomials of minimal `w`-weight: those surviving in `lim_{t->0} lambda(t) X`.
pub fn initial_part(fsupport: &[Vec<u32>], w: &[i64]) -> Vec<Vec<u32>> {
    let weight = |e: &Vec<u32>| -> i64 { e.iter().zip(w).map(|(&k, &x)| i64::from(k) * x).sum() };
    let Some(min) = fsupport.iter().map(weight).min() else {
        return Vec::new();
    };
    fsupport.iter().filter(|e| weight(e) == min).cloned().collect()
}

pub fn make_test_configuration(x: &ConeVariety, w: &[i64], assume_normal: bool) -> Result<TestConfiguration> {
    if w.len() != x.ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "degeneration has {} weights, expected {}",
            w.len(),
            x.ambient_dim()
        )));
    }
    let support = initial_part(x.fsupport(), w);
    let product = support.len() == x.fsupport().len();
    let central_fiber = x.degenerate(w, support)?;
    let normality = match x.family() {
        Some(tag) if crate::families::make_family(tag.kind, tag.p, tag.q)?.degenerations.iter().any(|d| d == w) => {
            Normality::KnownFamily(format!("{tag} degeneration {w:?}"))
        }
        _ if product => Normality::KnownFamily("product configuration".into()),
        _ if assume_normal => Normality::Asserted("caller assertion".into()),
        _ => Normality::Unchecked,
    };
    Ok(TestConfiguration { w: w.to_vec(), central_fiber, normality, product })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

impl Sign {
    pub fn of(r: &Rational) -> Self {
        match r.cmp(&Rational::zero()) {
            Ordering::Greater => Sign::Positive,
            Ordering::Equal => Sign::Zero,
            Ordering::Less => Sign::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FutakiReport {
    pub w: Vec<i64>,
    #[serde(with = "crate::rational::serde_str")]
    pub fut: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub fut_via_volume: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub a0_y: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub a1_y: Rational,
    #[serde(with = "crate::rational::serde_vec")]
    pub w_normalized: Vec<Rational>,
    pub sign: Sign,
    pub product: bool,
    pub normality: Normality,
}

/// Futaki invariant of `tc` at the normalized field `xi` of `X`:
/// `a0/(n-1) D_w(a1/a0) + a1 D_w a0 / (n(n-1) a0)` on the central fiber,
/// cross-checked against `D_{w'} a0 / 2`.
pub fn futaki_invariant(tc: &TestConfiguration, xi: &NormalizedReeb) -> Result<FutakiReport> {
    let y = &tc.central_fiber;
    let extra = y.torus_rank() - xi.xi.coords().len();
    let xi_y = NormalizedReeb { xi: xi.xi.extended(extra), ..xi.clone() };
    if !y.reeb_cone_contains(&xi_y.xi) {
        return Err(Error::OutsideReebCone(format!("{} on the central fiber", xi.xi)));
    }
    verify_normalized(y, &xi_y.xi)?;

    let n = y.dim();
    let w: Vec<Rational> = tc.w.iter().map(|&x| int(x)).collect();
    let funs = build_index_character(y, &xi_y.xi, Some(&w))?.laurent_ratfuns()?;
    let (a0, da0) = funs.a0.eval_and_derivative_at_zero()?;
    let a1 = funs.a1.eval(&Rational::zero())?;
    let (_, dratio) = funs.ratio()?.eval_and_derivative_at_zero()?;
    let nn = int(n as i64);
    let fut = &a0 / (&nn - int(1)) * &dratio + &a1 * &da0 / (&nn * (&nn - int(1)) * &a0);

    let projected = normalize_direction(y, &xi_y, &w)?;
    let (_, da0_projected) = build_index_character(y, &xi_y.xi, Some(&projected.w))?
        .laurent_ratfuns()?
        .a0
        .eval_and_derivative_at_zero()?;
    let fut_via_volume = da0_projected / int(2);
    if fut != fut_via_volume {
        return Err(Error::FutakiMismatch {
            definition: fut.to_string(),
            via_volume: fut_via_volume.to_string(),
        });
    }
    Ok(FutakiReport {
        w: tc.w.clone(),
        sign: Sign::of(&fut),
        fut,
        fut_via_volume,
        a0_y: a0,
        a1_y: a1,
        w_normalized: projected.w,
        product: tc.product,
        normality: tc.normality.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Positive Futaki invariant for every non-product degeneration checked.
    Stable,
    Unstable { witness: Vec<i64> },
    /// A non-product degeneration with vanishing Futaki invariant.
    MarginallyDestabilized { witness: Vec<i64> },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stable => f.write_str("stable"),
            Verdict::Unstable { witness } => write!(f, "unstable (witness {witness:?})"),
            Verdict::MarginallyDestabilized { witness } => write!(f, "marginally destabilized (witness {witness:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub reports: Vec<FutakiReport>,
    /// The degenerations the verdict covers.
    pub scope: Vec<Vec<i64>>,
}

/// Verdict over the supplied degenerations at the volume minimizer `xi`.
///
/// `toric_directions` are slice-tangent fields (torus coordinates) along
/// which `D a_0` must vanish, up to `derivative_tol` (zero for an exact
/// minimizer).
pub fn k_stability_verdict(
    x: &ConeVariety,
    xi: &NormalizedReeb,
    tcs: &[TestConfiguration],
    toric_directions: &[ReebVector],
    derivative_tol: &Rational,
) -> Result<VerdictReport> {
    verify_normalized(x, &xi.xi)?;
    for d in toric_directions {
        let w = x.coordinate_weights(d);
        let (_, da0) = build_index_character(x, &xi.xi, Some(&w))?
            .laurent_ratfuns()?
            .a0
            .eval_and_derivative_at_zero()?;
        if da0.abs() > *derivative_tol {
            return Err(Error::NotMinimizer { direction: d.to_string(), derivative: da0.to_string() });
        }
    }
    let reports = tcs.iter().map(|tc| futaki_invariant(tc, xi)).collect::<Result<Vec<_>>>()?;
    let unstable = reports.iter().find(|r| match r.sign {
        Sign::Negative => true,
        Sign::Positive => r.product,
        Sign::Zero => false,
    });
    let marginal = reports.iter().find(|r| !r.product && r.sign == Sign::Zero);
    let verdict = match (unstable, marginal) {
        (Some(r), _) => Verdict::Unstable { witness: r.w.clone() },
        (None, Some(r)) => Verdict::MarginallyDestabilized { witness: r.w.clone() },
        (None, None) => Verdict::Stable,
    };
    Ok(VerdictReport { verdict, reports, scope: tcs.iter().map(|t| t.w.clone()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyInstance, FamilyKind};
    use crate::gauge::normalize_reeb;
    use crate::volume::volume;

    fn setup(kind: FamilyKind, p: i64, q: i64) -> (FamilyInstance, NormalizedReeb) {
        let fam = make_family(kind, p, q).unwrap();
        let xi = normalize_reeb(&fam.variety, &fam.reference_reeb()).unwrap();
        (fam, xi)
    }

    #[test]
    fn initial_parts() {
        let bp = vec![vec![1, 1, 0, 0], vec![0, 0, 3, 0], vec![0, 0, 0, 2]];
        assert_eq!(initial_part(&bp, &[0, 0, 1, 0]), vec![vec![1, 1, 0, 0], vec![0, 0, 0, 2]]);
        assert_eq!(initial_part(&bp, &[0, 0, 0, 0]), bp);
        let (p, q) = (5u32, 3u32);
        let yy2 = vec![vec![1, 1, 0, 0], vec![0, 0, p, 0], vec![0, 0, 1, q]];
        assert_eq!(
            initial_part(&yy2, &[0, 0, i64::from(q), -1]),
            vec![vec![1, 1, 0, 0], vec![0, 0, 1, q]]
        );
    }

    #[test]
    fn bp_first_degeneration_closed_form() {
        for (p, q) in [(3, 2), (5, 4), (4, 7), (6, 3)] {
            let (fam, xi) = setup(FamilyKind::BrieskornPham, p, q);
            let tc = make_test_configuration(&fam.variety, &[0, 0, 1, 0], false).unwrap();
            assert!(matches!(tc.normality, Normality::KnownFamily(_)));
            let r = futaki_invariant(&tc, &xi).unwrap();
            let a0 = volume(&fam.variety, &xi.xi).unwrap();
            assert_eq!(r.fut, a0 / int(2) * int(2 * q - p) / int(3 * q));
        }
    }

    #[test]
    fn trivial_and_euler_degenerations() {
        let (fam, xi) = setup(FamilyKind::YauYuII, 5, 4);
        let tc = make_test_configuration(&fam.variety, &[0, 0, 0, 0], false).unwrap();
        assert!(tc.product);
        assert!(futaki_invariant(&tc, &xi).unwrap().fut.is_zero());
        // the generator of the Reeb direction acts on X itself
        let tc = make_test_configuration(&fam.variety, &[20, 20, 8, 8], false).unwrap();
        assert!(tc.product);
        let r = futaki_invariant(&tc, &xi).unwrap();
        assert!(r.fut.is_zero());
    }

    #[test]
    fn yy2_destabilized() {
        let (fam, xi) = setup(FamilyKind::YauYuII, 6, 3);
        let tcs: Vec<_> = fam
            .degenerations
            .iter()
            .map(|w| make_test_configuration(&fam.variety, w, false).unwrap())
            .collect();
        let r2 = futaki_invariant(&tcs[1], &xi).unwrap();
        assert_eq!(r2.sign, Sign::Negative);
        let dirs = crate::volume::build_slice(&fam.variety).unwrap().directions;
        let v = k_stability_verdict(&fam.variety, &xi, &tcs, &dirs, &Rational::zero()).unwrap();
        assert_eq!(v.verdict, Verdict::Unstable { witness: vec![0, 0, 3, -1] });
    }

    #[test]
    fn scaling_the_degeneration() {
        let (fam, xi) = setup(FamilyKind::YauYuIII, 4, 5);
        let tc1 = make_test_configuration(&fam.variety, &[0, 0, -1, 4], false).unwrap();
        let tc3 = make_test_configuration(&fam.variety, &[0, 0, -3, 12], false).unwrap();
        let f1 = futaki_invariant(&tc1, &xi).unwrap().fut;
        let f3 = futaki_invariant(&tc3, &xi).unwrap().fut;
        assert_eq!(f3, f1 * int(3));
    }

    #[test]
    fn not_a_minimizer() {
        let fam = make_family(FamilyKind::BrieskornPham, 3, 4).unwrap();
        let xi = normalize_reeb(&fam.variety, &ReebVector::from_ints(&[13, 2])).unwrap();
        let dirs = crate::volume::build_slice(&fam.variety).unwrap().directions;
        assert!(matches!(
            k_stability_verdict(&fam.variety, &xi, &[], &dirs, &Rational::zero()),
            Err(Error::NotMinimizer { .. })
        ));
    }

    #[test]
    fn user_degenerations_flagged() {
        let (fam, _) = setup(FamilyKind::BrieskornPham, 3, 2);
        let tc = make_test_configuration(&fam.variety, &[0, 0, 2, 0], false).unwrap();
        assert_eq!(tc.normality, Normality::Unchecked);
        let tc = make_test_configuration(&fam.variety, &[0, 0, 2, 0], true).unwrap();
        assert!(matches!(tc.normality, Normality::Asserted(_)));
    }
}
