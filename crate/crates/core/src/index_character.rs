//! The index character `F(xi, t) = sum_chi e^{-t <chi, xi>} dim R_chi` of a
//! hypersurface cone in product form, its Laurent coefficients `a_0`, `a_1`,
//! and their dependence on a deformation `xi + s w`.
//!
//! Convention: `F = a_0 (n-1)! / t^n + a_1 (n-2)! / t^(n-1) + O(t^(2-n))`.

use std::collections::BTreeMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector};
use crate::error::{Error, Result};
use crate::rational::{factorial, int, Rational};
use crate::series::{exp_series, one_minus_exp_over_arg, one_minus_exp_series, Poly, RatFun, Series};

/// Extra series terms carried beyond the two that are extracted.
const GUARD_TERMS: usize = 2;

/// `constant + slope * s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineForm {
    #[serde(with = "crate::rational::serde_str")]
    pub constant: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub slope: Rational,
}

impl AffineForm {
    pub fn new(constant: Rational, slope: Rational) -> Self {
        AffineForm { constant, slope }
    }

    pub fn poly(&self) -> Poly {
        Poly::linear(self.constant.clone(), self.slope.clone())
    }
}

/// `prod (1 - e^{-L_j t}) / prod (1 - e^{-M_i t})` with forms affine in `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCharacter {
    pub numerator: Vec<AffineForm>,
    pub denominator: Vec<AffineForm>,
    pub n: usize,
}

/// Leading Laurent coefficients at `s = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentData {
    #[serde(with = "crate::rational::serde_str")]
    pub a0: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub a1: Rational,
}

impl LaurentData {
    pub fn ratio(&self) -> Rational {
        &self.a1 / &self.a0
    }
}

/// `a_0(s)` and `a_1(s)` along the deformation direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRatFuns {
    pub a0: RatFun,
    pub a1: RatFun,
}

impl LaurentRatFuns {
    /// `(a_1 / a_0)(s)`.
    pub fn ratio(&self) -> Result<RatFun> {
        Ok(self.a1.div(&self.a0)?.reduced())
    }
}

/// Index character of `(V, xi)`, deformed to `xi + s w` when `direction`
/// (ambient weights `w` on `C^N`) is given.
pub fn build_index_character(
    v: &ConeVariety,
    xi: &ReebVector,
    direction: Option<&[Rational]>,
) -> Result<IndexCharacter> {
    let a = v.coordinate_weights(xi);
    if let Some(i) = a.iter().position(|x| !x.is_positive()) {
        return Err(Error::OutsideReebCone(format!(
            "weight of {} is {} at xi = {xi}",
            v.variables[i], a[i]
        )));
    }
    let n_amb = v.ambient_dim();
    let zero = vec![Rational::zero(); n_amb];
    let w = direction.unwrap_or(&zero);
    if w.len() != n_amb {
        return Err(Error::InvalidInput(format!(
            "direction has {} entries, expected {n_amb}",
            w.len()
        )));
    }
    let pair = |e: &[u32], x: &[Rational]| -> Rational {
        e.iter().zip(x).map(|(&k, y)| y * int(i64::from(k))).sum()
    };

    let mut numerator = Vec::new();
    if let Some(first) = v.fsupport().first() {
        let slope = pair(first, w);
        if let Some(bad) = v.fsupport().iter().find(|e| pair(e, w) != slope) {
            return Err(Error::NotSemiInvariant(format!(
                "monomials {first:?} and {bad:?} have different weights along the direction"
            )));
        }
        numerator.push(AffineForm::new(pair(first, &a), slope));
    }
    let denominator = a
        .into_iter()
        .zip(w)
        .map(|(ai, wi)| AffineForm::new(ai, wi.clone()))
        .collect();
    Ok(IndexCharacter { numerator, denominator, n: v.dim() })
}

impl IndexCharacter {
    fn check_leading(&self) -> Result<()> {
        for f in self.numerator.iter().chain(&self.denominator) {
            if f.constant.is_zero() {
                return Err(Error::OutsideReebCone("a weight vanishes at s = 0".into()));
            }
        }
        Ok(())
    }

    /// Laurent expansion of `F` at `s = 0` with known terms through `t^through`.
    pub fn laurent_series(&self, through: i64) -> Result<Series<Rational>> {
        self.check_leading()?;
        let n = self.n as i64;
        // each factor has valuation 1, so relative precision is order - 1
        let order = through + n + 2;
        if order < 1 {
            return Ok(Series::zero(through + 1));
        }
        let mut num = Series::constant(Rational::one(), order);
        for f in &self.numerator {
            num = num.mul(&one_minus_exp_series(&f.constant, order));
        }
        let mut den = Series::constant(Rational::one(), order);
        for f in &self.denominator {
            den = den.mul(&one_minus_exp_series(&f.constant, order));
        }
        Ok(num.div(&den)?.truncate(through + 1))
    }

    /// Smallest admissible dimension for `a_1`.
    fn require_dim(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        Ok(())
    }

    /// `a_0` alone; defined for every `n >= 1`.
    pub fn leading_coefficient(&self) -> Result<Rational> {
        if self.n == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        let n = self.n as i64;
        let s = self.laurent_series(-n)?;
        let c = s.coeff(-n).ok_or_else(|| Error::Internal("leading term missing".into()))?;
        Ok(c / factorial(self.n as u64 - 1))
    }

    /// `(a_0, a_1)` at `s = 0` from the Laurent expansion.
    pub fn laurent_coefficients(&self) -> Result<LaurentData> {
        self.require_dim()?;
        let n = self.n as i64;
        let s = self.laurent_series(1 - n + GUARD_TERMS as i64)?;
        let missing = || Error::Internal("Laurent term missing".into());
        let c0 = s.coeff(-n).ok_or_else(missing)?;
        let c1 = s.coeff(1 - n).ok_or_else(missing)?;
        Ok(LaurentData {
            a0: c0 / factorial(self.n as u64 - 1),
            a1: c1 / factorial(self.n as u64 - 2),
        })
    }

    /// `a_0(s)`, `a_1(s)` as rational functions of the deformation parameter.
    ///
    /// Every factor is written `(1 - e^{-L t}) = L t g(L t)` with
    /// `g(x) = (1 - e^{-x}) / x`; the `g` series have constant term 1 and
    /// coefficients polynomial in `s`, so their quotient is a power series
    /// over `Q[s]`.
    pub fn laurent_ratfuns(&self) -> Result<LaurentRatFuns> {
        self.require_dim()?;
        self.check_leading()?;
        let len = 2 + GUARD_TERMS;
        let mut g_num: Series<Poly> = Series::constant(Poly::one(), len as i64);
        let mut pre_num = Poly::one();
        for f in &self.numerator {
            let l = f.poly();
            g_num = g_num.mul(&one_minus_exp_over_arg(&l, len));
            pre_num = &pre_num * &l;
        }
        let mut g_den: Series<Poly> = Series::constant(Poly::one(), len as i64);
        let mut pre_den = Poly::one();
        for f in &self.denominator {
            let m = f.poly();
            g_den = g_den.mul(&one_minus_exp_over_arg(&m, len));
            pre_den = &pre_den * &m;
        }
        let g = g_num.div(&g_den)?;
        let missing = || Error::Internal("series term missing".into());
        let g0 = g.coeff(0).ok_or_else(missing)?;
        let g1 = g.coeff(1).ok_or_else(missing)?;
        let n = self.n as u64;
        let pre = RatFun::new(pre_num, pre_den)?;
        let a0 = RatFun::new(g0, Poly::one())?.mul(&pre).scale(&factorial(n - 1).recip());
        let a1 = RatFun::new(g1, Poly::one())?.mul(&pre).scale(&factorial(n - 2).recip());
        Ok(LaurentRatFuns { a0: a0.reduced(), a1: a1.reduced() })
    }

    /// `(a_1/a_0)(0)` and its `s`-derivative.
    pub fn ratio_and_derivative(&self) -> Result<(Rational, Rational)> {
        self.laurent_ratfuns()?.ratio()?.eval_and_derivative_at_zero()
    }

    /// Power series of `F` in `q = e^{-t}`: coefficient `k` is the dimension
    /// of the weight-`k` piece. Needs positive integer weights at `s = 0`.
    pub fn weight_expansion(&self, cutoff: u64) -> Result<BTreeMap<u64, u64>> {
        let as_int = |r: &Rational| -> Result<usize> {
            if r.is_integer() && r.is_positive() {
                r.to_integer().to_usize().ok_or_else(|| Error::NonIntegralWeights(r.to_string()))
            } else {
                Err(Error::NonIntegralWeights(r.to_string()))
            }
        };
        let len = cutoff as usize + 1;
        let one_minus_q_pow = |k: usize| -> Series<Rational> {
            let mut c = vec![Rational::zero(); len];
            c[0] = Rational::one();
            if k < len {
                c[k] = -Rational::one();
            }
            Series::new(0, c)
        };
        let mut f = Series::constant(Rational::one(), len as i64);
        for form in &self.numerator {
            f = f.mul(&one_minus_q_pow(as_int(&form.constant)?));
        }
        for form in &self.denominator {
            f = f.div(&one_minus_q_pow(as_int(&form.constant)?))?;
        }
        (0..len as i64)
            .map(|k| {
                let c = f.coeff(k).unwrap_or_else(Rational::zero);
                let d = c
                    .to_integer()
                    .to_u64()
                    .filter(|_| c.is_integer())
                    .ok_or_else(|| Error::Internal(format!("coefficient {c} of q^{k}")))?;
                Ok((k as u64, d))
            })
            .collect()
    }

    /// `t^n F(t) / (n-1)!` evaluated in `bits`-bit floating point.
    pub fn numeric_leading(&self, t: &Rational, bits: usize) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        self.check_leading()?;
        let rm = RoundingMode::ToEven;
        let mut cc = Consts::new().map_err(|e| Error::Internal(format!("float constants: {e:?}")))?;
        let to_big = |r: &Rational, cc: &mut Consts| {
            let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, bits, rm, cc);
            let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, bits, rm, cc);
            n.div(&d, bits, rm)
        };
        let tb = to_big(t, &mut cc);
        let one = BigFloat::from_i64(1, bits);
        let mut value = tb.powi(self.n, bits, rm).div(&to_big(&factorial(self.n as u64 - 1), &mut cc), bits, rm);
        for f in &self.numerator {
            let e = to_big(&f.constant, &mut cc).mul(&tb, bits, rm).neg().exp(bits, rm, &mut cc);
            value = value.mul(&one.sub(&e, bits, rm), bits, rm);
        }
        for f in &self.denominator {
            let e = to_big(&f.constant, &mut cc).mul(&tb, bits, rm).neg().exp(bits, rm, &mut cc);
            value = value.div(&one.sub(&e, bits, rm), bits, rm);
        }
        let s = value
            .format(Radix::Dec, rm, &mut cc)
            .map_err(|e| Error::Internal(format!("float formatting: {e:?}")))?;
        s.parse::<f64>().map_err(|e| Error::Internal(format!("float parse of {s}: {e}")))
    }
}

/// Checks `F(t) = (-1)^n e^{lambda t} F(-t)` through `t^through` with the
/// canonical weight as `lambda`.
pub fn gorenstein_duality_check(v: &ConeVariety, xi: &ReebVector, through: i64) -> Result<bool> {
    if v.gorenstein_index() != 1 {
        return Err(Error::InvalidInput("duality check needs Gorenstein index 1".into()));
    }
    let f = build_index_character(v, xi, None)?;
    duality_holds(&f, &v.canonical_weight(xi), through)
}

/// The same identity with an explicit `lambda`.
pub fn duality_holds(f: &IndexCharacter, lambda: &Rational, through: i64) -> Result<bool> {
    let n = f.n as i64;
    let series = f.laurent_series(through)?;
    let len = (through + n + 1).max(1) as usize;
    let mut other = exp_series(lambda, len).mul(&series.reflect());
    if n % 2 == 1 {
        other = other.scale(&-Rational::one());
    }
    Ok((-n..=through).all(|k| series.coeff(k) == other.coeff(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::TorusWeights;
    use crate::families::{make_family, FamilyKind};
    use crate::rational::rat;

    fn ambient(weights: &[i64]) -> ConeVariety {
        ConeVariety::affine_space("C^N", TorusWeights::new(vec![weights.to_vec()]).unwrap())
    }

    fn a1_quadric() -> ConeVariety {
        ConeVariety::hypersurface(
            "uv+w^2",
            TorusWeights::new(vec![vec![1, 1, 1]]).unwrap(),
            vec![vec![1, 1, 0], vec![0, 0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn affine_line() {
        let c1 = ConeVariety::affine_space("C", TorusWeights::new(vec![vec![1, 0]]).unwrap());
        // C^2 with the first coordinate only is not a Reeb field
        assert!(build_index_character(&c1, &ReebVector::from_ints(&[1]), None).is_err());
        let f = IndexCharacter {
            numerator: vec![],
            denominator: vec![AffineForm::new(int(7), int(0))],
            n: 1,
        };
        assert_eq!(f.leading_coefficient().unwrap(), rat(1, 7));
        assert!(matches!(f.laurent_coefficients(), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn free_polynomial_ring() {
        let f = build_index_character(&ambient(&[1, 1, 1]), &ReebVector::from_ints(&[1]), None).unwrap();
        assert!(f.numerator.is_empty());
        assert_eq!(f.denominator.len(), 3);
        let l = f.laurent_coefficients().unwrap();
        assert_eq!(l.a0, rat(1, 2));
        assert_eq!(l.ratio(), int(3));
    }

    #[test]
    fn quadric_character() {
        let f = build_index_character(&a1_quadric(), &ReebVector::from_ints(&[1]), None).unwrap();
        assert_eq!(f.numerator, vec![AffineForm::new(int(2), int(0))]);
        assert_eq!(f.denominator, vec![AffineForm::new(int(1), int(0)); 3]);
        let h = f.weight_expansion(4).unwrap();
        assert_eq!(h.values().copied().collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn bp_central_fiber_ratfuns() {
        // fiber uv + w^q, xi - s eta with eta moving z: forms (2q lambda - s)
        for (p, q) in [(3i64, 2i64), (5, 4), (2, 7)] {
            let lambda = rat(3, 2 * (p + q));
            let f = IndexCharacter {
                numerator: vec![AffineForm::new(int(2 * p * q) * &lambda, int(0))],
                denominator: vec![
                    AffineForm::new(int(p * q) * &lambda, int(0)),
                    AffineForm::new(int(p * q) * &lambda, int(0)),
                    AffineForm::new(int(2 * q) * &lambda, int(-1)),
                    AffineForm::new(int(2 * p) * &lambda, int(0)),
                ],
                n: 3,
            };
            let r = f.laurent_ratfuns().unwrap();
            for s in [rat(0, 1), rat(1, 10), rat(-1, 3)] {
                let expected_a0 = (int(2) * &lambda * &lambda * int(p * p * q) * (int(2 * q) * &lambda - &s)).recip();
                assert_eq!(r.a0.eval(&s).unwrap(), expected_a0);
                let expected_ratio = &lambda * int(2 * p + 2 * q) - &s;
                assert_eq!(r.ratio().unwrap().eval(&s).unwrap(), expected_ratio);
            }
            let l = f.laurent_coefficients().unwrap();
            assert_eq!(l.a0, r.a0.eval(&int(0)).unwrap());
            assert_eq!(l.a1, r.a1.eval(&int(0)).unwrap());
        }
    }

    #[test]
    fn direction_must_preserve_semi_invariance() {
        let v = a1_quadric();
        let w = vec![int(1), int(0), int(0)];
        assert!(matches!(
            build_index_character(&v, &ReebVector::from_ints(&[1]), Some(&w)),
            Err(Error::NotSemiInvariant(_))
        ));
        let w = vec![int(1), int(1), int(1)];
        let f = build_index_character(&v, &ReebVector::from_ints(&[1]), Some(&w)).unwrap();
        assert_eq!(f.numerator[0].slope, int(2));
    }

    #[test]
    fn duality() {
        let c2 = ambient(&[1, 1]);
        let xi = ReebVector::from_ints(&[1]);
        assert!(gorenstein_duality_check(&c2, &xi, 5).unwrap());
        let f = build_index_character(&c2, &xi, None).unwrap();
        assert!(!duality_holds(&f, &int(3), 5).unwrap());

        let bp = make_family(FamilyKind::BrieskornPham, 3, 2).unwrap().variety;
        let xi = ReebVector::from_ints(&[6, 2]).scaled(&rat(3, 10));
        assert!(gorenstein_duality_check(&bp, &xi, 5).unwrap());
    }

    #[test]
    fn numeric_path() {
        let bp = make_family(FamilyKind::BrieskornPham, 3, 2).unwrap().variety;
        let xi = ReebVector::from_ints(&[6, 2]).scaled(&rat(3, 10));
        let f = build_index_character(&bp, &xi, None).unwrap();
        let a0 = crate::rational::to_f64(&f.laurent_coefficients().unwrap().a0);
        let approx = f.numeric_leading(&rat(1, 1000), 200).unwrap();
        assert!((approx - a0).abs() < 1e-2 * a0);
        assert!((a0 - 125.0 / 486.0).abs() < 1e-15);
    }
}
