//! Truncated Laurent series in `t`, univariate polynomials and rational
//! functions in a deformation parameter `s`.
//!
//! A [`Series`] stores every coefficient from its valuation up to (not
//! including) its truncation order; terms at or beyond the order are unknown
//! and no operation ever reads them. Coefficients live in any [`Coefficient`]
//! ring, which lets the same code expand the index character over `Q` and
//! over `Q[s]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{factorial, int, Rational};

/// Commutative ring usable as a series coefficient.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Multiplicative inverse when it exists in the ring.
    fn try_inverse(&self) -> Option<Self>;
    fn scale(&self, r: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn try_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Series<C> {
    valuation: i64,
    coeffs: Vec<C>,
}

impl<C: Coefficient> Series<C> {
    /// Series `sum_k coeffs[k] t^(valuation+k) + O(t^(valuation+len))`.
    pub fn new(valuation: i64, coeffs: Vec<C>) -> Self {
        let mut s = Series { valuation, coeffs };
        s.normalize();
        s
    }

    /// The series `O(t^order)`.
    pub fn zero(order: i64) -> Self {
        Series { valuation: order, coeffs: Vec::new() }
    }

    pub fn constant(c: C, order: i64) -> Self {
        if order <= 0 {
            return Self::zero(order);
        }
        let mut coeffs = vec![C::zero(); order as usize];
        coeffs[0] = c;
        Self::new(0, coeffs)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
    }

    /// Exponent of the leading nonzero term, or the order for the zero series.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// First exponent whose coefficient is unknown.
    pub fn order(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k`; `None` at or beyond the truncation order.
    pub fn coeff(&self, k: i64) -> Option<C> {
        if k >= self.order() {
            None
        } else if k < self.valuation {
            Some(C::zero())
        } else {
            Some(self.coeffs[(k - self.valuation) as usize].clone())
        }
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.first()
    }

    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        if order <= self.valuation {
            return Self::zero(order);
        }
        let keep = (order - self.valuation) as usize;
        Series { valuation: self.valuation, coeffs: self.coeffs[..keep].to_vec() }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series { valuation: self.valuation + k, coeffs: self.coeffs.clone() }
    }

    /// The substitution `t -> -t`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.valuation + i as i64).rem_euclid(2) == 1 {
                    -c.clone()
                } else {
                    c.clone()
                }
            })
            .collect();
        Series { valuation: self.valuation, coeffs }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(self.valuation, self.coeffs.iter().map(|c| c.scale(r)).collect())
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        Self::new(self.valuation, self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    fn combine(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        let order = self.order().min(other.order());
        let start = self.valuation.min(other.valuation).min(order);
        let coeffs = (start..order)
            .map(|k| f(self.coeff(k).unwrap(), other.coeff(k).unwrap()))
            .collect();
        Self::new(start, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let valuation = self.valuation + other.valuation;
        let order = (self.order() + other.valuation).min(other.order() + self.valuation);
        let len = (order - valuation).max(0) as usize;
        if self.is_zero() || other.is_zero() {
            return Self::zero(order);
        }
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(valuation, coeffs)
    }

    /// Multiplicative inverse; needs an invertible leading coefficient.
    pub fn inverse(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZeroSeries)?;
        let inv0 = lead
            .try_inverse()
            .ok_or_else(|| Error::NonInvertibleLeading(format!("{lead:?}")))?;
        let len = self.coeffs.len();
        let mut out: Vec<C> = Vec::with_capacity(len);
        out.push(inv0.clone());
        for k in 1..len {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(inv0.clone() * acc));
        }
        Ok(Self::new(-self.valuation, out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one(), self.coeffs.len().max(1) as i64);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl<C: Coefficient> Series<C> {
    fn from_terms(valuation: i64, n: usize, term: impl Fn(u64) -> Rational, a: &C) -> Self {
        let mut power = C::one();
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n as u64 {
            coeffs.push(power.scale(&term(k)));
            power = power * a.clone();
        }
        Self::new(valuation, coeffs)
    }
}

/// Taylor expansion of `1 - exp(-a t)` through `t^(order-1)`.
///
/// Returns the zero series `O(t^order)` when `a = 0`.
pub fn one_minus_exp_series<C: Coefficient>(a: &C, order: i64) -> Series<C> {
    assert!(order >= 1, "order must be at least 1");
    if a.is_zero() {
        return Series::zero(order);
    }
    // coefficient of t^(k+1) is (-1)^k a^(k+1) / (k+1)!
    let s = Series::from_terms(
        1,
        (order - 1) as usize,
        |k| {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            sign / factorial(k + 1)
        },
        a,
    );
    s.mul_coeff(a)
}

/// `(1 - exp(-a t)) / (a t)` as a power series with `len` known terms.
///
/// Its constant term is 1, so it is invertible over any coefficient ring.
pub fn one_minus_exp_over_arg<C: Coefficient>(a: &C, len: usize) -> Series<C> {
    Series::from_terms(
        0,
        len,
        |k| {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            sign / factorial(k + 1)
        },
        a,
    )
}

/// Taylor expansion of `exp(a t)` with `len` known terms.
pub fn exp_series<C: Coefficient>(a: &C, len: usize) -> Series<C> {
    Series::from_terms(0, len, |k| int(1) / factorial(k), a)
}

/// Polynomial in `s` with rational coefficients, stored lowest degree first.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 s`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale_by(&self, r: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &c * dc;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale_by(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (up to a constant).
    pub fn square_free(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Integer coefficients with content 1, same roots.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = o.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o.clone())
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(Rational::one())
    }
}

impl Coefficient for Poly {
    fn try_inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => Some(Poly::constant(self.coeffs[0].recip())),
            _ => None,
        }
    }

    fn scale(&self, r: &Rational) -> Self {
        self.scale_by(r)
    }
}

/// Quotient `num(s) / den(s)` of polynomials, `den` not identically zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Pole("everywhere (zero denominator)".into()));
        }
        Ok(RatFun { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, s: &Rational) -> Result<Rational> {
        let d = self.den.eval(s);
        if d.is_zero() {
            return Err(Error::Pole(s.to_string()));
        }
        Ok(self.num.eval(s) / d)
    }

    /// `f' = (num' den - num den') / den^2`.
    pub fn derivative(&self) -> RatFun {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun { num, den: &self.den * &self.den }
    }

    /// Exact `(f(s), f'(s))`.
    pub fn eval_and_derivative(&self, s: &Rational) -> Result<(Rational, Rational)> {
        Ok((self.eval(s)?, self.derivative().eval(s)?))
    }

    /// Exact `(f(0), f'(0))`; a pole at the origin is an error.
    pub fn eval_and_derivative_at_zero(&self) -> Result<(Rational, Rational)> {
        self.eval_and_derivative(&Rational::zero())
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        RatFun { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun> {
        RatFun::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale(&self, r: &Rational) -> RatFun {
        RatFun { num: self.num.scale_by(r), den: self.den.clone() }
    }

    /// Cancels the polynomial gcd and makes the denominator monic.
    pub fn reduced(&self) -> RatFun {
        let g = self.num.gcd(&self.den);
        let (num, den) = if g.is_zero() || g.degree() == Some(0) {
            (self.num.clone(), self.den.clone())
        } else {
            (self.num.div_rem(&g).0, self.den.div_rem(&g).0)
        };
        let l = den.leading().unwrap().recip();
        RatFun { num: num.scale_by(&l), den: den.scale_by(&l) }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
