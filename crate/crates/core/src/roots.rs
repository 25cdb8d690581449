//! Exact real-root isolation for rational polynomials (Sturm chains), with
//! recovery of rational roots.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{int, Rational};
use crate::series::Poly;

/// A root located by [`isolate_roots`].
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact(Rational),
    /// The unique root lies strictly inside `(lo, hi)`.
    Interval { lo: Rational, hi: Rational },
}

impl Root {
    pub fn midpoint(&self) -> Rational {
        match self {
            Root::Exact(r) => r.clone(),
            Root::Interval { lo, hi } => (lo + hi) / int(2),
        }
    }

    pub fn width(&self) -> Rational {
        match self {
            Root::Exact(_) => Rational::zero(),
            Root::Interval { lo, hi } => hi - lo,
        }
    }
}

pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        SturmChain { chain }
    }

    fn sign_changes(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for p in &self.chain {
            let v = p.eval(x);
            let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Number of distinct roots in the half-open interval `(lo, hi]`.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.sign_changes(lo).saturating_sub(self.sign_changes(hi))
    }
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Isolates every real root of `p` in the open interval `(lo, hi)`.
///
/// Rational roots come back as [`Root::Exact`]; irrational ones as isolating
/// intervals of width below `width`.
pub fn isolate_roots(p: &Poly, lo: &Rational, hi: &Rational, width: &Rational) -> Vec<Root> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.square_free();
    let sturm = SturmChain::new(&sf);
    let count_open = |a: &Rational, b: &Rational| {
        let n = sturm.count(a, b);
        if sf.eval(b).is_zero() {
            n - 1
        } else {
            n
        }
    };
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        match count_open(&a, &b) {
            0 => {}
            1 => out.push(refine(&sf, &count_open, a, b, width)),
            _ => {
                let mid = (&a + &b) / int(2);
                if sf.eval(&mid).is_zero() {
                    out.push(Root::Exact(mid.clone()));
                }
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    out.sort_by_key(|r| r.midpoint());
    out
}

fn leading_denominator_bound(sf: &Poly) -> BigInt {
    let ints = sf.primitive_integer();
    ints.last().map(|c| c.abs()).unwrap_or_else(BigInt::one)
}

/// Shrinks an interval holding exactly one simple root.
fn refine(
    sf: &Poly,
    count_open: &dyn Fn(&Rational, &Rational) -> usize,
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
) -> Root {
    // a rational root a/b of a primitive integer polynomial has b | lc, and two
    // such candidates are at least 1/lc^2 apart
    let lc = Rational::from_integer(leading_denominator_bound(sf));
    let separation = (&lc * &lc).recip();
    let mut tested = false;
    loop {
        let w = &hi - &lo;
        if !tested && w < separation {
            tested = true;
            let r = simplest_between(&lo, &hi);
            if sf.eval(&r).is_zero() {
                return Root::Exact(r);
            }
        }
        if tested && &w < width {
            return Root::Interval { lo, hi };
        }
        let mid = (&lo + &hi) / int(2);
        if sf.eval(&mid).is_zero() {
            return Root::Exact(mid);
        }
        if count_open(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn poly(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(2, 3)), rat(1, 2));
        assert_eq!(simplest_between(&rat(-5, 2), &rat(-2, 1)), int(-2));
        assert_eq!(simplest_between(&rat(31, 100), &rat(32, 100)), rat(5, 16));
        assert_eq!(simplest_between(&rat(-1, 3), &rat(1, 2)), int(0));
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        // (s-1)(s-2)(s-3)
        let p = poly(&[-6, 11, -6, 1]);
        let sc = SturmChain::new(&p);
        assert_eq!(sc.count(&int(0), &int(4)), 3);
        assert_eq!(sc.count(&rat(3, 2), &rat(5, 2)), 1);
    }

    #[test]
    fn finds_rational_roots_exactly() {
        // (3s - 2)(s^2 - 2), roots 2/3 and +-sqrt(2)
        let p = poly(&[4, -6, -2, 3]);
        let roots = isolate_roots(&p, &int(-5), &int(5), &rat(1, 1_000_000));
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[1], Root::Exact(rat(2, 3)));
        match &roots[2] {
            Root::Interval { lo, hi } => {
                assert!(lo * lo < int(2) && hi * hi > int(2));
                assert!(hi - lo < rat(1, 1_000_000));
            }
            r => panic!("sqrt(2) reported as {r:?}"),
        }
    }

    #[test]
    fn endpoint_roots_excluded() {
        // s (s - 1): no roots strictly inside (0, 1)
        let p = poly(&[0, -1, 1]);
        assert!(isolate_roots(&p, &int(0), &int(1), &rat(1, 100)).is_empty());
        let r = isolate_roots(&p, &int(-1), &rat(1, 2), &rat(1, 100));
        assert_eq!(r, vec![Root::Exact(int(0))]);
    }

    #[test]
    fn repeated_roots() {
        // (2s - 1)^2
        let p = poly(&[1, -4, 4]);
        assert_eq!(isolate_roots(&p, &int(0), &int(1), &rat(1, 100)), vec![Root::Exact(rat(1, 2))]);
    }
}
