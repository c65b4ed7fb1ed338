//! Rational functions with lazy, budgeted normalisation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::gcd::{poly_gcd, DEFAULT_GCD_OPS};
use super::poly::MultiPoly;
use super::rational::Rational;
use super::var::VarId;
use super::{PolyError, Scalar};

static GCD_TERM_THRESHOLD: AtomicUsize = AtomicUsize::new(5000);

/// Combined term count below which normalisation runs a full gcd.
pub fn gcd_term_threshold() -> usize {
    GCD_TERM_THRESHOLD.load(Ordering::Relaxed)
}

pub fn set_gcd_term_threshold(n: usize) {
    GCD_TERM_THRESHOLD.store(n, Ordering::Relaxed);
}

const DIVISION_OPS: usize = 4_000_000;

/// `num / den` with `den ≠ 0` monic. Monomial and numeric content are
/// always cancelled; polynomial common factors are cancelled when found
/// cheaply (small operands, or one side dividing the other).
#[derive(Clone)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

/// A common factor of `p` and `q` found without unbounded work; `1` if none.
fn cheap_common(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    if p.is_constant() || q.is_constant() {
        return MultiPoly::one();
    }
    if p.is_associate(q) {
        return q.clone();
    }
    if p.num_terms() + q.num_terms() <= gcd_term_threshold() {
        return poly_gcd(p, q, DEFAULT_GCD_OPS).unwrap_or_else(MultiPoly::one);
    }
    let (small, large) = if q.num_terms() <= p.num_terms() { (q, p) } else { (p, q) };
    if large.try_div_exact(small, DIVISION_OPS).is_some() {
        return small.clone();
    }
    MultiPoly::one()
}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<RatFunc, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        RatFunc { num: p, den: MultiPoly::one() }
    }

    pub fn constant(c: Rational) -> RatFunc {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn zero() -> RatFunc {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> RatFunc {
        Self::from_poly(MultiPoly::one())
    }

    pub fn var(v: VarId) -> RatFunc {
        Self::from_poly(MultiPoly::var(v))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value if the denominator is constant.
    pub fn as_poly(&self) -> Option<MultiPoly> {
        self.den.as_constant().map(|c| self.num.scale(&c.recip()))
    }

    /// Monomial content and leading coefficient only.
    fn finish(num: MultiPoly, den: MultiPoly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let mn = num.monomial_content();
        let md = den.monomial_content();
        let mg = mn.gcd(&md);
        let (num, den) = if mg.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&mg), den.div_monomial(&mg))
        };
        let lc = den.leading_coeff().recip();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
        }
    }

    /// Full cheap normalisation.
    fn reduce(num: MultiPoly, den: MultiPoly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = cheap_common(&num, &den);
        if g.is_constant() {
            Self::finish(num, den)
        } else {
            let n = num.div_exact(&g).expect("common factor divides numerator");
            let d = den.div_exact(&g).expect("common factor divides denominator");
            Self::finish(n, d)
        }
    }

    pub fn add_ref(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduce(self.num.add_ref(&other.num), self.den.clone());
        }
        if self.den.is_constant() && other.den.is_constant() {
            let a = self.num.scale(&self.den.constant_term().recip());
            let b = other.num.scale(&other.den.constant_term().recip());
            return RatFunc::from_poly(a.add_ref(&b));
        }
        // One denominator dividing the other avoids squaring.
        if other.den.num_terms() <= self.den.num_terms() {
            if let Some(k) = self.den.try_div_exact(&other.den, DIVISION_OPS) {
                return Self::reduce(self.num.add_ref(&other.num.mul_ref(&k)), self.den.clone());
            }
        } else if let Some(k) = other.den.try_div_exact(&self.den, DIVISION_OPS) {
            return Self::reduce(self.num.mul_ref(&k).add_ref(&other.num), other.den.clone());
        }
        let num = self.num.mul_ref(&other.den).add_ref(&other.num.mul_ref(&self.den));
        Self::reduce(num, self.den.mul_ref(&other.den))
    }

    pub fn neg_ref(&self) -> RatFunc {
        RatFunc { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn sub_ref(&self, other: &RatFunc) -> RatFunc {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let g1 = cheap_common(&self.num, &other.den);
        let g2 = cheap_common(&other.num, &self.den);
        let divide = |p: &MultiPoly, g: &MultiPoly| {
            if g.is_constant() {
                p.clone()
            } else {
                p.div_exact(g).expect("common factor divides")
            }
        };
        let num = divide(&self.num, &g1).mul_ref(&divide(&other.num, &g2));
        let den = divide(&self.den, &g2).mul_ref(&divide(&other.den, &g1));
        Self::finish(num, den)
    }

    pub fn recip(&self) -> Result<RatFunc, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::finish(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        Ok(self.mul_ref(&other.recip()?))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> RatFunc {
        self.mul_ref(&RatFunc::from_poly(p.clone()))
    }

    /// `self^e`; `0^0 = 1`.
    pub fn pow(&self, e: u32) -> RatFunc {
        if e == 0 {
            return RatFunc::one();
        }
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn eval_with<F>(&self, assign: F) -> Result<Rational, PolyError>
    where
        F: Fn(VarId) -> Option<Rational>,
    {
        let d = self.den.eval_with(&assign)?;
        if d.is_zero() {
            return Err(PolyError::DenominatorVanishes);
        }
        Ok(&self.num.eval_with(&assign)? / &d)
    }

    pub fn eval(&self, assign: &BTreeMap<VarId, Rational>) -> Result<Rational, PolyError> {
        self.eval_with(|v| assign.get(&v).cloned())
    }

    /// Quotient-rule derivative.
    pub fn derivative(&self, v: VarId) -> RatFunc {
        let dn = self.num.derivative(v);
        if self.den.is_constant() {
            return Self::finish(dn, self.den.clone());
        }
        let dd = self.den.derivative(v);
        let num = dn.mul_ref(&self.den).sub_ref(&self.num.mul_ref(&dd));
        Self::reduce(num, self.den.square())
    }

    pub fn substitute<F>(&self, image: F) -> Result<RatFunc, PolyError>
    where
        F: Fn(VarId) -> Option<MultiPoly>,
    {
        RatFunc::new(self.num.substitute(&image), self.den.substitute(&image))
    }
}

/// Exact equality of rational functions by cross-multiplication, after
/// cancelling a denominator that divides the other.
pub fn ratfunc_equal(f: &RatFunc, g: &RatFunc) -> bool {
    if f.den == g.den {
        return f.num == g.num;
    }
    if f.num.is_zero() || g.num.is_zero() {
        return f.num.is_zero() && g.num.is_zero();
    }
    if f.den.num_terms() <= g.den.num_terms() {
        if let Some(k) = g.den.try_div_exact(&f.den, DIVISION_OPS) {
            return f.num.mul_ref(&k) == g.num;
        }
    } else if let Some(k) = f.den.try_div_exact(&g.den, DIVISION_OPS) {
        return g.num.mul_ref(&k) == f.num;
    }
    f.num.mul_ref(&g.den) == g.num.mul_ref(&f.den)
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        ratfunc_equal(self, other)
    }
}

impl Scalar for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn from_rational(r: &Rational) -> Self {
        RatFunc::constant(r.clone())
    }
    fn scale(&self, r: &Rational) -> Self {
        RatFunc::scale(self, r)
    }
    fn size_hint(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }
}

impl<'a> Add<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.mul_ref(rhs)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.mul_ref(rhs)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
