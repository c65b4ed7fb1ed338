//! Sparse multivariate polynomials over ℚ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::rational::{bigint_gcd, Rational};
use super::var::{Monomial, VarId};
use super::{PolyError, Scalar};

/// A polynomial stored as terms sorted by decreasing graded-lex monomial,
/// with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: Vec<(Monomial, Rational)>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_int(n))
    }

    pub fn var(v: VarId) -> Self {
        MultiPoly { terms: vec![(Monomial::var(v), Rational::one())] }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(m, c)] }
        }
    }

    /// Collects arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: FxHashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<(Monomial, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    /// Terms in decreasing monomial order.
    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Rational)> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.iter().map(|t| t.0.degree_in(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.iter().flat_map(|t| t.0.vars()).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.total_degree();
        self.terms.iter().all(|t| t.0.degree() == d)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        // Multiplying by a monomial preserves the order.
        MultiPoly { terms: self.terms.iter().map(|(t, x)| (t.mul(m), x * c)).collect() }
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        MultiPoly { terms: out }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.merge(other, false)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        self.merge(other, true)
    }

    pub fn neg_ref(&self) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(m, c);
        }
        match PackedSpace::for_product(self, other) {
            Some(space) => space.mul(self, other),
            None => self.mul_generic(other),
        }
    }

    fn mul_generic(&self, other: &Self) -> Self {
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    pub fn square(&self) -> Self {
        self.mul_ref(self)
    }

    /// `self^e`, with `p^0 = 1` (including `0^0`).
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Exact evaluation; `assign` must cover every variable.
    pub fn eval_with<F>(&self, assign: F) -> Result<Rational, PolyError>
    where
        F: Fn(VarId) -> Option<Rational>,
    {
        let mut cache: FxHashMap<VarId, Rational> = FxHashMap::default();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = assign(v).ok_or(PolyError::MissingVariable(v))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t = &t * &x.pow(e);
            }
            total += &t;
        }
        Ok(total)
    }

    pub fn eval(&self, assign: &BTreeMap<VarId, Rational>) -> Result<Rational, PolyError> {
        self.eval_with(|v| assign.get(&v).cloned())
    }

    /// Substitutes polynomials for variables; variables mapped to `None`
    /// are kept.
    pub fn substitute<F>(&self, image: F) -> Self
    where
        F: Fn(VarId) -> Option<MultiPoly>,
    {
        let mut images: FxHashMap<VarId, Option<MultiPoly>> = FxHashMap::default();
        let mut powers: FxHashMap<(VarId, u32), MultiPoly> = FxHashMap::default();
        let mut parts: Vec<MultiPoly> = Vec::new();
        let mut plain: Vec<(Monomial, Rational)> = Vec::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut prod = MultiPoly::constant(c.clone());
            for &(v, e) in m.factors() {
                let img = images.entry(v).or_insert_with(|| image(v));
                match img {
                    None => kept = kept.mul(&Monomial::pow_of(v, e)),
                    Some(p) => {
                        let pw = powers.entry((v, e)).or_insert_with(|| p.pow(e));
                        prod = prod.mul_ref(pw);
                    }
                }
            }
            if prod.terms.len() == 1 && prod.terms[0].0.is_one() {
                plain.push((kept, prod.terms[0].1.clone()));
            } else {
                parts.push(prod.mul_monomial(&kept, &Rational::one()));
            }
        }
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (m, c) in plain.into_iter().chain(parts.into_iter().flat_map(|p| p.terms)) {
            match acc.get_mut(&m) {
                Some(x) => *x += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(acc)
    }

    /// Partial evaluation at rational values.
    pub fn partial_eval<F>(&self, value: F) -> Self
    where
        F: Fn(VarId) -> Option<Rational>,
    {
        self.substitute(|v| value(v).map(MultiPoly::constant))
    }

    pub fn derivative(&self, v: VarId) -> Self {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.degree_in(v);
            if e == 0 {
                return None;
            }
            let (_, rest) = m.split_var(v);
            Some((rest.mul(&Monomial::pow_of(v, e - 1)), c * &Rational::from_int(e as i64)))
        });
        Self::from_terms(terms)
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: VarId) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                MultiPoly { terms: ts }
            })
            .collect()
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(v: VarId, coeffs: &[MultiPoly]) -> Self {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let vk = Monomial::pow_of(v, k as u32);
            for (m, x) in &c.terms {
                terms.push((m.mul(&vk), x.clone()));
            }
        }
        Self::from_terms(terms)
    }

    /// Gcd of all monomials.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let first = match it.next() {
            Some(t) => t.0.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |g, t| if g.is_one() { g } else { g.gcd(&t.0) })
    }

    /// Divides every term by the monomial `m`, which must divide them all.
    pub fn div_monomial(&self, m: &Monomial) -> Self {
        if m.is_one() {
            return self.clone();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.div(m).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Rational content `c > 0` (gcd of numerators over lcm of
    /// denominators) such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = bigint_gcd(&num, &c.numer());
            den = den.lcm(&c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::from_big(num_rational::BigRational::new(num.abs(), den))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    /// Whether `self = c·other` for some nonzero rational `c`.
    pub fn is_associate(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() || self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let ratio = &self.terms[0].1 / &other.terms[0].1;
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|(a, b)| a.0 == b.0 && a.1 == &b.1 * &ratio)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        self.try_div_exact(d, usize::MAX)
    }

    /// Like [`div_exact`](Self::div_exact) but gives up (returning `None`)
    /// after roughly `max_ops` term operations.
    pub fn try_div_exact(&self, d: &Self, max_ops: usize) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c * &inv));
            }
            return Some(MultiPoly { terms });
        }
        // Cheap necessary conditions: leading and trailing monomials divide,
        // and per-variable degrees fit.
        let (dl, dt) = (&d.terms[0].0, &d.terms[d.terms.len() - 1].0);
        self.terms[0].0.div(dl)?;
        self.terms[self.terms.len() - 1].0.div(dt)?;
        if self.total_degree() < d.total_degree() {
            return None;
        }
        for v in d.vars() {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let lc_inv = d.terms[0].1.recip();
        let mut rem: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Monomial, Rational)> = Vec::new();
        let mut ops = 0usize;
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.div(dl)?;
            let qc = &c * &lc_inv;
            for (tm, tc) in d.terms.iter().skip(1) {
                let pm = tm.mul(&qm);
                let delta = tc * &qc;
                match rem.get_mut(&pm) {
                    Some(x) => {
                        *x -= &delta;
                        if x.is_zero() {
                            rem.remove(&pm);
                        }
                    }
                    None => {
                        rem.insert(pm, -delta);
                    }
                }
            }
            quot.push((qm, qc));
            ops += d.terms.len();
            if ops > max_ops {
                return None;
            }
        }
        // Quotient terms were produced in decreasing order.
        Some(MultiPoly { terms: quot })
    }
}

/// Dense packing of exponent vectors into a `u128` key (one byte per
/// variable) for fast products over at most 16 variables.
struct PackedSpace {
    vars: Vec<VarId>,
}

impl PackedSpace {
    fn for_product(a: &MultiPoly, b: &MultiPoly) -> Option<PackedSpace> {
        let mut vars: BTreeSet<VarId> = a.vars();
        vars.extend(b.vars());
        if vars.len() > 16 {
            return None;
        }
        for &v in &vars {
            if a.degree_in(v) + b.degree_in(v) > 255 {
                return None;
            }
        }
        Some(PackedSpace { vars: vars.into_iter().collect() })
    }

    fn pack(&self, m: &Monomial) -> u128 {
        let mut key = 0u128;
        for &(v, e) in m.factors() {
            let pos = self.vars.binary_search(&v).expect("variable in packed space");
            key |= (e as u128) << (8 * pos);
        }
        key
    }

    fn unpack(&self, key: u128) -> Monomial {
        Monomial::from_factors(
            self.vars
                .iter()
                .enumerate()
                .map(|(pos, &v)| (v, ((key >> (8 * pos)) & 0xff) as u32)),
        )
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let pa: Vec<(u128, &Rational)> = a.terms.iter().map(|(m, c)| (self.pack(m), c)).collect();
        let pb: Vec<(u128, &Rational)> = b.terms.iter().map(|(m, c)| (self.pack(m), c)).collect();
        let mut acc: FxHashMap<u128, Rational> = FxHashMap::default();
        acc.reserve(pa.len().max(pb.len()) * 4);
        for &(ka, ca) in &pa {
            for &(kb, cb) in &pb {
                let c = ca * cb;
                match acc.entry(ka + kb) {
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += &c,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Rational)> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (self.unpack(k), c))
            .collect();
        terms.sort_unstable_by(|x, y| y.0.cmp(&x.0));
        MultiPoly { terms }
    }
}

impl Scalar for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(r: &Rational) -> Self {
        MultiPoly::constant(r.clone())
    }
    fn scale(&self, r: &Rational) -> Self {
        MultiPoly::scale(self, r)
    }
    fn size_hint(&self) -> usize {
        self.terms.len().max(1)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_ref(rhs)
    }
}

impl<'a> Add<&'a MultiPoly> for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a MultiPoly> for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a MultiPoly> for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_ref(rhs)
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        self.add_ref(&rhs)
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        self.sub_ref(&rhs)
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        self.mul_ref(&rhs)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

impl From<VarId> for MultiPoly {
    fn from(v: VarId) -> Self {
        MultiPoly::var(v)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: Rational,
    exps: Vec<(VarId, u32)>,
}

/// JSON term list `[{"coef":"p/q","exps":[[["xi",j,i,k],e],...]}]`.
impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let ts: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, c)| TermJson { coef: c.clone(), exps: m.factors().to_vec() })
            .collect();
        ts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ts = Vec::<TermJson>::deserialize(d)?;
        Ok(MultiPoly::from_terms(
            ts.into_iter().map(|t| (Monomial::from_factors(t.exps), t.coef)),
        ))
    }
}
