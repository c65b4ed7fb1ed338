//! Variables and monomials.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Variable families: generic-matrix entries, group-element entries and
/// auxiliary variables (vector coordinates, scratch variables).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Xi,
    U,
    Aux,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Xi => "xi",
            Family::U => "u",
            Family::Aux => "aux",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "xi" => Some(Family::Xi),
            "u" => Some(Family::U),
            "aux" => Some(Family::Aux),
            _ => None,
        }
    }
}

/// A variable `(family, j, ι, ȷ)` packed into one word so that the integer
/// order is the lexicographic order of the tuple.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    pub fn new(family: Family, j: u8, i: u8, k: u8) -> VarId {
        let f = match family {
            Family::Xi => 0u32,
            Family::U => 1,
            Family::Aux => 2,
        };
        VarId(f << 24 | (j as u32) << 16 | (i as u32) << 8 | k as u32)
    }

    /// `ξ_{jik}`, 1-based indices.
    pub fn xi(j: usize, i: usize, k: usize) -> VarId {
        VarId::new(Family::Xi, j as u8, i as u8, k as u8)
    }

    /// Group-element entry `u_{ik}`.
    pub fn u(i: usize, k: usize) -> VarId {
        VarId::new(Family::U, 0, i as u8, k as u8)
    }

    pub fn aux(j: usize, i: usize, k: usize) -> VarId {
        VarId::new(Family::Aux, j as u8, i as u8, k as u8)
    }

    /// Coordinate `η_i` of the auxiliary row vector used by Gram checks.
    pub fn eta(i: usize) -> VarId {
        VarId::aux(1, i, 1)
    }

    pub fn family(self) -> Family {
        match self.0 >> 24 {
            0 => Family::Xi,
            1 => Family::U,
            _ => Family::Aux,
        }
    }

    pub fn j(self) -> usize {
        ((self.0 >> 16) & 0xff) as usize
    }

    pub fn i(self) -> usize {
        ((self.0 >> 8) & 0xff) as usize
    }

    pub fn k(self) -> usize {
        (self.0 & 0xff) as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family() {
            Family::Xi => write!(f, "xi({},{},{})", self.j(), self.i(), self.k()),
            Family::U => write!(f, "u({},{})", self.i(), self.k()),
            Family::Aux => write!(f, "aux({},{},{})", self.j(), self.i(), self.k()),
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form `["xi", j, i, k]`.
impl Serialize for VarId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.family().name(), self.j(), self.i(), self.k()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for VarId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (name, j, i, k) = <(String, u8, u8, u8)>::deserialize(d)?;
        let fam = Family::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown variable family `{name}`")))?;
        Ok(VarId::new(fam, j, i, k))
    }
}

/// A monomial: variables with positive exponents, sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(VarId, u32); 6]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId) -> Monomial {
        Monomial::pow_of(v, 1)
    }

    pub fn pow_of(v: VarId, e: u32) -> Monomial {
        let mut s = SmallVec::new();
        if e > 0 {
            s.push((v, e));
        }
        Monomial(s)
    }

    /// Builds a monomial from arbitrary (possibly repeated) factors.
    pub fn from_factors(factors: impl IntoIterator<Item = (VarId, u32)>) -> Monomial {
        let mut v: SmallVec<[(VarId, u32); 6]> = factors.into_iter().filter(|f| f.1 > 0).collect();
        v.sort_by_key(|f| f.0);
        let mut out: SmallVec<[(VarId, u32); 6]> = SmallVec::new();
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by_key(&v, |f| f.0)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        let b = &other.0;
        for &(v, e) in self.0.iter() {
            if j < b.len() && b[j].0 < v {
                return None;
            }
            if j < b.len() && b[j].0 == v {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((v, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum (monomial gcd).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(v, e) in self.0.iter() {
            let f = other.degree_in(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, x)| (v, x * e)).collect())
    }

    /// Removes `v`, returning its exponent and the remaining monomial.
    pub fn split_var(&self, v: VarId) -> (u32, Monomial) {
        let mut out = SmallVec::new();
        let mut e = 0;
        for &(w, x) in self.0.iter() {
            if w == v {
                e = x;
            } else {
                out.push((w, x));
            }
        }
        (e, Monomial(out))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|f| f.0)
    }
}

/// Graded lexicographic order: total degree first, then the exponent vectors
/// compared lexicographically with the smallest `VarId` most significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a.0 != b.0 {
                // The side holding the smaller variable has a positive
                // exponent where the other has zero.
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
