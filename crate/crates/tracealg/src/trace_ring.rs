//! The free trace ring with involution: words in `x_j`, `x_j^*`, canonical
//! trace symbols, and exact arithmetic on trace polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scalar_poly::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("no image given for variable x{0}")]
    MissingImage(u32),
}

/// A generator `x_j` or its involution `x_j^*`. The derived order gives
/// `x1 < x1' < x2 < x2' < …`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub index: u32,
    pub starred: bool,
}

impl Letter {
    pub fn new(index: u32, starred: bool) -> Letter {
        assert!(index >= 1, "letter indices are 1-based");
        Letter { index, starred }
    }

    pub fn star(self) -> Letter {
        Letter { index: self.index, starred: !self.starred }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}{}", self.index, if self.starred { "'" } else { "" })
    }
}

/// A word in the letters; the empty word is the identity `1`.
/// Ordered graded-lexicographically (length first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn one() -> Word {
        Word(Vec::new())
    }

    pub fn letter(index: u32, starred: bool) -> Word {
        Word(vec![Letter::new(index, starred)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn max_index(&self) -> u32 {
        self.0.iter().map(|l| l.index).max().unwrap_or(0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `w^*`: reverse the letters and toggle each star.
pub fn word_involute(w: &Word) -> Word {
    Word(w.0.iter().rev().map(|l| l.star()).collect())
}

/// `Tr(w)` in canonical form: the least word among all rotations of `w`
/// and of `w^*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceSymbol(Word);

impl TraceSymbol {
    pub fn rep(&self) -> &Word {
        &self.0
    }

    /// `Tr(1)`, a formal generator (it becomes `n` only under evaluation).
    pub fn tr_one() -> TraceSymbol {
        TraceSymbol(Word::one())
    }
}

impl fmt::Display for TraceSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tr({})", self.0)
    }
}

pub fn trace_canon(w: &Word) -> TraceSymbol {
    let n = w.len();
    if n == 0 {
        return TraceSymbol::tr_one();
    }
    let ws = word_involute(w);
    let mut best = w.clone();
    for k in 0..n {
        for cand in [w.rotate(k), ws.rotate(k)] {
            if cand < best {
                best = cand;
            }
        }
    }
    TraceSymbol(best)
}

/// A product of trace symbols (central part) times a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceMonomial {
    pure: Vec<TraceSymbol>,
    word: Word,
}

impl TraceMonomial {
    pub fn new(mut pure: Vec<TraceSymbol>, word: Word) -> TraceMonomial {
        pure.sort();
        TraceMonomial { pure, word }
    }

    pub fn one() -> TraceMonomial {
        TraceMonomial { pure: Vec::new(), word: Word::one() }
    }

    pub fn pure(&self) -> &[TraceSymbol] {
        &self.pure
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    /// Number of letters, counting those inside traces.
    pub fn degree(&self) -> usize {
        self.word.len() + self.pure.iter().map(|s| s.0.len()).sum::<usize>()
    }

    fn mul(&self, other: &TraceMonomial) -> TraceMonomial {
        let mut pure = Vec::with_capacity(self.pure.len() + other.pure.len());
        pure.extend_from_slice(&self.pure);
        pure.extend_from_slice(&other.pure);
        pure.sort();
        TraceMonomial { pure, word: self.word.concat(&other.word) }
    }
}

impl Ord for TraceMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.pure.cmp(&other.pure))
    }
}

impl PartialOrd for TraceMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TraceMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.pure.iter().map(|s| s.to_string()).collect();
        if !self.word.is_one() {
            parts.push(self.word.to_string());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// An element of the free trace ring: a finite ℚ-combination of trace
/// monomials with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TracePolynomial {
    terms: BTreeMap<TraceMonomial, Rational>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        TracePolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_monomial(TraceMonomial::one(), c)
    }

    pub fn from_monomial(m: TraceMonomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        TracePolynomial { terms }
    }

    pub fn word(w: Word) -> Self {
        Self::from_monomial(TraceMonomial::new(Vec::new(), w), Rational::one())
    }

    /// `x_j`.
    pub fn var(j: u32) -> Self {
        Self::word(Word::letter(j, false))
    }

    /// `x_j^*`.
    pub fn var_star(j: u32) -> Self {
        Self::word(Word::letter(j, true))
    }

    /// `Tr(w)` as a pure element.
    pub fn trace_of_word(w: &Word) -> Self {
        Self::from_monomial(TraceMonomial::new(vec![trace_canon(w)], Word::one()), Rational::one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&TraceMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(terms: &mut BTreeMap<TraceMonomial, Rational>, m: TraceMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&m) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    terms.remove(&m);
                }
            }
            None => {
                terms.insert(m, c);
            }
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (TraceMonomial, Rational)>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            Self::insert(&mut terms, m, c);
        }
        TracePolynomial { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert(&mut terms, m.clone(), c.clone());
        }
        TracePolynomial { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert(&mut terms, m.clone(), -c);
        }
        TracePolynomial { terms }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TracePolynomial { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Self::insert(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        TracePolynomial { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies the involution to word parts; pure parts are fixed because
    /// `Tr(w^*) = Tr(w)`.
    pub fn involute(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (TraceMonomial { pure: m.pure.clone(), word: word_involute(&m.word) }, c.clone())),
        )
    }

    /// The ℚ[Tr]-linear trace map: each word moves into the central part.
    pub fn trace(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            let mut pure = m.pure.clone();
            pure.push(trace_canon(&m.word));
            (TraceMonomial::new(pure, Word::one()), c.clone())
        }))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.involute()
    }

    /// True when every word part is trivial (a central element).
    pub fn is_pure(&self) -> bool {
        self.terms.keys().all(|m| m.word.is_one())
    }

    /// The largest variable index occurring anywhere.
    pub fn max_index(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.word.max_index().max(m.pure.iter().map(|s| s.0.max_index()).max().unwrap_or(0)))
            .max()
            .unwrap_or(0)
    }

    /// Largest number of letters in a term (the degree in generic entries).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&TraceMonomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    /// Homomorphic substitution `x_j ↦ images[j]`, with `x_j^* ↦ images[j]^*`
    /// and `Tr(w) ↦ Tr(w(images))`.
    pub fn substitute(&self, images: &HashMap<u32, TracePolynomial>) -> Result<Self, TraceError> {
        let mut starred: HashMap<u32, TracePolynomial> = HashMap::new();
        let mut image_of = |l: &Letter| -> Result<TracePolynomial, TraceError> {
            let base = images.get(&l.index).ok_or(TraceError::MissingImage(l.index))?;
            if l.starred {
                Ok(starred.entry(l.index).or_insert_with(|| base.involute()).clone())
            } else {
                Ok(base.clone())
            }
        };
        let mut word_image = |w: &Word| -> Result<TracePolynomial, TraceError> {
            let mut acc = TracePolynomial::one();
            for l in &w.0 {
                acc = acc.mul(&image_of(l)?);
            }
            Ok(acc)
        };
        let mut out = TracePolynomial::zero();
        for (m, c) in &self.terms {
            let mut t = TracePolynomial::constant(c.clone());
            for s in &m.pure {
                t = t.mul(&word_image(&s.0)?.trace());
            }
            t = t.mul(&word_image(&m.word)?);
            out = out.add(&t);
        }
        Ok(out)
    }
}

impl From<Rational> for TracePolynomial {
    fn from(c: Rational) -> Self {
        TracePolynomial::constant(c)
    }
}

impl fmt::Display for TracePolynomial {
    /// Highest-degree terms first, in the shared text syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let is_unit = m.pure.is_empty() && m.word.is_one();
            if is_unit {
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
