//! Concrete trace identities: the `f_m` family, Capelli polynomials,
//! the symplectic involution, Cayley–Hamilton and the ψ embeddings.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::generic_eval::{
    char_coeffs, eval_numeric, generic_matrix_unchecked, identity_verdict, term_budget, IdentityVerdict,
};
use crate::scalar_poly::{Matrix, MultiPoly, NumMatrix, PolyMatrix, Rational};
use crate::trace_ring::{Letter, TracePolynomial, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("the direct-sum multiplicity d must be odd, got {0}")]
    DEvenRejected(usize),
    #[error("Capelli polynomials are only built for m <= 6, got {0}")]
    MTooLarge(usize),
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
}

/// Which power of `x₁x₂` enters the Newton recursion.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NewtonExponent {
    /// `Tr((x₁x₂)^i)` with `i` the summation index (Newton's identities).
    Index,
    /// `Tr((x₁x₂)^k)` with `k` the level, as literally printed.
    Level,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FmPolynomial {
    pub m: usize,
    /// `f′_0, …, f′_m` (pure trace polynomials).
    pub primes: Vec<TracePolynomial>,
    pub value: TracePolynomial,
}

fn x1x2() -> TracePolynomial {
    TracePolynomial::var(1).mul(&TracePolynomial::var(2))
}

pub fn newton_fm(m: usize) -> FmPolynomial {
    newton_fm_with(m, NewtonExponent::Index)
}

/// `f_m = Σ_k (−1)^k f′_k (x₁x₂)^{m−k}` with
/// `f′_k = Σ_{i=1}^k (−1)^{i−1}/(2k) · Tr((x₁x₂)^e) f′_{k−i}`.
pub fn newton_fm_with(m: usize, exponent: NewtonExponent) -> FmPolynomial {
    assert!(m >= 1, "f_m needs m >= 1");
    let p = x1x2();
    let powers: Vec<TracePolynomial> = (0..=m).map(|e| p.pow(e as u32)).collect();
    let traces: Vec<TracePolynomial> = powers.iter().map(|w| w.trace()).collect();
    let mut primes = vec![TracePolynomial::one()];
    for k in 1..=m {
        let mut acc = TracePolynomial::zero();
        for i in 1..=k {
            let e = match exponent {
                NewtonExponent::Index => i,
                NewtonExponent::Level => k,
            };
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let c = Rational::new(sign, 2 * k as i64);
            acc = acc.add(&traces[e].mul(&primes[k - i]).scale(&c));
        }
        primes.push(acc);
    }
    let mut value = TracePolynomial::zero();
    for (k, fk) in primes.iter().enumerate() {
        let t = fk.mul(&powers[m - k]);
        value = if k % 2 == 0 { value.add(&t) } else { value.sub(&t) };
    }
    FmPolynomial { m, primes, value }
}

/// `f(x₁ − x₁^*, x₂ − x₂^*)`.
pub fn skew_substitution(f: &TracePolynomial) -> TracePolynomial {
    let mut img = HashMap::new();
    img.insert(1, TracePolynomial::var(1).sub(&TracePolynomial::var_star(1)));
    img.insert(2, TracePolynomial::var(2).sub(&TracePolynomial::var_star(2)));
    f.substitute(&img).expect("both images supplied")
}

/// Whether the skew substitution of `f_m` vanishes on `n×n` matrices.
pub fn fm_identity_verdict(m: usize, n: usize, exponent: NewtonExponent) -> IdentityVerdict {
    let f = skew_substitution(&newton_fm_with(m, exponent).value);
    identity_verdict(&f, n, term_budget())
}

/// `f_m(x₁ − x₁^*, x₂ − x₂^*)` is an identity of `2m×2m` matrices.
pub fn verify_fm_identity(m: usize) -> bool {
    fm_identity_verdict(m, 2 * m, NewtonExponent::Index).holds
}

/// `J = [[0, I], [−I, 0]]` of size `2n`.
pub fn symplectic_j(n: usize) -> NumMatrix {
    Matrix::from_fn(2 * n, 2 * n, |a, b| {
        if b == a + n {
            Rational::one()
        } else if a == b + n {
            -Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Evaluates `f_m` at `x₁ = (−SJ)^{⊕d}`, `x₂ = J^{⊕d}` (so `x₁x₂ = S^{⊕d}`),
/// with `S = diag(1, …, 1, 0)` of size `2n`. Returns `(x₁x₂, f_m value)`.
pub fn fm_symplectic_witness(n: usize, m: usize, d: usize) -> Result<(NumMatrix, NumMatrix), IdentityError> {
    if d % 2 == 0 {
        return Err(IdentityError::DEvenRejected(d));
    }
    let size = 2 * n;
    let s = NumMatrix::diag(&(0..size).map(|i| Rational::from_int((i + 1 < size) as i64)).collect::<Vec<_>>());
    let j = symplectic_j(n);
    let a1 = s.mul(&j).neg().direct_power(d);
    let a2 = j.direct_power(d);
    let prod = a1.mul(&a2);
    let value = eval_numeric(&newton_fm(m).value, &[a1, a2]).expect("two square matrices of equal size");
    Ok((prod, value))
}

/// A ℚ-combination of words without trace part.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NcPolynomial {
    terms: BTreeMap<Word, Rational>,
}

impl NcPolynomial {
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn to_trace_polynomial(&self) -> TracePolynomial {
        self.terms.iter().fold(TracePolynomial::zero(), |acc, (w, c)| acc.add(&TracePolynomial::word(w.clone()).scale(c)))
    }

    pub fn eval(&self, xs: &[NumMatrix]) -> NumMatrix {
        eval_numeric(&self.to_trace_polynomial(), xs).expect("enough matrices of equal size")
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_trace_polynomial())
    }
}

fn permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    if m == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(m - 1) {
        // inserting m−1 at position k adds (len − k) inversions
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, m - 1);
            let sign = if (p.len() - k) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// `c_m = Σ_π sgn π · x_{π(1)} x_{m+1} x_{π(2)} x_{m+2} ⋯ x_{2m−1} x_{π(m)}`.
pub fn capelli(m: usize) -> Result<NcPolynomial, IdentityError> {
    if m > 6 {
        return Err(IdentityError::MTooLarge(m));
    }
    assert!(m >= 1, "capelli needs m >= 1");
    let mut terms = BTreeMap::new();
    for (p, sign) in permutations(m) {
        let mut w = Vec::with_capacity(2 * m - 1);
        for (pos, &k) in p.iter().enumerate() {
            if pos > 0 {
                w.push(Letter::new((m + pos) as u32, false));
            }
            w.push(Letter::new(k as u32 + 1, false));
        }
        terms.insert(Word(w), Rational::from_int(sign));
    }
    Ok(NcPolynomial { terms })
}

/// `(a b; c d)^s = (dᵗ −bᵗ; −cᵗ aᵗ)` with half-size blocks.
pub fn symplectic_involution(m: &NumMatrix) -> Result<NumMatrix, IdentityError> {
    let size = m.rows();
    if size % 2 == 1 {
        return Err(IdentityError::OddDimension(size));
    }
    let h = size / 2;
    let a = m.submatrix(0, 0, h, h);
    let b = m.submatrix(0, h, h, h);
    let c = m.submatrix(h, 0, h, h);
    let d = m.submatrix(h, h, h, h);
    Ok(Matrix::from_blocks(&d.transpose(), &b.transpose().neg(), &c.transpose().neg(), &a.transpose()))
}

/// Residual `(−a)^n + Σ (σ_j + δ_{j1}·shift)(−a)^{n−j}` for the generic
/// symmetric `a = ½(Ξ + Ξᵗ)`.
pub fn cayley_hamilton_residual(n: usize, shift: &Rational) -> PolyMatrix {
    let x = generic_matrix_unchecked(n, 1);
    let a = x.add(&x.transpose()).scale(&Rational::new(1, 2));
    let mut sigma = char_coeffs(&a);
    sigma[0] = sigma[0].add_ref(&MultiPoly::constant(shift.clone()));
    let neg = a.neg();
    let mut powers = vec![Matrix::identity(n)];
    for k in 1..=n {
        powers.push(powers[k - 1].mul(&neg));
    }
    let mut acc = powers[n].clone();
    for (j, s) in sigma.iter().enumerate() {
        acc = acc.add(&powers[n - j - 1].mul_scalar(s));
    }
    acc
}

pub fn cayley_hamilton_check(n: usize) -> bool {
    cayley_hamilton_residual(n, &Rational::zero()).is_zero()
}

/// `ψ₁(a + bi) = [[a, −b], [b, a]]`.
pub fn psi1(a: &Rational, b: &Rational) -> NumMatrix {
    NumMatrix::from_rows(vec![vec![a.clone(), -b], vec![b.clone(), a.clone()]])
}

/// Left-regular representation of `a + bi + cj + dk`.
pub fn psi2(q: &[Rational; 4]) -> NumMatrix {
    let [a, b, c, d] = q;
    NumMatrix::from_rows(vec![
        vec![a.clone(), -b, -c, -d],
        vec![b.clone(), a.clone(), -d, c.clone()],
        vec![c.clone(), d.clone(), a.clone(), -b],
        vec![d.clone(), -c, b.clone(), a.clone()],
    ])
}

/// Hamilton product.
pub fn quaternion_mul(p: &[Rational; 4], q: &[Rational; 4]) -> [Rational; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        &(&(a1 * a2) - &(b1 * b2)) - &(&(c1 * c2) + &(d1 * d2)),
        &(&(a1 * b2) + &(b1 * a2)) + &(&(c1 * d2) - &(d1 * c2)),
        &(&(a1 * c2) - &(b1 * d2)) + &(&(c1 * a2) + &(d1 * b2)),
        &(&(a1 * d2) + &(b1 * c2)) - &(&(c1 * b2) - &(d1 * a2)),
    ]
}

fn conj(q: &[Rational; 4]) -> [Rational; 4] {
    [q[0].clone(), -&q[1], -&q[2], -&q[3]]
}

/// Checks multiplicativity, the trace relations (ψ₁ preserves the reduced
/// trace `2·Re z`, ψ₂ doubles `2α` to `4α`) and that conjugation becomes
/// transposition, on the given complex and quaternion samples.
pub fn psi_embeddings_check_on(complex: &[(Rational, Rational)], quats: &[[Rational; 4]]) -> bool {
    let two = Rational::from_int(2);
    let four = Rational::from_int(4);
    for (a, b) in complex {
        let m = psi1(a, b);
        if m.trace() != &two * a || psi1(a, &-b) != m.transpose() {
            return false;
        }
        for (c, d) in complex {
            let re = a * c - b * d;
            let im = a * d + b * c;
            if psi1(&re, &im) != m.mul(&psi1(c, d)) {
                return false;
            }
        }
    }
    for p in quats {
        let m = psi2(p);
        if m.trace() != &four * &p[0] || psi2(&conj(p)) != m.transpose() {
            return false;
        }
        for q in quats {
            if psi2(&quaternion_mul(p, q)) != m.mul(&psi2(q)) {
                return false;
            }
        }
    }
    true
}

/// `psi_embeddings_check_on` with a fixed spread of rational samples.
pub fn psi_embeddings_check() -> bool {
    let r = Rational::new;
    let complex = vec![(r(1, 1), r(0, 1)), (r(0, 1), r(1, 1)), (r(3, 2), r(-7, 5)), (r(-2, 3), r(5, 4))];
    let quats = vec![
        [r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
        [r(0, 1), r(1, 1), r(0, 1), r(0, 1)],
        [r(0, 1), r(0, 1), r(1, 1), r(0, 1)],
        [r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
        [r(2, 3), r(-1, 2), r(5, 7), r(3, 1)],
        [r(-4, 1), r(1, 9), r(0, 1), r(-2, 5)],
    ];
    psi_embeddings_check_on(&complex, &quats)
}
