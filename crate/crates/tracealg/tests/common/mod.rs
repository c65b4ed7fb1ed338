//! Shared proptest strategies.
#![allow(dead_code)]

use proptest::prelude::*;
use tracealg::scalar_poly::{Matrix, Monomial, MultiPoly, NumMatrix, Rational, VarId};
use tracealg::trace_ring::{trace_canon, Letter, TraceMonomial, TracePolynomial, Word};

pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| Rational::new(p, q))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Monomial in `ξ_{1,1,1..=nvars}` of total degree ≤ `max_deg`.
pub fn monomial(nvars: usize, max_deg: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0..=max_deg, nvars).prop_map(move |mut es| {
        let mut budget = max_deg;
        for e in es.iter_mut() {
            *e = (*e).min(budget);
            budget -= *e;
        }
        Monomial::from_factors(es.into_iter().enumerate().filter(|(_, e)| *e > 0).map(|(k, e)| (VarId::xi(1, 1, k + 1), e)))
    })
}

pub fn poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((monomial(nvars, max_deg), rational()), 0..=max_terms).prop_map(MultiPoly::from_terms)
}

pub fn nonzero_poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly(nvars, max_deg, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn letter(g: u32) -> impl Strategy<Value = Letter> {
    (1..=g, any::<bool>()).prop_map(|(j, s)| Letter::new(j, s))
}

pub fn word(g: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(g), 0..=max_len).prop_map(Word)
}

pub fn nonempty_word(g: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(g), 1..=max_len).prop_map(Word)
}

pub fn trace_monomial(g: u32, max_len: usize) -> impl Strategy<Value = TraceMonomial> {
    (prop::collection::vec(nonempty_word(g, max_len), 0..=1), word(g, max_len))
        .prop_map(|(pure, w)| TraceMonomial::new(pure.iter().map(trace_canon).collect(), w))
}

pub fn pure_monomial(g: u32, max_len: usize) -> impl Strategy<Value = TraceMonomial> {
    prop::collection::vec(nonempty_word(g, max_len), 0..=2)
        .prop_map(|pure| TraceMonomial::new(pure.iter().map(trace_canon).collect(), Word::one()))
}

pub fn trace_poly(g: u32, max_len: usize, max_terms: usize) -> impl Strategy<Value = TracePolynomial> {
    prop::collection::vec((trace_monomial(g, max_len), rational()), 0..=max_terms).prop_map(TracePolynomial::from_terms)
}

/// Trace polynomials without trace factors (ℚ-combinations of words).
pub fn word_poly(g: u32, max_len: usize, max_terms: usize) -> impl Strategy<Value = TracePolynomial> {
    prop::collection::vec((word(g, max_len), rational()), 0..=max_terms)
        .prop_map(|ts| TracePolynomial::from_terms(ts.into_iter().map(|(w, c)| (TraceMonomial::new(vec![], w), c))))
}

pub fn pure_poly(g: u32, max_len: usize, max_terms: usize) -> impl Strategy<Value = TracePolynomial> {
    prop::collection::vec((pure_monomial(g, max_len), rational()), 0..=max_terms).prop_map(TracePolynomial::from_terms)
}

pub fn num_matrix(n: usize) -> impl Strategy<Value = NumMatrix> {
    prop::collection::vec(rational(), n * n).prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
}

pub fn symmetric_matrix(n: usize) -> impl Strategy<Value = NumMatrix> {
    num_matrix(n).prop_map(|m| m.add(&m.transpose()))
}

pub fn matrix_tuple(n: usize, g: usize) -> impl Strategy<Value = Vec<NumMatrix>> {
    prop::collection::vec(num_matrix(n), g)
}

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn xi(j: usize, a: usize, b: usize) -> MultiPoly {
    MultiPoly::var(VarId::xi(j, a, b))
}

/// Generic 2×2 matrix `Ξ = (ξ_{1ab})`.
pub fn xi2() -> tracealg::scalar_poly::PolyMatrix {
    Matrix::from_fn(2, 2, |a, b| xi(1, a + 1, b + 1))
}

/// `ξ₁₂ − ξ₂₁`.
pub fn skew_entry() -> MultiPoly {
    xi(1, 1, 2).sub_ref(&xi(1, 2, 1))
}

pub fn h_tilde2() -> tracealg::scalar_poly::PolyMatrix {
    let p = xi(1, 1, 2).add_ref(&xi(1, 2, 1));
    let m = xi(1, 2, 2).sub_ref(&xi(1, 1, 1));
    Matrix::from_rows(vec![vec![p.clone(), m.clone()], vec![m.neg_ref(), p]])
}

pub fn h_tilde3() -> tracealg::scalar_poly::PolyMatrix {
    let p = xi(1, 1, 2).add_ref(&xi(1, 2, 1)).scale(&q(2));
    let a = xi(1, 1, 1).sub_ref(&xi(1, 2, 2).scale(&q(3)));
    let b = xi(1, 2, 2).sub_ref(&xi(1, 1, 1).scale(&q(3)));
    Matrix::from_rows(vec![vec![p.clone(), a], vec![b, p]])
}

/// `H₁ = Ξ − Ξᵗ`, `H₂ = ΞΞᵗ − ΞᵗΞ`, `H₃ = Ξ² − 2ΞΞᵗ + 2ΞᵗΞ − (Ξᵗ)²`.
pub fn h_concomitants() -> [tracealg::scalar_poly::PolyMatrix; 3] {
    let x = xi2();
    let t = x.transpose();
    let h1 = x.sub(&t);
    let h2 = x.mul(&t).sub(&t.mul(&x));
    let h3 = x.mul(&x).sub(&x.mul(&t).scale(&q(2))).add(&t.mul(&x).scale(&q(2))).sub(&t.mul(&t));
    [h1, h2, h3]
}

/// The monomial vector `v` (η₂ in the last slot).
pub fn gram_basis() -> Vec<MultiPoly> {
    let eta = |i| MultiPoly::var(VarId::eta(i));
    [(2, 2, 1), (2, 1, 2), (1, 2, 2), (1, 1, 1), (2, 2, 2), (2, 1, 1), (1, 2, 1), (1, 1, 2)]
        .iter()
        .map(|&(a, b, e)| xi(1, a, b).mul_ref(&eta(e)))
        .collect()
}

pub fn g_alpha(alpha: &Rational) -> NumMatrix {
    let a = alpha.clone();
    let b = &(-alpha) - &q(2);
    let z = q(0);
    let (two, one, five) = (q(-2), q(1), q(5));
    let rows = vec![
        vec![five.clone(), a.clone(), a.clone(), two.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![a.clone(), five.clone(), z.clone(), b.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![a.clone(), z.clone(), five.clone(), b.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![two.clone(), b.clone(), b.clone(), one.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), one.clone(), b.clone(), b.clone(), two.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), b.clone(), five.clone(), z.clone(), a.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), b.clone(), z.clone(), five.clone(), a.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), two, a.clone(), a, five],
    ];
    NumMatrix::from_rows(rows)
}

/// `Ξ² + 2ΞΞᵗ − 2ΞᵗΞ − (Ξᵗ)²`: the sign pattern for which
/// `H₃H₃ᵗ = (ξ₁₂ − ξ₂₁)² H̃₃H̃₃ᵗ` actually holds.
pub fn h3_corrected() -> tracealg::scalar_poly::PolyMatrix {
    let x = xi2();
    let t = x.transpose();
    x.mul(&x).add(&x.mul(&t).scale(&q(2))).sub(&t.mul(&x).scale(&q(2))).sub(&t.mul(&t))
}
