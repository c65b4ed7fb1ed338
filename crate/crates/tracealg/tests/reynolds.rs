mod common;

use common::*;
use proptest::prelude::*;
use tracealg::generic_eval::{act_by, act_by_matrix, eval_symbolic, GenericContext};
use tracealg::reynolds::{casimir_value, reynolds_matrix, reynolds_on, reynolds_so_report};
use tracealg::scalar_poly::{Matrix, Monomial, MultiPoly, PolyMatrix, Rational, VarId};
use tracealg::trace_ring::{TraceMonomial, TracePolynomial};

const N: usize = 2;

fn var2(k: usize) -> VarId {
    // ξ_{1ab}, a, b ∈ {1, 2}
    VarId::xi(1, k / 2 + 1, k % 2 + 1)
}

fn poly2(max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, 4), rational()), 0..=max_terms).prop_map(move |ts| {
        MultiPoly::from_terms(ts.into_iter().map(|(es, c)| {
            let mut budget = max_deg;
            let fs: Vec<(VarId, u32)> = es
                .into_iter()
                .enumerate()
                .map(|(k, e)| {
                    let e = e.min(budget);
                    budget -= e;
                    (var2(k), e)
                })
                .filter(|(_, e)| *e > 0)
                .collect();
            (Monomial::from_factors(fs), c)
        }))
    })
}

fn poly_matrix2(max_deg: u32) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(poly2(max_deg, 2), 4).prop_map(|es| Matrix::from_fn(N, N, |i, j| es[i * N + j].clone()))
}

fn u0() -> PolyMatrix {
    Matrix::from_fn(2, 2, |i, j| {
        let v = [[3, -4], [4, 3]][i][j];
        MultiPoly::constant(Rational::new(v, 5))
    })
}

/// A concomitant: a word in `Ξ₁, Ξ₁ᵗ` evaluated generically at n = 2.
fn concomitant() -> impl Strategy<Value = PolyMatrix> {
    word(1, 2).prop_map(|w| {
        let f = TracePolynomial::from_monomial(TraceMonomial::new(vec![], w), Rational::one());
        eval_symbolic(&f, &GenericContext::new(N, 1)).unwrap()
    })
}

fn eval_f64(p: &MultiPoly, x: &[[f64; 2]; 2]) -> f64 {
    p.terms()
        .iter()
        .map(|(m, c)| {
            m.factors().iter().fold(c.to_f64(), |acc, (v, e)| acc * x[v.i() - 1][v.k() - 1].powi(*e as i32))
        })
        .sum()
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Average of `f(uXuᵗ)` over `O(2)`: `samples` equally spaced rotations and
/// the same number of reflections.
fn haar_average(f: &MultiPoly, x: &[[f64; 2]; 2], samples: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..samples {
        let t = std::f64::consts::TAU * k as f64 / samples as f64;
        let (s, c) = t.sin_cos();
        let rot = [[c, -s], [s, c]];
        let refl = [[c, s], [s, -c]];
        for u in [rot, refl] {
            sum += eval_f64(f, &mat_mul(&mat_mul(&u, x), &transpose(&u)));
        }
    }
    sum / (2 * samples) as f64
}

#[test]
fn casimir_worked_example() {
    let mu = Monomial::from_factors([(VarId::u(1, 1), 1), (VarId::u(2, 2), 1)]);
    assert_eq!(casimir_value(&mu, 2), q(-2));
    assert_eq!(casimir_value(&Monomial::one(), 3), q(0));
}

#[test]
fn invariants_are_fixed_and_antisymmetric_parts_vanish() {
    let tr = xi(1, 1, 1).add_ref(&xi(1, 2, 2));
    assert_eq!(reynolds_on(&tr, N).unwrap(), tr);
    let skew = xi(1, 1, 2).sub_ref(&xi(1, 2, 1));
    assert!(reynolds_on(&skew, N).unwrap().is_zero());
    // under SO(2) alone the skew part is invariant; the reflection kills it
    let report = reynolds_so_report(&skew, N).unwrap();
    assert_eq!(report.output, skew);
    assert!(report.iterates >= 1);
    assert_eq!(report.min_poly.last().cloned(), Some(Rational::one()));
}

#[test]
fn lift_of_identity_entries() {
    // Ξ and Ξᵗ are already concomitants, so they are fixed.
    let ctx = GenericContext::new(N, 1);
    let x = Matrix::from_fn(N, N, |i, j| xi(1, i + 1, j + 1));
    assert_eq!(reynolds_matrix(&x, &ctx).unwrap(), x);
    let xt = x.transpose();
    assert_eq!(reynolds_matrix(&xt, &ctx).unwrap(), xt);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn scalar_reynolds_is_an_invariant_projection(f in poly2(3, 3)) {
        let r = reynolds_on(&f, N).unwrap();
        prop_assert_eq!(reynolds_on(&r, N).unwrap(), r.clone());
        prop_assert_eq!(act_by(&r, &u0()), r.clone());
        prop_assert_eq!(reynolds_on(&act_by(&f, &u0()), N).unwrap(), r);
    }

    #[test]
    fn matrix_reynolds_is_an_equivariant_projection(f in poly_matrix2(2)) {
        let ctx = GenericContext::new(N, 1);
        let r = reynolds_matrix(&f, &ctx).unwrap();
        prop_assert_eq!(reynolds_matrix(&r, &ctx).unwrap(), r.clone());
        prop_assert_eq!(act_by_matrix(&r, &u0()), r.clone());
        prop_assert_eq!(reynolds_matrix(&act_by_matrix(&f, &u0()), &ctx).unwrap(), r);
    }

    #[test]
    fn module_property(f in poly_matrix2(1), h in concomitant()) {
        let ctx = GenericContext::new(N, 1);
        let r = reynolds_matrix(&f, &ctx).unwrap();
        prop_assert_eq!(reynolds_matrix(&h.mul(&f), &ctx).unwrap(), h.mul(&r));
        prop_assert_eq!(reynolds_matrix(&f.mul(&h), &ctx).unwrap(), r.mul(&h));
    }

    #[test]
    fn trace_intertwining(f in poly_matrix2(2)) {
        let ctx = GenericContext::new(N, 1);
        let r = reynolds_matrix(&f, &ctx).unwrap();
        prop_assert_eq!(r.trace(), reynolds_on(&f.trace(), N).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn haar_average_matches(f in poly2(3, 4), x in prop::array::uniform4(-2.0f64..2.0)) {
        let x = [[x[0], x[1]], [x[2], x[3]]];
        let r = reynolds_on(&f, N).unwrap();
        let exact = eval_f64(&r, &x);
        let avg = haar_average(&f, &x, 50_000);
        prop_assert!((exact - avg).abs() <= 1e-3 * exact.abs().max(1.0), "R'(f) = {exact}, average = {avg}");
    }
}
