mod common;

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use tracealg::generic_eval::{
    char_coeffs, eval_numeric, eval_symbolic, identity_verdict, is_pd, is_psd, is_trace_identity, GenericContext, Mode,
};
use tracealg::scalar_poly::{Matrix, NumMatrix, PolyMatrix, Rational};
use tracealg::syntax::parse_trace_polynomial as tp;

fn min_eigenvalue(m: &NumMatrix) -> f64 {
    let n = m.rows();
    let a = DMatrix::from_fn(n, n, |i, j| m.get(i, j).to_f64());
    SymmetricEigen::new(a).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn cayley_hamilton(m: &NumMatrix) -> NumMatrix {
    let n = m.rows();
    let sigma = char_coeffs(m);
    let mut acc = m.pow(n as u32);
    for (k, s) in sigma.iter().enumerate() {
        let term = m.pow((n - k - 1) as u32).scale(s);
        acc = if k % 2 == 0 { acc.sub(&term) } else { acc.add(&term) };
    }
    acc
}

#[test]
fn intro_example_at_diagonal() {
    let f = tp("5*Tr(x1*x1') - 2*Tr(x1)*(x1 + x1')").unwrap();
    let x = NumMatrix::diag(&[q(2), q(1), q(1)]);
    assert_eq!(eval_numeric(&f, &[x]).unwrap(), NumMatrix::diag(&[q(-2), q(14), q(14)]));
}

#[test]
fn symbolic_evaluation_basics() {
    let ctx = GenericContext::new(2, 1);
    assert_eq!(eval_symbolic(&tp("Tr(1)").unwrap(), &ctx).unwrap(), PolyMatrix::scalar(2, tracealg::scalar_poly::MultiPoly::from_int(2)));
    let m = eval_symbolic(&tp("x1 - x1'").unwrap(), &ctx).unwrap();
    assert_eq!(m.get(0, 1).clone(), xi(1, 1, 2).sub_ref(&xi(1, 2, 1)));
    assert!(eval_symbolic(&tp("x2").unwrap(), &ctx).is_err());
}

#[test]
fn identity_oracle_examples() {
    assert!(is_trace_identity(&tp("Tr(x1*x2) - Tr(x2*x1)").unwrap(), 3));
    assert!(!is_trace_identity(&tp("x1*x2 - x2*x1").unwrap(), 2));
    // Cayley–Hamilton for 2×2: x² − Tr(x)x + ½(Tr(x)² − Tr(x²)) = 0
    let ch2 = tp("x1^2 - Tr(x1)*x1 + 1/2*(Tr(x1)^2 - Tr(x1^2))").unwrap();
    assert!(is_trace_identity(&ch2, 2));
    assert!(!is_trace_identity(&ch2, 3));
    // a tiny budget forces the sampling route, which must agree
    let v = identity_verdict(&ch2, 2, 1);
    assert_eq!((v.holds, v.mode), (true, Mode::Probabilistic));
    let v = identity_verdict(&ch2, 3, 1);
    assert_eq!((v.holds, v.mode), (false, Mode::Exact));
}

#[test]
fn psd_examples() {
    assert!(is_psd(&NumMatrix::from_ints(&[&[1, 1], &[1, 1]])).unwrap());
    assert!(!is_pd(&NumMatrix::from_ints(&[&[1, 1], &[1, 1]])).unwrap());
    assert!(!is_psd(&NumMatrix::from_ints(&[&[0, 2], &[2, 0]])).unwrap());
    assert!(is_psd(&NumMatrix::from_ints(&[&[1, 2], &[0, 1]])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_is_a_star_homomorphism(f in trace_poly(2, 3, 3), g in trace_poly(2, 3, 3), xs in matrix_tuple(3, 2)) {
        let ef = eval_numeric(&f, &xs).unwrap();
        let eg = eval_numeric(&g, &xs).unwrap();
        prop_assert_eq!(eval_numeric(&f.mul(&g), &xs).unwrap(), ef.mul(&eg));
        prop_assert_eq!(eval_numeric(&f.add(&g), &xs).unwrap(), ef.add(&eg));
        prop_assert_eq!(eval_numeric(&f.involute(), &xs).unwrap(), ef.transpose());
        prop_assert_eq!(eval_numeric(&f.trace(), &xs).unwrap(), NumMatrix::scalar(3, ef.trace()));
    }

    #[test]
    fn symbolic_and_numeric_evaluation_agree(f in trace_poly(2, 3, 3), xs in matrix_tuple(2, 2)) {
        let ctx = GenericContext::new(2, 2);
        let sym = eval_symbolic(&f, &ctx).unwrap();
        let at = sym.eval(&|v| Some(xs[v.j() - 1].get(v.i() - 1, v.k() - 1).clone())).unwrap();
        prop_assert_eq!(at, eval_numeric(&f, &xs).unwrap());
    }

    #[test]
    fn identities_form_an_ideal(a in trace_poly(2, 2, 2), b in trace_poly(2, 2, 2), c in trace_poly(2, 2, 2)) {
        let ch = tp("x1^2 - Tr(x1)*x1 + 1/2*(Tr(x1)^2 - Tr(x1^2))").unwrap();
        let comm = tp("Tr(x1*x2) - Tr(x2*x1)").unwrap();
        prop_assert!(is_trace_identity(&ch.mul(&a).add(&b.mul(&comm)), 2));
        prop_assert!(is_trace_identity(&a.mul(&ch).mul(&c).trace(), 2));
    }

    #[test]
    fn char_coeffs_satisfy_cayley_hamilton(m in num_matrix(4)) {
        prop_assert!(cayley_hamilton(&m).is_zero());
        let sigma = char_coeffs(&m);
        prop_assert_eq!(&sigma[0], &m.trace());
    }

    #[test]
    fn psd_agrees_with_eigenvalues(n in 1usize..=5, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a: NumMatrix = Matrix::from_fn(n, n, |_, _| Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4)));
        // mix symmetric indefinite and Gram (PSD, often singular) matrices
        let m = if seed % 2 == 0 { a.add(&a.transpose()) } else { a.mul(&a.transpose()) };
        let lam = min_eigenvalue(&m);
        prop_assume!(lam.abs() > 1e-9);
        prop_assert_eq!(is_psd(&m).unwrap(), lam > 0.0);
    }
}
