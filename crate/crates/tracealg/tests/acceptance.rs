//! End-to-end acceptance gate. Every criterion is run in full and reported
//! as one PASS/FAIL line; the test then fails if any check fails, except for
//! the checks listed in `KNOWN_DEFECTS`, whose expected values are wrong
//! (see the README).

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracealg::generic_eval::{act_by, act_by_matrix, eval_numeric, eval_symbolic, is_psd, GenericContext};
use tracealg::identities::{
    cayley_hamilton_check, cayley_hamilton_residual, fm_identity_verdict, fm_symplectic_witness, verify_fm_identity,
    NewtonExponent,
};
use tracealg::positivity::{
    central_reduce_example61, certificate_value, gram_verify, negativity_functional, sample_points, sample_refute,
    verify_ks, ConstraintSet, GenRef, KsCertificate, KsMode, OmegaProduct, PositivityError, Term,
};
use tracealg::ps3::{
    build_context, entry11_obstruction, total_positivity_witness, verify_antisym_cubic, verify_beta_formulas,
    verify_beta_report, verify_idempotents, verify_independence,
};
use tracealg::reynolds::{casimir_value, reynolds_matrix, reynolds_on};
use tracealg::scalar_poly::{Matrix, Monomial, MultiPoly, NumMatrix, PolyMatrix, RatFunc, RatMatrix, Rational, VarId};
use tracealg::syntax::parse_trace_polynomial as tp;
use tracealg::trace_ring::{Letter, TraceMonomial, TracePolynomial, Word};

const INTRO: &str = "5*Tr(x1*x1') - 2*Tr(x1)*(x1 + x1')";

/// Checks whose stated expectation is unattainable: (criterion, check name).
const KNOWN_DEFECTS: &[(u32, &str)] = &[
    (2, "(x12-x21)^2*f = 5/2*(x12-x21)^2*H1H1' + 1/2*H2H2' + 1/2*H3H3'"),
    (6, "beta formulas as printed"),
];

type Checks = Vec<(String, bool)>;

struct Outcome {
    id: u32,
    checks: Checks,
}

fn check(checks: &mut Checks, name: impl Into<String>, ok: bool) {
    checks.push((name.into(), ok));
}

fn run(id: u32, title: &str, limit: Duration, body: impl FnOnce(&mut Checks)) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::new();
    if let Err(e) = catch_unwind(AssertUnwindSafe(|| body(&mut checks))) {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        check(&mut checks, format!("panicked: {}", msg.unwrap_or_default()), false);
    }
    let took = start.elapsed();
    check(&mut checks, format!("runtime {:.1?} < {:?}", took, limit), took < limit);
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    // written to the raw stderr handle so the line survives output capture
    let mut err = std::io::stderr().lock();
    let _ = if failed.is_empty() {
        writeln!(err, "PASS  [{id:>2}] {title} ({took:.1?})")
    } else {
        writeln!(err, "FAIL  [{id:>2}] {title} ({took:.1?}): {}", failed.join("; "))
    };
    Outcome { id, checks }
}

fn min_eigenvalue(m: &NumMatrix) -> f64 {
    let n = m.rows();
    let a = DMatrix::from_fn(n, n, |i, j| m.get(i, j).to_f64());
    SymmetricEigen::new(a).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn criterion_1(c: &mut Checks) {
    let f = tp(INTRO).unwrap();
    let v = eval_numeric(&f, &[NumMatrix::diag(&[q(2), q(1), q(1)])]).unwrap();
    check(c, "f(diag(2,1,1)) = diag(-2,14,14)", v == NumMatrix::diag(&[q(-2), q(14), q(14)]));
    let w = sample_refute(&f, &ConstraintSet::empty(3, 1), 10_000, &q(1), 0);
    let real = w.as_ref().is_some_and(|xs| !is_psd(&eval_numeric(&f, xs).unwrap()).unwrap());
    check(c, "n=3 witness within 10^4 trials", real);
    check(c, "no n=2 witness in 10^4 trials", sample_refute(&f, &ConstraintSet::empty(2, 1), 10_000, &q(1), 0).is_none());
}

fn criterion_2(c: &mut Checks) {
    let f = tp(INTRO).unwrap();
    let basis = gram_basis();
    for num in [-7, -6, -5] {
        let a = Rational::new(num, 2);
        check(c, format!("G_alpha accepted at {a}"), gram_verify(&f, &basis, &g_alpha(&a), 2).unwrap().accepted());
    }
    for a in [q(-2), q(-4)] {
        check(c, format!("G_alpha rejected at {a}"), !gram_verify(&f, &basis, &g_alpha(&a), 2).unwrap().accepted());
    }
    let d = skew_entry().square();
    let [h1, h2, h3] = h_concomitants();
    let sq = |h: &PolyMatrix| h.mul(&h.transpose());
    check(c, "H2H2' = (x12-x21)^2*H~2H~2'", sq(&h2) == sq(&h_tilde2()).mul_scalar(&d));
    let fm = eval_symbolic(&f, &GenericContext::new(2, 1)).unwrap();
    let rhs = |h3: &PolyMatrix| {
        sq(&h1).mul_scalar(&d).scale(&Rational::new(5, 2)).add(&sq(&h2).add(&sq(h3)).scale(&Rational::new(1, 2)))
    };
    let lhs = fm.mul_scalar(&d);
    check(c, KNOWN_DEFECTS[0].1, lhs == rhs(&h3));
    // diagnostics for the defect above
    check(c, "diagnostic: H3H3' = (x12-x21)^2*H~3H~3' fails for the literal H3", sq(&h3) != sq(&h_tilde3()).mul_scalar(&d));
    check(c, "diagnostic: combined identity holds with the sign-corrected H3", lhs == rhs(&h3_corrected()));
}

fn random_poly2(rng: &mut ChaCha8Rng, max_deg: u32, max_terms: usize) -> MultiPoly {
    let terms = (0..rng.gen_range(1..=max_terms)).map(|_| {
        let deg = rng.gen_range(0..=max_deg);
        let fs: Vec<(VarId, u32)> = (0..deg).map(|_| (VarId::xi(1, rng.gen_range(1..=2), rng.gen_range(1..=2)), 1)).collect();
        (Monomial::from_factors(fs), Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
    });
    MultiPoly::from_terms(terms.collect::<Vec<_>>())
}

fn random_concomitant(rng: &mut ChaCha8Rng) -> PolyMatrix {
    let w = Word((0..rng.gen_range(1..=2)).map(|_| Letter::new(1, rng.gen_bool(0.5))).collect());
    let f = TracePolynomial::from_monomial(TraceMonomial::new(vec![], w), Rational::one());
    eval_symbolic(&f, &GenericContext::new(2, 1)).unwrap()
}

fn eval_f64(p: &MultiPoly, x: &[[f64; 2]; 2]) -> f64 {
    p.terms()
        .iter()
        .map(|(m, c)| m.factors().iter().fold(c.to_f64(), |acc, (v, e)| acc * x[v.i() - 1][v.k() - 1].powi(*e as i32)))
        .sum()
}

/// Average of `f(uXuᵗ)` over 5·10⁴ equispaced rotations and as many reflections.
fn haar_average(f: &MultiPoly, x: &[[f64; 2]; 2]) -> f64 {
    const SAMPLES: usize = 50_000;
    let mut sum = 0.0;
    for k in 0..SAMPLES {
        let (s, co) = (std::f64::consts::TAU * k as f64 / SAMPLES as f64).sin_cos();
        for u in [[[co, -s], [s, co]], [[co, s], [s, -co]]] {
            let mut y = [[0.0; 2]; 2];
            for (i, row) in y.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| u[i][a] * x[a][b] * u[j][b]).sum();
                }
            }
            sum += eval_f64(f, &y);
        }
    }
    sum / (2 * SAMPLES) as f64
}

fn criterion_3(c: &mut Checks) {
    let mu = Monomial::from_factors([(VarId::u(1, 1), 1), (VarId::u(2, 2), 1)]);
    check(c, "casimir(u11*u22) = -2", casimir_value(&mu, 2) == q(-2));
    let ctx = GenericContext::new(2, 1);
    check(c, "R(H~2) = 0", reynolds_matrix(&h_tilde2(), &ctx).unwrap().is_zero());
    check(c, "R(H~3) = 0", reynolds_matrix(&h_tilde3(), &ctx).unwrap().is_zero());

    let u0: PolyMatrix = Matrix::from_fn(2, 2, |i, j| MultiPoly::constant(Rational::new([[3, -4], [4, 3]][i][j], 5)));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut idem, mut inv, mut module, mut intertwine) = (true, true, true, true);
    for _ in 0..50 {
        let f: PolyMatrix = Matrix::from_fn(2, 2, |_, _| random_poly2(&mut rng, 3, 2));
        let r = reynolds_matrix(&f, &ctx).unwrap();
        idem &= reynolds_matrix(&r, &ctx).unwrap() == r;
        inv &= act_by_matrix(&r, &u0) == r;
        let h = random_concomitant(&mut rng);
        module &= reynolds_matrix(&h.mul(&f), &ctx).unwrap() == h.mul(&r);
        intertwine &= r.trace() == reynolds_on(&f.trace(), 2).unwrap();
        let s = f.get(0, 0);
        let rs = reynolds_on(s, 2).unwrap();
        idem &= reynolds_on(&rs, 2).unwrap() == rs;
        inv &= act_by(&rs, &u0) == rs;
    }
    check(c, "idempotence on 50 inputs", idem);
    check(c, "invariance of outputs on 50 inputs", inv);
    check(c, "R(hf) = hR(f) on 50 inputs", module);
    check(c, "tr R(f) = R'(tr f) on 50 inputs", intertwine);

    let mut haar = true;
    for _ in 0..10 {
        let f = random_poly2(&mut rng, 3, 4);
        let x = [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
        let exact = eval_f64(&reynolds_on(&f, 2).unwrap(), &x);
        haar &= (exact - haar_average(&f, &x)).abs() <= 1e-3 * exact.abs().max(1.0);
    }
    check(c, "Haar average within 1e-3 on 10 inputs", haar);
}

fn criterion_4(c: &mut Checks) {
    check(c, "f_1 identity at n=2", verify_fm_identity(1));
    check(c, "f_2 identity at n=4", verify_fm_identity(2));
    for (n, m, d) in [(1, 1, 1), (1, 2, 1), (2, 2, 3)] {
        let ok = fm_symplectic_witness(n, m, d).is_ok_and(|(_, v)| !v.is_zero());
        check(c, format!("witness ({n},{m},{d}) nonzero"), ok);
    }
    check(c, "level-exponent variant of f_2 is not an identity", !fm_identity_verdict(2, 4, NewtonExponent::Level).holds);
}

fn criterion_5(c: &mut Checks) {
    let s = tp("x1").unwrap().add(&tp("x1'").unwrap()).scale(&Rational::new(1, 2));
    let ex = central_reduce_example61(&s, 3).unwrap();
    check(c, "four c_i identities at n=3", ex.holds == vec![true; 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut mismatches = 0;
    for k in 0..10_000 {
        let a: NumMatrix = Matrix::from_fn(3, 3, |_, _| Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        // indefinite, generic PSD, and singular PSD points
        let m = match k % 3 {
            0 => a.add(&a.transpose()),
            1 => a.mul(&a.transpose()),
            _ => {
                let mut b = a.clone();
                for i in 0..3 {
                    b.set(i, 2, q(0));
                }
                b.mul(&b.transpose())
            }
        };
        let xs = [m.clone()];
        let cs = ex.c.iter().all(|p| !eval_numeric(p, &xs).unwrap().get(0, 0).is_negative());
        if cs != is_psd(&m).unwrap() {
            mismatches += 1;
        }
    }
    check(c, format!("{mismatches} sampling mismatches in 10^4"), mismatches == 0);
}

fn criterion_6(c: &mut Checks) {
    let ctx = build_context();
    let r = verify_idempotents(&ctx);
    check(c, "idempotents", r.all_passed());
    check(c, "antisymmetric cubic", verify_antisym_cubic());
    check(c, KNOWN_DEFECTS[1].1, verify_beta_formulas(&ctx));
    for ch in verify_beta_report(&ctx).checks {
        check(c, format!("diagnostic: {} = {}", ch.name, ch.passed), ch.passed != ch.name.contains("as printed"));
    }
    check(c, "Jacobian rank 6", verify_independence(&ctx, 0));
    check(c, "tr(h*h^ti) = beta1*beta2", total_positivity_witness(&ctx).1);
    let k = |x: i64| RatFunc::constant(q(x));
    let r1: RatMatrix = Matrix::from_fn(3, 3, |i, j| k((i * 3 + j) as i64 - 4));
    let r2: RatMatrix = Matrix::from_fn(3, 3, |i, j| if i == j { RatFunc::var(VarId::xi(1, 1, 2)) } else { k(1) });
    check(c, "(1,1) entry three-term form", entry11_obstruction(&[r1, r2], &ctx).1);
}

fn criterion_7(c: &mut Checks) {
    check(c, "Cayley-Hamilton n=2", cayley_hamilton_check(2));
    check(c, "Cayley-Hamilton n=3", cayley_hamilton_check(3));
    check(c, "perturbed control fails (n=2)", !cayley_hamilton_residual(2, &q(1)).is_zero());
    check(c, "perturbed control fails (n=3)", !cayley_hamilton_residual(3, &Rational::new(1, 7)).is_zero());
}

fn criterion_8(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut found, mut exact, mut symmetric, mut none_ok) = (true, true, true, true);
    for _ in 0..100 {
        let len = rng.gen_range(1..=5);
        let mut lambda: Vec<Rational> =
            (0..len).map(|_| Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
        let i = rng.gen_range(0..len);
        lambda[i] = Rational::new(-rng.gen_range(1..=9), rng.gen_range(1..=5));
        let Some(w) = negativity_functional(&lambda) else {
            found = false;
            continue;
        };
        let f = |z: &Rational| w.coeffs.iter().rev().fold(Rational::zero(), |acc, k| &(&acc * z) + k);
        let direct: Rational = lambda.iter().map(|l| &(&f(l) * &f(l)) * l).sum();
        let sums: Vec<Rational> = (1..=w.power_sums.len()).map(|k| lambda.iter().map(|l| l.pow(k as u32)).sum()).collect();
        exact &= direct == w.value && w.value.is_negative() && sums == w.power_sums;
        let mut shuffled = lambda.clone();
        shuffled.shuffle(&mut rng);
        symmetric &= negativity_functional(&shuffled).is_some_and(|v| v.coeffs == w.coeffs);

        let nonneg: Vec<Rational> = lambda.iter().map(|l| l.abs()).collect();
        none_ok &= negativity_functional(&nonneg).is_none();
    }
    check(c, "a functional found for all 100 tuples", found);
    check(c, "sum f(l)^2*l < 0 exactly, from power sums", exact);
    check(c, "coefficients invariant under permutation", symmetric);
    check(c, "none for nonnegative tuples", none_ok);
}

fn criterion_9(c: &mut Checks) {
    let set = ConstraintSet::empty(3, 1);
    let omega = |fs: &[&str]| OmegaProduct { weight: q(1), factors: fs.iter().map(|s| tp(s).unwrap()).collect() };
    let one = TracePolynomial::one();
    let a2 = tp("1 + Tr(x1*x1')").unwrap();
    let trivial = KsCertificate { mode: KsMode::Psd, k: Some(1), t1: vec![Term::Omega { omega: vec![omega(&[])], h: None }], t2: vec![] };
    let second = KsCertificate {
        mode: KsMode::Pd,
        k: None,
        t1: vec![Term::Omega { omega: vec![omega(&[])], h: None }],
        t2: vec![Term::Omega { omega: vec![omega(&["x1"])], h: None }],
    };
    let good = [(one.clone(), trivial), (a2.clone(), second)];
    for (a, cert) in &good {
        check(c, format!("certificate for a = {a} verifies"), verify_ks(a, cert, &set) == Ok(true));
    }

    let bad_index = KsCertificate {
        mode: KsMode::Pd,
        k: None,
        t1: vec![Term::Conjugate { h: one.clone(), s: GenRef::Index(0) }],
        t2: vec![],
    };
    check(c, "out-of-range generator rejected", verify_ks(&one, &bad_index, &set) == Err(PositivityError::BadIndex(0)));
    let neg = KsCertificate {
        mode: KsMode::Pd,
        k: None,
        t1: vec![Term::Omega { omega: vec![OmegaProduct { weight: q(-1), factors: vec![] }], h: None }],
        t2: vec![],
    };
    check(c, "negative weight rejected", verify_ks(&one, &neg, &set).is_err());
    let mismatch = KsCertificate { mode: KsMode::Pd, k: Some(2), t1: vec![], t2: vec![] };
    check(c, "mode/k mismatch rejected", verify_ks(&one, &mismatch, &set).is_err());
    let wrong = KsCertificate { mode: KsMode::Psd, k: Some(1), t1: vec![], t2: vec![] };
    check(c, "wrong certificate is false", verify_ks(&a2, &wrong, &set) == Ok(false));
    check(c, "unparsable certificate rejected", serde_json::from_str::<KsCertificate>(r#"{"mode":"psd","t1":[{"kind":"x"}]}"#).is_err());

    let points = sample_points(&set, 100, 1_000, &q(2), 9);
    check(c, "100 sampled K_S points", points.len() == 100);
    let mut psd = true;
    for (a, cert) in &good {
        let parts = [certificate_value(&cert.t1, &set).unwrap(), certificate_value(&cert.t2, &set).unwrap(), a.clone()];
        for xs in &points {
            psd &= parts.iter().all(|p| is_psd(&eval_numeric(p, xs).unwrap()).unwrap());
        }
    }
    check(c, "a, t1, t2 PSD at all sampled points", psd);
}

fn criterion_10(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut compared, mut disagreements) = (0, 0);
    for k in 0..10_000 {
        let n = rng.gen_range(1..=5);
        let a: NumMatrix = Matrix::from_fn(n, n, |_, _| Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4)));
        let m = if k % 2 == 0 { a.add(&a.transpose()) } else { a.mul(&a.transpose()) };
        let lam = min_eigenvalue(&m);
        if lam.abs() <= 1e-9 {
            continue;
        }
        compared += 1;
        if is_psd(&m).unwrap() != (lam > 0.0) {
            disagreements += 1;
        }
    }
    check(c, format!("{disagreements} disagreements over {compared} matrices outside the band"), disagreements == 0);
}

#[test]
fn acceptance() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let secs = Duration::from_secs;
    let outcomes = [
        run(1, "intro example", secs(10), criterion_1),
        run(2, "Gram certificate and H identities", secs(30), criterion_2),
        run(3, "Reynolds operator", min(5), criterion_3),
        run(4, "f_m identity family", min(2), criterion_4),
        run(5, "central reduction (n=3)", min(2), criterion_5),
        run(6, "PS3 suite", min(10), criterion_6),
        run(7, "Cayley-Hamilton", min(2), criterion_7),
        run(8, "negativity functional", min(2), criterion_8),
        run(9, "certificate verifiers", min(2), criterion_9),
        run(10, "PSD oracle", min(2), criterion_10),
    ];
    let unexpected: Vec<String> = outcomes
        .iter()
        .flat_map(|o| o.checks.iter().filter(|(_, ok)| !ok).map(move |(n, _)| (o.id, n)))
        .filter(|(id, n)| !KNOWN_DEFECTS.contains(&(*id, n.as_str())))
        .map(|(id, n)| format!("[{id}] {n}"))
        .collect();
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
