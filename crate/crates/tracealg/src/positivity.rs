//! Positivity certificates for trace polynomials and their verifiers.
//!
//! Certificates are explicit: every verifier rebuilds the represented
//! trace polynomial and compares it with the claimed value modulo the
//! trace identities of `n×n` matrices. Nothing here searches for
//! certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generic_eval::{eval_numeric, eval_symbolic, is_psd, is_trace_identity, GenericContext};
use crate::scalar_poly::{exact_ldlt, Ldlt, Matrix, MultiPoly, NumMatrix, Rational, VarId};
use crate::trace_ring::TracePolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PositivityError {
    #[error("generator index {0} is out of range")]
    BadIndex(usize),
    #[error("certificate does not fit its mode: {0}")]
    ModeMismatch(String),
    #[error("generator {0} is not symmetric")]
    NotSymmetric(usize),
    #[error("this reduction needs n = 3, got {0}")]
    WrongSize(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weights must be positive, got {0}")]
    NonPositiveWeight(Rational),
}

/// Symmetric generators `S`, defining `K_S = {X : s(X) ⪰ 0 for all s ∈ S}`
/// inside `M_n(ℝ)^g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub generators: Vec<TracePolynomial>,
    pub n: usize,
    #[serde(default)]
    pub g: usize,
}

impl ConstraintSet {
    pub fn new(generators: Vec<TracePolynomial>, n: usize, g: usize) -> Result<Self, PositivityError> {
        let s = ConstraintSet { generators, n, g };
        s.validate()?;
        Ok(s)
    }

    pub fn empty(n: usize, g: usize) -> Self {
        ConstraintSet { generators: Vec::new(), n, g }
    }

    /// Checks symmetry of every generator and widens `g` to cover them.
    pub fn validate(&self) -> Result<(), PositivityError> {
        for (i, s) in self.generators.iter().enumerate() {
            if !s.is_symmetric() {
                return Err(PositivityError::NotSymmetric(i));
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.generators.iter().map(|s| s.max_index() as usize).max().unwrap_or(0).max(self.g)
    }

    pub fn get(&self, i: usize) -> Result<&TracePolynomial, PositivityError> {
        self.generators.get(i).ok_or(PositivityError::BadIndex(i))
    }

    /// `X ∈ K_S`.
    pub fn contains(&self, xs: &[NumMatrix]) -> bool {
        self.generators
            .iter()
            .all(|s| eval_numeric(s, xs).ok().and_then(|v| is_psd(&v).ok()).unwrap_or(false))
    }
}

/// A product `w · Π Tr(h h^*)` with a positive rational weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaProduct {
    #[serde(default = "Rational::one")]
    pub weight: Rational,
    #[serde(default)]
    pub factors: Vec<TracePolynomial>,
}

/// An element of Ω: a sum of weighted products of traces of hermitian squares.
pub type OmegaCertificate = Vec<OmegaProduct>;

/// One factor `Tr(h s h^*)` of an `S′` product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFactor {
    pub h: TracePolynomial,
    pub s: usize,
}

/// A reference to an element of `S′`: a generator, or a product of
/// traces `Π Tr(h_i s_i h_i^*)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenRef {
    Index(usize),
    Product { product: Vec<TraceFactor> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Term {
    /// `ω · h h^*` (`h = 1` when omitted).
    Omega {
        omega: OmegaCertificate,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<TracePolynomial>,
    },
    /// `h s h^*`.
    Conjugate { h: TracePolynomial, s: GenRef },
    /// `Tr(h s h^*) · ω`.
    ScaledTrace { h: TracePolynomial, s: GenRef, omega: OmegaCertificate },
}

/// An element of the cyclic quadratic module (or of `T_S^tr` when product
/// references are used).
pub type CyclicQmCertificate = Vec<Term>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KsMode {
    Psd,
    Pd,
    Zero,
}

/// `a t₁ = t₁ a = a^{2k} + t₂` (psd), `= 1 + t₂` (pd), or `−a^{2k} = t₂` (zero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsCertificate {
    pub mode: KsMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default)]
    pub t1: CyclicQmCertificate,
    #[serde(default)]
    pub t2: CyclicQmCertificate,
}

fn hsh(h: &TracePolynomial, s: &TracePolynomial) -> TracePolynomial {
    h.mul(s).mul(&h.involute())
}

pub fn omega_value(omega: &[OmegaProduct]) -> Result<TracePolynomial, PositivityError> {
    let mut acc = TracePolynomial::zero();
    for p in omega {
        if !p.weight.is_positive() {
            return Err(PositivityError::NonPositiveWeight(p.weight.clone()));
        }
        let mut t = TracePolynomial::constant(p.weight.clone());
        for h in &p.factors {
            t = t.mul(&h.mul(&h.involute()).trace());
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn gen_value(r: &GenRef, set: &ConstraintSet) -> Result<TracePolynomial, PositivityError> {
    match r {
        GenRef::Index(i) => set.get(*i).cloned(),
        GenRef::Product { product } => {
            let mut acc = TracePolynomial::one();
            for f in product {
                acc = acc.mul(&hsh(&f.h, set.get(f.s)?).trace());
            }
            Ok(acc)
        }
    }
}

/// The trace polynomial a certificate represents.
pub fn certificate_value(cert: &[Term], set: &ConstraintSet) -> Result<TracePolynomial, PositivityError> {
    let mut acc = TracePolynomial::zero();
    for t in cert {
        let v = match t {
            Term::Omega { omega, h } => {
                let w = omega_value(omega)?;
                match h {
                    Some(h) => w.mul(&h.mul(&h.involute())),
                    None => w,
                }
            }
            Term::Conjugate { h, s } => hsh(h, &gen_value(s, set)?),
            Term::ScaledTrace { h, s, omega } => hsh(h, &gen_value(s, set)?).trace().mul(&omega_value(omega)?),
        };
        acc = acc.add(&v);
    }
    Ok(acc)
}

fn vanishes(f: &TracePolynomial, n: usize) -> bool {
    f.is_zero() || is_trace_identity(f, n)
}

/// Checks a Krivine–Stengle style certificate for `a` at size `S.n`.
pub fn verify_ks(a: &TracePolynomial, cert: &KsCertificate, set: &ConstraintSet) -> Result<bool, PositivityError> {
    let k = match (cert.mode, cert.k) {
        (KsMode::Pd, Some(_)) => return Err(PositivityError::ModeMismatch("pd mode takes no exponent k".into())),
        (KsMode::Psd | KsMode::Zero, None) => {
            return Err(PositivityError::ModeMismatch("psd and zero modes need an exponent k".into()))
        }
        (_, k) => k.unwrap_or(0),
    };
    if cert.mode == KsMode::Zero && !cert.t1.is_empty() {
        return Err(PositivityError::ModeMismatch("zero mode has no t1".into()));
    }
    let t1 = certificate_value(&cert.t1, set)?;
    let t2 = certificate_value(&cert.t2, set)?;
    let n = set.n;
    let a2k = a.pow(2 * k);
    Ok(match cert.mode {
        KsMode::Zero => vanishes(&a2k.add(&t2), n),
        KsMode::Psd | KsMode::Pd => {
            let rhs = if cert.mode == KsMode::Psd { a2k } else { TracePolynomial::one() }.add(&t2);
            vanishes(&a.mul(&t1).sub(&rhs), n) && vanishes(&t1.mul(a).sub(&rhs), n)
        }
    })
}

/// `−1 = certificate value` proves `K_S = ∅`.
pub fn verify_empty_refutation(set: &ConstraintSet, cert: &[Term]) -> Result<bool, PositivityError> {
    let v = certificate_value(cert, set)?;
    Ok(vanishes(&v.add(&TracePolynomial::one()), set.n))
}

/// An element `left · j · right` (or its trace) of the trace ideal
/// generated by `J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealTerm {
    #[serde(default = "TracePolynomial::one")]
    pub left: TracePolynomial,
    pub generator: usize,
    #[serde(default = "TracePolynomial::one")]
    pub right: TracePolynomial,
    #[serde(default)]
    pub traced: bool,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct NullstellensatzCertificate {
    #[serde(default)]
    pub omega: OmegaCertificate,
    #[serde(default)]
    pub ideal: Vec<IdealTerm>,
}

/// Checks `−(h^* h)^k = ω + Σ ideal terms` at size `n`.
pub fn verify_nullstellensatz(
    h: &TracePolynomial,
    ideal: &[TracePolynomial],
    cert: &NullstellensatzCertificate,
    k: u32,
    n: usize,
) -> Result<bool, PositivityError> {
    let mut rhs = omega_value(&cert.omega)?;
    for t in &cert.ideal {
        let j = ideal.get(t.generator).ok_or(PositivityError::BadIndex(t.generator))?;
        let v = t.left.mul(j).mul(&t.right);
        rhs = rhs.add(&if t.traced { v.trace() } else { v });
    }
    let lhs = h.involute().mul(h).pow(k).neg();
    Ok(vanishes(&lhs.sub(&rhs), n))
}

/// `[σ₁(s), …, σ_n(s)]` from the power sums `Tr(s^i)` by Newton's identities.
pub fn central_reduce_sigma(s: &TracePolynomial, n: usize) -> Vec<TracePolynomial> {
    let mut power = TracePolynomial::one();
    let mut p = vec![TracePolynomial::zero()];
    for _ in 1..=n {
        power = power.mul(s);
        p.push(power.trace());
    }
    let mut e = vec![TracePolynomial::one()];
    for k in 1..=n {
        let mut acc = TracePolynomial::zero();
        for i in 1..=k {
            let t = e[k - i].mul(&p[i]);
            acc = if i % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        e.push(acc.scale(&Rational::new(1, k as i64)));
    }
    e.split_off(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralReduction {
    pub sigma: Vec<TracePolynomial>,
    /// `c₁ … c₄` as traces of conjugates of `s`.
    pub c: Vec<TracePolynomial>,
    /// Their claimed σ-expressions.
    pub expressions: Vec<TracePolynomial>,
    /// Whether each `c_i` equals its expression on 3×3 matrices.
    pub holds: Vec<bool>,
}

/// The four central constraints replacing `s ⪰ 0` at `n = 3`:
/// `Tr(s) = σ₁`, `Tr((s−σ₁)s(s−σ₁)) = σ₁σ₂ + 3σ₃`,
/// `Tr((s²−σ₁s+σ₂)s(s²−σ₁s+σ₂)) = σ₂σ₃`,
/// `Tr((s−σ₁−1)s(s−σ₁−1)) = σ₁ + 4σ₂ + 3σ₃ + σ₁σ₂`.
pub fn central_reduce_example61(s: &TracePolynomial, n: usize) -> Result<CentralReduction, PositivityError> {
    if n != 3 {
        return Err(PositivityError::WrongSize(n));
    }
    let sigma = central_reduce_sigma(s, 3);
    let (s1, s2, s3) = (&sigma[0], &sigma[1], &sigma[2]);
    let one = TracePolynomial::one();
    let conj = |h: &TracePolynomial| h.mul(s).mul(&h.involute()).trace();
    let q2 = s.mul(s).sub(&s1.mul(s)).add(s2);
    let c = vec![s.trace(), conj(&s.sub(s1)), conj(&q2), conj(&s.sub(s1).sub(&one))];
    let int = |k: i64| Rational::from_int(k);
    let s1s2 = s1.mul(s2);
    let expressions = vec![
        s1.clone(),
        s1s2.add(&s3.scale(&int(3))),
        s2.mul(s3),
        s1.add(&s2.scale(&int(4))).add(&s3.scale(&int(3))).add(&s1s2),
    ];
    let holds = c.iter().zip(&expressions).map(|(a, b)| vanishes(&a.sub(b), 3)).collect();
    Ok(CentralReduction { sigma, c, expressions, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativityWitness {
    /// Coefficients of `f = Σ v_i ζ^i`, constant term first.
    pub coeffs: Vec<Rational>,
    /// Power sums `p₁ … p_{2N−1}` the construction used.
    pub power_sums: Vec<Rational>,
    /// `Σ_j f(λ_j)² λ_j`, always negative.
    pub value: Rational,
}

/// For a tuple with a negative entry, a polynomial `f` whose coefficients
/// depend only on power sums with `Σ f(λ_j)² λ_j < 0`; `None` when the
/// Hankel matrix `P_{ij} = p_{i+j−1}` is positive semidefinite.
pub fn negativity_functional(lambda: &[Rational]) -> Option<NegativityWitness> {
    let m = lambda.len();
    if m == 0 {
        return None;
    }
    let power_sums: Vec<Rational> =
        (1..2 * m).map(|k| lambda.iter().map(|l| l.pow(k as u32)).sum()).collect();
    let hankel = Matrix::from_fn(m, m, |i, j| power_sums[i + j].clone());
    match exact_ldlt(&hankel).expect("Hankel matrices are symmetric") {
        Ldlt::Factored { .. } => None,
        Ldlt::Indefinite { witness, .. } => {
            let value: Rational = lambda
                .iter()
                .map(|l| {
                    let fl: Rational = witness.iter().rev().fold(Rational::zero(), |acc, c| &(&acc * l) + c);
                    &(&fl * &fl) * l
                })
                .sum();
            assert!(value.is_negative(), "LDLᵀ witness must give a negative value");
            Some(NegativityWitness { coeffs: witness, power_sums, value })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramReport {
    pub identity_holds: bool,
    pub gram_psd: bool,
}

impl GramReport {
    pub fn accepted(&self) -> bool {
        self.identity_holds && self.gram_psd
    }
}

/// Checks `η f(Ξ) ηᵗ = v G vᵗ` coefficientwise (η = auxiliary row vector)
/// and `G ⪰ 0`.
pub fn gram_verify(
    f: &TracePolynomial,
    basis: &[MultiPoly],
    gram: &NumMatrix,
    n: usize,
) -> Result<GramReport, PositivityError> {
    if gram.rows() != basis.len() || gram.cols() != basis.len() {
        return Err(PositivityError::DimensionMismatch(format!(
            "{} basis entries but a {}x{} Gram matrix",
            basis.len(),
            gram.rows(),
            gram.cols()
        )));
    }
    if !gram.is_symmetric() {
        return Err(PositivityError::DimensionMismatch("Gram matrix is not symmetric".into()));
    }
    let ctx = GenericContext::for_poly(f, n);
    let fm = eval_symbolic(f, &ctx).expect("context covers f");
    let eta: Vec<MultiPoly> = (1..=n).map(|i| MultiPoly::var(VarId::eta(i))).collect();
    let mut lhs = MultiPoly::zero();
    for a in 0..n {
        for b in 0..n {
            let e = fm.get(a, b);
            if !e.is_zero() {
                lhs = lhs.add_ref(&eta[a].mul_ref(e).mul_ref(&eta[b]));
            }
        }
    }
    let mut rhs = MultiPoly::zero();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let g = gram.get(i, j);
            if !g.is_zero() {
                rhs = rhs.add_ref(&basis[i].mul_ref(&basis[j]).scale(g));
            }
        }
    }
    Ok(GramReport { identity_holds: lhs == rhs, gram_psd: is_psd(gram).expect("symmetric checked") })
}

/// Denominator of the sampling grid.
pub const GRID_DENOMINATOR: i64 = 64;

fn sample_tuple(rng: &mut ChaCha8Rng, g: usize, n: usize, bound: i64) -> Vec<NumMatrix> {
    (0..g)
        .map(|_| Matrix::from_fn(n, n, |_, _| Rational::new(rng.gen_range(-bound..=bound), GRID_DENOMINATOR)))
        .collect()
}

fn grid_bound(radius: &Rational) -> i64 {
    let r = radius * &Rational::from_int(GRID_DENOMINATOR);
    (r.numer() / r.denom()).try_into().unwrap_or(i64::MAX / 2)
}

/// Samples `trials` tuples on the grid `(1/64)ℤ ∩ [−radius, radius]`,
/// keeps those in `K_S`, and returns the first where `f` is not PSD.
pub fn sample_refute(
    f: &TracePolynomial,
    set: &ConstraintSet,
    trials: usize,
    radius: &Rational,
    seed: u64,
) -> Option<Vec<NumMatrix>> {
    let g = set.num_vars().max(f.max_index() as usize).max(1);
    let bound = grid_bound(radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let xs = sample_tuple(&mut rng, g, set.n, bound);
        if !set.contains(&xs) {
            continue;
        }
        let v = eval_numeric(f, &xs).expect("tuple covers f");
        if !is_psd(&v).unwrap_or(false) {
            return Some(xs);
        }
    }
    None
}

/// Up to `count` grid points of `K_S` found within `trials` samples.
pub fn sample_points(set: &ConstraintSet, count: usize, trials: usize, radius: &Rational, seed: u64) -> Vec<Vec<NumMatrix>> {
    let g = set.num_vars().max(1);
    let bound = grid_bound(radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..trials {
        if out.len() == count {
            break;
        }
        let xs = sample_tuple(&mut rng, g, set.n, bound);
        if set.contains(&xs) {
            out.push(xs);
        }
    }
    out
}

/// Checks that the certificate represents `ρ − Σ_j x_j x_j^*`
/// (`j ≤ g`), which makes the module archimedean.
pub fn verify_archimedean_bound(
    cert: &[Term],
    set: &ConstraintSet,
    rho: &Rational,
) -> Result<bool, PositivityError> {
    let v = certificate_value(cert, set)?;
    let mut target = TracePolynomial::constant(rho.clone());
    for j in 1..=set.num_vars().max(1) as u32 {
        target = target.sub(&TracePolynomial::var(j).mul(&TracePolynomial::var_star(j)));
    }
    Ok(vanishes(&v.sub(&target), set.n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_trace_polynomial as tp;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn certificate_values() {
        let set = ConstraintSet::new(vec![tp("1 - Tr(x1*x1')").unwrap()], 2, 1).unwrap();
        assert!(certificate_value(&[], &set).unwrap().is_zero());
        let om = Term::Omega { omega: vec![OmegaProduct { weight: r(1), factors: vec![tp("x1").unwrap()] }], h: None };
        assert_eq!(certificate_value(&[om], &set).unwrap(), tp("Tr(x1*x1')").unwrap());
        let conj = Term::Conjugate { h: TracePolynomial::one(), s: GenRef::Index(0) };
        assert_eq!(certificate_value(&[conj], &set).unwrap(), set.generators[0]);
        let bad = Term::Conjugate { h: TracePolynomial::one(), s: GenRef::Index(3) };
        assert_eq!(certificate_value(&[bad], &set), Err(PositivityError::BadIndex(3)));
        assert!(matches!(
            ConstraintSet::new(vec![tp("x1").unwrap()], 2, 1),
            Err(PositivityError::NotSymmetric(0))
        ));
    }

    #[test]
    fn trivial_ks_certificates() {
        let set = ConstraintSet::empty(2, 1);
        let a = tp("1 + Tr(x1*x1')").unwrap();
        let cert = KsCertificate {
            mode: KsMode::Pd,
            k: None,
            t1: vec![Term::Omega { omega: vec![OmegaProduct { weight: r(1), factors: vec![] }], h: None }],
            t2: vec![Term::Omega {
                omega: vec![OmegaProduct { weight: r(1), factors: vec![tp("x1").unwrap()] }],
                h: None,
            }],
        };
        assert!(verify_ks(&a, &cert, &set).unwrap());
        let one = KsCertificate { mode: KsMode::Psd, k: Some(1), t1: cert.t1.clone(), t2: vec![] };
        assert!(verify_ks(&TracePolynomial::one(), &one, &set).unwrap());
        let bad = KsCertificate { k: None, ..one };
        assert!(matches!(verify_ks(&TracePolynomial::one(), &bad, &set), Err(PositivityError::ModeMismatch(_))));
    }

    #[test]
    fn certificate_json_round_trip() {
        let text = r#"{"mode":"psd","k":1,
            "t1":[{"kind":"omega","omega":[{"weight":"1","factors":[]}]}],
            "t2":[{"kind":"scaledTrace","h":"x1","s":{"product":[{"h":"1","s":0}]},"omega":[]},
                  {"kind":"conjugate","h":"x1'","s":0}]}"#;
        let c: KsCertificate = serde_json::from_str(text).unwrap();
        assert_eq!(c.t2.len(), 2);
        let back: KsCertificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empty_set_refutation() {
        let set = ConstraintSet::new(vec![TracePolynomial::constant(r(-1))], 3, 1).unwrap();
        let cert = vec![Term::ScaledTrace {
            h: TracePolynomial::one(),
            s: GenRef::Index(0),
            omega: vec![OmegaProduct { weight: Rational::new(1, 3), factors: vec![] }],
        }];
        assert!(verify_empty_refutation(&set, &cert).unwrap());
        assert!(!verify_empty_refutation(&set, &[]).unwrap());
    }

    #[test]
    fn nullstellensatz_absorption() {
        let cert = NullstellensatzCertificate {
            omega: vec![],
            ideal: vec![IdealTerm {
                left: tp("-x1'").unwrap(),
                generator: 0,
                right: TracePolynomial::one(),
                traced: false,
            }],
        };
        let x1 = tp("x1").unwrap();
        assert!(verify_nullstellensatz(&x1, &[x1.clone()], &cert, 1, 2).unwrap());
    }

    #[test]
    fn sigma_reduction() {
        let s = tp("x1 + x1'").unwrap();
        let sig = central_reduce_sigma(&s, 2);
        assert_eq!(sig[0], s.trace());
        let expect = s.trace().pow(2).sub(&s.mul(&s).trace()).scale(&Rational::new(1, 2));
        assert_eq!(sig[1], expect);
        let ones = central_reduce_sigma(&TracePolynomial::one(), 2);
        let vals: Vec<_> = ones
            .iter()
            .map(|p| eval_numeric(p, &[NumMatrix::zeros(2, 2)]).unwrap().get(0, 0).clone())
            .collect();
        assert_eq!(vals, vec![r(2), r(1)]);
    }

    #[test]
    fn scalar_constraint_identities() {
        let ex = central_reduce_example61(&tp("x1 + x1'").unwrap(), 3).unwrap();
        assert_eq!(ex.holds, vec![true; 4]);
        let ex = central_reduce_example61(&TracePolynomial::one(), 3).unwrap();
        let vals: Vec<_> = ex
            .c
            .iter()
            .map(|p| eval_numeric(p, &[NumMatrix::zeros(3, 3)]).unwrap().get(0, 0).clone())
            .collect();
        assert_eq!(vals, vec![r(3), r(12), r(3), r(27)]);
        assert!(matches!(central_reduce_example61(&TracePolynomial::one(), 2), Err(PositivityError::WrongSize(2))));
    }

    #[test]
    fn negativity_examples() {
        let w = negativity_functional(&[r(1), r(-1)]).unwrap();
        assert_eq!(w.coeffs, vec![r(1), r(-1)]);
        assert_eq!(w.value, r(-4));
        assert!(negativity_functional(&[r(1), r(1)]).is_none());
        assert!(negativity_functional(&[r(2), r(1), r(-1)]).unwrap().value.is_negative());
    }

    #[test]
    fn gram_hermitian_square() {
        // η X Xᵗ ηᵗ = Σ_k (Σ_a η_a ξ_{ak})²
        let f = tp("x1*x1'").unwrap();
        let eta = |i| MultiPoly::var(VarId::eta(i));
        let xi = |a, b| MultiPoly::var(VarId::xi(1, a, b));
        let basis = vec![
            eta(1).mul_ref(&xi(1, 1)),
            eta(2).mul_ref(&xi(2, 1)),
            eta(1).mul_ref(&xi(1, 2)),
            eta(2).mul_ref(&xi(2, 2)),
        ];
        let gram = NumMatrix::from_ints(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 1, 1]]);
        assert!(gram_verify(&f, &basis, &gram, 2).unwrap().accepted());
        assert!(matches!(
            gram_verify(&f, &basis[..3], &gram, 2),
            Err(PositivityError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn hermitian_square_never_refuted() {
        let f = tp("x1*x1'").unwrap();
        assert!(sample_refute(&f, &ConstraintSet::empty(3, 1), 200, &r(2), 7).is_none());
    }

    #[test]
    fn archimedean_witnesses() {
        let set = ConstraintSet::new(vec![tp("3 - x1*x1'").unwrap()], 2, 1).unwrap();
        let cert = vec![Term::Conjugate { h: TracePolynomial::one(), s: GenRef::Index(0) }];
        assert!(verify_archimedean_bound(&cert, &set, &r(3)).unwrap());
        assert!(!verify_archimedean_bound(&[], &set, &r(3)).unwrap());
        // ρ − x x' = (ρ − Tr(x x')) + adj(x')·adj(x) at n = 2
        let set = ConstraintSet::new(vec![tp("3 - Tr(x1*x1')").unwrap()], 2, 1).unwrap();
        let cert = vec![
            Term::Conjugate { h: TracePolynomial::one(), s: GenRef::Index(0) },
            Term::Omega {
                omega: vec![OmegaProduct { weight: r(1), factors: vec![] }],
                h: Some(tp("Tr(x1) - x1'").unwrap()),
            },
        ];
        assert!(verify_archimedean_bound(&cert, &set, &r(3)).unwrap());
    }
}
