//! Exact verification of the 3×3 counterexample data: the idempotents
//! `e₁, e₂`, the twisted involution, the α/β relations, algebraic
//! independence of `α₁ … α₆`, and the total-positivity witness for `β₁β₂`.
//!
//! All denominators are powers of `d = tr(a₁²)` and `Q = tr(A₂²)/d²`, so
//! each rational identity is checked through an equivalent polynomial one,
//! e.g. `e₁² = e₁` as `E₁² = d·E₁` with `e₁ = E₁/d`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::generic_eval::generic_matrix_unchecked;
use crate::scalar_poly::{
    exact_rank, jacobian_at, ratfunc_equal, Matrix, MultiPoly, PolyError, PolyMatrix, RatFunc, RatMatrix, Rational,
    VarId,
};

/// Number of random points tried before a heavy symbolic identity.
pub const PRECHECK_POINTS: usize = 3;

pub struct Ps3Context {
    pub xi: PolyMatrix,
    pub s: PolyMatrix,
    pub a: PolyMatrix,
    pub s0: PolyMatrix,
    pub a1: PolyMatrix,
    /// `d = tr(a₁²)`.
    pub d: PolyMatrix1,
    /// `E₁ = d·1 − 2a₁²`, so `e₁ = E₁/d`.
    pub e1_num: PolyMatrix,
    /// `A₂ = E₁ Ξ F₁ − F₁ Ξᵗ E₁` with `F₁ = 2a₁²`, so `a₂ = A₂/d²`.
    pub a2_num: PolyMatrix,
    /// `Q = tr(A₂²)/d²`, so `tr(a₂²) = Q/d²`.
    pub q: MultiPoly,
    /// `E₂ = Q·1 − 2A₂²/d²`, so `e₂ = E₂/Q`.
    pub e2_num: PolyMatrix,
    pub a2: RatMatrix,
    pub e1: RatMatrix,
    pub e2: RatMatrix,
    pub beta1: RatFunc,
    pub beta2: RatFunc,
    pub alpha: [RatFunc; 6],
    /// `tr(s₀²)`, `tr(s₀a²)`, `tr(s₀²a²)`, `tr(s₀³)`, `tr(a s₀ a² s₀²)`.
    pub invariants: BTreeMap<&'static str, MultiPoly>,
}

/// A polynomial scalar kept separately from its matrix embedding.
pub type PolyMatrix1 = MultiPoly;

fn xi_vars() -> Vec<VarId> {
    (1..=3).flat_map(|a| (1..=3).map(move |b| VarId::xi(1, a, b))).collect()
}

fn ratmat(m: &PolyMatrix, den: &MultiPoly) -> RatMatrix {
    m.map(|p| RatFunc::new(p.clone(), den.clone()).expect("nonzero denominator"))
}

fn rf(p: &MultiPoly) -> RatFunc {
    RatFunc::from_poly(p.clone())
}

fn frac(n: &MultiPoly, d: &MultiPoly) -> RatFunc {
    RatFunc::new(n.clone(), d.clone()).expect("nonzero denominator")
}

pub fn build_context() -> Ps3Context {
    let half = Rational::new(1, 2);
    let xi = generic_matrix_unchecked(3, 1);
    let xt = xi.transpose();
    let s = xi.add(&xt).scale(&half);
    let a = xi.sub(&xt).scale(&half);
    let s0 = s.sub(&PolyMatrix::scalar(3, s.trace().scale(&Rational::new(1, 3))));
    let a1 = xi.sub(&xt);

    let a1sq = a1.mul(&a1);
    let d = a1sq.trace();
    let e1_num = PolyMatrix::scalar(3, d.clone()).sub(&a1sq.scale(&Rational::from_int(2)));
    let f1 = a1sq.scale(&Rational::from_int(2));
    let a2_num = e1_num.mul(&xi).mul(&f1).sub(&f1.mul(&xt).mul(&e1_num));
    let a2sq = a2_num.mul(&a2_num);
    let d2 = d.square();
    let q = a2sq.trace().div_exact(&d2).expect("tr(A₂²) is divisible by d²");
    let a2sq_red = a2sq.try_map(|p| p.div_exact(&d2).ok_or(())).expect("A₂² is divisible by d²");
    let e2_num = PolyMatrix::scalar(3, q.clone()).sub(&a2sq_red.scale(&Rational::from_int(2)));

    let beta1 = rf(&d.scale(&-half.clone()));
    let beta2 = frac(&q.scale(&-half.clone()), &d2);

    let tr = |m: &PolyMatrix| m.trace();
    let asq = a.mul(&a);
    let s0sq = s0.mul(&s0);
    let t_s0sq = tr(&s0sq);
    let t_s0a2 = tr(&s0.mul(&asq));
    let t_s0sqa2 = tr(&s0sq.mul(&asq));
    let t_s0cu = tr(&s0sq.mul(&s0));
    let t_m6 = tr(&a.mul(&s0).mul(&asq).mul(&s0sq));
    let al2 = tr(&asq);
    let al3 = t_s0a2.clone();
    let n4 = al2.square().mul_ref(&t_s0sq).sub_ref(&al3.square().scale(&Rational::from_int(6)));
    let d4 = al2
        .square()
        .mul_ref(&t_s0sq)
        .sub_ref(&al2.mul_ref(&t_s0sqa2).scale(&Rational::from_int(4)))
        .sub_ref(&al3.square().scale(&Rational::from_int(2)));
    let m5 = al2.pow(3).mul_ref(&t_s0cu).add_ref(&al3.pow(3).scale(&Rational::from_int(6)));
    let alpha = [rf(&s.trace()), rf(&al2), rf(&al3), frac(&n4, &d4), frac(&m5, &n4), frac(&t_m6, &n4)];

    let mut invariants = BTreeMap::new();
    invariants.insert("tr(s0^2)", t_s0sq);
    invariants.insert("tr(s0*a^2)", t_s0a2);
    invariants.insert("tr(s0^2*a^2)", t_s0sqa2);
    invariants.insert("tr(s0^3)", t_s0cu);
    invariants.insert("tr(a*s0*a^2*s0^2)", t_m6);
    invariants.insert("N4", n4);
    invariants.insert("D4", d4);
    invariants.insert("M5", m5);

    Ps3Context {
        a2: ratmat(&a2_num, &d2),
        e1: ratmat(&e1_num, &d),
        e2: ratmat(&e2_num, &q),
        xi,
        s,
        a,
        s0,
        a1,
        d,
        e1_num,
        a2_num,
        q,
        e2_num,
        beta1,
        beta2,
        alpha,
        invariants,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub part: String,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ps3Report {
    pub checks: Vec<Check>,
}

impl Ps3Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, part: &str, name: &str, passed: bool, detail: Option<String>) {
        self.checks.push(Check { part: part.into(), name: name.into(), passed, detail });
    }

    pub fn extend(&mut self, other: Ps3Report) {
        self.checks.extend(other.checks);
    }
}

/// Random rational point `p/q` with `|p| ≤ 7`, `1 ≤ q ≤ 7`.
fn random_point(rng: &mut ChaCha8Rng) -> BTreeMap<VarId, Rational> {
    xi_vars().into_iter().map(|v| (v, Rational::new(rng.gen_range(-7..=7), rng.gen_range(1..=7)))).collect()
}

/// Evaluates `lhs − rhs` at a few random points; returns a point where
/// they differ (denominators vanishing at a point just skip it).
fn precheck(lhs: &RatFunc, rhs: &RatFunc, seed: u64) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = 0;
    while tried < PRECHECK_POINTS {
        let pt = random_point(&mut rng);
        match (lhs.eval(&pt), rhs.eval(&pt)) {
            (Ok(x), Ok(y)) => {
                tried += 1;
                if x != y {
                    let coords: Vec<String> = pt.values().map(|v| v.to_string()).collect();
                    return Some(format!("differs at ξ = ({}): {} vs {}", coords.join(", "), x, y));
                }
            }
            _ => continue,
        }
    }
    None
}

/// Fast random pre-check, then exact `ratfunc_equal`.
fn rational_identity(lhs: &RatFunc, rhs: &RatFunc, seed: u64) -> (bool, Option<String>) {
    if let Some(why) = precheck(lhs, rhs, seed) {
        return (false, Some(why));
    }
    let ok = ratfunc_equal(lhs, rhs);
    (ok, if ok { None } else { Some("exact comparison failed".into()) })
}

fn poly_matrix_identity(lhs: &PolyMatrix, rhs: &PolyMatrix) -> bool {
    lhs == rhs
}

/// `e_i² = e_i`, `e_iᵗ = e_i`, `tr(e_i) = 1`, `a_ie_i = e_ia_i = 0`,
/// `e₁e₂ = e₂e₁ = 0`, through the polynomial numerators.
pub fn verify_idempotents(ctx: &Ps3Context) -> Ps3Report {
    let mut r = Ps3Report::default();
    let p = "idempotents";
    let e1 = &ctx.e1_num;
    let e2 = &ctx.e2_num;
    r.push(p, "e1^2 = e1", poly_matrix_identity(&e1.mul(e1), &e1.mul_scalar(&ctx.d)), None);
    r.push(p, "e1^t = e1", e1.is_symmetric(), None);
    r.push(p, "tr(e1) = 1", e1.trace() == ctx.d, None);
    r.push(p, "a1*e1 = 0", ctx.a1.mul(e1).is_zero(), None);
    r.push(p, "e1*a1 = 0", e1.mul(&ctx.a1).is_zero(), None);
    r.push(p, "e2^2 = e2", poly_matrix_identity(&e2.mul(e2), &e2.mul_scalar(&ctx.q)), None);
    r.push(p, "e2^t = e2", e2.is_symmetric(), None);
    r.push(p, "tr(e2) = 1", e2.trace() == ctx.q, None);
    r.push(p, "a2*e2 = 0", ctx.a2_num.mul(e2).is_zero(), None);
    r.push(p, "e2*a2 = 0", e2.mul(&ctx.a2_num).is_zero(), None);
    r.push(p, "e1*e2 = 0", e1.mul(e2).is_zero(), None);
    r.push(p, "e2*e1 = 0", e2.mul(e1).is_zero(), None);
    r
}

/// `a³ − ½tr(a²)a` for the generic antisymmetric `n×n` matrix.
pub fn antisym_cubic_residual(n: usize) -> PolyMatrix {
    let a = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => MultiPoly::var(VarId::xi(1, i + 1, j + 1)),
        std::cmp::Ordering::Greater => MultiPoly::var(VarId::xi(1, j + 1, i + 1)).neg_ref(),
        std::cmp::Ordering::Equal => MultiPoly::zero(),
    });
    let a2 = a.mul(&a);
    a2.mul(&a).sub(&a.mul_scalar(&a2.trace().scale(&Rational::new(1, 2))))
}

pub fn verify_antisym_cubic() -> bool {
    antisym_cubic_residual(3).is_zero()
}

/// The β relations, both as printed and corrected, plus the `tr(s₀²)`
/// expression in the α's.
pub fn verify_beta_report(ctx: &Ps3Context) -> Ps3Report {
    let mut r = Ps3Report::default();
    let p = "betas";
    let [_, a2, a3, a4, a5, a6] = &ctx.alpha;
    let c = |x: i64| RatFunc::constant(Rational::from_int(x));

    let printed = a2.scale(&Rational::new(-1, 2));
    let (ok, why) = rational_identity(&ctx.beta1, &printed, 11);
    r.push(p, "beta1 = -1/2*alpha2 (as printed)", ok, why);
    let corrected = a2.scale(&Rational::from_int(-2));
    let (ok, why) = rational_identity(&ctx.beta1, &corrected, 12);
    r.push(p, "beta1 = -2*alpha2 (corrected)", ok, why);

    // β₂ = (288α₂³α₄²α₆² − (3α₃α₄ + 2α₄α₅ + 9α₃)²) / (9α₂²(α₄ + 1))
    let inner = a3.mul_ref(a4).scale(&Rational::from_int(3)).add_ref(&a4.mul_ref(a5).scale(&Rational::from_int(2))).add_ref(&a3.scale(&Rational::from_int(9)));
    let num = a2.pow(3).mul_ref(&a4.mul_ref(a6).pow(2)).scale(&Rational::from_int(288)).sub_ref(&inner.pow(2));
    let den = a2.pow(2).mul_ref(&a4.add_ref(&c(1))).scale(&Rational::from_int(9));
    let rhs = num.div_ref(&den).expect("nonzero denominator");
    let (ok, why) = rational_identity(&ctx.beta2, &rhs, 13);
    r.push(p, "beta2 formula", ok, why);

    // tr(s₀²) = 2α₄β₂/(α₄ + 1) + 6α₃²/α₂²
    let t = rf(&ctx.invariants["tr(s0^2)"]);
    let rhs = a4
        .mul_ref(&ctx.beta2)
        .scale(&Rational::from_int(2))
        .div_ref(&a4.add_ref(&c(1)))
        .expect("nonzero")
        .add_ref(&a3.pow(2).scale(&Rational::from_int(6)).div_ref(&a2.pow(2)).expect("nonzero"));
    let (ok, why) = rational_identity(&t, &rhs, 14);
    r.push(p, "tr(s0^2) formula", ok, why);
    r
}

/// True iff the printed β relations hold (the printed β₁ relation does not).
pub fn verify_beta_formulas(ctx: &Ps3Context) -> bool {
    let r = verify_beta_report(ctx);
    ["beta1 = -1/2*alpha2 (as printed)", "beta2 formula", "tr(s0^2) formula"]
        .iter()
        .all(|n| r.get(n).is_some_and(|c| c.passed))
}

/// Exact rank of the Jacobian of `fs` in the nine ξ variables at a random
/// point, resampling (up to 100 times) when a denominator vanishes.
pub fn jacobian_rank(fs: &[RatFunc], seed: u64) -> Result<usize, PolyError> {
    let vars = xi_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = PolyError::DenominatorVanishes;
    for _ in 0..100 {
        let pt = random_point(&mut rng);
        match jacobian_at(fs, &vars, &|v| pt.get(&v).cloned()) {
            Ok(m) => return Ok(exact_rank(&m)),
            Err(e) => last = e,
        }
    }
    Err(last)
}

pub fn verify_independence(ctx: &Ps3Context, seed: u64) -> bool {
    matches!(jacobian_rank(&ctx.alpha, seed), Ok(6))
}

fn diag_beta(ctx: &Ps3Context) -> [RatFunc; 3] {
    [RatFunc::one(), ctx.beta1.clone(), ctx.beta2.clone()]
}

/// `x^ti = diag(1,β₁,β₂)⁻¹ xᵗ diag(1,β₁,β₂)`.
pub fn twisted_involution(m: &RatMatrix, ctx: &Ps3Context) -> RatMatrix {
    let dg = diag_beta(ctx);
    Matrix::from_fn(3, 3, |i, j| {
        m.get(j, i).mul_ref(&dg[j]).div_ref(&dg[i]).expect("β's are nonzero")
    })
}

/// `tr(h h^ti)` for `h = β₂E₂₃`; checked equal to `β₁β₂`, which it returns.
pub fn total_positivity_witness(ctx: &Ps3Context) -> (RatFunc, bool) {
    let mut h: RatMatrix = Matrix::zeros(3, 3);
    h.set(1, 2, ctx.beta2.clone());
    let v = h.mul(&twisted_involution(&h, ctx)).trace();
    let target = ctx.beta1.mul_ref(&ctx.beta2);
    let ok = ratfunc_equal(&v, &target);
    (target, ok)
}

/// Entry (1,1) of `Σ r_i r_i^ti`, with a flag for its agreement with
/// `Σ (ρ_{i11}² + β₁⁻¹ρ_{i12}² + β₂⁻¹ρ_{i13}²)`.
pub fn entry11_obstruction(rs: &[RatMatrix], ctx: &Ps3Context) -> (RatFunc, bool) {
    let mut total = RatFunc::zero();
    let mut form = RatFunc::zero();
    let b1inv = ctx.beta1.recip().expect("β₁ ≠ 0");
    let b2inv = ctx.beta2.recip().expect("β₂ ≠ 0");
    for r in rs {
        total = total.add_ref(r.mul(&twisted_involution(r, ctx)).get(0, 0));
        form = form
            .add_ref(&r.get(0, 0).pow(2))
            .add_ref(&b1inv.mul_ref(&r.get(0, 1).pow(2)))
            .add_ref(&b2inv.mul_ref(&r.get(0, 2).pow(2)));
    }
    let ok = ratfunc_equal(&total, &form);
    (total, ok)
}

/// Which group of checks `verify_all` runs.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Part {
    Idempotents,
    Betas,
    Jacobian,
    Witness,
}

impl std::str::FromStr for Part {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "idempotents" => Ok(Part::Idempotents),
            "betas" => Ok(Part::Betas),
            "jacobian" => Ok(Part::Jacobian),
            "witness" => Ok(Part::Witness),
            _ => Err(format!("unknown part `{s}` (idempotents, betas, jacobian, witness)")),
        }
    }
}

/// Runs the selected groups (all when `only` is `None`).
pub fn verify_all(ctx: &Ps3Context, only: Option<Part>) -> Ps3Report {
    let want = |p: Part| only.is_none_or(|o| o == p);
    let mut r = Ps3Report::default();
    if want(Part::Idempotents) {
        r.extend(verify_idempotents(ctx));
        r.push("idempotents", "a^3 - 1/2*tr(a^2)*a = 0 (3x3)", verify_antisym_cubic(), None);
    }
    if want(Part::Betas) {
        r.extend(verify_beta_report(ctx));
    }
    if want(Part::Jacobian) {
        let ranks: Vec<String> =
            (0..5).map(|s| jacobian_rank(&ctx.alpha, s).map_or_else(|e| e.to_string(), |k| k.to_string())).collect();
        let ok = ranks.iter().all(|k| k == "6");
        r.push("jacobian", "rank J(alpha1..alpha6) = 6", ok, Some(format!("ranks over 5 seeds: {}", ranks.join(", "))));
    }
    if want(Part::Witness) {
        let (_, ok) = total_positivity_witness(ctx);
        r.push("witness", "tr(h*h^ti) = beta1*beta2", ok, None);
        let mut m: RatMatrix = Matrix::zeros(3, 3);
        for (j, v) in ctx.alpha[..3].iter().enumerate() {
            m.set(0, j, v.clone());
        }
        let (_, ok) = entry11_obstruction(&[m], ctx);
        r.push("witness", "(1,1) entry of r*r^ti", ok, None);
    }
    r
}
