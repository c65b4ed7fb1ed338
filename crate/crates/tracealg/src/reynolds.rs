//! Orthogonal-group Reynolds operators via the Casimir element.
//!
//! `c̃` acts on `ℚ[ξ]` by the mixed second derivative at the identity of
//! `f(MΞMᵗ)` along the curves `(1+s e_ij)(1+t e_ij)` minus
//! `(1+s e_ij)(1+t e_ji)`. Its kernel is the SO(n)-invariants, and since it
//! is semisimple on each degree, the minimal polynomial of `f` under `c̃`
//! yields the projection onto the kernel.

use std::collections::{BTreeSet, HashMap};
use std::sync::RwLock;

use serde::Serialize;
use thiserror::Error;

use crate::generic_eval::{act_by, generic_u, GenericContext, Mode};
use crate::scalar_poly::{Family, Matrix, Monomial, MultiPoly, PolyMatrix, Rational, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReynoldsError {
    #[error("minimal polynomial search exceeded {0} iterates")]
    IterationCap(usize),
    #[error("Casimir action is not semisimple on this input")]
    NotSemisimple,
    #[error("lifted invariant is not linear in the auxiliary matrix")]
    NotLinearInAuxiliary,
}

/// Truncated dual number `a + b·s + c·t + d·st` with `s² = t² = 0`.
#[derive(Clone, Debug, PartialEq)]
struct Dual([Rational; 4]);

impl Dual {
    fn constant(a: Rational) -> Dual {
        Dual([a, Rational::zero(), Rational::zero(), Rational::zero()])
    }

    fn mul(&self, o: &Dual) -> Dual {
        let [a, b, c, d] = &self.0;
        let [x, y, z, w] = &o.0;
        Dual([a * x, &(a * y) + &(b * x), &(a * z) + &(c * x), &(&(a * w) + &(d * x)) + &(&(b * z) + &(c * y))])
    }
}

/// The two curve pairs at `(i, j)`: `(P, Q)` with `M = 1 + sP + tQ + st·PQ`.
fn curve_pairs(i: usize, j: usize) -> [((usize, usize), (usize, usize), i64); 2] {
    [((i, j), (i, j), 1), ((i, j), (j, i), -1)]
}

/// Entry `(a, b)` of `(1 + s e_P)(1 + t e_Q)`.
fn curve_entry(p: (usize, usize), q: (usize, usize), a: usize, b: usize) -> Dual {
    let one = |x: bool| if x { Rational::one() } else { Rational::zero() };
    Dual([one(a == b), one((a, b) == p), one((a, b) == q), one(p.1 == q.0 && (a, b) == (p.0, q.1))])
}

/// `c(μ)` for a monomial `μ` in the `u` variables, from the definition.
pub fn casimir_value(mu: &Monomial, n: usize) -> Rational {
    if mu.is_one() {
        return Rational::zero();
    }
    let mut total = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for (p, q, sign) in curve_pairs(i, j) {
                let mut acc = Dual::constant(Rational::one());
                for &(v, e) in mu.factors() {
                    debug_assert_eq!(v.family(), Family::U);
                    let x = curve_entry(p, q, v.i() - 1, v.k() - 1);
                    for _ in 0..e {
                        acc = acc.mul(&x);
                    }
                }
                total += &(&acc.0[3] * &Rational::from_int(sign));
            }
        }
    }
    total
}

/// Thread-safe memo of `casimir_value` for one matrix size. Entries are
/// pure functions of the key, so concurrent writers are harmless.
#[derive(Debug)]
pub struct CasimirCache {
    n: usize,
    memo: RwLock<HashMap<Monomial, Rational>>,
}

impl CasimirCache {
    pub fn new(n: usize) -> Self {
        CasimirCache { n, memo: RwLock::new(HashMap::new()) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, mu: &Monomial) -> Rational {
        if let Some(v) = self.memo.read().expect("cache lock").get(mu) {
            return v.clone();
        }
        let v = casimir_value(mu, self.n);
        self.memo.write().expect("cache lock").insert(mu.clone(), v.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `c̃(f) = Σ f_i c(μ_i)` where `f^u = Σ f_i μ_i`: the literal route through
/// the symbolic group action.
pub fn casimir_tilde_literal(f: &MultiPoly, cache: &CasimirCache) -> MultiPoly {
    let fu = act_by(f, &generic_u(cache.n()));
    let mut out = Vec::new();
    for (m, c) in fu.terms() {
        let (us, rest): (Vec<(VarId, u32)>, Vec<(VarId, u32)>) = m.factors().iter().partition(|(v, _)| v.family() == Family::U);
        let val = cache.value(&Monomial::from_factors(us));
        if !val.is_zero() {
            out.push((Monomial::from_factors(rest), c * &val));
        }
    }
    MultiPoly::from_terms(out)
}

/// First-order perturbations of `MΞ_JMᵗ` along one curve pair: for each
/// entry variable, the list of variables in its `s`, `t` and `st` parts.
struct Perturbation {
    s: HashMap<VarId, Vec<VarId>>,
    t: HashMap<VarId, Vec<VarId>>,
    st: HashMap<VarId, Vec<VarId>>,
}

fn push(map: &mut HashMap<VarId, Vec<VarId>>, target: VarId, src: VarId) {
    map.entry(target).or_default().push(src);
}

/// Adds the entries of `EΞ + ΞEᵗ` for `E = e_pq`.
fn sandwich(map: &mut HashMap<VarId, Vec<VarId>>, jj: usize, n: usize, (p, q): (usize, usize)) {
    for b in 0..n {
        push(map, VarId::xi(jj, p + 1, b + 1), VarId::xi(jj, q + 1, b + 1));
    }
    for a in 0..n {
        push(map, VarId::xi(jj, a + 1, p + 1), VarId::xi(jj, a + 1, q + 1));
    }
}

fn perturbation(js: &BTreeSet<usize>, n: usize, p: (usize, usize), q: (usize, usize)) -> Perturbation {
    let mut pt = Perturbation { s: HashMap::new(), t: HashMap::new(), st: HashMap::new() };
    for &jj in js {
        sandwich(&mut pt.s, jj, n, p);
        sandwich(&mut pt.t, jj, n, q);
        if p.1 == q.0 {
            sandwich(&mut pt.st, jj, n, (p.0, q.1));
        }
        // e_P Ξ e_Qᵗ + e_Q Ξ e_Pᵗ
        push(&mut pt.st, VarId::xi(jj, p.0 + 1, q.0 + 1), VarId::xi(jj, p.1 + 1, q.1 + 1));
        push(&mut pt.st, VarId::xi(jj, q.0 + 1, p.0 + 1), VarId::xi(jj, q.1 + 1, p.1 + 1));
    }
    pt
}

fn shifted(m: &Monomial, minus: &[VarId], plus: &[VarId]) -> Monomial {
    let mut f: Vec<(VarId, u32)> = m.factors().to_vec();
    for v in minus {
        let slot = f.iter_mut().find(|x| x.0 == *v).expect("factor present");
        slot.1 -= 1;
    }
    f.extend(plus.iter().map(|&v| (v, 1)));
    Monomial::from_factors(f)
}

/// `c̃(f)` by the infinitesimal route: the `st`-coefficient of
/// `f(x + s·a + t·b + st·c)` is `∇f·c + aᵀ(∇²f)b`, summed over curve pairs.
/// Variables outside the ξ family are treated as constants.
pub fn casimir_tilde(f: &MultiPoly, n: usize) -> MultiPoly {
    let js: BTreeSet<usize> = f.vars().into_iter().filter(|v| v.family() == Family::Xi).map(|v| v.j()).collect();
    if js.is_empty() {
        return MultiPoly::zero();
    }
    let mut out: Vec<(Monomial, Rational)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for (p, q, sign) in curve_pairs(i, j) {
                let pt = perturbation(&js, n, p, q);
                for (m, c) in f.terms() {
                    let cs = c * &Rational::from_int(sign);
                    for &(k, ek) in m.factors() {
                        if let Some(srcs) = pt.st.get(&k) {
                            let coef = &cs * &Rational::from_int(ek as i64);
                            for &src in srcs {
                                out.push((shifted(m, &[k], &[src]), coef.clone()));
                            }
                        }
                        let Some(sa) = pt.s.get(&k) else { continue };
                        for &(l, el) in m.factors() {
                            let Some(sb) = pt.t.get(&l) else { continue };
                            let mult = if k == l { ek as i64 * (ek as i64 - 1) } else { ek as i64 * el as i64 };
                            if mult == 0 {
                                continue;
                            }
                            let coef = &cs * &Rational::from_int(mult);
                            for &a in sa {
                                for &b in sb {
                                    out.push((shifted(m, &[k, l], &[a, b]), coef.clone()));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    MultiPoly::from_terms(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReynoldsReport {
    pub input: MultiPoly,
    pub output: MultiPoly,
    /// Coefficients of the monic minimal polynomial, constant term first.
    pub min_poly: Vec<Rational>,
    pub iterates: usize,
    pub mode: Mode,
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Dimension of the polynomial space spanned by the degrees present in `f`.
fn ambient_dimension(f: &MultiPoly, n: usize) -> usize {
    let g = f.vars().iter().filter(|v| v.family() == Family::Xi).map(|v| v.j()).max().unwrap_or(1);
    let nv = (g * n * n) as u128;
    let degrees: BTreeSet<u32> = f.terms().iter().map(|(m, _)| m.degree()).collect();
    let total: u128 = degrees.iter().map(|&d| binomial(nv + d as u128 - 1, d as u128)).fold(0, u128::saturating_add);
    total.min(usize::MAX as u128) as usize
}

struct EchelonRow {
    pivot: Monomial,
    vec: MultiPoly,
    combo: Vec<Rational>,
}

fn axpy(x: &[Rational], c: &Rational, y: &[Rational]) -> Vec<Rational> {
    let len = x.len().max(y.len());
    (0..len)
        .map(|i| {
            let a = x.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = y.get(i).cloned().unwrap_or_else(Rational::zero);
            &a - &(c * &b)
        })
        .collect()
}

/// The SO(n)-Reynolds operator `R″` with its certificate data.
pub fn reynolds_so_report(f: &MultiPoly, n: usize) -> Result<ReynoldsReport, ReynoldsError> {
    let cap = ambient_dimension(f, n);
    let mut rows: Vec<EchelonRow> = Vec::new();
    let mut iterates = vec![f.clone()];
    loop {
        let k = iterates.len() - 1;
        if k > cap {
            return Err(ReynoldsError::IterationCap(cap));
        }
        let mut w = iterates[k].clone();
        let mut combo = vec![Rational::zero(); k + 1];
        combo[k] = Rational::one();
        for row in &rows {
            let c = w.coefficient(&row.pivot);
            if !c.is_zero() {
                w = w.sub_ref(&row.vec.scale(&c));
                combo = axpy(&combo, &c, &row.combo);
            }
        }
        if w.is_zero() {
            let p = combo;
            let output = if !p[0].is_zero() {
                MultiPoly::zero()
            } else {
                // p = t·q, R″(f) = q(0)⁻¹ q(c̃) f
                if p.len() < 2 || p[1].is_zero() {
                    return Err(ReynoldsError::NotSemisimple);
                }
                let mut acc = MultiPoly::zero();
                for (i, c) in p.iter().enumerate().skip(1) {
                    if !c.is_zero() {
                        acc = acc.add_ref(&iterates[i - 1].scale(c));
                    }
                }
                acc.scale(&p[1].recip())
            };
            return Ok(ReynoldsReport { input: f.clone(), output, min_poly: p, iterates: k, mode: Mode::Exact });
        }
        let (pivot, lc) = w.leading().cloned().expect("nonzero");
        let inv = lc.recip();
        let vec = w.scale(&inv);
        let combo: Vec<Rational> = combo.iter().map(|c| c * &inv).collect();
        for row in rows.iter_mut() {
            let c = row.vec.coefficient(&pivot);
            if !c.is_zero() {
                row.vec = row.vec.sub_ref(&vec.scale(&c));
                row.combo = axpy(&row.combo, &c, &combo);
            }
        }
        rows.push(EchelonRow { pivot, vec, combo });
        let next = casimir_tilde(&iterates[k], n);
        iterates.push(next);
    }
}

/// `R″`, the projection onto SO(n)-invariants.
pub fn reynolds_so(f: &MultiPoly, n: usize) -> Result<MultiPoly, ReynoldsError> {
    Ok(reynolds_so_report(f, n)?.output)
}

/// `f^v` for the reflection `v = diag(−1, 1, …, 1)`: `ξ_{jab} ↦ v_a v_b ξ_{jab}`.
pub fn reflect(f: &MultiPoly) -> MultiPoly {
    MultiPoly::from_terms(f.terms().iter().map(|(m, c)| {
        let odd: u32 = m
            .factors()
            .iter()
            .filter(|(v, _)| v.family() == Family::Xi && ((v.i() == 1) ^ (v.k() == 1)))
            .map(|f| f.1)
            .sum();
        (m.clone(), if odd % 2 == 1 { -c } else { c.clone() })
    }))
}

/// `R′ = ½(R″ + R″∘v)`, the projection onto O(n)-invariants.
pub fn reynolds_on(f: &MultiPoly, n: usize) -> Result<MultiPoly, ReynoldsError> {
    let r = reynolds_so(f, n)?;
    Ok(r.add_ref(&reflect(&r)).scale(&Rational::new(1, 2)))
}

/// Lifts a polynomial matrix to a concomitant: `R′(tr(f·Ξ_a)) = tr(f₀Ξ_a)`
/// for a fresh generic matrix `Ξ_a`; returns `f₀`.
pub fn reynolds_matrix(f: &PolyMatrix, ctx: &GenericContext) -> Result<PolyMatrix, ReynoldsError> {
    let n = f.rows();
    let used = f
        .entries()
        .iter()
        .flat_map(|p| p.vars())
        .filter(|v| v.family() == Family::Xi)
        .map(|v| v.j())
        .max()
        .unwrap_or(0);
    let aux = ctx.g.max(used) + 1;
    let mut p = MultiPoly::zero();
    for a in 0..n {
        for b in 0..n {
            let e = f.get(a, b);
            if !e.is_zero() {
                p = p.add_ref(&e.mul_ref(&MultiPoly::var(VarId::xi(aux, b + 1, a + 1))));
            }
        }
    }
    let r = reynolds_on(&p, n)?;
    let mut out: Matrix<MultiPoly> = Matrix::zeros(n, n);
    let mut parts: HashMap<(usize, usize), Vec<(Monomial, Rational)>> = HashMap::new();
    for (m, c) in r.terms() {
        let (hits, rest): (Vec<(VarId, u32)>, Vec<(VarId, u32)>) =
            m.factors().iter().partition(|(v, _)| v.family() == Family::Xi && v.j() == aux);
        if hits.len() != 1 || hits[0].1 != 1 {
            return Err(ReynoldsError::NotLinearInAuxiliary);
        }
        let v = hits[0].0;
        // coefficient of ξ_{aux,b,a} is entry (a, b)
        parts.entry((v.k() - 1, v.i() - 1)).or_default().push((Monomial::from_factors(rest), c.clone()));
    }
    for ((a, b), terms) in parts {
        out.set(a, b, MultiPoly::from_terms(terms));
    }
    Ok(out)
}
