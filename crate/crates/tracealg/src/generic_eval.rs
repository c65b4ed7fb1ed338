//! Evaluation of trace polynomials on generic and numeric matrices.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar_poly::{Matrix, MultiPoly, NumMatrix, PolyMatrix, Rational, Scalar, VarId};
use crate::trace_ring::{Letter, TracePolynomial, TraceSymbol};

/// Default cap on the number of polynomial terms held during a symbolic
/// expansion before falling back to random evaluation.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable index {j} outside 1..={g}")]
    IndexOutOfRange { j: usize, g: usize },
    #[error("matrix sizes do not match: {0}")]
    SizeMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericContext {
    pub n: usize,
    pub g: usize,
}

impl GenericContext {
    pub fn new(n: usize, g: usize) -> Self {
        assert!(n >= 1 && g >= 1, "generic context needs n, g >= 1");
        GenericContext { n, g }
    }

    /// The smallest context that can evaluate `f` at size `n`.
    pub fn for_poly(f: &TracePolynomial, n: usize) -> Self {
        GenericContext::new(n, f.max_index().max(1) as usize)
    }
}

/// `Ξ_j = (ξ_{jιȷ})`.
pub fn generic_matrix(ctx: &GenericContext, j: usize) -> Result<PolyMatrix, EvalError> {
    if j == 0 || j > ctx.g {
        return Err(EvalError::IndexOutOfRange { j, g: ctx.g });
    }
    Ok(generic_matrix_unchecked(ctx.n, j))
}

pub(crate) fn generic_matrix_unchecked(n: usize, j: usize) -> PolyMatrix {
    Matrix::from_fn(n, n, |a, b| MultiPoly::var(VarId::xi(j, a + 1, b + 1)))
}

struct BudgetExceeded;

/// Word-memoizing evaluator shared by the symbolic and numeric paths.
struct Evaluator<'a, T: Scalar> {
    n: usize,
    gens: &'a [Matrix<T>],
    trans: Vec<Matrix<T>>,
    words: HashMap<Vec<Letter>, Matrix<T>>,
    traces: HashMap<TraceSymbol, T>,
    budget: Option<usize>,
    spent: usize,
}

fn matrix_size<T: Scalar>(m: &Matrix<T>) -> usize {
    m.entries().iter().map(|x| x.size_hint()).sum()
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    fn new(n: usize, gens: &'a [Matrix<T>], budget: Option<usize>) -> Self {
        Evaluator {
            n,
            gens,
            trans: gens.iter().map(|m| m.transpose()).collect(),
            words: HashMap::new(),
            traces: HashMap::new(),
            budget,
            spent: 0,
        }
    }

    fn charge(&mut self, m: &Matrix<T>) -> Result<(), BudgetExceeded> {
        if let Some(b) = self.budget {
            self.spent += matrix_size(m);
            if self.spent > b {
                return Err(BudgetExceeded);
            }
        }
        Ok(())
    }

    fn letter(&self, l: Letter) -> &Matrix<T> {
        let i = l.index as usize - 1;
        if l.starred {
            &self.trans[i]
        } else {
            &self.gens[i]
        }
    }

    fn word(&mut self, w: &[Letter]) -> Result<Matrix<T>, BudgetExceeded> {
        if w.is_empty() {
            return Ok(Matrix::identity(self.n));
        }
        if w.len() == 1 {
            return Ok(self.letter(w[0]).clone());
        }
        if let Some(m) = self.words.get(w) {
            return Ok(m.clone());
        }
        let prefix = self.word(&w[..w.len() - 1])?;
        let m = prefix.mul(self.letter(w[w.len() - 1]));
        self.charge(&m)?;
        self.words.insert(w.to_vec(), m.clone());
        Ok(m)
    }

    fn trace(&mut self, s: &TraceSymbol) -> Result<T, BudgetExceeded> {
        if let Some(t) = self.traces.get(s) {
            return Ok(t.clone());
        }
        let t = if s.rep().is_one() { T::from_int(self.n as i64) } else { self.word(&s.rep().0)?.trace() };
        self.traces.insert(s.clone(), t.clone());
        Ok(t)
    }

    fn eval(&mut self, f: &TracePolynomial) -> Result<Matrix<T>, BudgetExceeded> {
        let mut acc = Matrix::zeros(self.n, self.n);
        for (m, c) in f.terms() {
            let mut coef = T::from_rational(c);
            for s in m.pure() {
                coef = coef * &self.trace(s)?;
            }
            if coef.is_zero() {
                continue;
            }
            let w = self.word(&m.word().0)?;
            acc = acc.add(&w.mul_scalar(&coef));
            if self.budget.is_some() {
                let size = matrix_size(&acc);
                if self.spent + size > self.budget.unwrap_or(usize::MAX) {
                    return Err(BudgetExceeded);
                }
            }
        }
        Ok(acc)
    }
}

/// `x_j ↦ Ξ_j`, `x_j^* ↦ Ξ_j^t`, `Tr(w) ↦ tr(w(Ξ))`.
pub fn eval_symbolic(f: &TracePolynomial, ctx: &GenericContext) -> Result<PolyMatrix, EvalError> {
    let j = f.max_index() as usize;
    if j > ctx.g {
        return Err(EvalError::IndexOutOfRange { j, g: ctx.g });
    }
    let gens: Vec<PolyMatrix> = (1..=ctx.g).map(|j| generic_matrix_unchecked(ctx.n, j)).collect();
    Ok(Evaluator::new(ctx.n, &gens, None).eval(f).unwrap_or_else(|_| unreachable!()))
}

fn eval_symbolic_budgeted(f: &TracePolynomial, ctx: &GenericContext, budget: usize) -> Option<PolyMatrix> {
    let gens: Vec<PolyMatrix> = (1..=ctx.g).map(|j| generic_matrix_unchecked(ctx.n, j)).collect();
    Evaluator::new(ctx.n, &gens, Some(budget)).eval(f).ok()
}

fn check_tuple(xs: &[NumMatrix]) -> Result<usize, EvalError> {
    let n = xs.first().map(|m| m.rows()).ok_or_else(|| EvalError::SizeMismatch("no matrices given".into()))?;
    for (i, m) in xs.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(EvalError::SizeMismatch(format!(
                "matrix {} is {}x{}, expected {n}x{n}",
                i + 1,
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(n)
}

/// Exact evaluation at a tuple of rational matrices.
pub fn eval_numeric(f: &TracePolynomial, xs: &[NumMatrix]) -> Result<NumMatrix, EvalError> {
    let n = check_tuple(xs)?;
    let j = f.max_index() as usize;
    if j > xs.len() {
        return Err(EvalError::SizeMismatch(format!("x{j} used but only {} matrices given", xs.len())));
    }
    Ok(Evaluator::new(n, xs, None).eval(f).unwrap_or_else(|_| unreachable!()))
}

/// Evaluation with entries from any scalar ring (e.g. polynomial matrices).
pub fn eval_in<T: Scalar>(f: &TracePolynomial, xs: &[Matrix<T>]) -> Result<Matrix<T>, EvalError> {
    let n = xs.first().map(|m| m.rows()).ok_or_else(|| EvalError::SizeMismatch("no matrices given".into()))?;
    if xs.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(EvalError::SizeMismatch("matrices must be square of equal size".into()));
    }
    if f.max_index() as usize > xs.len() {
        return Err(EvalError::SizeMismatch("too few matrices".into()));
    }
    Ok(Evaluator::new(n, xs, None).eval(f).unwrap_or_else(|_| unreachable!()))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Probabilistic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityVerdict {
    pub holds: bool,
    pub mode: Mode,
}

/// The term budget, overridable through `TRACEALG_TERM_BUDGET`.
pub fn term_budget() -> usize {
    std::env::var("TRACEALG_TERM_BUDGET").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_TERM_BUDGET)
}

/// Whether `f` vanishes identically on `n×n` matrices.
pub fn is_trace_identity(f: &TracePolynomial, n: usize) -> bool {
    identity_verdict(f, n, term_budget()).holds
}

/// Exact expansion within `budget` terms; beyond it, evaluation at random
/// integer points with failure probability below `2^-64`. A nonzero value
/// at any point is a proof of non-identity and is reported as exact.
pub fn identity_verdict(f: &TracePolynomial, n: usize, budget: usize) -> IdentityVerdict {
    let ctx = GenericContext::for_poly(f, n);
    if let Some(m) = eval_symbolic_budgeted(f, &ctx, budget) {
        return IdentityVerdict { holds: m.is_zero(), mode: Mode::Exact };
    }
    let holds = schwartz_zippel(f, &ctx, 0x7ace_a19e);
    IdentityVerdict { holds, mode: if holds { Mode::Probabilistic } else { Mode::Exact } }
}

const SZ_BITS: u32 = 40;

/// Number of random points needed so that a nonzero polynomial of degree
/// `deg` survives all of them with probability below `2^-64`.
pub fn sz_points(deg: usize) -> usize {
    let per = SZ_BITS as f64 - (deg.max(1) as f64).log2();
    assert!(per > 0.0, "degree too large for the sampling range");
    (64.0 / per).ceil() as usize
}

fn schwartz_zippel(f: &TracePolynomial, ctx: &GenericContext, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sz_points(f.degree()) {
        let xs: Vec<NumMatrix> = (0..ctx.g)
            .map(|_| {
                Matrix::from_fn(ctx.n, ctx.n, |_, _| Rational::from_int(rng.gen_range(0..(1i64 << SZ_BITS))))
            })
            .collect();
        if !eval_numeric(f, &xs).expect("tuple matches context").is_zero() {
            return false;
        }
    }
    true
}

/// `[σ_1, …, σ_n]` with `det(t − M) = t^n − σ_1 t^{n−1} + σ_2 t^{n−2} − …`,
/// via Faddeev–LeVerrier.
pub fn char_coeffs<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "char_coeffs needs a square matrix");
    let mut out = Vec::with_capacity(n);
    let mut acc = Matrix::identity(n);
    for k in 1..=n {
        let am = m.mul(&acc);
        // c_{n-k} = -tr(A M_k)/k and σ_k = (-1)^k c_{n-k}
        let c = am.trace().scale(&Rational::new(-1, k as i64));
        out.push(if k % 2 == 0 { c.clone() } else { -c.clone() });
        acc = am.add(&Matrix::scalar(n, c));
    }
    out
}

/// Positive semidefiniteness of a symmetric rational matrix: all `σ_j ≥ 0`.
pub fn is_psd(m: &NumMatrix) -> Result<bool, EvalError> {
    if !m.is_symmetric() {
        return Err(EvalError::NotSymmetric);
    }
    Ok(char_coeffs(m).iter().all(|s| !s.is_negative()))
}

/// Positive definiteness: all `σ_j > 0`.
pub fn is_pd(m: &NumMatrix) -> Result<bool, EvalError> {
    if !m.is_symmetric() {
        return Err(EvalError::NotSymmetric);
    }
    Ok(char_coeffs(m).iter().all(|s| s.is_positive()))
}

/// The symbolic group element `u = (u_{ab})`.
pub fn generic_u(n: usize) -> PolyMatrix {
    Matrix::from_fn(n, n, |a, b| MultiPoly::var(VarId::u(a + 1, b + 1)))
}

/// `f(uΞ_1u^t, …, uΞ_gu^t)` for a given (symbolic or numeric) `u`.
pub fn act_by(f: &MultiPoly, u: &PolyMatrix) -> MultiPoly {
    let n = u.rows();
    let mut conj: HashMap<usize, PolyMatrix> = HashMap::new();
    for v in f.vars() {
        if v.family() == crate::scalar_poly::Family::Xi {
            conj.entry(v.j()).or_insert_with(|| u.mul(&generic_matrix_unchecked(n, v.j())).mul(&u.transpose()));
        }
    }
    f.substitute(|v| {
        if v.family() != crate::scalar_poly::Family::Xi {
            return None;
        }
        Some(conj[&v.j()].get(v.i() - 1, v.k() - 1).clone())
    })
}

/// `F^u = u^t F(uΞu^t) u`; concomitants are exactly the fixed points.
pub fn act_by_matrix(f: &PolyMatrix, u: &PolyMatrix) -> PolyMatrix {
    let inner = f.map(|p| act_by(p, u));
    u.transpose().mul(&inner).mul(u)
}

/// `f^u` with symbolic `u`: the result is a polynomial in ξ and u.
pub fn apply_group_element(f: &MultiPoly, n: usize) -> MultiPoly {
    act_by(f, &generic_u(n))
}

pub fn apply_group_element_matrix(f: &PolyMatrix) -> PolyMatrix {
    act_by_matrix(f, &generic_u(f.rows()))
}
