//! Multivariate polynomial gcd over ℚ.
//!
//! A fast specialisation test proves coprimality in the common case; when
//! it does not, a recursive primitive-PRS computes the gcd under a work
//! budget. Exceeding the budget yields `None` so callers can fall back to
//! leaving a fraction unreduced, which is always sound.

use std::cell::Cell;

use super::poly::MultiPoly;
use super::rational::Rational;
use super::var::VarId;

/// Default work budget (term operations) for one gcd call.
pub const DEFAULT_GCD_OPS: usize = 20_000_000;

struct Budget(Cell<usize>);

impl Budget {
    fn spend(&self, n: usize) -> Option<()> {
        let left = self.0.get();
        if n > left {
            self.0.set(0);
            None
        } else {
            self.0.set(left - n);
            Some(())
        }
    }
}

/// Gcd normalised to a primitive polynomial with positive leading
/// coefficient; `None` if the work budget ran out.
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly, max_ops: usize) -> Option<MultiPoly> {
    if a.is_zero() {
        return Some(b.primitive_part());
    }
    if b.is_zero() {
        return Some(a.primitive_part());
    }
    if a.is_constant() || b.is_constant() {
        return Some(MultiPoly::one());
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma);
    let b1 = b.div_monomial(&mb);
    let rest = if a1.is_constant() || b1.is_constant() || provably_coprime(&a1, &b1) {
        MultiPoly::one()
    } else {
        let budget = Budget(Cell::new(max_ops));
        gcd_rec(&a1, &b1, &budget)?
    };
    Some(rest.mul_monomial(&mono, &Rational::one()).primitive_part())
}

/// Specialises all but one variable and checks that the univariate gcd is
/// constant for every shared variable. Leading coefficients are kept
/// nonvanishing, so a constant image proves the true gcd is constant.
fn provably_coprime(a: &MultiPoly, b: &MultiPoly) -> bool {
    let va = a.vars();
    let vb = b.vars();
    let shared: Vec<VarId> = va.intersection(&vb).copied().collect();
    if shared.is_empty() {
        return true;
    }
    let all: Vec<VarId> = va.union(&vb).copied().collect();
    'vars: for &x in &shared {
        for attempt in 0..4u64 {
            let point = |v: VarId| -> Rational {
                let pos = all.iter().position(|&w| w == v).unwrap_or(0) as u64;
                Rational::from_int((((pos + 3) * 7919 + attempt * 104_729) % 97 + 2) as i64)
            };
            let ua = specialise(a, x, &point);
            let ub = specialise(b, x, &point);
            if ua.len() != a.degree_in(x) as usize + 1 || ub.len() != b.degree_in(x) as usize + 1 {
                continue; // leading coefficient vanished; retry
            }
            if uni_gcd_degree(ua, ub) == 0 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

fn specialise(p: &MultiPoly, x: VarId, point: &dyn Fn(VarId) -> Rational) -> Vec<Rational> {
    let mut coeffs = vec![Rational::zero(); p.degree_in(x) as usize + 1];
    for (m, c) in p.terms() {
        let (e, rest) = m.split_var(x);
        let mut t = c.clone();
        for &(v, k) in rest.factors() {
            t = &t * &point(v).pow(k);
        }
        coeffs[e as usize] += &t;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
}

fn uni_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree of the gcd of two univariate polynomials over ℚ.
fn uni_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    uni_trim(&mut a);
    uni_trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        // a <- a mod b
        let lb = b.last().unwrap().recip();
        while a.len() >= b.len() && !a.is_empty() {
            let q = a.last().unwrap() * &lb;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                let t = c * &q;
                a[i + shift] -= &t;
            }
            a.pop();
            uni_trim(&mut a);
        }
        // Keep coefficients small.
        if let Some(l) = a.last().cloned() {
            let inv = l.recip();
            for c in a.iter_mut() {
                *c = &*c * &inv;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly, budget: &Budget) -> Option<MultiPoly> {
    if a.is_zero() {
        return Some(b.primitive_part());
    }
    if b.is_zero() {
        return Some(a.primitive_part());
    }
    if a.is_constant() || b.is_constant() {
        return Some(MultiPoly::one());
    }
    if a.is_associate(b) {
        return Some(a.primitive_part());
    }
    budget.spend(a.num_terms() + b.num_terms())?;
    let va = a.vars();
    let vb = b.vars();
    // A variable present in only one argument cannot occur in the gcd.
    if let Some(&x) = va.symmetric_difference(&vb).next() {
        let (with_x, other) = if va.contains(&x) { (a, b) } else { (b, a) };
        let mut g = other.clone();
        for c in with_x.coeffs_in(x).iter().rev() {
            if c.is_zero() {
                continue;
            }
            g = gcd_rec(&g, c, budget)?;
            if g.is_constant() {
                return Some(MultiPoly::one());
            }
        }
        return Some(g);
    }
    let x = *va.iter().next().expect("non-constant polynomial has variables");
    let ca = content_in(a, x, budget)?;
    let cb = content_in(b, x, budget)?;
    let c = gcd_rec(&ca, &cb, budget)?;
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut p, mut q) = if pa.degree_in(x) >= pb.degree_in(x) { (pa, pb) } else { (pb, pa) };
    let g = loop {
        let r = pseudo_rem(&p, &q, x, budget)?;
        if r.is_zero() {
            break q;
        }
        if r.degree_in(x) == 0 {
            break MultiPoly::one();
        }
        let cr = content_in(&r, x, budget)?;
        p = q;
        q = r.div_exact(&cr).expect("content divides");
    };
    let g = if g.is_constant() {
        g
    } else {
        let cg = content_in(&g, x, budget)?;
        g.div_exact(&cg).expect("content divides")
    };
    Some(c.mul_ref(&g).primitive_part())
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
fn content_in(p: &MultiPoly, x: VarId, budget: &Budget) -> Option<MultiPoly> {
    let coeffs = p.coeffs_in(x);
    let mut nonzero: Vec<&MultiPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| c.num_terms());
    let mut g = nonzero[0].primitive_part();
    for c in nonzero.iter().skip(1) {
        if g.is_constant() {
            break;
        }
        g = gcd_rec(&g, c, budget)?;
    }
    Some(g.primitive_part())
}

/// `lc(q)^e · p mod q` in `x`, for some `e ≥ 0`.
fn pseudo_rem(p: &MultiPoly, q: &MultiPoly, x: VarId, budget: &Budget) -> Option<MultiPoly> {
    let mut r = p.coeffs_in(x);
    let qc = q.coeffs_in(x);
    let dq = qc.len() - 1;
    let lq = &qc[dq];
    while r.len() > dq && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dq;
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c.mul_ref(lq)).collect();
        for (i, c) in qc.iter().enumerate() {
            next[i + shift] = next[i + shift].sub_ref(&c.mul_ref(&lr));
        }
        let work: usize = next.iter().map(|c| c.num_terms()).sum();
        budget.spend(work.max(1))?;
        next.pop();
        while next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        r = next;
    }
    Some(MultiPoly::from_coeffs_in(x, &r))
}
