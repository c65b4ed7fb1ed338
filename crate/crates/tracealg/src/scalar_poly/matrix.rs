//! Dense matrices over exact scalars and exact linear algebra.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use super::rational::Rational;
use super::var::VarId;
use super::{PolyError, Scalar};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ExactMatrix<T> = Matrix<T>;
/// Matrix of exact rationals (evaluation points, Gram matrices).
pub type NumMatrix = Matrix<Rational>;
/// Matrix of polynomials in the generic entries.
pub type PolyMatrix = Matrix<MultiPoly>;
/// Matrix of rational functions.
pub type RatMatrix = Matrix<RatFunc>;

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn scalar(n: usize, c: T) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { T::zero() })
    }

    /// Elementary matrix `E_{ij}` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, n, |a, b| if a == i && b == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Scalar, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -(x.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc + &(a.clone() * b);
            }
            acc
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc + self.get(i, i);
        }
        acc
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                T::zero()
            }
        })
    }

    /// `d`-fold block-diagonal repetition.
    pub fn direct_power(&self, d: usize) -> Self {
        let mut acc = self.clone();
        for _ in 1..d {
            acc = acc.direct_sum(self);
        }
        acc
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (h, w) = (a.rows, a.cols);
        Self::from_fn(h + c.rows, w + b.cols, |i, j| match (i < h, j < w) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - w).clone(),
            (false, true) => c.get(i - h, j).clone(),
            (false, false) => d.get(i - h, j - w).clone(),
        })
    }
}

impl PolyMatrix {
    pub fn eval(&self, assign: &dyn Fn(VarId) -> Option<Rational>) -> Result<NumMatrix, PolyError> {
        self.try_map(|p| p.eval_with(assign))
    }

    pub fn to_ratfunc(&self) -> RatMatrix {
        self.map(|p| RatFunc::from_poly(p.clone()))
    }
}

impl RatMatrix {
    pub fn eval(&self, assign: &dyn Fn(VarId) -> Option<Rational>) -> Result<NumMatrix, PolyError> {
        self.try_map(|p| p.eval_with(assign))
    }
}

impl NumMatrix {
    pub fn to_poly(&self) -> PolyMatrix {
        self.map(|c| MultiPoly::constant(c.clone()))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_f64()).collect()).collect()
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Rational::zero() })
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar + fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// Rank by fraction-free (Bareiss) elimination over ℤ after clearing row
/// denominators.
pub fn exact_rank(m: &NumMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(&x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = &a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k];
                a[r][k] = v / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Result of a symmetric LDLᵀ attempt.
#[derive(Clone, Debug, PartialEq)]
pub enum Ldlt {
    /// `P·M·Pᵀ = L·D·Lᵀ` where `P` sends row `perm[k]` of `M` to row `k`.
    Factored { perm: Vec<usize>, l: NumMatrix, d: Vec<Rational> },
    /// A direction with `vᵀ M v < 0`.
    Indefinite { witness: Vec<Rational>, value: Rational },
}

impl Ldlt {
    pub fn is_psd(&self) -> bool {
        matches!(self, Ldlt::Factored { .. })
    }
}

fn quad_form(m: &NumMatrix, v: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..m.rows() {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            if !v[j].is_zero() {
                acc += &(&(&v[i] * m.get(i, j)) * &v[j]);
            }
        }
    }
    acc
}

/// Exact symmetric LDLᵀ with diagonal pivoting (largest absolute diagonal,
/// lowest index on ties). A negative pivot, or a vanishing diagonal with a
/// nonzero off-diagonal entry, yields an indefinite witness instead; for
/// positive semidefinite input the factorisation always succeeds.
pub fn exact_ldlt(m: &NumMatrix) -> Result<Ldlt, PolyError> {
    if !m.is_square() || !m.is_symmetric() {
        return Err(PolyError::NotSymmetric);
    }
    let n = m.rows();
    // Invariant: a = T · M · Tᵀ.
    let mut a = m.clone();
    let mut t = NumMatrix::identity(n);
    let mut done = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let witness_from = |t: &NumMatrix, y: &[(usize, Rational)]| -> Vec<Rational> {
        (0..n)
            .map(|c| y.iter().fold(Rational::zero(), |acc, (r, s)| &acc + &(s * t.get(*r, c))))
            .collect()
    };
    for _ in 0..n {
        let open: Vec<usize> = (0..n).filter(|&i| !done[i]).collect();
        if let Some(&i) = open.iter().find(|&&i| a.get(i, i).is_negative()) {
            let v = witness_from(&t, &[(i, Rational::one())]);
            let value = quad_form(m, &v);
            return Ok(Ldlt::Indefinite { witness: v, value });
        }
        let p = open
            .iter()
            .copied()
            .fold(None::<usize>, |best, i| match best {
                Some(b) if a.get(b, b).abs() >= a.get(i, i).abs() => Some(b),
                _ => Some(i),
            })
            .expect("open index");
        if a.get(p, p).is_zero() {
            // Every remaining diagonal is zero: any nonzero off-diagonal
            // entry gives e_i − sign·e_j with value −2|a_ij|.
            for &i in &open {
                for &j in &open {
                    if j > i && !a.get(i, j).is_zero() {
                        let s = if a.get(i, j).is_positive() { -Rational::one() } else { Rational::one() };
                        let v = witness_from(&t, &[(i, Rational::one()), (j, s)]);
                        let value = quad_form(m, &v);
                        return Ok(Ldlt::Indefinite { witness: v, value });
                    }
                }
            }
            // Remaining block is zero.
            for &i in &open {
                done[i] = true;
                perm.push(i);
            }
            break;
        }
        let piv = a.get(p, p).clone();
        for &i in &open {
            if i == p || a.get(i, p).is_zero() {
                continue;
            }
            let f = a.get(i, p) / &piv;
            for c in 0..n {
                let v = a.get(i, c) - &(&f * a.get(p, c));
                a.set(i, c, v);
                let w = t.get(i, c) - &(&f * t.get(p, c));
                t.set(i, c, w);
            }
            for r in 0..n {
                let v = a.get(r, i) - &(&f * a.get(r, p));
                a.set(r, i, v);
            }
        }
        done[p] = true;
        perm.push(p);
    }
    // In pivot order T is unit lower triangular; L = T⁻¹.
    let tp = NumMatrix::from_fn(n, n, |i, j| t.get(perm[i], perm[j]).clone());
    let mut l = NumMatrix::identity(n);
    for i in 0..n {
        // Row i of L·Tp = I, solved right to left.
        for j in (0..i).rev() {
            let mut s = tp.get(i, j).clone();
            for k in j + 1..i {
                s += &(l.get(i, k) * tp.get(k, j));
            }
            l.set(i, j, -s);
        }
    }
    let d = perm.iter().map(|&p| a.get(p, p).clone()).collect();
    Ok(Ldlt::Factored { perm, l, d })
}

/// Jacobian `∂fs[i]/∂vars[k]` via the quotient rule.
pub fn jacobian(fs: &[RatFunc], vars: &[VarId]) -> RatMatrix {
    Matrix::from_fn(fs.len(), vars.len(), |i, k| fs[i].derivative(vars[k]))
}

/// The same Jacobian evaluated at a point, without forming the symbolic
/// entries: `(N'D − ND')/D²` with every factor evaluated first.
pub fn jacobian_at(
    fs: &[RatFunc],
    vars: &[VarId],
    point: &dyn Fn(VarId) -> Option<Rational>,
) -> Result<NumMatrix, PolyError> {
    let mut rows = Vec::with_capacity(fs.len());
    for f in fs {
        let n = f.num().eval_with(point)?;
        let d = f.den().eval_with(point)?;
        if d.is_zero() {
            return Err(PolyError::DenominatorVanishes);
        }
        let d2 = &d * &d;
        let mut row = Vec::with_capacity(vars.len());
        for &v in vars {
            let dn = f.num().derivative(v).eval_with(point)?;
            let dd = f.den().derivative(v).eval_with(point)?;
            row.push(&(&(&dn * &d) - &(&n * &dd)) / &d2);
        }
        rows.push(row);
    }
    Ok(Matrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn jacobian_at_matches_symbolic() {
        let x = VarId::xi(1, 1, 1);
        let y = VarId::xi(1, 1, 2);
        let px = MultiPoly::var(x);
        let py = MultiPoly::var(y);
        let f = RatFunc::new(px.mul_ref(&py), px.add_ref(&MultiPoly::one())).unwrap();
        let fs = [f, RatFunc::from_poly(py.square())];
        let pt = |v: VarId| Some(if v == x { Rational::new(2, 3) } else { Rational::from_int(-5) });
        assert_eq!(jacobian_at(&fs, &[x, y], &pt).unwrap(), jacobian(&fs, &[x, y]).eval(&pt).unwrap());
    }

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        assert_eq!(exact_rank(&NumMatrix::identity(3)), 3);
        let m = NumMatrix::from_rows(vec![
            vec![q(1), Rational::new(1, 2), q(3)],
            vec![q(2), q(1), q(6)],
            vec![q(0), q(1), q(1)],
        ]);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank(&NumMatrix::zeros(2, 3)), 0);
    }

    #[test]
    fn ldlt_indefinite_witness() {
        let m = NumMatrix::from_ints(&[&[0, 2], &[2, 0]]);
        match exact_ldlt(&m).unwrap() {
            Ldlt::Indefinite { witness, value } => {
                assert_eq!(witness, vec![q(1), q(-1)]);
                assert_eq!(value, q(-4));
            }
            other => panic!("expected indefinite, got {other:?}"),
        }
    }

    #[test]
    fn ldlt_diagonal() {
        let m = NumMatrix::diag(&[q(1), q(2)]);
        match exact_ldlt(&m).unwrap() {
            Ldlt::Factored { perm, l, d } => {
                assert_eq!(perm, vec![1, 0]);
                assert_eq!(l, NumMatrix::identity(2));
                assert_eq!(d, vec![q(2), q(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ldlt_rejects_asymmetric() {
        let m = NumMatrix::from_ints(&[&[1, 2], &[0, 1]]);
        assert_eq!(exact_ldlt(&m), Err(PolyError::NotSymmetric));
    }

    #[test]
    fn jacobian_quotient_rule() {
        let x = VarId::xi(1, 1, 1);
        let y = VarId::xi(1, 1, 2);
        let f = RatFunc::new(MultiPoly::var(x), MultiPoly::var(y)).unwrap();
        let j = jacobian(&[f], &[x, y]);
        assert_eq!(*j.get(0, 0), RatFunc::new(MultiPoly::one(), MultiPoly::var(y)).unwrap());
        assert_eq!(
            *j.get(0, 1),
            RatFunc::new(MultiPoly::var(x).neg_ref(), MultiPoly::var(y).square()).unwrap()
        );
        let g = RatFunc::from_poly(MultiPoly::var(x).square());
        assert_eq!(*jacobian(&[g], &[x]).get(0, 0), RatFunc::from_poly(MultiPoly::var(x).scale(&q(2))));
    }
}
