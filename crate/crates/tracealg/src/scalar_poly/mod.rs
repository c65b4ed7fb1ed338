//! Exact rational arithmetic, sparse multivariate polynomials, rational
//! functions and dense exact linear algebra.

mod gcd;
mod matrix;
mod poly;
mod ratfunc;
mod rational;
mod var;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use gcd::{poly_gcd, DEFAULT_GCD_OPS};
pub use matrix::{exact_ldlt, exact_rank, jacobian, jacobian_at, ExactMatrix, Ldlt, Matrix, NumMatrix, PolyMatrix, RatMatrix};
pub use poly::MultiPoly;
pub use ratfunc::{gcd_term_threshold, ratfunc_equal, set_gcd_term_threshold, RatFunc};
pub use rational::{ParseRationalError, Rational};
pub use var::{Family, Monomial, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("no value assigned to variable {0}")]
    MissingVariable(VarId),
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Commutative ℚ-algebra elements usable as matrix entries.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn scale(&self, r: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_int(n))
    }

    /// Rough storage size, used for expansion budgets.
    fn size_hint(&self) -> usize {
        1
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}
