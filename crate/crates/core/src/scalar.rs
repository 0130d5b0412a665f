use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{int, normalize_radical, short_rational, Rational, SumElem};

/// Arithmetic shared by the coefficient types of series and correlators.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: &Rational) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Result<Self>;
    /// Square root with the branch convention of [`SumElem::sqrt`].
    fn square_root(&self) -> Result<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn scaled(&self, q: &Rational) -> Self {
        self.times(&Self::from_rational(q))
    }

    fn divided(&self, rhs: &Self) -> Result<Self> {
        Ok(self.times(&rhs.inverse()?))
    }

    fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..e.unsigned_abs() {
            out = out.times(&base);
        }
        Ok(out)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn square_root(&self) -> Result<Self> {
        let root = normalize_radical(&int(1), self)?;
        if root.radicand.is_one() && Zero::is_zero(&root.coef.im) {
            Ok(root.coef.re)
        } else {
            Err(Error::UnrepresentableRoot(short_rational(self)))
        }
    }
}

impl Scalar for SumElem {
    fn zero() -> Self {
        SumElem::zero()
    }
    fn one() -> Self {
        SumElem::one()
    }
    fn is_zero(&self) -> bool {
        SumElem::is_zero(self)
    }
    fn from_rational(q: &Rational) -> Self {
        SumElem::rational(q.clone())
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self> {
        self.inv()
    }
    fn square_root(&self) -> Result<Self> {
        self.sqrt()
    }
    fn scaled(&self, q: &Rational) -> Self {
        self.scale(q)
    }
}

