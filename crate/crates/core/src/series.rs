//! Truncated Laurent series, dense rational functions and truncated
//! bivariate power series.
//!
//! A [`LaurentSeries`] tracks every coefficient from `low` up to (but not
//! including) `trunc`. Reading a coefficient at or beyond `trunc` is an error,
//! never a silent zero. Series at [`Center::Infinity`] are written in the
//! local variable `w = 1/z`, so `z` itself has `low = -1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{int, Rational};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Center<C> {
    At(C),
    Infinity,
}

impl<C: fmt::Display> fmt::Display for Center<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Center::At(c) => write!(f, "{c}"),
            Center::Infinity => write!(f, "infinity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C> {
    center: Center<C>,
    low: i64,
    coeffs: Vec<C>,
    trunc: i64,
}

impl<C: Scalar> LaurentSeries<C> {
    /// `coeffs[i]` is the coefficient of order `low + i`; entries at or
    /// beyond `trunc` are dropped.
    pub fn new(center: Center<C>, low: i64, mut coeffs: Vec<C>, trunc: i64) -> Self {
        let keep = (trunc - low).max(0) as usize;
        coeffs.truncate(keep);
        let mut s = LaurentSeries { center, low, coeffs, trunc };
        s.normalize();
        s
    }

    pub fn zero(center: Center<C>, trunc: i64) -> Self {
        LaurentSeries { center, low: trunc, coeffs: Vec::new(), trunc }
    }

    pub fn monomial(center: Center<C>, coef: C, order: i64, trunc: i64) -> Self {
        LaurentSeries::new(center, order, vec![coef], trunc)
    }

    pub fn constant(center: Center<C>, coef: C, trunc: i64) -> Self {
        LaurentSeries::monomial(center, coef, 0, trunc)
    }

    /// The local variable itself, `t` (or `w` at infinity).
    pub fn variable(center: Center<C>, trunc: i64) -> Self {
        LaurentSeries::monomial(center, C::one(), 1, trunc)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(..k);
                    self.low += k as i64;
                }
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
            None => {
                self.coeffs.clear();
                self.low = self.trunc;
            }
        }
    }

    pub fn center(&self) -> &Center<C> {
        &self.center
    }

    /// Lowest order with a nonzero coefficient (`trunc` for a zero series).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// First untracked order.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.first()
    }

    pub fn coeff(&self, k: i64) -> Result<C> {
        if k >= self.trunc {
            return Err(Error::TruncationTooShort { requested: k, truncation: self.trunc });
        }
        Ok(self.coeff_tracked(k))
    }

    fn coeff_tracked(&self, k: i64) -> C {
        if k < self.low {
            return C::zero();
        }
        self.coeffs
            .get((k - self.low) as usize)
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// `(order, coefficient)` for every stored nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    pub fn with_center(mut self, center: Center<C>) -> Self {
        self.center = center;
        self
    }

    pub fn truncated(&self, trunc: i64) -> Self {
        LaurentSeries::new(self.center.clone(), self.low, self.coeffs.clone(), trunc.min(self.trunc))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            center: self.center.clone(),
            low: self.low + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + k,
        }
    }

    pub fn map<D: Scalar>(&self, center: Center<D>, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::new(center, self.low, self.coeffs.iter().map(f).collect(), self.trunc)
    }

    pub fn scale(&self, c: &C) -> Self {
        LaurentSeries::new(
            self.center.clone(),
            self.low,
            self.coeffs.iter().map(|x| x.times(c)).collect(),
            self.trunc,
        )
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            center: self.center.clone(),
            low: self.low,
            coeffs: self.coeffs.iter().map(|x| x.negated()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let trunc = self.trunc.min(rhs.trunc);
        let low = self.low.min(rhs.low).min(trunc);
        let end = (self.low + self.coeffs.len() as i64)
            .max(rhs.low + rhs.coeffs.len() as i64)
            .min(trunc);
        let coeffs = (low..end.max(low))
            .map(|k| self.coeff_tracked(k).plus(&rhs.coeff_tracked(k)))
            .collect();
        LaurentSeries::new(self.center.clone(), low, coeffs, trunc)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let low = self.low + rhs.low;
        let trunc = (self.low + rhs.trunc).min(rhs.low + self.trunc);
        if trunc <= low {
            return LaurentSeries::zero(self.center.clone(), trunc);
        }
        let stored = (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(1) as i64;
        let len = (trunc - low).min(stored) as usize;
        let mut out = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        LaurentSeries::new(self.center.clone(), low, out, trunc)
    }

    /// Multiplicative inverse; relative precision is preserved.
    pub fn inv(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = lead.inverse()?;
        let n = self.coeffs.len().max(1);
        let rel = (self.trunc - self.low) as usize;
        let mut out: Vec<C> = Vec::with_capacity(rel);
        for k in 0..rel {
            let mut acc = if k == 0 { C::one() } else { C::zero() };
            for j in 1..=k.min(n - 1) {
                acc = acc.minus(&self.coeffs[j].times(&out[k - j]));
            }
            out.push(acc.times(&lead_inv));
        }
        Ok(LaurentSeries::new(self.center.clone(), -self.low, out, -self.low + rel as i64))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = LaurentSeries::constant(self.center.clone(), C::one(), i64::MAX / 4);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Square root. The leading coefficient's root follows the branch
    /// convention of the scalar type.
    pub fn sqrt(&self) -> Result<Self> {
        let lead = self.leading().ok_or_else(|| Error::UnrepresentableRoot("0".into()))?;
        if self.low % 2 != 0 {
            return Err(Error::OddLeadingOrder(self.low));
        }
        let r0 = lead.square_root()?;
        let two_r0_inv = r0.plus(&r0).inverse()?;
        let rel = (self.trunc - self.low) as usize;
        let mut out: Vec<C> = Vec::with_capacity(rel);
        out.push(r0);
        for k in 1..rel {
            let mut acc = self.coeffs.get(k).cloned().unwrap_or_else(C::zero);
            for i in 1..k {
                acc = acc.minus(&out[i].times(&out[k - i]));
            }
            out.push(acc.times(&two_r0_inv));
        }
        let low = self.low / 2;
        Ok(LaurentSeries::new(self.center.clone(), low, out, low + rel as i64))
    }

    fn check_power_series(&self) -> Result<()> {
        if self.low < 0 {
            return Err(Error::NotInvertible(format!("pole of order {}", -self.low)));
        }
        Ok(())
    }

    /// `log(s)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        self.check_power_series()?;
        let c0 = self.coeff(0)?;
        if c0 != C::one() {
            return Err(Error::NonUnitConstantTerm(c0.to_string()));
        }
        let n = self.trunc as usize;
        let f: Vec<C> = (0..n as i64).map(|k| self.coeff_tracked(k)).collect();
        let mut g = vec![C::zero(); n];
        for m in 1..n {
            let mut acc = f[m].times(&C::from_i64(m as i64));
            for k in 1..m {
                acc = acc.minus(&g[k].times(&f[m - k]).times(&C::from_i64(k as i64)));
            }
            g[m] = acc.scaled(&Rational::new(1.into(), (m as i64).into()));
        }
        Ok(LaurentSeries::new(self.center.clone(), 0, g, self.trunc))
    }

    /// `exp(s)` for a series with vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        self.check_power_series()?;
        if !self.coeff(0)?.is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        let n = self.trunc as usize;
        let g: Vec<C> = (0..n as i64).map(|k| self.coeff_tracked(k)).collect();
        let mut f = vec![C::zero(); n];
        if n > 0 {
            f[0] = C::one();
        }
        for m in 1..n {
            let mut acc = C::zero();
            for k in 1..=m {
                acc = acc.plus(&g[k].times(&f[m - k]).times(&C::from_i64(k as i64)));
            }
            f[m] = acc.scaled(&Rational::new(1.into(), (m as i64).into()));
        }
        Ok(LaurentSeries::new(self.center.clone(), 0, f, self.trunc))
    }

    /// `self(inner(w))`. `inner` must vanish at the origin; the result lives
    /// at `inner`'s center.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let lg = inner.low;
        if lg < 1 {
            return Err(Error::NotInvertible(format!(
                "inner series has order {lg}, needs at least 1"
            )));
        }
        let center = inner.center.clone();
        // untracked part of self contributes from order trunc·lg
        let mut trunc = self.trunc.saturating_mul(lg);
        for (k, _) in self.terms() {
            if k != 0 {
                trunc = trunc.min((k - 1) * lg + inner.trunc);
            }
        }
        let mut acc = LaurentSeries::zero(center.clone(), trunc);
        if self.is_zero() {
            return Ok(acc);
        }
        let mut power = inner.truncated(trunc).powi(self.low)?.truncated(trunc);
        for k in self.low..self.trunc {
            if k * lg >= trunc {
                break;
            }
            let c = self.coeff_tracked(k);
            if !c.is_zero() {
                acc = acc.add(&power.scale(&c).truncated(trunc));
            }
            power = power.mul(inner).truncated(trunc);
        }
        Ok(LaurentSeries { center, ..acc }.truncated(trunc))
    }

    /// Compositional inverse of a series `c₁t + c₂t² + …` with `c₁ ≠ 0`,
    /// by Lagrange inversion.
    pub fn revert(&self) -> Result<Self> {
        if self.low != 1 {
            return Err(Error::NotInvertible(format!("leading order {} is not 1", self.low)));
        }
        let trunc = self.trunc;
        // h = t / s(t), a power series with nonzero constant term
        let h = self.shift(-1).inv()?;
        let mut out = vec![C::zero(); trunc.max(1) as usize];
        let mut power = h.clone();
        for n in 1..trunc {
            // [t^n] r = (1/n) [t^{n-1}] h^n
            let c = power.coeff(n - 1)?;
            out[n as usize] = c.scaled(&Rational::new(1.into(), n.into()));
            power = power.mul(&h);
        }
        Ok(LaurentSeries::new(self.center.clone(), 0, out, trunc))
    }

    /// d/dt in the local variable.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&C::from_i64(self.low + i as i64)))
            .collect();
        LaurentSeries::new(self.center.clone(), self.low - 1, coeffs, self.trunc - 1)
    }

    /// Coefficient of `t^{-1}` in the local variable.
    pub fn residue(&self) -> Result<C> {
        self.coeff(-1)
    }
}

impl<C: Scalar> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match &self.center {
            Center::At(c) if c.is_zero() => "z".to_string(),
            Center::At(c) => format!("(z - {c})"),
            Center::Infinity => "(1/z)".to_string(),
        };
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{var}")?,
                _ => write!(f, "{c}*{var}^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({var}^{})", self.trunc)
    }
}

/// Dense polynomial, coefficients in ascending order.
pub type Poly<C> = Vec<C>;

fn poly_trim<C: Scalar>(p: &mut Poly<C>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_degree<C: Scalar>(p: &Poly<C>) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_add<C: Scalar>(a: &Poly<C>, b: &Poly<C>) -> Poly<C> {
    let n = a.len().max(b.len());
    let mut out: Poly<C> = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.plus(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => C::zero(),
        })
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_neg<C: Scalar>(a: &Poly<C>) -> Poly<C> {
    a.iter().map(|c| c.negated()).collect()
}

fn poly_mul<C: Scalar>(a: &Poly<C>, b: &Poly<C>) -> Poly<C> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    poly_trim(&mut out);
    out
}

/// `(quotient, remainder)`.
fn poly_divrem<C: Scalar>(a: &Poly<C>, b: &Poly<C>) -> Result<(Poly<C>, Poly<C>)> {
    let db = poly_degree(b).ok_or(Error::DivisionByZero)?;
    let lead_inv = b[db].inverse()?;
    let mut rem = a.clone();
    poly_trim(&mut rem);
    if rem.len() <= db {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![C::zero(); rem.len() - db];
    while let Some(dr) = poly_degree(&rem) {
        if dr < db {
            break;
        }
        let c = rem[dr].times(&lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            rem[i + shift] = rem[i + shift].minus(&c.times(bc));
        }
        quot[shift] = c;
        poly_trim(&mut rem);
    }
    poly_trim(&mut quot);
    Ok((quot, rem))
}

fn poly_gcd<C: Scalar>(a: &Poly<C>, b: &Poly<C>) -> Result<Poly<C>> {
    let mut a = a.clone();
    let mut b = b.clone();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let (_, r) = poly_divrem(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a)
}

fn poly_eval<C: Scalar>(p: &Poly<C>, x: &C) -> C {
    p.iter().rev().fold(C::zero(), |acc, c| acc.times(x).plus(c))
}

/// `p(a + t)` as a polynomial in `t`.
fn poly_shift<C: Scalar>(p: &Poly<C>, a: &C) -> Poly<C> {
    let mut out: Poly<C> = Vec::new();
    for c in p.iter().rev() {
        // out = out·(a + t) + c
        let mut next = vec![C::zero(); out.len() + 1];
        for (i, x) in out.iter().enumerate() {
            next[i] = next[i].plus(&x.times(a));
            next[i + 1] = next[i + 1].plus(x);
        }
        next[0] = next[0].plus(c);
        out = next;
    }
    poly_trim(&mut out);
    out
}

fn poly_derivative<C: Scalar>(p: &Poly<C>) -> Poly<C> {
    let mut out: Poly<C> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.times(&C::from_i64(i as i64)))
        .collect();
    poly_trim(&mut out);
    out
}

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<C> {
    num: Poly<C>,
    den: Poly<C>,
}

impl<C: Scalar> RationalFunction<C> {
    pub fn new(num: Poly<C>, den: Poly<C>) -> Result<Self> {
        let mut num = num;
        let mut den = den;
        poly_trim(&mut num);
        poly_trim(&mut den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if num.is_empty() {
            return Ok(RationalFunction { num, den: vec![C::one()] });
        }
        let g = poly_gcd(&num, &den)?;
        if g.len() > 1 {
            num = poly_divrem(&num, &g)?.0;
            den = poly_divrem(&den, &g)?.0;
        }
        let lead = den.last().unwrap().inverse()?;
        num = num.iter().map(|c| c.times(&lead)).collect();
        den = den.iter().map(|c| c.times(&lead)).collect();
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(p: Poly<C>) -> Self {
        let mut p = p;
        poly_trim(&mut p);
        RationalFunction { num: p, den: vec![C::one()] }
    }

    pub fn constant(c: C) -> Self {
        RationalFunction::polynomial(vec![c])
    }

    /// The coordinate `z`.
    pub fn identity() -> Self {
        RationalFunction::polynomial(vec![C::zero(), C::one()])
    }

    /// `c / (z - p)`.
    pub fn simple_pole(c: C, p: C) -> Self {
        RationalFunction { num: vec![c], den: vec![p.negated(), C::one()] }
    }

    pub fn numerator(&self) -> &Poly<C> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn eval(&self, z: &C) -> Result<C> {
        let d = poly_eval(&self.den, z);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        poly_eval(&self.num, z).divided(&d)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let num = poly_add(&poly_mul(&self.num, &rhs.den), &poly_mul(&rhs.num, &self.den));
        RationalFunction::new(num, poly_mul(&self.den, &rhs.den))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: poly_neg(&self.num), den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        RationalFunction::new(poly_mul(&self.num, &rhs.num), poly_mul(&self.den, &rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFunction::new(poly_mul(&self.num, &rhs.den), poly_mul(&self.den, &rhs.num))
    }

    pub fn scale(&self, c: &C) -> Result<Self> {
        RationalFunction::new(self.num.iter().map(|x| x.times(c)).collect(), self.den.clone())
    }

    pub fn derivative(&self) -> Result<Self> {
        let num = poly_add(
            &poly_mul(&poly_derivative(&self.num), &self.den),
            &poly_neg(&poly_mul(&self.num, &poly_derivative(&self.den))),
        );
        RationalFunction::new(num, poly_mul(&self.den, &self.den))
    }

    pub fn nth_derivative(&self, n: usize) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative()?;
        }
        Ok(f)
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let horner = |p: &Poly<C>| -> Result<Self> {
            let mut acc = RationalFunction::constant(C::zero());
            for c in p.iter().rev() {
                acc = acc.mul(inner)?.add(&RationalFunction::constant(c.clone()))?;
            }
            Ok(acc)
        };
        horner(&self.num)?.div(&horner(&self.den)?)
    }

    /// Laurent expansion at `center`, exact below order `order`.
    pub fn expand_at(&self, center: &Center<C>, order: i64) -> Result<LaurentSeries<C>> {
        if self.is_zero() {
            return Ok(LaurentSeries::zero(center.clone(), order));
        }
        let (num, den, shift) = match center {
            Center::At(a) => {
                let n = poly_shift(&self.num, a);
                let d = poly_shift(&self.den, a);
                let vn = n.iter().position(|c| !c.is_zero()).unwrap();
                let vd = d.iter().position(|c| !c.is_zero()).unwrap();
                (n[vn..].to_vec(), d[vd..].to_vec(), vn as i64 - vd as i64)
            }
            Center::Infinity => {
                // f(1/w) = w^{deg d - deg n} rev(n)(w) / rev(d)(w)
                let mut n = self.num.clone();
                let mut d = self.den.clone();
                let shift = d.len() as i64 - n.len() as i64;
                n.reverse();
                d.reverse();
                (n, d, shift)
            }
        };
        let rel = order - shift;
        if rel <= 0 {
            return Ok(LaurentSeries::zero(center.clone(), order));
        }
        let ns = LaurentSeries::new(center.clone(), 0, num, rel);
        let ds = LaurentSeries::new(center.clone(), 0, den, rel);
        Ok(ns.div(&ds)?.shift(shift))
    }
}

impl<C: Scalar> fmt::Display for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly<C>| -> String {
            if p.is_empty() {
                return "0".into();
            }
            let parts: Vec<String> = p
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| match i {
                    0 => format!("{c}"),
                    1 => format!("{c}*z"),
                    _ => format!("{c}*z^{i}"),
                })
                .collect();
            parts.join(" + ")
        };
        if self.den.len() == 1 {
            write!(f, "{}", show(&self.num))
        } else {
            write!(f, "({}) / ({})", show(&self.num), show(&self.den))
        }
    }
}

/// Power series in two variables `s, t`, exact in total degree below `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateSeries<C> {
    trunc: usize,
    // coeffs[i][j] is the coefficient of s^i t^j, i + j < trunc
    coeffs: Vec<Vec<C>>,
}

impl<C: Scalar> BivariateSeries<C> {
    pub fn zero(trunc: usize) -> Self {
        let coeffs = (0..trunc).map(|i| vec![C::zero(); trunc - i]).collect();
        BivariateSeries { trunc, coeffs }
    }

    pub fn constant(c: C, trunc: usize) -> Self {
        let mut out = BivariateSeries::zero(trunc);
        if trunc > 0 {
            out.coeffs[0][0] = c;
        }
        out
    }

    /// Embeds a power series in the first (`first = true`) or second variable.
    pub fn from_univariate(s: &LaurentSeries<C>, first: bool, trunc: usize) -> Result<Self> {
        if s.low() < 0 {
            return Err(Error::NotInvertible(format!("pole of order {}", -s.low())));
        }
        let mut out = BivariateSeries::zero(trunc);
        for k in 0..trunc {
            let c = s.coeff(k as i64)?;
            if first {
                out.coeffs[k][0] = c;
            } else {
                out.coeffs[0][k] = c;
            }
        }
        Ok(out)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, i: usize, j: usize) -> Result<C> {
        if i + j >= self.trunc {
            return Err(Error::TruncationTooShort {
                requested: (i + j) as i64,
                truncation: self.trunc as i64,
            });
        }
        Ok(self.coeffs[i][j].clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = BivariateSeries::zero(trunc);
        for i in 0..trunc {
            for j in 0..trunc - i {
                out.coeffs[i][j] = self.coeffs[i][j].plus(&rhs.coeffs[i][j]);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&C::from_i64(-1)))
    }

    pub fn scale(&self, c: &C) -> Self {
        BivariateSeries {
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|x| x.times(c)).collect())
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = BivariateSeries::zero(trunc);
        for i1 in 0..trunc {
            for j1 in 0..trunc - i1 {
                let a = &self.coeffs[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..trunc - i1 - j1 {
                    for j2 in 0..trunc - i1 - j1 - i2 {
                        let b = &rhs.coeffs[i2][j2];
                        if b.is_zero() {
                            continue;
                        }
                        let slot: &mut C = &mut out.coeffs[i1 + i2][j1 + j2];
                        *slot = slot.plus(&a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn inv(&self) -> Result<Self> {
        if self.trunc == 0 {
            return Ok(self.clone());
        }
        let c0 = self.coeffs[0][0].inverse()?;
        let trunc = self.trunc;
        let mut out = BivariateSeries::zero(trunc);
        out.coeffs[0][0] = c0.clone();
        for d in 1..trunc {
            for i in 0..=d {
                let j = d - i;
                let mut acc = C::zero();
                for i2 in 0..=i {
                    for j2 in 0..=j {
                        if i2 == i && j2 == j {
                            continue;
                        }
                        let a = &self.coeffs[i - i2][j - j2];
                        if !a.is_zero() {
                            acc = acc.plus(&a.times(&out.coeffs[i2][j2]));
                        }
                    }
                }
                out.coeffs[i][j] = acc.negated().times(&c0);
            }
        }
        Ok(out)
    }

    /// `self / (s - t)` for a series vanishing on the diagonal `s = t`.
    /// The result is exact in total degree below `trunc - 1`.
    pub fn divide_by_difference(&self) -> Result<Self> {
        let trunc = self.trunc.saturating_sub(1);
        let mut out = BivariateSeries::zero(trunc);
        for d in 1..self.trunc {
            // G_{i,j} = R_{i-1,j} - R_{i,j-1} along total degree d
            let mut prev = self.coeffs[0][d].negated();
            out.coeffs[0][d - 1] = prev.clone();
            for i in 1..d {
                let r = prev.minus(&self.coeffs[i][d - i]);
                out.coeffs[i][d - 1 - i] = r.clone();
                prev = r;
            }
            if prev != self.coeffs[d][0] {
                return Err(Error::NotInvertible(
                    "series does not vanish on the diagonal".into(),
                ));
            }
        }
        if !self.coeffs.is_empty() && !self.coeffs[0][0].is_zero() {
            return Err(Error::NotInvertible("series does not vanish on the diagonal".into()));
        }
        Ok(out)
    }
}

/// Rational-coefficient convenience: `p/q` as a scalar of any type.
pub fn ratc<C: Scalar>(p: i64, q: i64) -> C {
    C::from_rational(&(int(p) / int(q)))
}
