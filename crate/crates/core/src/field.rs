//! Exact scalars: rationals, Gaussian rationals and their products with
//! square roots of positive rationals.
//!
//! A [`FieldElem`] is `(re + im·i)·√r` with `r` a squarefree positive
//! integer. Sums over different radicands live in [`SumElem`], keyed by the
//! normalized radicand. Multiplying two radicands never needs factoring:
//! `√r·√s = gcd(r, s)·√(r/g · s/g)` and the cofactor is again squarefree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default trial-division bound used when normalizing radicands.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or `p` (optional sign, decimal integers).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let q: BigInt = q
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

/// Always `p/q`, including `q = 1`.
pub fn fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub(crate) fn short_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gaussian { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        Gaussian { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Gaussian { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Gaussian { re: &self.re * q, im: &self.im * q }
    }
}

impl Add for &Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: &Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", short_rational(&self.re)),
            (true, false) => write!(f, "{}i", short_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(
                    f,
                    "({}{}{}i)",
                    short_rational(&self.re),
                    sign,
                    short_rational(&self.im.abs())
                )
            }
        }
    }
}

/// Splits `n = outside² · squarefree` by trial division up to `bound`.
fn split_square(n: &BigUint, bound: u64) -> Result<(BigUint, BigUint)> {
    let mut rest = n.clone();
    let mut outside = BigUint::one();
    let mut squarefree = BigUint::one();
    let mut p: u64 = 2;
    while p <= bound {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            outside *= bp.pow(e / 2);
            if e % 2 == 1 {
                squarefree *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        let bb = BigUint::from(bound) * BigUint::from(bound);
        if rest > bb {
            let r = rest.sqrt();
            if &r * &r == rest {
                outside *= r;
                rest = BigUint::one();
            } else {
                return Err(Error::FactorizationLimit { bound, cofactor: rest.to_string() });
            }
        }
        squarefree *= rest;
    }
    Ok((outside, squarefree))
}

/// `q·√m` normalized to a squarefree integer radicand.
pub fn normalize_radical(q: &Rational, m: &Rational) -> Result<FieldElem> {
    normalize_radical_with_bound(q, m, DEFAULT_FACTOR_BOUND)
}

pub fn normalize_radical_with_bound(q: &Rational, m: &Rational, bound: u64) -> Result<FieldElem> {
    if !m.is_positive() {
        return Err(Error::NonPositiveRadicand(short_rational(m)));
    }
    if q.is_zero() {
        return Ok(FieldElem::zero());
    }
    // √(p/r) = √(p·r)/r
    let p = m.numer().magnitude();
    let r = m.denom().magnitude();
    let (outside, sf) = split_square(&(p * r), bound)?;
    let coef = q * Rational::new(
        BigInt::from_biguint(Sign::Plus, outside),
        BigInt::from_biguint(Sign::Plus, r.clone()),
    );
    Ok(FieldElem {
        coef: Gaussian::real(coef),
        radicand: BigInt::from_biguint(Sign::Plus, sf),
    })
}

/// `coef · √radicand` with a squarefree positive integer radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub coef: Gaussian,
    pub radicand: BigInt,
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem { coef: Gaussian::default(), radicand: BigInt::one() }
    }

    pub fn rational(q: Rational) -> Self {
        FieldElem { coef: Gaussian::real(q), radicand: BigInt::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn radicand(&self) -> Rational {
        Rational::from_integer(self.radicand.clone())
    }

    pub fn mul(&self, rhs: &FieldElem) -> FieldElem {
        let g = self.radicand.gcd(&rhs.radicand);
        let rad = (&self.radicand / &g) * (&rhs.radicand / &g);
        let coef = (&self.coef * &rhs.coef).scale(&Rational::from_integer(g));
        if coef.is_zero() {
            return FieldElem::zero();
        }
        FieldElem { coef, radicand: rad }
    }

    /// `value²`, always a Gaussian rational.
    pub fn square(&self) -> Gaussian {
        (&self.coef * &self.coef).scale(&self.radicand())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}*sqrt({})", self.coef, self.radicand)
        }
    }
}

/// Finite sum of [`FieldElem`]s over distinct radicands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SumElem {
    terms: BTreeMap<BigInt, Gaussian>,
}

impl SumElem {
    pub fn zero() -> Self {
        SumElem::default()
    }

    pub fn one() -> Self {
        SumElem::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        SumElem::from(FieldElem::rational(q))
    }

    pub fn gaussian(g: Gaussian) -> Self {
        SumElem::from(FieldElem { coef: g, radicand: BigInt::one() })
    }

    pub fn i() -> Self {
        SumElem::gaussian(Gaussian::i())
    }

    /// `√q` for a nonzero rational `q`, with the branch convention of [`SumElem::sqrt`].
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Ok(SumElem::zero());
        }
        let root = normalize_radical(&int(1), &q.abs())?;
        let root = SumElem::from(root);
        if q.is_negative() {
            Ok(&root * &SumElem::i())
        } else {
            Ok(root)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = FieldElem> + '_ {
        self.terms
            .iter()
            .map(|(r, c)| FieldElem { coef: c.clone(), radicand: r.clone() })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, rad: BigInt, coef: Gaussian) {
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(rad).or_default();
        *slot = &*slot + &coef;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    /// Rational value when every radical and imaginary part cancels.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                if r.is_one() && c.im.is_zero() {
                    Some(c.re.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        SumElem {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), c.conj())).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = SumElem::zero();
        for (r, c) in &self.terms {
            out.insert(r.clone(), c.scale(q));
        }
        out
    }

    /// Multiplicative inverse. Supported for single-radicand elements and
    /// for two-term elements over radicands {1, r} via conjugation.
    pub fn inv(&self) -> Result<Self> {
        match self.terms.len() {
            0 => Err(Error::DivisionByZero),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                // (c√r)⁻¹ = c⁻¹·r⁻¹·√r
                let coef = c.inv()?.scale(&Rational::new(BigInt::one(), r.clone()));
                Ok(SumElem::from(FieldElem { coef, radicand: r.clone() }))
            }
            2 if self.terms.contains_key(&BigInt::one()) => {
                let mut it = self.terms.iter();
                let (_, a) = it.next().unwrap();
                let (r, b) = it.next().unwrap();
                let rq = Rational::from_integer(r.clone());
                // (a + b√r)⁻¹ = (a − b√r)/(a² − b²r)
                let den = &(a * a) - &(b * b).scale(&rq);
                let den_inv = den.inv()?;
                let mut out = SumElem::zero();
                out.insert(BigInt::one(), a * &den_inv);
                out.insert(r.clone(), &(-b) * &den_inv);
                Ok(out)
            }
            _ => Err(Error::UnsupportedRadicalTower(
                self.terms.keys().map(|r| r.to_string()).collect(),
            )),
        }
    }

    /// Square root of a single-term element whose square root is again a
    /// single term: `q·√1` with `q` rational. Positive roots are taken for
    /// `q > 0`, roots with positive imaginary part for `q < 0`.
    pub fn sqrt(&self) -> Result<Self> {
        match self.as_rational() {
            Some(q) => SumElem::sqrt_rational(&q),
            None => {
                // purely imaginary or radical leading terms would need 4th roots
                Err(Error::UnrepresentableRoot(self.to_string()))
            }
        }
    }
}

impl From<FieldElem> for SumElem {
    fn from(f: FieldElem) -> Self {
        let mut out = SumElem::zero();
        out.insert(f.radicand, f.coef);
        out
    }
}

impl From<Rational> for SumElem {
    fn from(q: Rational) -> Self {
        SumElem::rational(q)
    }
}

impl Add for &SumElem {
    type Output = SumElem;
    fn add(self, rhs: &SumElem) -> SumElem {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.insert(r.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SumElem {
    type Output = SumElem;
    fn sub(self, rhs: &SumElem) -> SumElem {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.insert(r.clone(), -c);
        }
        out
    }
}

impl Mul for &SumElem {
    type Output = SumElem;
    fn mul(self, rhs: &SumElem) -> SumElem {
        let mut out = SumElem::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                let g = r1.gcd(r2);
                let rad = (r1 / &g) * (r2 / &g);
                let coef = (c1 * c2).scale(&Rational::from_integer(g));
                out.insert(rad, coef);
            }
        }
        out
    }
}

impl Neg for &SumElem {
    type Output = SumElem;
    fn neg(self) -> SumElem {
        SumElem {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for SumElem {
            type Output = SumElem;
            fn $m(self, rhs: SumElem) -> SumElem {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SumElem {
    type Output = SumElem;
    fn neg(self) -> SumElem {
        -&self
    }
}

impl fmt::Display for SumElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `rational & √1` check used to assert radical cancellation.
pub fn field_is_rational(a: &SumElem) -> (bool, Option<Rational>) {
    match a.as_rational() {
        Some(q) => (true, Some(q)),
        None => (false, None),
    }
}

pub fn field_mul(a: &SumElem, b: &SumElem) -> SumElem {
    a * b
}

/// Wire form of one [`SumElem`] term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub re: String,
    pub im: String,
    pub rad: String,
}

impl Serialize for SumElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let recs: Vec<TermRecord> = self
            .terms()
            .map(|t| TermRecord {
                re: fraction_string(&t.coef.re),
                im: fraction_string(&t.coef.im),
                rad: fraction_string(&t.radicand()),
            })
            .collect();
        recs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SumElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let recs = Vec::<TermRecord>::deserialize(d)?;
        let mut out = SumElem::zero();
        for r in recs {
            let re = parse_rational(&r.re).map_err(D::Error::custom)?;
            let im = parse_rational(&r.im).map_err(D::Error::custom)?;
            let rad = parse_rational(&r.rad).map_err(D::Error::custom)?;
            // re-normalize: the radicand on the wire may be any positive rational
            let root = normalize_radical(&int(1), &rad).map_err(D::Error::custom)?;
            let term = &SumElem::from(root) * &SumElem::gaussian(Gaussian::new(re, im));
            out = &out + &term;
        }
        Ok(out)
    }
}

/// `(2k−1)!!` with `(−1)!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut out = BigInt::one();
    let mut k = n;
    while k > 1 {
        out *= k;
        k -= 2;
    }
    out
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Small helper for reports: a rational as `f64` (display only).
pub fn approx(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
