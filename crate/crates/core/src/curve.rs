//! The combinatorial-limit spectral curve
//! `x(z) = z + γ_y²/(z − ε̃)`, `y(z) = −z + γ_x²/(ε − z)` with the global
//! Bergman kernel `dz₁dz₂/(z₁ − z₂)²`.

use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{factorial, fraction_string, int, parse_rational, Rational};
use crate::series::{LaurentSeries, RationalFunction};

/// Index of a ramification point: `Plus` is `ε̃ + γ_y`, `Minus` is `ε̃ − γ_y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RamPoint {
    #[serde(rename = "a+")]
    Plus,
    #[serde(rename = "a-")]
    Minus,
}

impl RamPoint {
    pub const ALL: [RamPoint; 2] = [RamPoint::Plus, RamPoint::Minus];

    pub fn index(self) -> usize {
        match self {
            RamPoint::Plus => 0,
            RamPoint::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> RamPoint {
        if i == 0 {
            RamPoint::Plus
        } else {
            RamPoint::Minus
        }
    }

    pub fn other(self) -> RamPoint {
        match self {
            RamPoint::Plus => RamPoint::Minus,
            RamPoint::Minus => RamPoint::Plus,
        }
    }

    /// `+1` for `a₊`, `−1` for `a₋`.
    pub fn sign(self) -> i64 {
        match self {
            RamPoint::Plus => 1,
            RamPoint::Minus => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RamPoint::Plus => "a+",
            RamPoint::Minus => "a-",
        }
    }
}

impl fmt::Display for RamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub(crate) mod rational_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fraction_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveParams {
    #[serde(with = "rational_string")]
    pub eps: Rational,
    #[serde(with = "rational_string")]
    pub eps_tilde: Rational,
    #[serde(with = "rational_string")]
    pub gamma_x: Rational,
    #[serde(with = "rational_string")]
    pub gamma_y: Rational,
}

impl CurveParams {
    pub fn new(eps: Rational, eps_tilde: Rational, gamma_x: Rational, gamma_y: Rational) -> Self {
        CurveParams { eps, eps_tilde, gamma_x, gamma_y }
    }

    /// Small-integer convenience constructor.
    pub fn from_ints(eps: i64, eps_tilde: i64, gamma_x: i64, gamma_y: i64) -> Self {
        CurveParams::new(int(eps), int(eps_tilde), int(gamma_x), int(gamma_y))
    }

    /// `(ε, ε̃, γ_x, γ_y) = (3, 0, 1, 1)`, ramified at `±1`.
    pub fn reference() -> Self {
        CurveParams::from_ints(3, 0, 1, 1)
    }

    /// Parses `key = p/q` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut slots: [Option<Rational>; 4] = Default::default();
        const KEYS: [&str; 4] = ["eps", "eps_tilde", "gamma_x", "gamma_y"];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let idx = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1)))?;
            if slots[idx].is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            slots[idx] = Some(parse_rational(value)?);
        }
        let mut vals = Vec::with_capacity(4);
        for (slot, key) in slots.into_iter().zip(KEYS) {
            vals.push(slot.ok_or_else(|| Error::Parse(format!("missing key {key:?}")))?);
        }
        let mut it = vals.into_iter();
        Ok(CurveParams::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        ))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        CurveParams::parse(&text)
    }

    pub fn to_config(&self) -> String {
        format!(
            "eps = {}\neps_tilde = {}\ngamma_x = {}\ngamma_y = {}\n",
            fraction_string(&self.eps),
            fraction_string(&self.eps_tilde),
            fraction_string(&self.gamma_x),
            fraction_string(&self.gamma_y)
        )
    }
}

impl fmt::Display for CurveParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(eps, eps_tilde, gamma_x, gamma_y) = ({}, {}, {}, {})",
            self.eps, self.eps_tilde, self.gamma_x, self.gamma_y
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve {
    params: CurveParams,
    x: RationalFunction<Rational>,
    y: RationalFunction<Rational>,
    ram_points: [Rational; 2],
}

/// Derivative data at a ramification point: `x_0 = x''(a)`,
/// `x_n = x^{(n+2)}(a)/x''(a)`, `y_0 = y'(a)`, `y_n = y^{(n+1)}(a)/y'(a)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalModuli {
    pub point: RamPoint,
    #[serde(serialize_with = "serialize_rationals")]
    pub x_n: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub y_n: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(fraction_string).collect();
    strs.serialize(s)
}

pub fn build_lsz_curve(params: CurveParams) -> Result<SpectralCurve> {
    let CurveParams { eps, eps_tilde, gamma_x, gamma_y } = &params;
    if gamma_y.is_zero() {
        return Err(Error::DegenerateCurve("gamma_y = 0 leaves x without ramification".into()));
    }
    let gx2 = gamma_x * gamma_x;
    let gy2 = gamma_y * gamma_y;
    let x = RationalFunction::identity().add(&RationalFunction::simple_pole(gy2, eps_tilde.clone()))?;
    // γ_x²/(ε − z) = −γ_x²/(z − ε)
    let y = RationalFunction::identity()
        .neg()
        .add(&RationalFunction::simple_pole(-gx2, eps.clone()))?;
    let ram_points = [eps_tilde + gamma_y, eps_tilde - gamma_y];
    for (a, p) in ram_points.iter().zip(RamPoint::ALL) {
        if a == eps {
            return Err(Error::DegenerateCurve(format!("{p} = {a} is the pole of y")));
        }
    }
    let curve = SpectralCurve { params, x, y, ram_points };
    let dy = curve.y.derivative()?;
    for p in RamPoint::ALL {
        if dy.eval(curve.point(p))?.is_zero() {
            return Err(Error::DegenerateCurve(format!("dy vanishes at {p}")));
        }
    }
    Ok(curve)
}

impl SpectralCurve {
    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    pub fn x(&self) -> &RationalFunction<Rational> {
        &self.x
    }

    pub fn y(&self) -> &RationalFunction<Rational> {
        &self.y
    }

    pub fn point(&self, p: RamPoint) -> &Rational {
        &self.ram_points[p.index()]
    }

    pub fn ram_points(&self) -> &[Rational; 2] {
        &self.ram_points
    }

    /// `(a₁ − a₂) = 2γ_y`.
    pub fn delta(&self) -> Rational {
        &self.ram_points[0] - &self.ram_points[1]
    }

    /// `ς(q) = ε̃ + γ_y²/(q − ε̃)`, the second preimage of `x(q)`.
    pub fn involution(&self, q: &Rational) -> Result<Rational> {
        let d = q - &self.params.eps_tilde;
        if d.is_zero() {
            return Err(Error::PoleInput(q.to_string()));
        }
        Ok(&self.params.eps_tilde + &self.params.gamma_y * &self.params.gamma_y / d)
    }

    /// The involution applied to a series whose constant term is not `ε̃`.
    pub fn involution_series(&self, q: &LaurentSeries<Rational>) -> Result<LaurentSeries<Rational>> {
        let et = &self.params.eps_tilde;
        let shifted = q.sub(&LaurentSeries::constant(q.center().clone(), et.clone(), q.trunc()));
        if shifted.low() != 0 {
            return Err(Error::PoleInput(format!("series with constant term {et}")));
        }
        let gy2 = &self.params.gamma_y * &self.params.gamma_y;
        let inv = shifted.inv()?.scale(&gy2);
        Ok(inv.add(&LaurentSeries::constant(q.center().clone(), et.clone(), inv.trunc())))
    }

    /// The involution as a rational function of `z`.
    pub fn involution_function(&self) -> RationalFunction<Rational> {
        let gy2 = &self.params.gamma_y * &self.params.gamma_y;
        RationalFunction::simple_pole(gy2, self.params.eps_tilde.clone())
            .add(&RationalFunction::constant(self.params.eps_tilde.clone()))
            .expect("nonzero denominators")
    }

    /// Local moduli by direct differentiation of `x` and `y`.
    pub fn local_moduli(&self, p: RamPoint, n_max: usize) -> Result<LocalModuli> {
        let a = self.point(p);
        let mut dx = self.x.nth_derivative(2)?;
        let x0 = dx.eval(a)?;
        let mut x_n = vec![x0.clone()];
        let mut dy = self.y.derivative()?;
        let y0 = dy.eval(a)?;
        let mut y_n = vec![y0.clone()];
        for _ in 1..=n_max {
            dx = dx.derivative()?;
            dy = dy.derivative()?;
            x_n.push(dx.eval(a)? / &x0);
            y_n.push(dy.eval(a)? / &y0);
        }
        Ok(LocalModuli { point: p, x_n, y_n })
    }

    /// Local moduli from the closed forms in `ε, ε̃, γ_x, γ_y`.
    pub fn closed_form_moduli(&self, p: RamPoint, n_max: usize) -> LocalModuli {
        let CurveParams { eps, eps_tilde, gamma_x, gamma_y } = &self.params;
        let s = int(p.sign());
        // ε − ε̃ ∓ γ_y
        let d = eps - eps_tilde - &s * gamma_y;
        let gx2 = gamma_x * gamma_x;
        let mut x_n = vec![int(2) * &s / gamma_y];
        let mut y_n = vec![int(-1) + &gx2 / (&d * &d)];
        for n in 1..=n_max {
            let e = n as i32;
            let xn = Rational::from_integer(factorial(n as u64 + 2))
                / (int(2) * pow(&(-&s * gamma_y), e));
            x_n.push(xn);
            // (n+1)! / (d^n − d^{n+2}/γ_x²)
            let den = pow(&d, e) - pow(&d, e + 2) / &gx2;
            y_n.push(Rational::from_integer(factorial(n as u64 + 1)) / den);
        }
        LocalModuli { point: p, x_n, y_n }
    }

    /// Replaces `y` by `λ·y`.
    pub fn with_scaled_y(&self, lambda: &Rational) -> Result<SpectralCurve> {
        let mut c = self.clone();
        c.y = self.y.scale(lambda)?;
        Ok(c)
    }
}

fn pow(q: &Rational, e: i32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e {
        out *= q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::series::Center;
    use proptest::prelude::*;

    fn reference() -> SpectralCurve {
        build_lsz_curve(CurveParams::reference()).unwrap()
    }

    #[test]
    fn reference_curve_shape() {
        let c = reference();
        assert_eq!(c.ram_points(), &[int(1), int(-1)]);
        // x(z) = z + 1/z
        assert_eq!(c.x().numerator(), &vec![int(1), int(0), int(1)]);
        assert_eq!(c.x().denominator(), &vec![int(0), int(1)]);
        let m = c.local_moduli(RamPoint::Plus, 2).unwrap();
        assert_eq!(m.y_n[0], rat(-3, 4));
        assert_eq!(m.x_n, vec![int(2), int(-3), int(12)]);
        assert_eq!(m.y_n[1], rat(-1, 3));
    }

    #[test]
    fn degenerate_inputs() {
        let r = build_lsz_curve(CurveParams::from_ints(1, 0, 1, 1));
        assert!(matches!(r, Err(Error::DegenerateCurve(_))));
        let r = build_lsz_curve(CurveParams::from_ints(3, 0, 1, 0));
        assert!(matches!(r, Err(Error::DegenerateCurve(_))));
        // y'(a+) = -1 + γ_x²/(ε - a+)² vanishes for γ_x = 2, ε - a+ = 2
        let r = build_lsz_curve(CurveParams::from_ints(3, 0, 2, 1));
        assert!(matches!(r, Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn involution_examples() {
        let c = reference();
        assert_eq!(c.involution(&int(2)).unwrap(), rat(1, 2));
        assert_eq!(c.x().eval(&int(2)).unwrap(), rat(5, 2));
        assert_eq!(c.x().eval(&rat(1, 2)).unwrap(), rat(5, 2));
        assert_eq!(c.involution(&int(1)).unwrap(), int(1));
        assert!(matches!(c.involution(&int(0)), Err(Error::PoleInput(_))));
    }

    #[test]
    fn involution_series_at_ramification_point() {
        // ε̃ = 1, γ_y = 2: a+ = 3, ς(3 + u) = 1 + 4/(2 + u) = 3 − u + u²/2 − u³/4
        let c = build_lsz_curve(CurveParams::from_ints(7, 1, 1, 2)).unwrap();
        let q = LaurentSeries::new(Center::At(int(0)), 0, vec![int(3), int(1)], 5);
        let s = c.involution_series(&q).unwrap();
        let got: Vec<_> = (0..4).map(|k| s.coeff(k).unwrap()).collect();
        assert_eq!(got, vec![int(3), int(-1), rat(1, 2), rat(-1, 4)]);
        // ς'(a+) = −1 and the u² coefficient is 1/γ_y
        assert_eq!(s.coeff(2).unwrap(), rat(1, 1) / int(2));
    }

    #[test]
    fn moduli_match_closed_forms_to_order_six() {
        for params in [
            CurveParams::reference(),
            CurveParams::from_ints(5, 1, 2, 1),
            CurveParams::new(int(7), rat(1, 2), int(3), int(2)),
        ] {
            let c = build_lsz_curve(params).unwrap();
            for p in RamPoint::ALL {
                assert_eq!(c.local_moduli(p, 6).unwrap(), c.closed_form_moduli(p, 6));
            }
        }
    }

    #[test]
    fn moduli_from_taylor_coefficients() {
        // independent route: n! · [t^n] of the local expansion
        let c = build_lsz_curve(CurveParams::from_ints(5, 1, 2, 1)).unwrap();
        for p in RamPoint::ALL {
            let a = c.point(p).clone();
            let xs = c.x().expand_at(&Center::At(a.clone()), 10).unwrap();
            let ys = c.y().expand_at(&Center::At(a), 10).unwrap();
            let m = c.local_moduli(p, 6).unwrap();
            let fact = |n: u64| Rational::from_integer(factorial(n));
            let x0 = xs.coeff(2).unwrap() * fact(2);
            let y0 = ys.coeff(1).unwrap();
            assert_eq!(m.x_n[0], x0);
            assert_eq!(m.y_n[0], y0);
            for n in 1..=6i64 {
                assert_eq!(m.x_n[n as usize], xs.coeff(n + 2).unwrap() * fact(n as u64 + 2) / &x0);
                assert_eq!(m.y_n[n as usize], ys.coeff(n + 1).unwrap() * fact(n as u64 + 1) / &y0);
            }
            // dx has a simple zero at the ramification point
            assert_eq!(xs.coeff(1).unwrap(), int(0));
        }
    }

    #[test]
    fn config_round_trip() {
        let text = "# reference\neps = 3\neps_tilde = 0/1 # origin\ngamma_x = 1\ngamma_y = 1/1\n";
        let p = CurveParams::parse(text).unwrap();
        assert_eq!(p, CurveParams::reference());
        assert_eq!(CurveParams::parse(&p.to_config()).unwrap(), p);
        assert!(CurveParams::parse("eps = 3\n").is_err());
        assert!(CurveParams::parse("eps = 1/0\neps_tilde=0\ngamma_x=1\ngamma_y=1").is_err());
        assert!(CurveParams::parse("eps = 1\neps = 2").is_err());
        assert!(CurveParams::parse("foo = 1").is_err());
    }

    fn arb_params() -> impl Strategy<Value = CurveParams> {
        (
            (-20i64..20, 1i64..6),
            (-20i64..20, 1i64..6),
            (1i64..10, 1i64..4),
            (1i64..10, 1i64..4),
        )
            .prop_map(|(e, et, gx, gy)| {
                CurveParams::new(rat(e.0, e.1), rat(et.0, et.1), rat(gx.0, gx.1), rat(gy.0, gy.1))
            })
    }

    proptest! {
        #[test]
        fn involution_is_a_deck_transformation(params in arb_params()) {
            let Ok(c) = build_lsz_curve(params) else { return Ok(()); };
            let s = c.involution_function();
            prop_assert_eq!(c.x().compose(&s).unwrap(), c.x().clone());
            prop_assert_eq!(s.compose(&s).unwrap(), RationalFunction::identity());
            for a in c.ram_points() {
                prop_assert_eq!(&c.involution(a).unwrap(), a);
            }
        }

        #[test]
        fn dx_has_two_simple_zeros(params in arb_params()) {
            let Ok(c) = build_lsz_curve(params) else { return Ok(()); };
            let dx = c.x().derivative().unwrap();
            // numerator of x' is (z − ε̃)² − γ_y², a quadratic
            prop_assert_eq!(dx.numerator().len(), 3);
            for a in c.ram_points() {
                prop_assert!(dx.eval(a).unwrap().is_zero());
                prop_assert!(!c.x().nth_derivative(2).unwrap().eval(a).unwrap().is_zero());
            }
        }
    }
}
