//! Topological recursion on the LSZ curve in a pole basis.
//!
//! A stable correlator is stored as a finite sum of products
//! `coef · Π_i dz_i/(z_i − a_{p_i})^{m_i}` over ramification points.
//! The recursion works locally in `t = q − a`, with `s = ς(a + t) − a`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::{RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{Rational, SumElem};
use crate::series::{Center, LaurentSeries, RationalFunction};

/// One factor `dz/(z − a_point)^order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PoleFactor {
    pub point: RamPoint,
    pub order: u32,
}

impl PoleFactor {
    pub fn new(point: RamPoint, order: u32) -> Self {
        PoleFactor { point, order }
    }
}

pub type Monomial = Vec<PoleFactor>;

/// A multidifferential in the pole basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Correlator {
    g: u32,
    n: u32,
    terms: BTreeMap<Monomial, SumElem>,
}

impl Correlator {
    pub fn new(g: u32, n: u32) -> Self {
        Correlator { g, n, terms: BTreeMap::new() }
    }

    /// Builds a canonical correlator, merging repeated monomials.
    pub fn from_terms(g: u32, n: u32, terms: impl IntoIterator<Item = (Monomial, SumElem)>) -> Self {
        let mut c = Correlator::new(g, n);
        for (m, coef) in terms {
            c.add_term(m, &coef);
        }
        c
    }

    pub(crate) fn from_rational(g: u32, n: u32, terms: &RatTerms) -> Self {
        Correlator {
            g,
            n,
            terms: terms
                .iter()
                .map(|(m, c)| (m.clone(), SumElem::rational(c.clone())))
                .collect(),
        }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, SumElem> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, monomial: Monomial, coef: &SumElem) {
        assert_eq!(monomial.len(), self.n as usize, "monomial arity");
        assert!(monomial.iter().all(|f| f.order >= 1), "pole order must be positive");
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(monomial.clone()).or_insert_with(SumElem::zero);
        *slot = &*slot + coef;
        if slot.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn coefficient(&self, monomial: &[PoleFactor]) -> SumElem {
        self.terms.get(monomial).cloned().unwrap_or_else(SumElem::zero)
    }

    pub fn sub(&self, rhs: &Correlator) -> Correlator {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }

    pub fn scale(&self, c: &SumElem) -> Correlator {
        Correlator::from_terms(self.g, self.n, self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    /// Relabels variables: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Correlator {
        Correlator::from_terms(
            self.g,
            self.n,
            self.terms
                .iter()
                .map(|(m, c)| (perm.iter().map(|&p| m[p]).collect(), c.clone())),
        )
    }

    /// Checks invariance under every transposition of adjacent variables,
    /// which generate the symmetric group.
    pub fn is_symmetric(&self) -> bool {
        let n = self.n as usize;
        (0..n.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(i, i + 1);
            self.permuted(&perm) == *self
        }) && (n < 2 || {
            let perm: Vec<usize> = (1..n).chain([0]).collect();
            self.permuted(&perm) == *self
        })
    }

    /// Sum of the order-one coefficients in variable `var` at `point`,
    /// with the other factors kept.
    pub fn residue_part(&self, var: usize, point: RamPoint) -> Correlator {
        Correlator::from_terms(
            self.g,
            self.n,
            self.terms
                .iter()
                .filter(|(m, _)| m[var] == PoleFactor::new(point, 1))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn is_residue_free(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|f| f.order >= 2))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some())
    }

    /// Largest pole order of variable `var`.
    pub fn max_order(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var].order).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("correlator serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: SumElem,
    factors: Vec<PoleFactor>,
}

#[derive(Serialize, Deserialize)]
struct CorrelatorJson {
    g: u32,
    n: u32,
    terms: Vec<TermJson>,
}

impl Serialize for Correlator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CorrelatorJson {
            g: self.g,
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { coef: c.clone(), factors: m.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Correlator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CorrelatorJson::deserialize(d)?;
        for t in &raw.terms {
            if t.factors.len() != raw.n as usize || t.factors.iter().any(|f| f.order == 0) {
                return Err(D::Error::custom("malformed pole monomial"));
            }
        }
        Ok(Correlator::from_terms(raw.g, raw.n, raw.terms.into_iter().map(|t| (t.factors, t.coef))))
    }
}

impl fmt::Display for Correlator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "omega_{{{},{}}}: {} terms", self.g, self.n, self.terms.len())?;
        for (m, c) in &self.terms {
            let factors: Vec<String> =
                m.iter().map(|p| format!("({},{})", p.point, p.order)).collect();
            writeln!(f, "  {}  {}", factors.join(" "), c)?;
        }
        Ok(())
    }
}

/// Exact coefficient of a pole monomial given as `(point, order)` pairs.
pub fn omega_coefficient(w: &Correlator, multi_index: &[(RamPoint, u32)]) -> SumElem {
    let m: Monomial = multi_index.iter().map(|&(p, o)| PoleFactor::new(p, o)).collect();
    w.coefficient(&m)
}

/// The unstable correlators: `ω_{0,1} = y dx` and `ω_{0,2} = B`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnstableData {
    pub omega01: (RationalFunction<Rational>, RationalFunction<Rational>),
    pub bergman: BergmanKernel,
}

/// `B(z₁, z₂) = dz₁dz₂/(z₁ − z₂)²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BergmanKernel;

impl BergmanKernel {
    pub fn eval(&self, z1: &Rational, z2: &Rational) -> Result<Rational> {
        let d = z1 - z2;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok((&d * &d).recip())
    }
}

pub fn unstable_data(c: &SpectralCurve) -> UnstableData {
    UnstableData { omega01: (c.y().clone(), c.x().clone()), bergman: BergmanKernel }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Omega {
    Omega01(RationalFunction<Rational>, RationalFunction<Rational>),
    Bergman(BergmanKernel),
    Stable(Correlator),
}

impl Omega {
    pub fn stable(self) -> Option<Correlator> {
        match self {
            Omega::Stable(c) => Some(c),
            _ => None,
        }
    }
}

/// Local expansion of the recursion kernel at one ramification point:
/// `K(z, a + t) = Σ_{k≥1} κ_k(t) dz/(z − a)^{k+1}` per unit `dt`.
#[derive(Clone, Debug)]
pub struct KernelExpansion {
    pub point: RamPoint,
    /// `2(y(q) − y(ς(q))) x'(q)` in `t`.
    pub denominator: LaurentSeries<Rational>,
    /// `s(t) = ς(a + t) − a`.
    pub involution: LaurentSeries<Rational>,
    /// `κ_1, κ_2, …` in order.
    pub kappa: Vec<LaurentSeries<Rational>>,
}

impl KernelExpansion {
    pub fn kappa(&self, k: usize) -> &LaurentSeries<Rational> {
        &self.kappa[k - 1]
    }
}

pub fn recursion_kernel(c: &SpectralCurve, point: RamPoint, order: i64) -> Result<KernelExpansion> {
    let local = Local::new(c, point, order)?;
    let kappa = (1..=order.max(1) as usize).map(|k| local.kappa(k)).collect();
    Ok(KernelExpansion {
        point,
        denominator: local.denom.clone(),
        involution: local.s.clone(),
        kappa,
    })
}

pub(crate) type RatTerms = BTreeMap<Monomial, Rational>;
type Series = LaurentSeries<Rational>;
type Slots = Vec<Option<PoleFactor>>;
type Piece = BTreeMap<Slots, Series>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Side {
    Q,
    Sigma,
}

struct Local {
    point: RamPoint,
    a: Rational,
    ram: [Rational; 2],
    center: Center<Rational>,
    order: i64,
    s: Series,
    dsig: Series,
    denom: Series,
    inv_denom: Series,
    s_pows: Vec<Series>,
    pole_cache: HashMap<(Side, RamPoint, u32), Series>,
}

impl Local {
    fn new(c: &SpectralCurve, point: RamPoint, order: i64) -> Result<Self> {
        let a = c.point(point).clone();
        let center = Center::At(a.clone());
        let sig = c.involution_function().expand_at(&center, order)?;
        let s = sig.sub(&LaurentSeries::constant(center.clone(), a.clone(), order));
        if s.low() != 1 {
            return Err(Error::DegenerateCurve(format!("involution not simple at {point}")));
        }
        let dsig = s.derivative();
        let ya = c.y().expand_at(&center, order + 1)?;
        let dxa = c.x().derivative()?.expand_at(&center, order + 1)?;
        let y_sig = ya.compose(&s)?;
        let two = Rational::from_integer(2.into());
        let denom = ya.sub(&y_sig).mul(&dxa).scale(&two);
        if denom.low() != 2 {
            return Err(Error::DegenerateCurve(format!(
                "kernel denominator has order {} at {point}",
                denom.low()
            )));
        }
        let inv_denom = denom.inv()?;
        let ram = c.ram_points().clone();
        Ok(Local {
            point,
            a,
            ram,
            center,
            order,
            s,
            dsig,
            denom,
            inv_denom,
            s_pows: Vec::new(),
            pole_cache: HashMap::new(),
        })
    }

    fn t_pow(&self, k: i64) -> Series {
        LaurentSeries::monomial(self.center.clone(), Rational::from_integer(1.into()), k, k + self.order)
    }

    fn s_pow(&mut self, k: usize) -> &Series {
        while self.s_pows.len() <= k {
            let next = match self.s_pows.last() {
                None => LaurentSeries::constant(self.center.clone(), Rational::from_integer(1.into()), self.order),
                Some(p) => p.mul(&self.s),
            };
            self.s_pows.push(next);
        }
        &self.s_pows[k]
    }

    fn kappa(&self, k: usize) -> Series {
        let mut sk = self.s.clone();
        for _ in 1..k {
            sk = sk.mul(&self.s);
        }
        self.t_pow(k as i64).sub(&sk).mul(&self.inv_denom)
    }

    /// `(q − a_p)^{−m}` on the `q` side, `(ς(q) − a_p)^{−m} ς'(q)` on the other.
    fn pole(&mut self, side: Side, f: PoleFactor) -> Result<Series> {
        if let Some(s) = self.pole_cache.get(&(side, f.point, f.order)) {
            return Ok(s.clone());
        }
        let c = &self.a - &self.ram[f.point.index()];
        let arg = match side {
            Side::Q => LaurentSeries::variable(self.center.clone(), self.order),
            Side::Sigma => self.s.clone(),
        };
        let base = arg.add(&LaurentSeries::constant(self.center.clone(), c, self.order));
        let mut out = base.powi(-(f.order as i64))?;
        if side == Side::Sigma {
            out = out.mul(&self.dsig);
        }
        self.pole_cache.insert((side, f.point, f.order), out.clone());
        Ok(out)
    }

    /// Pole depth in `t` of a correlator's first variable on either side.
    fn depth(&self, w: &RatTerms) -> i64 {
        w.keys()
            .filter(|m| m[0].point == self.point)
            .map(|m| m[0].order as i64)
            .max()
            .unwrap_or(0)
    }

    /// `ω(q, J')` or `ω(ς(q), J')` with the remaining variables placed at `vars`.
    fn piece_from(&mut self, w: &RatTerms, vars: &[usize], n: usize, side: Side, tau: i64) -> Result<Piece> {
        let mut piece = Piece::new();
        for (m, coef) in w {
            let series = self.pole(side, m[0])?.truncated(tau).scale(coef);
            let mut key: Slots = vec![None; n];
            for (i, &v) in vars.iter().enumerate() {
                key[v] = Some(m[i + 1]);
            }
            accumulate(&mut piece, key, series);
        }
        Ok(piece)
    }

    /// `B(q, z_j)` or `B(ς(q), z_j)` expanded in `t` below order `tau`.
    fn piece_bergman(&mut self, var: usize, n: usize, side: Side, tau: i64) -> Result<Piece> {
        let mut piece = Piece::new();
        for k in 0..tau.max(0) {
            let weight = Rational::from_integer((k + 1).into());
            let series = match side {
                Side::Q => self.t_pow(k).truncated(tau).scale(&weight),
                Side::Sigma => {
                    let dsig = self.dsig.clone();
                    self.s_pow(k as usize).mul(&dsig).truncated(tau).scale(&weight)
                }
            };
            let mut key: Slots = vec![None; n];
            key[var] = Some(PoleFactor::new(self.point, k as u32 + 2));
            accumulate(&mut piece, key, series);
        }
        Ok(piece)
    }
}

fn accumulate(piece: &mut Piece, key: Slots, series: Series) {
    match piece.get_mut(&key) {
        Some(s) => *s = s.add(&series),
        None => {
            piece.insert(key, series);
        }
    }
}

fn multiply_into(target: &mut Piece, a: &Piece, b: &Piece) {
    for (ka, sa) in a {
        for (kb, sb) in b {
            let key: Slots = ka.iter().zip(kb).map(|(x, y)| x.or(*y)).collect();
            accumulate(target, key, sa.mul(sb));
        }
    }
}

pub fn is_stable(g: u32, n: u32) -> bool {
    2 * g + n > 2
}

/// Default local expansion order for `ω_{g,n}`.
pub fn default_order(g: u32, n: u32) -> i64 {
    2 * (3 * g as i64 - 3 + n as i64) + 10
}

fn curve_key(c: &SpectralCurve) -> String {
    format!("{}|{}|{}", c.x(), c.y(), c.params())
}

type Cache = Mutex<HashMap<(String, u32, u32), Arc<RatTerms>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Empties the correlator cache shared by all curves.
pub fn clear_cache() {
    cache().lock().expect("cache lock").clear();
}

fn cached(c: &SpectralCurve, g: u32, n: u32) -> Result<Arc<RatTerms>> {
    let key = (curve_key(c), g, n);
    if let Some(w) = cache().lock().expect("cache lock").get(&key) {
        return Ok(w.clone());
    }
    let w = Arc::new(compute_adaptive(c, g, n)?);
    cache().lock().expect("cache lock").entry(key).or_insert_with(|| w.clone());
    Ok(w)
}

fn compute_adaptive(c: &SpectralCurve, g: u32, n: u32) -> Result<RatTerms> {
    let mut order = default_order(g, n);
    for _ in 0..5 {
        match recurse(c, g, n, order) {
            Ok((w, false)) => return Ok(w),
            Ok((w, true)) => {
                let (check, _) = recurse(c, g, n, 2 * order)?;
                if check != w {
                    return Err(Error::TruncationTooShort { requested: order, truncation: order });
                }
                return Ok(w);
            }
            Err(Error::TruncationTooShort { .. }) => order *= 2,
            Err(e) => return Err(e),
        }
    }
    Err(Error::TruncationTooShort { requested: order, truncation: order })
}

/// One application of the recursion at a fixed local order. The flag
/// reports whether the kernel series was read within two orders of its end.
fn recurse(c: &SpectralCurve, g: u32, n: u32, order: i64) -> Result<(RatTerms, bool)> {
    if !is_stable(g, n) {
        return Err(Error::Unstable { g, n });
    }
    let m = (n - 1) as usize;
    let mut out = RatTerms::new();
    let mut margin = false;
    for point in RamPoint::ALL {
        let mut local = Local::new(c, point, order)?;
        let mut integrand = Piece::new();

        if g >= 1 {
            if g == 1 && n == 1 {
                // B(q, ς(q)) dς
                let ts = local.t_pow(1).sub(&local.s);
                let series = local.dsig.mul(&ts.powi(-2)?).truncated(1);
                accumulate(&mut integrand, Vec::new(), series);
            } else {
                let w = cached(c, g - 1, n + 1)?;
                for (mono, coef) in w.iter() {
                    let sq = local.pole(Side::Q, mono[0])?;
                    let ss = local.pole(Side::Sigma, mono[1])?;
                    let series = sq.mul(&ss).truncated(1).scale(coef);
                    accumulate(&mut integrand, mono[2..].iter().map(|f| Some(*f)).collect(), series);
                }
            }
        }

        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << m) {
                let i1: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
                let i2: Vec<usize> = (0..m).filter(|j| mask & (1 << j) == 0).collect();
                let (n1, n2) = (1 + i1.len() as u32, 1 + i2.len() as u32);
                if (g1, n1) == (0, 1) || (g2, n2) == (0, 1) {
                    continue;
                }
                let w1 = if (g1, n1) == (0, 2) { None } else { Some(cached(c, g1, n1)?) };
                let w2 = if (g2, n2) == (0, 2) { None } else { Some(cached(c, g2, n2)?) };
                let d1 = w1.as_ref().map_or(0, |w| local.depth(w));
                let d2 = w2.as_ref().map_or(0, |w| local.depth(w));
                let a = match &w1 {
                    None => local.piece_bergman(i1[0], m, Side::Q, 1 + d2)?,
                    Some(w) => local.piece_from(w, &i1, m, Side::Q, 1 + d2)?,
                };
                let b = match &w2 {
                    None => local.piece_bergman(i2[0], m, Side::Sigma, 1 + d1)?,
                    Some(w) => local.piece_from(w, &i2, m, Side::Sigma, 1 + d1)?,
                };
                multiply_into(&mut integrand, &a, &b);
            }
        }

        let depth = integrand.values().map(|s| -s.low()).max().unwrap_or(0).max(0);
        let kappas: Vec<Series> = (1..=(depth + 1) as usize).map(|k| local.kappa(k)).collect();
        for (key, f) in &integrand {
            let pf = (-f.low()).max(0);
            for k in 1..=(pf + 1) {
                let kap = &kappas[(k - 1) as usize];
                // Res_t κ_k F = Σ_i κ_k[i] F[−1−i]
                let mut acc = Rational::zero();
                for i in kap.low()..=(-1 - f.low()) {
                    if i >= kap.trunc() - 2 {
                        margin = true;
                    }
                    let fk = f.coeff(-1 - i)?;
                    if fk.is_zero() {
                        continue;
                    }
                    acc += kap.coeff(i)? * fk;
                }
                if acc.is_zero() {
                    continue;
                }
                let mut mono: Monomial = Vec::with_capacity(n as usize);
                mono.push(PoleFactor::new(point, k as u32 + 1));
                mono.extend(key.iter().map(|s| s.expect("every variable is placed")));
                let slot = out.entry(mono).or_insert_with(Rational::zero);
                *slot += acc;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok((out, margin))
}

/// `ω_{g,n}` for any `(g, n)` with `n ≥ 1`.
pub fn compute_omega(c: &SpectralCurve, g: u32, n: u32) -> Result<Omega> {
    match (g, n) {
        (_, 0) => Err(Error::NotImplementedCase { g: g as i64, n: 0 }),
        (0, 1) => Ok(Omega::Omega01(c.y().clone(), c.x().clone())),
        (0, 2) => Ok(Omega::Bergman(BergmanKernel)),
        _ => Ok(Omega::Stable(stable_omega(c, g, n)?)),
    }
}

/// `ω_{g,n}` for stable `(g, n)`, from the shared cache.
pub fn stable_omega(c: &SpectralCurve, g: u32, n: u32) -> Result<Correlator> {
    if !is_stable(g, n) {
        return Err(Error::Unstable { g, n });
    }
    Ok(Correlator::from_rational(g, n, &*cached(c, g, n)?))
}

/// `ω_{g,n}` with the top recursion step run at a fixed local order and no
/// retry; inputs still come from the cache.
pub fn compute_omega_at_order(c: &SpectralCurve, g: u32, n: u32, order: i64) -> Result<Correlator> {
    let (w, _) = recurse(c, g, n, order)?;
    Ok(Correlator::from_rational(g, n, &w))
}
