//! Local expansion data at the ramification points: the coordinate
//! `ζ_a = √(x − x(a))`, times and dual times, Bergman coefficients and
//! their duals, and the one-forms `dξ_{a,d}` in the pole basis.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::curve::{RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{double_factorial, int, Rational, SumElem};
use crate::scalar::Scalar;
use crate::series::{BivariateSeries, Center, LaurentSeries};
use crate::toprec::PoleFactor;

pub mod tables;

pub use tables::{check_tables, table_report, verify_closed_form_tables, TableEntry, TableReport};

type Series = LaurentSeries<SumElem>;

/// How far each family of coefficients is computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliOptions {
    pub times_k_max: usize,
    pub dual_k_max: usize,
    pub b_k_max: usize,
    pub dxi_d_max: usize,
    pub zz_l_max: usize,
}

impl Default for ModuliOptions {
    fn default() -> Self {
        ModuliOptions { times_k_max: 9, dual_k_max: 3, b_k_max: 4, dxi_d_max: 1, zz_l_max: 8 }
    }
}

/// Index `(a, k; a', k')` of a Bergman coefficient.
pub type BIndex = (RamPoint, usize, RamPoint, usize);

/// `t̂_{a,0}` is kept as the argument of its logarithm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualTimes {
    /// `e^{t̂_{a,0}} = 1/(2 t_{a,3})`.
    pub exp_t0: SumElem,
    /// `t̂_{a,k}` for `k ≥ 1`.
    #[serde(serialize_with = "ser_indexed")]
    pub higher: BTreeMap<usize, SumElem>,
}

impl DualTimes {
    pub fn get(&self, k: usize) -> Option<&SumElem> {
        self.higher.get(&k)
    }
}

/// A one-form `Σ coef · dz/(z − a_point)^order`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoleForm {
    pub terms: BTreeMap<PoleFactor, SumElem>,
}

impl PoleForm {
    pub fn coefficient(&self, point: RamPoint, order: u32) -> SumElem {
        self.terms.get(&PoleFactor::new(point, order)).cloned().unwrap_or_else(SumElem::zero)
    }

    pub fn add_term(&mut self, f: PoleFactor, c: SumElem) {
        let slot = self.terms.entry(f).or_insert_with(SumElem::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&f);
        }
    }

    /// Largest pole order at `point`, 0 if regular there.
    pub fn pole_order(&self, point: RamPoint) -> u32 {
        self.terms.keys().filter(|f| f.point == point).map(|f| f.order).max().unwrap_or(0)
    }

    /// Laurent expansion of the coefficient of `dz` around `center` in `t = z − center`.
    pub fn expand(&self, c: &SpectralCurve, center: RamPoint, order: i64) -> Result<Series> {
        let at = Center::At(SumElem::rational(c.point(center).clone()));
        let mut acc = Series::zero(at.clone(), order);
        for (f, coef) in &self.terms {
            let m = f.order as i64;
            let term = if f.point == center {
                Series::monomial(at.clone(), coef.clone(), -m, order)
            } else {
                let shift = SumElem::rational(c.point(center) - c.point(f.point));
                let base = Series::variable(at.clone(), order + m)
                    .add(&Series::constant(at.clone(), shift, order + m));
                base.powi(-m)?.scale(coef)
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl Serialize for PoleForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            point: RamPoint,
            order: u32,
            coef: &'a SumElem,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (f, c) in &self.terms {
            seq.serialize_element(&Term { point: f.point, order: f.order, coef: c })?;
        }
        seq.end()
    }
}

/// Everything extracted at one ramification point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuliData {
    pub point: RamPoint,
    /// Leading coefficient of `ζ_a` in `z − a`; `√x_{a,0} = √2 · zeta_lead`.
    pub zeta_lead: SumElem,
    #[serde(serialize_with = "ser_indexed")]
    pub times: BTreeMap<usize, SumElem>,
    pub dual_times: DualTimes,
    /// `B_{a,k;a',k'}` with this point first.
    #[serde(serialize_with = "ser_b")]
    pub b_coeffs: BTreeMap<BIndex, SumElem>,
    #[serde(serialize_with = "ser_b")]
    pub dual_b: BTreeMap<BIndex, SumElem>,
    pub dxi: Vec<PoleForm>,
    /// `𝔷_{a,k,l}`: coefficient of `(z − a)^l` in `ζ_a^k`.
    #[serde(serialize_with = "ser_zz")]
    pub zz: BTreeMap<(usize, usize), SumElem>,
}

impl ModuliData {
    pub fn time(&self, k: usize) -> &SumElem {
        &self.times[&k]
    }

    pub fn b(&self, k: usize, other: RamPoint, k2: usize) -> &SumElem {
        &self.b_coeffs[&(self.point, k, other, k2)]
    }

    pub fn dual_b(&self, k: usize, other: RamPoint, k2: usize) -> &SumElem {
        &self.dual_b[&(self.point, k, other, k2)]
    }

    pub fn dxi(&self, d: usize) -> &PoleForm {
        &self.dxi[d]
    }

    /// `√x_{a,0}` on the branch fixed by `ζ_a`.
    pub fn sqrt_x0(&self) -> SumElem {
        &sqrt2() * &self.zeta_lead
    }
}

fn ser_indexed<S: Serializer>(m: &BTreeMap<usize, SumElem>, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct E<'a> {
        k: usize,
        value: &'a SumElem,
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for (k, v) in m {
        seq.serialize_element(&E { k: *k, value: v })?;
    }
    seq.end()
}

fn ser_b<S: Serializer>(m: &BTreeMap<BIndex, SumElem>, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct E<'a> {
        point: RamPoint,
        k: usize,
        point2: RamPoint,
        k2: usize,
        value: &'a SumElem,
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for ((p, k, p2, k2), v) in m {
        seq.serialize_element(&E { point: *p, k: *k, point2: *p2, k2: *k2, value: v })?;
    }
    seq.end()
}

fn ser_zz<S: Serializer>(
    m: &BTreeMap<(usize, usize), SumElem>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct E<'a> {
        k: usize,
        l: usize,
        value: &'a SumElem,
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for ((k, l), v) in m {
        seq.serialize_element(&E { k: *k, l: *l, value: v })?;
    }
    seq.end()
}

pub(crate) fn sqrt2() -> SumElem {
    SumElem::sqrt_rational(&int(2)).expect("sqrt 2")
}

fn lift(s: &LaurentSeries<Rational>) -> Series {
    let center = match s.center() {
        Center::At(a) => Center::At(SumElem::rational(a.clone())),
        Center::Infinity => Center::Infinity,
    };
    s.map(center, |q| SumElem::rational(q.clone()))
}

/// `ζ_a(z) = √(x(z) − x(a))` in `t = z − a`, exact below order `order`.
pub fn zeta_series(c: &SpectralCurve, point: RamPoint, order: i64) -> Result<Series> {
    let a = c.point(point).clone();
    let center = Center::At(a.clone());
    let xa = c.x().expand_at(&center, order + 1)?;
    let shifted = xa.sub(&LaurentSeries::constant(center, c.x().eval(&a)?, order + 1));
    lift(&shifted).sqrt()
}

/// `z − a` as a series in `ζ_a`.
pub fn inverse_zeta(c: &SpectralCurve, point: RamPoint, order: i64) -> Result<Series> {
    zeta_series(c, point, order + 1)?.revert()
}

/// `t_{a,k}` for `k = 2..=k_max` from `y = Σ t_{a,k+2} ζ_a^k`.
pub fn compute_times(c: &SpectralCurve, point: RamPoint, k_max: usize) -> Result<BTreeMap<usize, SumElem>> {
    if k_max < 3 {
        return Err(Error::NotImplementedCase { g: 0, n: k_max as i64 });
    }
    let order = k_max as i64 - 1;
    let r = inverse_zeta(c, point, order)?;
    let a = c.point(point).clone();
    let ya = lift(&c.y().expand_at(&Center::At(a), order)?);
    let y_of_zeta = ya.compose(&r)?;
    let mut times = BTreeMap::new();
    for k in 0..=(k_max - 2) {
        times.insert(k + 2, y_of_zeta.coeff(k as i64)?);
    }
    if times[&3].is_zero() {
        return Err(Error::DegenerateCurve(format!("t_3 vanishes at {point}")));
    }
    Ok(times)
}

/// Dual times from the log relation `Σ t̂_k v^k = −log(2 Σ t_{2k+3} (2k+1)!!/2^k v^k)`.
pub fn compute_dual_times(times: &BTreeMap<usize, SumElem>, k_hat_max: usize) -> Result<DualTimes> {
    let center = Center::At(SumElem::zero());
    let mut coeffs = Vec::with_capacity(k_hat_max + 1);
    for k in 0..=k_hat_max {
        let t = times.get(&(2 * k + 3)).ok_or(Error::TruncationTooShort {
            requested: (2 * k + 3) as i64,
            truncation: times.keys().max().map_or(0, |m| *m as i64 + 1),
        })?;
        let w = Rational::new(
            double_factorial(2 * k as i64 + 1) * num_bigint::BigInt::from(2),
            num_bigint::BigInt::from(1u64 << k),
        );
        coeffs.push(t.scaled(&w));
    }
    let s0 = coeffs[0].clone();
    let series = Series::new(center, 0, coeffs, k_hat_max as i64 + 1);
    let normalized = series.scale(&s0.inverse()?);
    let log = normalized.log()?;
    let higher = (1..=k_hat_max)
        .map(|k| Ok((k, log.coeff(k as i64)?.negated())))
        .collect::<Result<_>>()?;
    Ok(DualTimes { exp_t0: s0.inverse()?, higher })
}

/// `B_{a,k;a',k'}` for `k, k' ≤ k_max`.
pub fn compute_b_coeffs(
    c: &SpectralCurve,
    p: RamPoint,
    p2: RamPoint,
    k_max: usize,
) -> Result<BTreeMap<(usize, usize), SumElem>> {
    let trunc = 2 * k_max + 1;
    let order = trunc as i64 + 3;
    let r1 = inverse_zeta(c, p, order)?;
    let dr1 = BivariateSeries::from_univariate(&r1.derivative(), true, trunc + 2)?;
    let f = if p != p2 {
        let r2 = inverse_zeta(c, p2, order)?;
        let dr2 = BivariateSeries::from_univariate(&r2.derivative(), false, trunc)?;
        let delta = SumElem::rational(c.point(p) - c.point(p2));
        let den = BivariateSeries::constant(delta, trunc)
            .add(&BivariateSeries::from_univariate(&r1, true, trunc)?)
            .sub(&BivariateSeries::from_univariate(&r2, false, trunc)?);
        dr1.mul(&dr2).mul(&den.mul(&den).inv()?)
    } else {
        // (r(ζ) − r(ζ'))/(ζ − ζ') = Σ r_{i+j+1} ζ^i ζ'^j
        let big = trunc + 2;
        let mut q = BivariateSeries::zero(big);
        for i in 0..big {
            for j in 0..big - i {
                let coef = r1.coeff((i + j + 1) as i64)?;
                q = q.add(&monomial2(coef, i, j, big));
            }
        }
        let dr2 = BivariateSeries::from_univariate(&r1.derivative(), false, big)?;
        let g = dr1
            .mul(&dr2)
            .mul(&q.mul(&q).inv()?)
            .sub(&BivariateSeries::constant(SumElem::one(), big));
        g.divide_by_difference()?.divide_by_difference()?
    };
    let mut out = BTreeMap::new();
    for k in 0..=k_max {
        for k2 in 0..=k_max {
            out.insert((k, k2), f.coeff(k, k2)?);
        }
    }
    Ok(out)
}

fn monomial2(c: SumElem, i: usize, j: usize, trunc: usize) -> BivariateSeries<SumElem> {
    // x^i y^j built from univariate embeddings
    let center = Center::At(SumElem::zero());
    let xi = Series::monomial(center.clone(), c, i as i64, trunc as i64);
    let yj = Series::monomial(center, SumElem::one(), j as i64, trunc as i64);
    BivariateSeries::from_univariate(&xi, true, trunc)
        .expect("power series")
        .mul(&BivariateSeries::from_univariate(&yj, false, trunc).expect("power series"))
}

/// `B̂_{a,k;a',k'} = ½ B_{a,2k;a',2k'} (2k−1)!!(2k'−1)!!/2^{k+k'}` wherever the
/// even-even coefficient is present.
pub fn compute_dual_b(b: &BTreeMap<BIndex, SumElem>) -> BTreeMap<BIndex, SumElem> {
    let mut out = BTreeMap::new();
    for (&(p, k, p2, k2), v) in b {
        if k % 2 != 0 || k2 % 2 != 0 {
            continue;
        }
        let (h, h2) = (k / 2, k2 / 2);
        let num = double_factorial(2 * h as i64 - 1) * double_factorial(2 * h2 as i64 - 1);
        let den = num_bigint::BigInt::from(2u64 << (h + h2));
        out.insert((p, h, p2, h2), v.scaled(&Rational::new(num, den)));
    }
    out
}

/// `dξ_{a,d} = −((2d−1)!!/2^d) Res_{z'→a} B(z', z) ζ_a(z')^{−2d−1}`.
pub fn compute_dxi(c: &SpectralCurve, point: RamPoint, d_max: usize) -> Result<Vec<PoleForm>> {
    let zeta = zeta_series(c, point, 2 * d_max as i64 + 4)?;
    let mut out = Vec::with_capacity(d_max + 1);
    for d in 0..=d_max {
        let p = zeta.powi(-(2 * d as i64 + 1))?;
        let w = -Rational::new(double_factorial(2 * d as i64 - 1), num_bigint::BigInt::from(1u64 << d));
        let mut form = PoleForm::default();
        // 1/(z − z')² = Σ_j (j+1)(z'−a)^j/(z−a)^{j+2}
        for j in 0..=(2 * d) {
            let coef = p.coeff(-(j as i64) - 1)?.scaled(&(&w * int(j as i64 + 1)));
            form.add_term(PoleFactor::new(point, j as u32 + 2), coef);
        }
        out.push(form);
    }
    Ok(out)
}

/// `𝔷_{a,k,l}` for `k ≤ k_max`, `l ≤ l_max`.
pub fn compute_zz(
    c: &SpectralCurve,
    point: RamPoint,
    k_max: usize,
    l_max: usize,
) -> Result<BTreeMap<(usize, usize), SumElem>> {
    let zeta = zeta_series(c, point, (l_max as i64 + 1).max(2))?;
    let mut out = BTreeMap::new();
    let mut power = Series::constant(zeta.center().clone(), SumElem::one(), l_max as i64 + 1);
    for k in 0..=k_max {
        for l in k..=l_max {
            out.insert((k, l), power.coeff(l as i64)?);
        }
        power = power.mul(&zeta);
    }
    Ok(out)
}

pub fn compute_moduli(c: &SpectralCurve, opts: &ModuliOptions) -> Result<[ModuliData; 2]> {
    let mut b_all = BTreeMap::new();
    for p in RamPoint::ALL {
        for p2 in RamPoint::ALL {
            for ((k, k2), v) in compute_b_coeffs(c, p, p2, opts.b_k_max)? {
                b_all.insert((p, k, p2, k2), v);
            }
        }
    }
    let dual_all = compute_dual_b(&b_all);
    let build = |p: RamPoint| -> Result<ModuliData> {
        let times = compute_times(c, p, opts.times_k_max)?;
        let dual_times = compute_dual_times(&times, opts.dual_k_max)?;
        let zeta = zeta_series(c, p, 2)?;
        Ok(ModuliData {
            point: p,
            zeta_lead: zeta.coeff(1)?,
            dual_times,
            times,
            b_coeffs: b_all.iter().filter(|(k, _)| k.0 == p).map(|(k, v)| (*k, v.clone())).collect(),
            dual_b: dual_all.iter().filter(|(k, _)| k.0 == p).map(|(k, v)| (*k, v.clone())).collect(),
            dxi: compute_dxi(c, p, opts.dxi_d_max)?,
            zz: compute_zz(c, p, opts.times_k_max - 2, opts.zz_l_max)?,
        })
    };
    Ok([build(RamPoint::Plus)?, build(RamPoint::Minus)?])
}

/// Expansion of `dξ_{a,d}` in `ζ_{a'}` as the coefficient of `dζ_{a'}`,
/// exact below `order`.
pub fn dxi_in_zeta(
    c: &SpectralCurve,
    form: &PoleForm,
    at: RamPoint,
    order: i64,
) -> Result<Series> {
    let depth = form.pole_order(at) as i64;
    let r = inverse_zeta(c, at, order + 2 * depth + 2)?;
    let f = form.expand(c, at, order + 2 * depth + 2)?;
    let f = f.with_center(r.center().clone());
    Ok(f.compose(&r)?.mul(&r.derivative()))
}

/// The expected local law
/// `−[δ (2d+1)!!/2^d ζ^{−2d−2} + ((2d−1)!!/2^d) Σ_k B_{a,2d;a',k} ζ^k] dζ`.
pub fn dxi_local_law(data: &ModuliData, d: usize, at: RamPoint, k_max: usize) -> Result<Series> {
    let center = Center::At(SumElem::zero());
    let trunc = k_max as i64 + 1;
    let w = Rational::new(double_factorial(2 * d as i64 - 1), num_bigint::BigInt::from(1u64 << d));
    let mut out = Series::zero(center.clone(), trunc);
    for k in 0..=k_max {
        let b = data.b_coeffs.get(&(data.point, 2 * d, at, k)).ok_or(Error::TruncationTooShort {
            requested: k as i64,
            truncation: k as i64,
        })?;
        out = out.add(&Series::monomial(center.clone(), b.scaled(&-w.clone()), k as i64, trunc));
    }
    if at == data.point {
        let s = Rational::new(double_factorial(2 * d as i64 + 1), num_bigint::BigInt::from(1u64 << d));
        out = out.add(&Series::monomial(center, SumElem::rational(-s), -(2 * d as i64) - 2, trunc));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_lsz_curve, CurveParams};
    use crate::field::rat;
    use crate::series::Center;

    fn curves() -> Vec<SpectralCurve> {
        [
            CurveParams::reference(),
            CurveParams::from_ints(5, 1, 2, 1),
            CurveParams::new(int(7), rat(1, 2), int(3), int(2)),
        ]
        .into_iter()
        .map(|p| build_lsz_curve(p).unwrap())
        .collect()
    }

    fn q(x: Rational) -> SumElem {
        SumElem::rational(x)
    }

    #[test]
    fn zeta_leading_coefficients() {
        let c = build_lsz_curve(CurveParams::reference()).unwrap();
        let zp = zeta_series(&c, RamPoint::Plus, 6).unwrap();
        assert_eq!(zp.coeff(1).unwrap(), SumElem::one());
        let zm = zeta_series(&c, RamPoint::Minus, 6).unwrap();
        assert_eq!(zm.coeff(1).unwrap(), SumElem::i());
        for p in RamPoint::ALL {
            let z = zeta_series(&c, p, 8).unwrap();
            let a = c.point(p).clone();
            let direct = c.x().expand_at(&Center::At(a.clone()), 9).unwrap();
            let sq = z.mul(&z);
            for k in 0..8 {
                let mut expect = q(direct.coeff(k).unwrap());
                if k == 0 {
                    expect = &expect - &q(c.x().eval(&a).unwrap());
                }
                assert_eq!(sq.coeff(k).unwrap(), expect);
            }
        }
    }

    #[test]
    fn reference_spot_values() {
        let c = build_lsz_curve(CurveParams::reference()).unwrap();
        let [plus, minus] = compute_moduli(&c, &ModuliOptions::default()).unwrap();
        assert_eq!(plus.time(3), &q(rat(-3, 4)));
        assert_eq!(plus.b(0, RamPoint::Plus, 0), &q(rat(-1, 8)));
        // 2/(Δ² √x₊ √x₋) with √x₋ = i√2
        let expected = SumElem::gaussian(crate::field::Gaussian::new(int(0), rat(-1, 4)));
        assert_eq!(plus.b(0, RamPoint::Minus, 0), &expected);
        assert_eq!(plus.dual_b(0, RamPoint::Minus, 0), &expected.scale(&rat(1, 2)));
        assert_eq!(minus.b(0, RamPoint::Plus, 0), &expected);
        assert_eq!(plus.dual_b(0, RamPoint::Plus, 0), &q(rat(-1, 16)));
    }

    #[test]
    fn b_coefficients_are_symmetric() {
        for c in curves() {
            let [plus, minus] = compute_moduli(&c, &ModuliOptions::default()).unwrap();
            let all: BTreeMap<_, _> = plus.b_coeffs.iter().chain(minus.b_coeffs.iter()).map(|(k, v)| (*k, v.clone())).collect();
            for (&(p, k, p2, k2), v) in &all {
                assert_eq!(&all[&(p2, k2, p, k)], v, "{p} {k} {p2} {k2}");
            }
        }
    }

    #[test]
    fn dual_b_uses_even_indices() {
        let c = curves().remove(1);
        let [plus, _] = compute_moduli(&c, &ModuliOptions::default()).unwrap();
        let b22 = plus.b(2, RamPoint::Plus, 2);
        assert_eq!(plus.dual_b(1, RamPoint::Plus, 1), &b22.scale(&rat(1, 8)));
        assert_eq!(plus.dual_b(0, RamPoint::Plus, 0), &plus.b(0, RamPoint::Plus, 0).scale(&rat(1, 2)));
        assert_eq!(plus.dual_b.len(), 2 * 9);
    }

    #[test]
    fn dual_time_relations() {
        for c in curves() {
            for data in compute_moduli(&c, &ModuliOptions::default()).unwrap() {
                let t = |k: usize| data.time(k).clone();
                let inv3 = t(3).inv().unwrap();
                assert_eq!(data.dual_times.exp_t0, (&t(3) * &q(int(2))).inv().unwrap());
                let t1 = (&t(5) * &inv3).scale(&rat(-3, 2));
                assert_eq!(data.dual_times.get(1).unwrap(), &t1);
                let t2 = &(&(&t(5) * &t(5)) * &(&inv3 * &inv3)).scale(&rat(9, 8))
                    - &(&t(7) * &inv3).scale(&rat(15, 4));
                assert_eq!(data.dual_times.get(2).unwrap(), &t2);
            }
        }
    }

    #[test]
    fn dxi_shape() {
        for c in curves() {
            for data in compute_moduli(&c, &ModuliOptions::default()).unwrap() {
                for d in 0..=1 {
                    let f = data.dxi(d);
                    assert_eq!(f.pole_order(data.point), 2 * d as u32 + 2);
                    assert_eq!(f.pole_order(data.point.other()), 0);
                    assert!(f.coefficient(data.point, 1).is_zero());
                }
                // leading term −(1/c) dz/(z−a)²
                let lead = data.zeta_lead.inv().unwrap();
                assert_eq!(data.dxi(0).coefficient(data.point, 2), -lead);
            }
        }
    }

    #[test]
    fn dxi_reference_list() {
        let c = build_lsz_curve(CurveParams::reference()).unwrap();
        let [plus, _] = compute_moduli(&c, &ModuliOptions::default()).unwrap();
        // ζ = t − t²/2 + 3t³/8 + …, so ζ^{-1} = t^{-1} + 1/2 + …
        let f0 = plus.dxi(0);
        assert_eq!(f0.terms.len(), 1);
        assert_eq!(f0.coefficient(RamPoint::Plus, 2), q(int(-1)));
        let f1 = plus.dxi(1);
        assert_eq!(f1.coefficient(RamPoint::Plus, 4), q(rat(-3, 2)));
    }

    #[test]
    fn dxi_local_expansion_law() {
        for c in curves() {
            let data = compute_moduli(&c, &ModuliOptions::default()).unwrap();
            for a in &data {
                for d in 0..=1 {
                    for at in RamPoint::ALL {
                        let got = dxi_in_zeta(&c, a.dxi(d), at, 5).unwrap();
                        let law = dxi_local_law(a, d, at, 4).unwrap();
                        for k in -(2 * d as i64 + 2)..=4 {
                            assert_eq!(got.coeff(k).unwrap(), law.coeff(k).unwrap(), "d={d} at={at} k={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zz_resums_to_taylor_expansion() {
        for c in curves() {
            for data in compute_moduli(&c, &ModuliOptions::default()).unwrap() {
                let a = c.point(data.point).clone();
                let direct = c.y().expand_at(&Center::At(a), 8).unwrap();
                for l in 0..=7usize {
                    let mut acc = SumElem::zero();
                    for k in 0..=l.min(7) {
                        acc = &acc + &(data.time(k + 2) * &data.zz[&(k, l)]);
                    }
                    assert_eq!(acc, q(direct.coeff(l as i64).unwrap()), "l = {l}");
                }
            }
        }
    }

    #[test]
    fn sqrt_x0_squares_to_x0() {
        for c in curves() {
            for data in compute_moduli(&c, &ModuliOptions::default()).unwrap() {
                let x0 = c.local_moduli(data.point, 0).unwrap().x_n[0].clone();
                let s = data.sqrt_x0();
                assert_eq!(&s * &s, q(x0));
            }
        }
    }
}
