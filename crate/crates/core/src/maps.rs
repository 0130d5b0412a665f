//! Bipartite map generating numbers `T^{(g)}_{2l_1,…,2l_n}` extracted from
//! the correlators at `z → ∞`, by two independent routes.
//!
//! The residue route expands `x^l` and each pole factor in `w = 1/z`. The
//! expansion route reverts `u = 1/x(z)` and reads off coefficients in `u`.

pub mod wick;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curve::{RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{Rational, SumElem};
use crate::scalar::Scalar;
use crate::series::{BivariateSeries, Center, LaurentSeries, RationalFunction};
use crate::toprec::{stable_omega, Correlator};

pub use wick::{calibrate_dictionary, gaussian_expectation, wick_moments, CalibrationReport, Letter, NPoly, WickExpansion};

type Series = LaurentSeries<Rational>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapCount {
    pub g: u32,
    /// Boundary lengths `2l_i`.
    pub boundary: Vec<u32>,
    pub value: SumElem,
}

impl MapCount {
    pub fn half_lengths(&self) -> Vec<u32> {
        self.boundary.iter().map(|b| b / 2).collect()
    }
}

fn check_lengths(lengths: &[u32]) -> Result<()> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::Parse(format!("boundary half-lengths must be positive: {lengths:?}")));
    }
    Ok(())
}

/// `[z^{-1}]` of the expansion at infinity, i.e. `−Res_{z=∞} f dz`.
fn minus_residue_at_infinity(f: &Series) -> Result<Rational> {
    f.coeff(1)
}

fn x_power_at_infinity(c: &SpectralCurve, l: u32, extra: i64) -> Result<Series> {
    c.x().expand_at(&Center::Infinity, l as i64 + extra + 3)?.powi(l as i64)
}

fn pole_factor(a: &Rational, k: u32) -> Result<RationalFunction<Rational>> {
    let mut den = vec![Rational::one()];
    for _ in 0..k {
        let mut next = vec![Rational::zero(); den.len() + 1];
        for (i, c) in den.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * a;
        }
        den = next;
    }
    RationalFunction::new(vec![Rational::one()], den)
}

/// `Res`-route value of `T^{(g)}` for a stable correlator.
pub fn residue_route_stable(c: &SpectralCurve, w: &Correlator, lengths: &[u32]) -> Result<SumElem> {
    check_lengths(lengths)?;
    let mut cache: BTreeMap<(u32, RamPoint, u32), Rational> = BTreeMap::new();
    let mut total = SumElem::zero();
    for (mono, coef) in w.terms() {
        let mut prod = coef.clone();
        for (f, &l) in mono.iter().zip(lengths) {
            let key = (l, f.point, f.order);
            let r = match cache.get(&key) {
                Some(r) => r.clone(),
                None => {
                    let xl = x_power_at_infinity(c, l, f.order as i64)?;
                    let p = pole_factor(c.point(f.point), f.order)?
                        .expand_at(&Center::Infinity, l as i64 + f.order as i64 + 3)?;
                    let r = minus_residue_at_infinity(&xl.mul(&p))?;
                    cache.insert(key, r.clone());
                    r
                }
            };
            prod = prod.scale(&r);
        }
        total = &total + &prod;
    }
    Ok(total)
}

/// `z` as a series in `u = 1/x`, together with `w = 1/z` in `u`.
struct Reverted {
    w: Series,
    z: Series,
    dz: Series,
}

fn reverted(c: &SpectralCurve, order: i64) -> Result<Reverted> {
    let origin = Center::At(Rational::zero());
    let x_inf = c.x().expand_at(&Center::Infinity, order + 2)?;
    let u_of_w = x_inf.inv()?.with_center(origin.clone());
    let w = u_of_w.revert()?;
    let z = w.inv()?;
    let dz = z.derivative();
    Ok(Reverted { w, z, dz })
}

/// Expansion-route value of `T^{(g)}` for a stable correlator.
pub fn expansion_route_stable(c: &SpectralCurve, w: &Correlator, lengths: &[u32]) -> Result<SumElem> {
    check_lengths(lengths)?;
    let max_l = *lengths.iter().max().expect("nonempty") as i64;
    let max_k = (0..lengths.len()).map(|i| w.max_order(i)).max().unwrap_or(0) as i64;
    let r = reverted(c, max_l + max_k + 4)?;
    let mut cache: BTreeMap<(u32, RamPoint, u32), Rational> = BTreeMap::new();
    let mut total = SumElem::zero();
    for (mono, coef) in w.terms() {
        let mut prod = coef.clone();
        for (f, &l) in mono.iter().zip(lengths) {
            let key = (l, f.point, f.order);
            let v = match cache.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let p = pole_factor(c.point(f.point), f.order)?
                        .expand_at(&Center::Infinity, l as i64 + f.order as i64 + 3)?
                        .with_center(Center::At(Rational::zero()));
                    let s = p.compose(&r.w)?.mul(&r.dz);
                    let v = -s.coeff(l as i64 - 1)?;
                    cache.insert(key, v.clone());
                    v
                }
            };
            prod = prod.scale(&v);
        }
        total = &total + &prod;
    }
    Ok(total)
}

/// `T^{(0)}_{2l} = −Res x^l y dx`.
pub fn residue_route_01(c: &SpectralCurve, l: u32) -> Result<Rational> {
    check_lengths(&[l])?;
    let order = l as i64 + 4;
    let xl = x_power_at_infinity(c, l, 2)?;
    let y = c.y().expand_at(&Center::Infinity, order)?;
    let dx = c.x().derivative()?.expand_at(&Center::Infinity, order)?;
    minus_residue_at_infinity(&xl.mul(&y).mul(&dx))
}

/// `T^{(0)}_{2l} = [u^{l+1}] y(z(u))`.
pub fn expansion_route_01(c: &SpectralCurve, l: u32) -> Result<Rational> {
    check_lengths(&[l])?;
    let r = reverted(c, l as i64 + 4)?;
    let y = c.y().expand_at(&Center::Infinity, l as i64 + 4)?.with_center(Center::At(Rational::zero()));
    y.compose(&r.w)?.coeff(l as i64 + 1)
}

/// `T^{(0)}_{2l_1,2l_2}` from `B` by iterated residues, `z₂` outermost.
pub fn residue_route_02(c: &SpectralCurve, l1: u32, l2: u32) -> Result<Rational> {
    check_lengths(&[l1, l2])?;
    let x1 = x_power_at_infinity(c, l1, l2 as i64 + 2)?;
    let x2 = x_power_at_infinity(c, l2, 0)?;
    let mut total = Rational::zero();
    for m in 0..l2 as i64 {
        total += Rational::from_integer((m + 1).into()) * x2.coeff(-m - 1)? * x1.coeff(m + 1)?;
    }
    Ok(total)
}

/// `T^{(0)}_{2l_1,2l_2} = [u₁^{l₁−1} u₂^{l₂−1}] (B − dx₁dx₂/(x₁−x₂)²)/(du₁du₂)`.
pub fn expansion_route_02(c: &SpectralCurve, l1: u32, l2: u32) -> Result<Rational> {
    check_lengths(&[l1, l2])?;
    let trunc = (l1 + l2 + 4) as usize;
    let r = reverted(c, trunc as i64 + 2)?;
    let u = Series::variable(Center::At(Rational::zero()), trunc as i64 + 2);
    // q = u z(u) and h = u² z'(u) are power series with q(0) = 1, h(0) = −1
    let q = u.mul(&r.z);
    let h = u.mul(&u).mul(&r.dz);
    let biv = |s: &Series, first: bool| BivariateSeries::from_univariate(s, first, trunc);
    let (q1, q2) = (biv(&q, true)?, biv(&q, false)?);
    let (h1, h2) = (biv(&h, true)?, biv(&h, false)?);
    let (u1, u2) = (biv(&u, true)?, biv(&u, false)?);
    // z₁ − z₂ = (q₁u₂ − q₂u₁)/(u₁u₂), and q₁u₂ − q₂u₁ = −(u₁ − u₂)·R
    let numer = q1.mul(&u2).sub(&q2.mul(&u1));
    let rr = numer.divide_by_difference()?.scale(&Rational::from_integer((-1).into()));
    let ratio = h1.mul(&h2).mul(&rr.mul(&rr).inv()?);
    let g = ratio.sub(&BivariateSeries::constant(Rational::one(), ratio.trunc()));
    let f = g.divide_by_difference()?.divide_by_difference()?;
    f.coeff(l1 as usize - 1, l2 as usize - 1)
}

/// Both routes for one `(g, lengths)`; fails if they disagree.
pub fn map_counts(c: &SpectralCurve, g: u32, lengths: &[u32]) -> Result<MapCount> {
    check_lengths(lengths)?;
    let n = lengths.len() as u32;
    let (a, b) = match (g, n) {
        (0, 1) => (
            SumElem::rational(residue_route_01(c, lengths[0])?),
            SumElem::rational(expansion_route_01(c, lengths[0])?),
        ),
        (0, 2) => (
            SumElem::rational(residue_route_02(c, lengths[0], lengths[1])?),
            SumElem::rational(expansion_route_02(c, lengths[0], lengths[1])?),
        ),
        _ => {
            let w = stable_omega(c, g, n)?;
            (residue_route_stable(c, &w, lengths)?, expansion_route_stable(c, &w, lengths)?)
        }
    };
    if a != b {
        return Err(Error::TableMismatch {
            table: "maps".into(),
            index: format!("g={g} l={lengths:?}"),
            series: a.to_string(),
            closed: b.to_string(),
        });
    }
    Ok(MapCount { g, boundary: lengths.iter().map(|l| 2 * l).collect(), value: a })
}

/// All tuples of positive half-lengths with sum at most `max_total`, sorted
/// non-decreasingly.
pub fn length_tuples(max_total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, min: u32, left: u32, out: &mut Vec<Vec<u32>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        for l in min..=left {
            prefix.push(l);
            rec(prefix, l, left - l, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max_total, &mut out);
    out
}

/// `(g, lengths)` pairs with `g ≤ g_max`, `Σ l_i ≤ max_total`.
pub fn map_count_table(c: &SpectralCurve, g_max: u32, max_total: u32) -> Result<Vec<MapCount>> {
    let mut out = Vec::new();
    for g in 0..=g_max {
        for ls in length_tuples(max_total) {
            out.push(map_counts(c, g, &ls)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_lsz_curve, CurveParams};
    use crate::field::{int, rat};

    fn reference() -> SpectralCurve {
        build_lsz_curve(CurveParams::reference()).unwrap()
    }

    #[test]
    fn tuples() {
        let t = length_tuples(3);
        assert_eq!(t, vec![vec![1], vec![1, 1], vec![1, 1, 1], vec![1, 2], vec![2], vec![3]]);
    }

    #[test]
    fn catalan_at_zero_coupling() {
        // γ_x = 0, ε̃ = 0: y = −z, x = z + γ²/z, so −y = Σ Cat_{m−1} γ^{2m} x^{1−2m}
        let c = build_lsz_curve(CurveParams::new(int(3), int(0), int(0), rat(1, 2))).unwrap();
        let cat = [1, 1, 2, 5];
        for l in 1..=6u32 {
            let v = residue_route_01(&c, l).unwrap();
            let expected = if l % 2 == 0 {
                let m = (l + 2) / 2;
                rat(cat[m as usize - 1], 1) * rat(1, 4).pow(m as i32)
            } else {
                int(0)
            };
            assert_eq!(v, expected, "l = {l}");
            assert_eq!(expansion_route_01(&c, l).unwrap(), v);
        }
    }

    #[test]
    fn disk_routes_agree() {
        let c = build_lsz_curve(CurveParams::new(int(5), rat(1, 3), int(2), int(1))).unwrap();
        for l in 1..=4 {
            assert_eq!(residue_route_01(&c, l).unwrap(), expansion_route_01(&c, l).unwrap());
        }
    }

    #[test]
    fn cylinder_routes_agree_and_are_symmetric() {
        for c in [reference(), build_lsz_curve(CurveParams::new(int(5), rat(1, 3), int(2), int(1))).unwrap()] {
            for l1 in 1..=4 {
                for l2 in 1..=4 {
                    let a = residue_route_02(&c, l1, l2).unwrap();
                    assert_eq!(a, expansion_route_02(&c, l1, l2).unwrap(), "({l1},{l2})");
                    assert_eq!(a, residue_route_02(&c, l2, l1).unwrap());
                }
            }
        }
    }

    #[test]
    fn cylinder_reference_value() {
        // x = z + 1/z: T_{2,2} = Σ_m (m+1)[z^{m+1}]x [z^{-m-1}]x = 1
        assert_eq!(residue_route_02(&reference(), 1, 1).unwrap(), int(1));
    }

    #[test]
    fn stable_routes_agree() {
        let c = reference();
        for (g, ls) in [(0, vec![1, 1, 1]), (0, vec![1, 2, 1]), (1, vec![1]), (1, vec![3]), (1, vec![2, 1])] {
            map_counts(&c, g, &ls).unwrap();
        }
    }

    #[test]
    fn permuted_lengths_give_same_value() {
        let c = reference();
        let a = map_counts(&c, 0, &[1, 2, 1]).unwrap().value;
        let b = map_counts(&c, 0, &[2, 1, 1]).unwrap().value;
        assert_eq!(a, b);
        let a = map_counts(&c, 0, &[1, 3]).unwrap().value;
        let b = map_counts(&c, 0, &[3, 1]).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_length() {
        assert!(map_counts(&reference(), 0, &[0]).is_err());
    }
}
