//! Gaussian expectations in the complex matrix model with action
//! `N tr(e ΦΦ† + ẽ Φ†Φ + (λ/2) Φ†ΦΦ†Φ)`, scalar `e`, `ẽ`, by exhaustive
//! enumeration of `Φ ↔ Φ†` pairings.
//!
//! The propagator is `⟨Φ_{ij} Φ†_{kl}⟩ = δ_{il} δ_{jk} / (N(e + ẽ))`; each
//! closed index loop gives a factor `N`.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::residue_route_01;
use crate::curve::{build_lsz_curve, CurveParams, SpectralCurve};
use crate::error::{Error, Result};
use crate::curve::rational_string;
use crate::field::{factorial, fraction_string, int, rat, Rational};

/// Largest number of letters enumerated.
pub const MAX_LETTERS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Letter {
    Phi,
    PhiDag,
}

/// Laurent polynomial in `N`: power ↦ coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NPoly(pub BTreeMap<i64, Rational>);

impl NPoly {
    pub fn coeff(&self, k: i64) -> Rational {
        self.0.get(&k).cloned().unwrap_or_else(|| int(0))
    }

    pub fn add_term(&mut self, k: i64, c: &Rational) {
        let slot = self.0.entry(k).or_insert_with(|| int(0));
        *slot += c;
        if *slot == int(0) {
            self.0.remove(&k);
        }
    }

    pub fn add(&self, rhs: &NPoly) -> NPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.0 {
            out.add_term(*k, c);
        }
        out
    }

    pub fn mul(&self, rhs: &NPoly) -> NPoly {
        let mut out = NPoly::default();
        for (k1, c1) in &self.0 {
            for (k2, c2) in &rhs.0 {
                out.add_term(k1 + k2, &(c1 * c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational, shift: i64) -> NPoly {
        let mut out = NPoly::default();
        for (k, x) in &self.0 {
            out.add_term(k + shift, &(x * c));
        }
        out
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.0.keys().copied().collect()
    }
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().rev().map(|(k, c)| format!("({c}) N^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for NPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, c) in &self.0 {
            m.serialize_entry(&k.to_string(), &fraction_string(c))?;
        }
        m.end()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Per-pairing data: number of index loops and whether the traces are linked.
struct Pairing {
    loops: usize,
    connected: bool,
}

fn for_each_pairing(traces: &[Vec<Letter>], mut f: impl FnMut(Pairing)) -> Result<usize> {
    let letters: usize = traces.iter().map(Vec::len).sum();
    if letters > MAX_LETTERS {
        return Err(Error::TooLarge(letters));
    }
    // letter → (trace, row slot, column slot)
    let mut phis = Vec::new();
    let mut daggers = Vec::new();
    let mut slot = 0;
    for (t, tr) in traces.iter().enumerate() {
        let m = tr.len();
        for (j, l) in tr.iter().enumerate() {
            let entry = (t, slot + j, slot + (j + 1) % m);
            match l {
                Letter::Phi => phis.push(entry),
                Letter::PhiDag => daggers.push(entry),
            }
        }
        slot += m;
    }
    if phis.len() != daggers.len() {
        return Ok(0);
    }
    let k = phis.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut count = 0;
    // Heap's algorithm over Φ† assignments
    let mut c = vec![0usize; k];
    let mut visit = |perm: &[usize]| {
        let mut idx = UnionFind::new(slot);
        let mut tr = UnionFind::new(traces.len());
        for (i, &j) in perm.iter().enumerate() {
            let (t1, r1, c1) = phis[i];
            let (t2, r2, c2) = daggers[j];
            idx.union(r1, c2);
            idx.union(c1, r2);
            tr.union(t1, t2);
        }
        f(Pairing { loops: idx.components(), connected: tr.components() == 1 });
    };
    visit(&perm);
    count += 1;
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(count)
}

fn propagator_weight(pairs: usize, loops: usize, mass: &Rational) -> (i64, Rational) {
    (loops as i64 - pairs as i64, mass.pow(-(pairs as i32)))
}

/// `E[Π tr(w_i)]` in the Gaussian measure, `mass = e + ẽ`.
pub fn gaussian_expectation(traces: &[Vec<Letter>], mass: &Rational) -> Result<NPoly> {
    let pairs = traces.iter().flatten().filter(|l| **l == Letter::Phi).count();
    let mut out = NPoly::default();
    for_each_pairing(traces, |p| {
        let (k, w) = propagator_weight(pairs, p.loops, mass);
        out.add_term(k, &w);
    })?;
    Ok(out)
}

fn connected_expectation(traces: &[Vec<Letter>], mass: &Rational) -> Result<(NPoly, usize)> {
    let pairs = traces.iter().flatten().filter(|l| **l == Letter::Phi).count();
    let mut out = NPoly::default();
    let count = for_each_pairing(traces, |p| {
        if p.connected {
            let (k, w) = propagator_weight(pairs, p.loops, mass);
            out.add_term(k, &w);
        }
    })?;
    Ok((out, count))
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in set_partitions(n - 1) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(n - 1);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

/// Joint cumulant of the listed traces from moment–cumulant inversion.
fn joint_cumulant(traces: &[Vec<Letter>], mass: &Rational) -> Result<NPoly> {
    let mut out = NPoly::default();
    for part in set_partitions(traces.len()) {
        let b = part.len();
        let sign = if b % 2 == 1 { 1 } else { -1 };
        let coef = Rational::from_integer(factorial(b as u64 - 1)) * int(sign);
        let mut prod = NPoly::default();
        prod.add_term(0, &int(1));
        for block in &part {
            let sub: Vec<Vec<Letter>> = block.iter().map(|&i| traces[i].clone()).collect();
            prod = prod.mul(&gaussian_expectation(&sub, mass)?);
        }
        out = out.add(&prod.scale(&coef, 0));
    }
    Ok(out)
}

fn power_trace(l: u32) -> Vec<Letter> {
    (0..l).flat_map(|_| [Letter::Phi, Letter::PhiDag]).collect()
}

fn vertex() -> Vec<Letter> {
    vec![Letter::PhiDag, Letter::Phi, Letter::PhiDag, Letter::Phi]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WickExpansion {
    pub order: u32,
    /// Powers `l_i` of the observable `Π tr((ΦΦ†)^{l_i})`.
    pub word: Vec<u32>,
    pub pairings: usize,
    /// `λ^order` coefficient of `E[O e^{−S_int}]`, unnormalized.
    pub full: NPoly,
    /// Same coefficient restricted to pairings linking all traces.
    pub connected: NPoly,
    /// Same coefficient from joint cumulants of the traces.
    pub cumulant: NPoly,
}

/// The `λ^order` coefficient of `⟨Π tr((ΦΦ†)^{l_i})⟩` with `e`, `ẽ` scalar.
pub fn wick_moments(e: &Rational, e_tilde: &Rational, order_lambda: u32, word: &[u32]) -> Result<WickExpansion> {
    let mass = e + e_tilde;
    if mass == int(0) {
        return Err(Error::DivisionByZero);
    }
    let mut traces: Vec<Vec<Letter>> = word.iter().map(|&l| power_trace(l)).collect();
    for _ in 0..order_lambda {
        traces.push(vertex());
    }
    let letters: usize = traces.iter().map(Vec::len).sum();
    if letters > MAX_LETTERS {
        return Err(Error::TooLarge(letters));
    }
    // (−Nλ/2)^k / k!
    let k = order_lambda as i64;
    let pre = rat(-1, 2).pow(k as i32) / Rational::from_integer(factorial(k as u64));
    let full = gaussian_expectation(&traces, &mass)?.scale(&pre, k);
    let (connected, pairings) = connected_expectation(&traces, &mass)?;
    let cumulant = joint_cumulant(&traces, &mass)?.scale(&pre, k);
    Ok(WickExpansion { order: order_lambda, word: word.to_vec(), pairings, full, connected: connected.scale(&pre, k), cumulant })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub k: u32,
    #[serde(with = "rational_string")]
    pub wick: Rational,
    #[serde(with = "rational_string")]
    pub tr: Rational,
    #[serde(with = "rational_string")]
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    #[serde(with = "rational_string")]
    pub e: Rational,
    #[serde(with = "rational_string")]
    pub e_tilde: Rational,
    #[serde(with = "rational_string")]
    pub lambda: Rational,
    /// Fitted normalization `ν` with `[N¹]⟨tr(ΦΦ†)^k⟩ = ν·T^{(0)}_{x^{2k}}` at `λ⁰`.
    #[serde(with = "rational_string")]
    pub nu: Rational,
    pub lambda0: Vec<CalibrationRow>,
    /// `λ¹` coefficients, with `γ_x² = −λ` on the curve side.
    pub lambda1: Vec<CalibrationRow>,
    /// Both sides through order `λ` at the given `λ`, for `k = 1`.
    pub at_lambda: CalibrationRow,
}

impl CalibrationReport {
    pub fn lambda1_residual_is_zero(&self) -> bool {
        self.lambda1.iter().all(|r| r.residual == int(0))
    }
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "e = {}, e~ = {}, lambda = {}", self.e, self.e_tilde, self.lambda)?;
        writeln!(f, "nu = {}", self.nu)?;
        for (name, rows) in [("lambda^0", &self.lambda0), ("lambda^1", &self.lambda1)] {
            for r in rows {
                writeln!(f, "{name} k={}: wick {} tr {} residual {}", r.k, r.wick, r.tr, r.residual)?;
            }
        }
        write!(
            f,
            "at lambda, k=1: wick {} tr {} residual {}",
            self.at_lambda.wick, self.at_lambda.tr, self.at_lambda.residual
        )
    }
}

fn planar_one_point(e: &Rational, e_tilde: &Rational, order: u32, k: u32) -> Result<Rational> {
    Ok(wick_moments(e, e_tilde, order, &[k])?.connected.coeff(1))
}

fn with_gamma_x(c: &SpectralCurve, gamma_x: Rational) -> Result<SpectralCurve> {
    let p = c.params();
    build_lsz_curve(CurveParams::new(p.eps.clone(), p.eps_tilde.clone(), gamma_x, p.gamma_y.clone()))
}

/// Fits `ν` from `k = 1` at `λ⁰`, requires `k = 2` to match, then reports the
/// `λ¹` planar residual under `γ_x² = −λ`.
pub fn calibrate_dictionary(c: &SpectralCurve, e: &Rational, e_tilde: &Rational, lambda: &Rational) -> Result<CalibrationReport> {
    let free = with_gamma_x(c, int(0))?;
    let unit = with_gamma_x(c, int(1))?;
    let a = |k: u32| residue_route_01(&free, 2 * k);
    // T is affine in γ_x²: T = A + γ_x² S
    let s = |k: u32| -> Result<Rational> { Ok(residue_route_01(&unit, 2 * k)? - a(k)?) };
    let a1 = a(1)?;
    if a1 == int(0) {
        return Err(Error::CalibrationFailed { tr: a1.to_string(), wick: "nonzero".into() });
    }
    let nu = planar_one_point(e, e_tilde, 0, 1)? / &a1;
    let mut lambda0 = Vec::new();
    for k in 1..=2 {
        let wick = planar_one_point(e, e_tilde, 0, k)?;
        let tr = &nu * a(k)?;
        lambda0.push(CalibrationRow { k, residual: &wick - &tr, wick, tr });
    }
    if lambda0[1].residual != int(0) {
        return Err(Error::CalibrationFailed { tr: lambda0[1].tr.to_string(), wick: lambda0[1].wick.to_string() });
    }
    let mut lambda1 = Vec::new();
    for k in 1..=2 {
        let wick = planar_one_point(e, e_tilde, 1, k)?;
        let tr = -(&nu * s(k)?);
        lambda1.push(CalibrationRow { k, residual: &wick - &tr, wick, tr });
    }
    let wick = &lambda0[0].wick + lambda * &lambda1[0].wick;
    let tr = &nu * (a(1)? - lambda * s(1)?);
    let at_lambda = CalibrationRow { k: 1, residual: &wick - &tr, wick, tr };
    Ok(CalibrationReport {
        e: e.clone(),
        e_tilde: e_tilde.clone(),
        lambda: lambda.clone(),
        nu,
        lambda0,
        lambda1,
        at_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn free_two_point() {
        let w = wick_moments(&int(2), &int(1), 0, &[1]).unwrap();
        assert_eq!(w.full.0, BTreeMap::from([(1, rat(1, 3))]));
        assert_eq!(w.pairings, 1);
    }

    #[test]
    fn free_moments_are_catalan_at_leading_order() {
        for (k, cat) in [(1, 1), (2, 2), (3, 5), (4, 14)] {
            let w = wick_moments(&int(1), &int(0), 0, &[k]).unwrap();
            assert_eq!(w.full.coeff(1), int(cat));
            assert_eq!(w.full.degrees().into_iter().max(), Some(1));
        }
    }

    #[test]
    fn first_order_genus_split() {
        let w = wick_moments(&int(1), &int(1), 1, &[1]).unwrap();
        assert_eq!(w.pairings, 6);
        assert_eq!(w.connected.degrees(), vec![1]);
        let w = wick_moments(&int(1), &int(1), 1, &[2]).unwrap();
        assert_eq!(w.pairings, 24);
        assert_eq!(w.connected.degrees(), vec![-1, 1]);
        assert_eq!(w.connected.coeff(-1), rat(-1, 16));
        assert_eq!(w.connected, w.cumulant);
    }

    #[test]
    fn disconnected_subtraction() {
        let (e, et) = (rat(1, 2), rat(3, 2));
        let mass = &e + &et;
        let w = wick_moments(&e, &et, 1, &[1]).unwrap();
        let o = gaussian_expectation(&[power_trace(1)], &mass).unwrap();
        let v = gaussian_expectation(&[vertex()], &mass).unwrap();
        let sub = w.full.add(&o.mul(&v).scale(&rat(1, 2), 1));
        assert_eq!(sub, w.connected);
    }

    #[test]
    fn unbalanced_words_vanish() {
        let e = gaussian_expectation(&[vec![Letter::Phi, Letter::Phi, Letter::PhiDag]], &int(1)).unwrap();
        assert_eq!(e, NPoly::default());
    }

    #[test]
    fn pairing_counts_are_factorial() {
        for k in 1..=6u32 {
            let mut n = 0;
            for_each_pairing(&[power_trace(k)], |_| n += 1).unwrap();
            assert_eq!(Rational::from_integer(n.into()), Rational::from_integer(factorial(k as u64)));
        }
    }

    #[test]
    fn too_many_letters() {
        assert!(matches!(wick_moments(&int(1), &int(1), 3, &[1]), Err(Error::TooLarge(14))));
    }

    #[test]
    fn second_order_is_consistent() {
        let w = wick_moments(&int(1), &int(2), 2, &[1]).unwrap();
        assert_eq!(w.connected, w.cumulant);
        assert_eq!(w.pairings, 120);
    }

    #[test]
    fn calibration_runs_on_matched_dictionary() {
        // γ_y² (e + ẽ) = 1 and ε̃ = 0 make the λ⁰ check exact
        let c = build_lsz_curve(CurveParams::new(int(3), int(0), int(1), int(1))).unwrap();
        let r = calibrate_dictionary(&c, &rat(1, 2), &rat(1, 2), &rat(1, 10)).unwrap();
        assert_eq!(r.lambda0[0].residual, int(0));
        assert_eq!(r.lambda0[1].residual, int(0));
        assert_eq!(r.lambda1.len(), 2);
    }

    #[test]
    fn calibration_fails_on_mismatched_dictionary() {
        let c = build_lsz_curve(CurveParams::new(int(3), int(0), int(1), int(1))).unwrap();
        assert!(matches!(
            calibrate_dictionary(&c, &int(1), &int(1), &rat(1, 10)),
            Err(Error::CalibrationFailed { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn connected_equals_cumulant(e in 1i64..5, et in 0i64..4, l1 in 1u32..3, l2 in 1u32..3, order in 0u32..2) {
            let w = wick_moments(&int(e), &int(et), order, &[l1, l2]).unwrap();
            prop_assert_eq!(w.connected, w.cumulant);
        }
    }
}
