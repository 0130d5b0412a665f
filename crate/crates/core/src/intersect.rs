//! Intersection numbers on `M̄_{g,n}`, colored boundary strata, and the
//! intersection-number side of the TR expansion for `dim M̄_{g,n} ≤ 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::curve::{RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{double_factorial, int, rat, Rational, SumElem};
use crate::moduli::{compute_moduli, ModuliData, ModuliOptions, PoleForm};
use crate::scalar::Scalar;
use crate::toprec::{stable_omega, Correlator, Monomial, PoleFactor};

/// A product `Π ψ_i^{psi[i]} · Π κ_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassMonomial {
    pub psi: Vec<u32>,
    /// Sorted indices `k` of the `κ_k` factors.
    pub kappa: Vec<u32>,
}

impl ClassMonomial {
    pub fn one(n: usize) -> Self {
        ClassMonomial { psi: vec![0; n], kappa: Vec::new() }
    }

    pub fn psi(n: usize, i: usize) -> Self {
        let mut m = Self::one(n);
        m.psi[i] += 1;
        m
    }

    pub fn kappa1(n: usize) -> Self {
        ClassMonomial { psi: vec![0; n], kappa: vec![1] }
    }

    pub fn degree(&self) -> u32 {
        self.psi.iter().sum::<u32>() + self.kappa.iter().sum::<u32>()
    }
}

impl fmt::Display for ClassMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, e) in self.psi.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("psi{}", i + 1)),
                _ => parts.push(format!("psi{}^{e}", i + 1)),
            }
        }
        for k in &self.kappa {
            parts.push(format!("kappa{k}"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

pub fn dimension(g: u32, n: u32) -> i64 {
    3 * g as i64 - 3 + n as i64
}

fn euler(g: u32, n: u32) -> i64 {
    2 * g as i64 - 2 + n as i64
}

fn stable(g: u32, n: u32) -> bool {
    euler(g, n) > 0
}

pub type TableKey = (u32, u32, ClassMonomial);

/// `⟨X⟩_{g,n}` for the monomials the dimension-one assembly needs.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionTable {
    entries: BTreeMap<TableKey, Rational>,
}

impl Default for IntersectionTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl IntersectionTable {
    pub fn standard() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((0, 3, ClassMonomial::one(3)), int(1));
        for i in 0..4 {
            entries.insert((0, 4, ClassMonomial::psi(4, i)), int(1));
        }
        entries.insert((0, 4, ClassMonomial::kappa1(4)), int(1));
        entries.insert((1, 1, ClassMonomial::psi(1, 0)), rat(1, 24));
        entries.insert((1, 1, ClassMonomial::kappa1(1)), rat(1, 24));
        IntersectionTable { entries }
    }

    pub fn entries(&self) -> &BTreeMap<TableKey, Rational> {
        &self.entries
    }

    pub fn get(&self, g: u32, n: u32, m: &ClassMonomial) -> Result<Rational> {
        if m.psi.len() != n as usize {
            return Err(Error::NotTabulated(format!("<{m}>_{{{g},{n}}}")));
        }
        if !stable(g, n) || m.degree() as i64 != dimension(g, n) {
            return Ok(int(0));
        }
        self.entries
            .get(&(g, n, m.clone()))
            .cloned()
            .ok_or_else(|| Error::NotTabulated(format!("<{m}>_{{{g},{n}}}")))
    }

    pub fn set(&mut self, g: u32, n: u32, m: ClassMonomial, value: Rational) {
        self.entries.insert((g, n, m), value);
    }

    pub fn perturbed(&self, key: &TableKey, by: &Rational) -> Self {
        let mut out = self.clone();
        if let Some(v) = out.entries.get_mut(key) {
            *v += by;
        }
        out
    }
}

pub fn intersection_number(g: u32, n: u32, m: &ClassMonomial) -> Result<Rational> {
    IntersectionTable::standard().get(g, n, m)
}

/// `⟨τ_{d_1} ⋯ τ_{d_n}⟩_g` from the string/dilaton/DVV recursion.
pub fn psi_correlator(g: u32, ds: &[u32]) -> Rational {
    let mut ds: Vec<i64> = ds.iter().map(|&d| d as i64).collect();
    ds.sort_unstable();
    wk(g as i64, ds)
}

fn wk(g: i64, ds: Vec<i64>) -> Rational {
    let n = ds.len() as i64;
    if g < 0 || ds.iter().any(|&d| d < 0) || 2 * g - 2 + n <= 0 {
        return int(0);
    }
    if ds.iter().sum::<i64>() != 3 * g - 3 + n {
        return int(0);
    }
    if g == 0 && ds == [0, 0, 0] {
        return int(1);
    }
    if g == 1 && ds == [1] {
        return rat(1, 24);
    }
    let mut rest = ds;
    let top = rest.pop().expect("nonempty");
    if top == 0 {
        return int(0);
    }
    let k = top - 1;
    let df = |m: i64| Rational::from_integer(double_factorial(m));
    let mut total = int(0);
    for j in 0..rest.len() {
        let dj = rest[j];
        let mut next = rest.clone();
        next[j] = dj + k;
        next.sort_unstable();
        total += df(2 * k + 2 * dj + 1) / df(2 * dj - 1) * wk(g, next);
    }
    for r in 0..k {
        let s = k - 1 - r;
        let w = df(2 * r + 1) * df(2 * s + 1) / int(2);
        let mut inner = rest.clone();
        inner.extend([r, s]);
        inner.sort_unstable();
        let mut acc = wk(g - 1, inner);
        let m = rest.len();
        for mask in 0u32..(1 << m) {
            let (mut left, mut right) = (vec![r], vec![s]);
            for (i, d) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(*d);
                } else {
                    right.push(*d);
                }
            }
            left.sort_unstable();
            right.sort_unstable();
            for g1 in 0..=g {
                acc += wk(g1, left.clone()) * wk(g - g1, right.clone());
            }
        }
        total += w * acc;
    }
    total / df(2 * k + 3)
}

/// `⟨κ_1 ψ^{d}⟩_{g,n}` by pushing forward `ψ_{n+1}^2`.
pub fn kappa1_correlator(g: u32, ds: &[u32]) -> Rational {
    let mut full = ds.to_vec();
    full.push(2);
    psi_correlator(g, &full)
}

/// Recomputes the standard table from the recursion.
pub fn table_from_recursion() -> IntersectionTable {
    let mut out = IntersectionTable { entries: BTreeMap::new() };
    for (g, n, m) in IntersectionTable::standard().entries.keys() {
        let value = if m.kappa.is_empty() {
            psi_correlator(*g, &m.psi)
        } else {
            kappa1_correlator(*g, &m.psi)
        };
        out.set(*g, *n, m.clone(), value);
    }
    out
}

/// A point on a stratum component: marked point `i`, or one branch of node `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slot {
    Marked(usize),
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumComponent {
    pub genus: u32,
    pub slots: Vec<Slot>,
    /// 0-based color.
    pub color: usize,
}

impl StratumComponent {
    pub fn marked(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().filter_map(|s| match s {
            Slot::Marked(i) => Some(*i),
            Slot::Node(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoredStratum {
    pub components: Vec<StratumComponent>,
    /// Node `j` joins the two listed components.
    pub nodes: Vec<(usize, usize)>,
    /// Color of each marked point.
    pub marked_colors: Vec<usize>,
}

impl ColoredStratum {
    pub fn is_polychrome(&self) -> bool {
        self.components.iter().any(|c| c.color != self.components[0].color)
    }

    pub fn dimension(&self) -> i64 {
        self.components.iter().map(|c| dimension(c.genus, c.slots.len() as u32)).sum()
    }
}

impl fmt::Display for ColoredStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let pts: Vec<String> = c
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::Marked(i) => format!("p{}", i + 1),
                        Slot::Node(j) => format!("q{}", j + 1),
                    })
                    .collect();
                format!("M[{},{}]^{}({})", c.genus, c.slots.len(), c.color + 1, pts.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Strata of `M̄^b_{g,n}` entering the assembly when `dim M̄_{g,n} ≤ 1`:
/// the `b` unichrome top strata and the polychrome one-node strata.
pub fn enumerate_colored_strata(g: u32, n: u32, colors: usize) -> Result<Vec<ColoredStratum>> {
    if !stable(g, n) {
        return Err(Error::Unstable { g, n });
    }
    let dim = dimension(g, n);
    if dim > 1 {
        return Err(Error::NotImplementedDimension(dim));
    }
    let n = n as usize;
    let mut out = Vec::new();
    for c in 0..colors {
        out.push(ColoredStratum {
            components: vec![StratumComponent { genus: g, slots: (0..n).map(Slot::Marked).collect(), color: c }],
            nodes: Vec::new(),
            marked_colors: vec![c; n],
        });
    }
    if dim < 1 || n == 0 {
        return Ok(out);
    }
    // The component holding p1 is listed first, so each split appears once.
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 {
            continue;
        }
        let left: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let right: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        for g1 in 0..=g {
            let g2 = g - g1;
            if !stable(g1, left.len() as u32 + 1) || !stable(g2, right.len() as u32 + 1) {
                continue;
            }
            for c1 in 0..colors {
                for c2 in 0..colors {
                    if c1 == c2 {
                        continue;
                    }
                    let mut marked_colors = vec![0; n];
                    for &i in &left {
                        marked_colors[i] = c1;
                    }
                    for &i in &right {
                        marked_colors[i] = c2;
                    }
                    let slots = |pts: &[usize]| {
                        let mut s: Vec<Slot> = pts.iter().map(|&i| Slot::Marked(i)).collect();
                        s.push(Slot::Node(0));
                        s
                    };
                    out.push(ColoredStratum {
                        components: vec![
                            StratumComponent { genus: g1, slots: slots(&left), color: c1 },
                            StratumComponent { genus: g2, slots: slots(&right), color: c2 },
                        ],
                        nodes: vec![(0, 1)],
                        marked_colors,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Codimension-one boundary divisors of `M̄_{g,n}` with the two node branches
/// ordered, weighted by the inverse automorphism order.
pub fn boundary_divisors(g: u32, n: u32) -> Vec<(Vec<(u32, u32)>, Rational)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones();
        for g1 in 0..=g {
            let a = (g1, k + 1);
            let b = (g - g1, n - k + 1);
            if stable(a.0, a.1) && stable(b.0, b.1) {
                out.push((vec![a, b], int(1)));
            }
        }
    }
    if g >= 1 && stable(g - 1, n + 2) {
        // two orderings of the node, automorphism group of order two
        out.push((vec![(g - 1, n + 2)], int(2) * rat(1, 2)));
    }
    out
}

/// Everything the assembly consumes, so that single inputs can be perturbed.
#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyInputs {
    /// `e^{t̂_{a,0}}` per point.
    pub exp_t0: [SumElem; 2],
    pub t1: [SumElem; 2],
    /// `B̂_{a,0;a,0}`; equal to its local counterpart for a global curve.
    pub b_same: [SumElem; 2],
    /// `B̂_{a₊,0;a₋,0}`.
    pub b_mixed: SumElem,
    /// `dξ_{a,d}`, indexed `[point][d]`.
    pub dxi: [[PoleForm; 2]; 2],
    pub table: IntersectionTable,
}

impl AssemblyInputs {
    pub fn from_moduli(data: &[ModuliData; 2]) -> Result<Self> {
        let each = |f: &dyn Fn(&ModuliData) -> Result<SumElem>| -> Result<[SumElem; 2]> {
            Ok([f(&data[0])?, f(&data[1])?])
        };
        let dxi = |d: &ModuliData| -> Result<[PoleForm; 2]> {
            if d.dxi.len() < 2 {
                return Err(Error::NotTabulated("dxi with d = 1".into()));
            }
            Ok([d.dxi[0].clone(), d.dxi[1].clone()])
        };
        Ok(AssemblyInputs {
            exp_t0: each(&|d| Ok(d.dual_times.exp_t0.clone()))?,
            t1: each(&|d| d.dual_times.get(1).cloned().ok_or(Error::NotTabulated("dual time 1".into())))?,
            b_same: each(&|d| Ok(d.dual_b(0, d.point, 0).clone()))?,
            b_mixed: data[0].dual_b(0, RamPoint::Minus, 0).clone(),
            dxi: [dxi(&data[0])?, dxi(&data[1])?],
            table: IntersectionTable::standard(),
        })
    }

    pub fn from_curve(c: &SpectralCurve) -> Result<Self> {
        let opts = ModuliOptions { times_k_max: 5, dual_k_max: 1, b_k_max: 2, dxi_d_max: 1, zz_l_max: 0 };
        Self::from_moduli(&compute_moduli(c, &opts)?)
    }

    /// `B̂_{a,0;a',0}`.
    fn b_hat(&self, a: usize, b: usize) -> SumElem {
        if a == b {
            self.b_same[a].clone()
        } else {
            self.b_mixed.clone()
        }
    }

    /// `B̂_{a,0;a,0}` of the local curve at `a`.
    fn b_hat_loc(&self, a: usize) -> SumElem {
        self.b_same[a].clone()
    }

    /// Degree-zero part of the node contribution.
    pub fn node_factor(&self, a: usize, b: usize) -> SumElem {
        let local = if a == b { self.b_hat_loc(a) } else { SumElem::zero() };
        &self.b_hat(a, b) - &local
    }

    /// Every input entering the `(g,n)` assembly, each shifted by one.
    pub fn unit_mutations(&self, g: u32, n: u32) -> Vec<(String, AssemblyInputs)> {
        let one = SumElem::one();
        let mut out = Vec::new();
        for p in RamPoint::ALL {
            let i = p.index();
            let mut m = self.clone();
            m.exp_t0[i] = &m.exp_t0[i] + &one;
            out.push((format!("exp(t_hat[{p},0])"), m));
            let mut m = self.clone();
            m.t1[i] = &m.t1[i] + &one;
            out.push((format!("t_hat[{p},1]"), m));
            let mut m = self.clone();
            m.b_same[i] = &m.b_same[i] + &one;
            out.push((format!("B_hat[{p},0;{p},0]"), m));
            for d in 0..2 {
                for f in self.dxi[i][d].terms.keys() {
                    let mut m = self.clone();
                    let slot = m.dxi[i][d].terms.get_mut(f).expect("present");
                    *slot = &*slot + &one;
                    out.push((format!("dxi[{p},{d}] at ({},{})", f.point, f.order), m));
                }
            }
        }
        if (g, n) == (0, 4) {
            let mut m = self.clone();
            m.b_mixed = &m.b_mixed + &one;
            out.push(("B_hat[a+,0;a-,0]".into(), m));
        }
        let used: Vec<TableKey> = self
            .table
            .entries
            .keys()
            .filter(|(tg, tn, _)| (*tg, *tn) == (g, n) || (*tg, *tn) == (0, 3))
            .cloned()
            .collect();
        for key in used {
            let m = AssemblyInputs { table: self.table.perturbed(&key, &int(1)), ..self.clone() };
            out.push((format!("<{}>_{{{},{}}}", key.2, key.0, key.1), m));
        }
        out
    }
}

/// Adds `coef · Π_i form_i(z_i)` to `out`.
fn add_product(out: &mut Correlator, coef: &SumElem, forms: &[&PoleForm]) {
    if coef.is_zero() {
        return;
    }
    let mut partial: Vec<(Monomial, SumElem)> = vec![(Vec::new(), coef.clone())];
    for form in forms {
        let mut next = Vec::with_capacity(partial.len() * form.terms.len());
        for (m, c) in &partial {
            for (f, x) in &form.terms {
                let mut mm = m.clone();
                mm.push(*f);
                next.push((mm, c * x));
            }
        }
        partial = next;
    }
    for (m, c) in partial {
        out.add_term(m, &c);
    }
}

fn color_point(c: usize) -> Result<usize> {
    if c < 2 {
        Ok(c)
    } else {
        Err(Error::NotImplementedCase { g: -1, n: c as i64 })
    }
}

/// Generic assembly over [`enumerate_colored_strata`], valid for `dim ≤ 1`.
pub fn assemble_from_strata(inputs: &AssemblyInputs, g: u32, n: u32) -> Result<Correlator> {
    let strata = enumerate_colored_strata(g, n, 2)?;
    let dim = dimension(g, n);
    let t = &inputs.table;
    let mut out = Correlator::new(g, n);
    for s in &strata {
        if s.components.len() == 1 {
            let comp = &s.components[0];
            let a = color_point(comp.color)?;
            let e = inputs.exp_t0[a].powi(euler(comp.genus, n))?;
            let dxi0 = &inputs.dxi[a][0];
            let dxi1 = &inputs.dxi[a][1];
            let all0: Vec<&PoleForm> = vec![dxi0; n as usize];
            if dim == 0 {
                let v = t.get(g, n, &ClassMonomial::one(n as usize))?;
                add_product(&mut out, &e.scale(&v), &all0);
                continue;
            }
            // κ₁ from the bulk
            let k1 = t.get(g, n, &ClassMonomial::kappa1(n as usize))?;
            add_product(&mut out, &(&e * &inputs.t1[a]).scale(&k1), &all0);
            // ψ_i from the marked points
            for i in 0..n as usize {
                let v = t.get(g, n, &ClassMonomial::psi(n as usize, i))?;
                let mut forms = all0.clone();
                forms[i] = dxi1;
                add_product(&mut out, &e.scale(&v), &forms);
            }
            // B̂_loc on the boundary divisors
            let mut weight = int(0);
            for (pieces, w) in boundary_divisors(g, n) {
                let mut prod = w;
                for (pg, pn) in pieces {
                    prod *= t.get(pg, pn, &ClassMonomial::one(pn as usize))?;
                }
                weight += prod;
            }
            let half = weight * rat(1, 2);
            add_product(&mut out, &(&e * &inputs.b_hat_loc(a)).scale(&half), &all0);
        } else {
            let mut coef = SumElem::one();
            for comp in &s.components {
                let a = color_point(comp.color)?;
                let cn = comp.slots.len() as u32;
                coef = &coef * &inputs.exp_t0[a].powi(euler(comp.genus, cn))?;
                coef = coef.scale(&t.get(comp.genus, cn, &ClassMonomial::one(cn as usize))?);
            }
            for &(c1, c2) in &s.nodes {
                let a = color_point(s.components[c1].color)?;
                let b = color_point(s.components[c2].color)?;
                coef = &coef * &inputs.node_factor(a, b);
            }
            let forms: Vec<&PoleForm> = s.marked_colors.iter().map(|&c| &inputs.dxi[c][0]).collect();
            add_product(&mut out, &coef, &forms);
        }
    }
    Ok(out.scale(&SumElem::from_i64(1 << dim)))
}

/// Direct transcription of the `(0,4)` and `(1,1)` expansions.
pub fn assemble_hardcoded(inputs: &AssemblyInputs, g: u32, n: u32) -> Result<Correlator> {
    let t = &inputs.table;
    let one03 = t.get(0, 3, &ClassMonomial::one(3))?;
    let mut out = Correlator::new(g, n);
    match (g, n) {
        (0, 4) => {
            let k1 = t.get(0, 4, &ClassMonomial::kappa1(4))?;
            for a in 0..2 {
                let e2 = inputs.exp_t0[a].powi(2)?;
                let d0 = &inputs.dxi[a][0];
                let d1 = &inputs.dxi[a][1];
                let bulk = &inputs.t1[a].scale(&k1) + &inputs.b_same[a].scale(&(int(3) * &one03 * &one03));
                add_product(&mut out, &(&e2 * &bulk), &[d0, d0, d0, d0]);
                for i in 0..4 {
                    let psi = t.get(0, 4, &ClassMonomial::psi(4, i))?;
                    let mut forms = [d0, d0, d0, d0];
                    forms[i] = d1;
                    add_product(&mut out, &e2.scale(&psi), &forms);
                }
            }
            let e = &inputs.exp_t0[0] * &inputs.exp_t0[1];
            let coef = (&e * &inputs.b_mixed).scale(&(&one03 * &one03));
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        continue;
                    }
                    let mut forms = [&inputs.dxi[1][0]; 4];
                    forms[i] = &inputs.dxi[0][0];
                    forms[j] = &inputs.dxi[0][0];
                    add_product(&mut out, &coef.scale(&rat(1, 2)), &forms);
                }
            }
        }
        (1, 1) => {
            let k1 = t.get(1, 1, &ClassMonomial::kappa1(1))?;
            let psi = t.get(1, 1, &ClassMonomial::psi(1, 0))?;
            for a in 0..2 {
                let e = &inputs.exp_t0[a];
                let c0 = &inputs.t1[a].scale(&k1) + &inputs.b_same[a].scale(&(rat(1, 2) * &one03));
                add_product(&mut out, &(e * &c0), &[&inputs.dxi[a][0]]);
                add_product(&mut out, &e.scale(&psi), &[&inputs.dxi[a][1]]);
            }
        }
        _ => return Err(Error::NotImplementedCase { g: g as i64, n: n as i64 }),
    }
    Ok(out.scale(&SumElem::from_i64(2)))
}

pub fn assemble_in_omega(c: &SpectralCurve, data: &[ModuliData; 2], g: u32, n: u32) -> Result<Correlator> {
    let _ = c;
    if !matches!((g, n), (0, 4) | (1, 1)) {
        return Err(Error::NotImplementedCase { g: g as i64, n: n as i64 });
    }
    assemble_from_strata(&AssemblyInputs::from_moduli(data)?, g, n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub alpha: Vec<PoleFactor>,
    pub tr: SumElem,
    #[serde(rename = "in")]
    pub in_value: SumElem,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub g: u32,
    pub n: u32,
    pub pass: bool,
    /// Size of the pole-basis grid compared.
    pub monomials_checked: usize,
    /// Monomials with a nonzero coefficient on either side.
    pub nonzero_monomials: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "omega_{{{},{}}}: {} ({} monomials, {} nonzero)",
            self.g,
            self.n,
            if self.pass { "PASS" } else { "FAIL" },
            self.monomials_checked,
            self.nonzero_monomials
        )?;
        if let Some(m) = &self.first_mismatch {
            let alpha: Vec<String> = m.alpha.iter().map(|p| format!("({},{})", p.point, p.order)).collect();
            write!(f, "\n  first nonzero at alpha = [{}]: TR {} vs IN {}", alpha.join(", "), m.tr, m.in_value)?;
        }
        Ok(())
    }
}

fn pole_grid(n: usize, max_order: u32) -> Vec<Monomial> {
    let factors: Vec<PoleFactor> =
        RamPoint::ALL.iter().flat_map(|&p| (1..=max_order).map(move |o| PoleFactor::new(p, o))).collect();
    let mut out: Vec<Monomial> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|m| {
                factors.iter().map(move |f| {
                    let mut m = m.clone();
                    m.push(*f);
                    m
                })
            })
            .collect();
    }
    out
}

/// Compares two correlators coefficient by coefficient over the full pole
/// basis with orders up to `6g + 2n − 4` (or the largest order present).
pub fn compare(tr: &Correlator, inn: &Correlator) -> IdentityReport {
    let n = tr.n() as usize;
    let bound = (6 * tr.g() + 2 * tr.n()).saturating_sub(4);
    let max_order = (0..n).map(|v| tr.max_order(v).max(inn.max_order(v))).max().unwrap_or(0).max(bound);
    let grid = pole_grid(n, max_order);
    let mismatch = |m: &Monomial| {
        let (a, b) = (tr.coefficient(m), inn.coefficient(m));
        (a != b).then(|| Mismatch { alpha: m.clone(), tr: a, in_value: b })
    };
    let first_mismatch = grid.iter().find_map(mismatch);
    let support: BTreeSet<&Monomial> = tr.terms().keys().chain(inn.terms().keys()).collect();
    IdentityReport {
        g: tr.g(),
        n: tr.n(),
        pass: first_mismatch.is_none(),
        monomials_checked: grid.len(),
        nonzero_monomials: support.len(),
        first_mismatch,
    }
}

pub fn verify_identity_with(c: &SpectralCurve, inputs: &AssemblyInputs, g: u32, n: u32) -> Result<IdentityReport> {
    if !matches!((g, n), (0, 4) | (1, 1)) {
        return Err(Error::NotImplementedCase { g: g as i64, n: n as i64 });
    }
    let tr = stable_omega(c, g, n)?;
    let inn = assemble_from_strata(inputs, g, n)?;
    Ok(compare(&tr, &inn))
}

pub fn verify_identity(c: &SpectralCurve, g: u32, n: u32) -> Result<IdentityReport> {
    verify_identity_with(c, &AssemblyInputs::from_curve(c)?, g, n)
}

/// The `(0,4)` and `(1,1)` expansions rewritten through `x_{a,n}`, `y_{a,n}`,
/// with the intersection numbers left symbolic.
pub fn xy_closed_form(c: &SpectralCurve, table: &IntersectionTable, g: u32, n: u32) -> Result<Correlator> {
    let pf = |a: RamPoint, o: u32| PoleFactor::new(a, o);
    let mut out = Correlator::new(g, n);
    match (g, n) {
        (0, 4) => {
            let k1 = table.get(0, 4, &ClassMonomial::kappa1(4))?;
            let psi = table.get(0, 4, &ClassMonomial::psi(4, 0))?;
            for a in RamPoint::ALL {
                let m = c.local_moduli(a, 2)?;
                let (x0, x1, x2) = (&m.x_n[0], &m.x_n[1], &m.x_n[2]);
                let (y0, y1, y2) = (&m.y_n[0], &m.y_n[1], &m.y_n[2]);
                let pre = (int(48) * x0 * x0 * y0 * y0).recip();
                let base = (int(3) - int(5) * &k1 + int(20) * &psi) * x1 * x1
                    - int(3) * (int(1) - &k1 + int(4) * &psi) * x2
                    + int(12) * &k1 * x1 * y1
                    - int(12) * &k1 * y2;
                out.add_term(vec![pf(a, 2); 4], &SumElem::rational(&pre * base));
                for i in 0..4 {
                    let mut mono = vec![pf(a, 2); 4];
                    mono[i] = pf(a, 3);
                    out.add_term(mono.clone(), &SumElem::rational(&pre * int(-24) * &psi * x1));
                    mono[i] = pf(a, 4);
                    out.add_term(mono, &SumElem::rational(&pre * int(72) * &psi));
                }
            }
            let m1 = c.local_moduli(RamPoint::Plus, 0)?;
            let m2 = c.local_moduli(RamPoint::Minus, 0)?;
            let delta = c.point(RamPoint::Plus) - c.point(RamPoint::Minus);
            let pre = rat(1, 2) / (&delta * &delta * &m1.x_n[0] * &m2.x_n[0] * &m1.y_n[0] * &m2.y_n[0]);
            for i in 0..4 {
                for j in i + 1..4 {
                    let mut mono = vec![pf(RamPoint::Minus, 2); 4];
                    mono[i] = pf(RamPoint::Plus, 2);
                    mono[j] = pf(RamPoint::Plus, 2);
                    out.add_term(mono, &SumElem::rational(pre.clone()));
                }
            }
        }
        (1, 1) => {
            let k1 = table.get(1, 1, &ClassMonomial::kappa1(1))?;
            let psi = table.get(1, 1, &ClassMonomial::psi(1, 0))?;
            let diff = &k1 - &psi;
            for a in RamPoint::ALL {
                let m = c.local_moduli(a, 2)?;
                let (x0, x1, x2) = (&m.x_n[0], &m.x_n[1], &m.x_n[2]);
                let (y0, y1, y2) = (&m.y_n[0], &m.y_n[1], &m.y_n[2]);
                let pre = (x0 * y0).recip();
                let order2 = ((int(-1) + int(10) * &diff) * x1 * x1 + (int(1) - int(6) * &diff) * x2
                    - int(24) * &k1 * x1 * y1
                    + int(24) * &k1 * y2)
                    / int(48);
                out.add_term(vec![pf(a, 2)], &SumElem::rational(&pre * order2));
                out.add_term(vec![pf(a, 3)], &SumElem::rational(&pre * &psi * x1));
                out.add_term(vec![pf(a, 4)], &SumElem::rational(&pre * int(-3) * &psi));
            }
        }
        _ => return Err(Error::NotImplementedCase { g: g as i64, n: n as i64 }),
    }
    Ok(out.scale(&SumElem::from_i64(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_lsz_curve, CurveParams};
    use proptest::prelude::*;

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

    #[test]
    fn table_values() {
        assert_eq!(intersection_number(0, 3, &ClassMonomial::one(3)).unwrap(), int(1));
        assert_eq!(intersection_number(1, 1, &ClassMonomial::psi(1, 0)).unwrap(), rat(1, 24));
        assert_eq!(intersection_number(1, 1, &ClassMonomial::kappa1(1)).unwrap(), rat(1, 24));
        assert_eq!(intersection_number(0, 4, &ClassMonomial::kappa1(4)).unwrap(), int(1));
        let psi_sq = ClassMonomial { psi: vec![2, 0, 0, 0], kappa: vec![] };
        assert_eq!(intersection_number(0, 4, &psi_sq).unwrap(), int(0));
        let deep = ClassMonomial { psi: vec![1, 0, 0, 0, 0], kappa: vec![1] };
        assert!(matches!(intersection_number(0, 5, &deep), Err(Error::NotTabulated(_))));
    }

    #[test]
    fn table_agrees_with_recursion() {
        assert_eq!(table_from_recursion(), IntersectionTable::standard());
    }

    #[test]
    fn recursion_known_values() {
        assert_eq!(psi_correlator(1, &[4, 0, 0, 0]), rat(1, 24));
        assert_eq!(psi_correlator(2, &[4]), rat(1, 1152));
        assert_eq!(psi_correlator(2, &[2, 3]), rat(29, 5760));
        assert_eq!(psi_correlator(0, &[1, 1, 0, 0, 0]), int(2));
        assert_eq!(psi_correlator(1, &[1, 1]), rat(1, 24));
        // dilaton
        assert_eq!(psi_correlator(1, &[1, 1, 1]), rat(1, 12));
    }

    #[test]
    fn strata_counts() {
        let s = enumerate_colored_strata(0, 4, 2).unwrap();
        assert_eq!(s.iter().filter(|x| !x.is_polychrome()).count(), 2);
        assert_eq!(s.iter().filter(|x| x.is_polychrome()).count(), 6);
        let s = enumerate_colored_strata(1, 1, 2).unwrap();
        assert_eq!((s.len(), s.iter().filter(|x| x.is_polychrome()).count()), (2, 0));
        assert_eq!(enumerate_colored_strata(0, 3, 2).unwrap().len(), 2);
        assert!(matches!(enumerate_colored_strata(0, 5, 2), Err(Error::NotImplementedDimension(2))));
        assert!(matches!(enumerate_colored_strata(0, 2, 2), Err(Error::Unstable { .. })));
    }

    #[test]
    fn strata_are_stable_and_unichrome_per_component() {
        for b in 1..=4 {
            for s in enumerate_colored_strata(0, 4, b).unwrap() {
                assert!(s.dimension() <= 1);
                for comp in &s.components {
                    assert!(stable(comp.genus, comp.slots.len() as u32));
                    for i in comp.marked() {
                        assert_eq!(s.marked_colors[i], comp.color);
                    }
                }
            }
            let poly = enumerate_colored_strata(0, 4, b).unwrap().iter().filter(|s| s.is_polychrome()).count();
            assert_eq!(poly, 3 * b * (b - 1));
        }
    }

    #[test]
    fn boundary_multiplicities() {
        let w = |g, n| boundary_divisors(g, n).into_iter().map(|(_, w)| w).fold(int(0), |a, b| a + b);
        assert_eq!(w(0, 4), int(6));
        assert_eq!(w(1, 1), int(1));
    }

    #[test]
    fn unichrome_node_factor_cancels() {
        let c = &curves()[0];
        let inputs = AssemblyInputs::from_curve(c).unwrap();
        assert!(inputs.node_factor(0, 0).is_zero());
        assert!(inputs.node_factor(1, 1).is_zero());
        assert_eq!(inputs.node_factor(0, 1), inputs.b_mixed);
    }

    #[test]
    fn generic_and_hardcoded_agree() {
        for c in curves() {
            let inputs = AssemblyInputs::from_curve(&c).unwrap();
            for (g, n) in [(0, 4), (1, 1)] {
                let a = assemble_from_strata(&inputs, g, n).unwrap();
                let b = assemble_hardcoded(&inputs, g, n).unwrap();
                assert_eq!(a, b, "({g},{n})");
                for (name, m) in inputs.unit_mutations(g, n) {
                    let a = assemble_from_strata(&m, g, n).unwrap();
                    let b = assemble_hardcoded(&m, g, n).unwrap();
                    assert_eq!(a, b, "({g},{n}) {name}");
                }
            }
        }
    }

    #[test]
    fn omega03_from_strata_matches_recursion() {
        for c in curves() {
            let inputs = AssemblyInputs::from_curve(&c).unwrap();
            let inn = assemble_from_strata(&inputs, 0, 3).unwrap();
            assert_eq!(inn, stable_omega(&c, 0, 3).unwrap());
        }
    }

    #[test]
    fn identity_holds() {
        for c in curves() {
            for (g, n) in [(0, 4), (1, 1)] {
                let r = verify_identity(&c, g, n).unwrap();
                assert!(r.pass, "{r}");
            }
        }
    }

    #[test]
    fn assembled_correlators_satisfy_invariants() {
        let c = &curves()[1];
        for (g, n) in [(0, 4), (1, 1)] {
            let w = assemble_in_omega(c, &compute_moduli(c, &ModuliOptions::default()).unwrap(), g, n).unwrap();
            assert!(w.is_symmetric() && w.is_residue_free() && w.is_rational());
        }
        assert!(matches!(
            assemble_in_omega(c, &compute_moduli(c, &ModuliOptions::default()).unwrap(), 0, 5),
            Err(Error::NotImplementedCase { .. })
        ));
    }

    #[test]
    fn b_hat_increment_breaks_identity() {
        let c = &curves()[0];
        let mut inputs = AssemblyInputs::from_curve(c).unwrap();
        inputs.b_same[0] = &inputs.b_same[0] + &SumElem::one();
        for (g, n) in [(0, 4), (1, 1)] {
            let r = verify_identity_with(c, &inputs, g, n).unwrap();
            assert!(!r.pass);
            assert!(r.first_mismatch.is_some());
        }
    }

    #[test]
    fn every_input_is_live() {
        let c = &curves()[1];
        let inputs = AssemblyInputs::from_curve(c).unwrap();
        for (g, n) in [(0, 4), (1, 1)] {
            for (name, m) in inputs.unit_mutations(g, n) {
                assert!(!verify_identity_with(c, &m, g, n).unwrap().pass, "({g},{n}) {name}");
            }
        }
    }

    #[test]
    fn xy_form_of_omega04_matches() {
        let t = IntersectionTable::standard();
        for c in curves() {
            let inputs = AssemblyInputs::from_curve(&c).unwrap();
            assert_eq!(xy_closed_form(&c, &t, 0, 4).unwrap(), assemble_from_strata(&inputs, 0, 4).unwrap());
        }
    }

    #[test]
    fn xy_form_of_omega11_is_twice_the_assembly() {
        let t = IntersectionTable::standard();
        for c in curves() {
            let inputs = AssemblyInputs::from_curve(&c).unwrap();
            let assembled = assemble_from_strata(&inputs, 1, 1).unwrap();
            let xy = xy_closed_form(&c, &t, 1, 1).unwrap();
            assert_eq!(xy, assembled.scale(&SumElem::from_i64(2)));
        }
    }

    #[test]
    fn reference_top_pole_of_omega11() {
        let c = &curves()[0];
        let w = assemble_from_strata(&AssemblyInputs::from_curve(c).unwrap(), 1, 1).unwrap();
        assert_eq!(w.coefficient(&[PoleFactor::new(RamPoint::Plus, 4)]), SumElem::rational(rat(1, 12)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]
        #[test]
        fn identity_on_random_curves(e in 2i64..9, et in -2i64..3, gx in 1i64..4, gy in 1i64..3) {
            let params = CurveParams::from_ints(e, et, gx, gy);
            let Ok(c) = build_lsz_curve(params) else { return Ok(()); };
            for (g, n) in [(0, 4), (1, 1)] {
                prop_assert!(verify_identity(&c, g, n).unwrap().pass);
            }
        }
    }
}
