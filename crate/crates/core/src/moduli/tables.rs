//! Closed forms for the times, dual times and Bergman coefficients in
//! terms of the local moduli `x_{a,n}`, `y_{a,n}`, checked against the
//! series-derived values.
//!
//! Polynomials are written as strings over the variables `x1..x6`, `y1..y6`
//! (one ramification point), or `p1, p2` / `q1, q2` for `x_{a₁,n}` / `x_{a₂,n}`
//! and `D = a₁ − a₂` (two points).

use std::fmt;

use serde::Serialize;

use super::{compute_moduli, sqrt2, ModuliData, ModuliOptions};
use crate::curve::{LocalModuli, RamPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{int, parse_rational, Rational, SumElem};
use crate::scalar::Scalar;

/// `num/den · √2^{sqrt2} · (√x_{a,0})^{sx} · (√x_{a',0})^{sx2} · y_{a,0}^{y0}`.
#[derive(Clone, Copy, Debug)]
struct Prefactor {
    num: i64,
    den: i64,
    sqrt2: i64,
    sx: i64,
    sx2: i64,
    y0: i64,
}

const fn pre(num: i64, den: i64, sqrt2: i64, sx: i64, y0: i64) -> Prefactor {
    Prefactor { num, den, sqrt2, sx, sx2: 0, y0 }
}

const fn pre2(num: i64, den: i64, sqrt2: i64, sx: i64, sx2: i64) -> Prefactor {
    Prefactor { num, den, sqrt2, sx, sx2, y0: 0 }
}

struct Row {
    pre: Prefactor,
    poly: &'static str,
}

/// Times `t_{a,k}`, `k = 3..=9`, as printed.
const TIMES: [Row; 7] = [
    Row { pre: pre(1, 1, 1, -1, 1), poly: "1" },
    Row { pre: pre(1, 3, 0, -2, 1), poly: "-x1 + 3 y1" },
    Row { pre: pre(1, 18, -1, 0, 1), poly: "-12 x1 y1 + 5 x1^2 - 3 x2 + 12 y2" },
    Row {
        pre: pre(1, 270, 0, -3, 1),
        poly: "90 x1^2 y1 - 90 x1 y2 - 45 x2 y1 - 40 x1^3 + 45 x2 x1 - 9 x3 + 45 y3",
    },
    Row {
        pre: pre(1, 2160, -1, -4, 1),
        poly: "-840 x1^3 y1 + 840 x1^2 y2 + 840 x2 x1 y1 - 480 x1 y3 - 144 x3 y1 - 360 x2 y2 \
               + 385 x1^4 - 630 x2 x1^2 + 168 x3 x1 + 105 x2^2 - 24 x4 + 144 y4",
    },
    Row {
        pre: pre(1, 17010, 0, -5, 1),
        poly: "4200 x1^4 y1 - 4200 x1^3 y2 - 6300 x2 x1^2 y1 + 2520 x1^2 y3 + 1512 x3 x1 y1 \
               + 3780 x2 x1 y2 - 945 x1 y4 + 945 x2^2 y1 - 189 x4 y1 - 567 x3 y2 - 945 x2 y3 \
               - 1960 x1^5 + 4200 x2 x1^3 - 1260 x3 x1^2 - 1575 x2^2 x1 + 252 x4 x1 + 378 x2 x3 \
               - 27 x5 + 189 y5",
    },
    Row {
        pre: pre(1, 2721600, -1, -6, 1),
        poly: "-900900 x1^5 y1 + 900900 x1^4 y2 + 1801800 x2 x1^3 y1 - 554400 x1^3 y3 \
               - 498960 x3 x1^2 y1 - 1247400 x2 x1^2 y2 + 226800 x1^2 y4 - 623700 x2^2 x1 y1 \
               + 90720 x4 x1 y1 + 272160 x3 x1 y2 + 453600 x2 x1 y3 - 60480 x1 y5 \
               + 136080 x2 x3 y1 - 8640 x5 y1 + 170100 x2^2 y2 - 30240 x4 y2 - 60480 x3 y3 \
               - 75600 x2 y4 + 425425 x1^6 - 1126125 x2 x1^4 + 360360 x3 x1^3 \
               + 675675 x2^2 x1^2 - 83160 x4 x1^2 - 249480 x2 x3 x1 + 12960 x5 x1 \
               - 51975 x2^3 + 13608 x3^2 + 22680 x2 x4 - 1080 x6 + 8640 y6",
    },
];

/// Extra powers of `√x_{a,0}` restoring homogeneity `t_{a,k} ∝ x_{a,0}^{−(k−2)/2}`
/// in the printed rows.
const TIMES_FIX: [i64; 7] = [0, 0, -3, -1, -1, -1, -1];

/// Dual times `t̂_{a,k}`, `k = 1..=3`, in `x/y` form.
const DUAL: [Row; 3] = [
    Row { pre: pre(1, 24, 0, -2, 0), poly: "12 x1 y1 - 5 x1^2 + 3 x2 - 12 y2" },
    Row {
        pre: pre(1, 48, 0, -4, 0),
        poly: "30 x1^3 y1 + 6 x1^2 y1^2 - 30 x1^2 y2 - 32 x2 x1 y1 - 12 x1 y1 y2 + 20 x1 y3 \
               + 6 x3 y1 + 12 x2 y2 - 15 x1^4 + 25 x2 x1^2 - 7 x3 x1 - 4 x2^2 + x4 + 6 y2^2 - 6 y4",
    },
    Row {
        pre: pre(1, 5760, 0, -6, 0),
        poly: "10800 x1^5 y1 + 1800 x1^4 y1^2 - 10800 x1^4 y2 + 240 x1^3 y1^3 \
               - 22200 x2 x1^3 y1 - 3600 x1^3 y1 y2 + 7200 x1^3 y3 - 1920 x2 x1^2 y1^2 \
               + 1800 x1^2 y2^2 + 6360 x3 x1^2 y1 - 720 x1^2 y1^2 y2 + 15000 x2 x1^2 y2 \
               + 1200 x1^2 y1 y3 - 3000 x1^2 y4 + 360 x3 x1 y1^2 + 720 x1 y1 y2^2 \
               + 7920 x2^2 x1 y1 - 1200 x4 x1 y1 - 3360 x3 x1 y2 + 2640 x2 x1 y1 y2 \
               - 6000 x2 x1 y3 - 1200 x1 y2 y3 - 360 x1 y1 y4 + 840 x1 y5 - 720 x2 y2^2 \
               - 1800 x2 x3 y1 + 120 x5 y1 - 1920 x2^2 y2 + 360 x4 y2 - 360 x3 y1 y2 \
               + 840 x3 y3 + 960 x2 y4 - 5525 x1^6 + 14775 x2 x1^4 - 4830 x3 x1^3 \
               - 8900 x2^2 x1^2 + 1130 x4 x1^2 + 3360 x2 x3 x1 - 180 x5 x1 + 660 x2^3 \
               - 189 x3^2 - 300 x2 x4 + 15 x6 - 240 y2^3 + 360 y2 y4 - 120 y6",
    },
];

/// `B_{a,k;a,k'}` for `k ≤ k' ≤ 2`, in the order (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
const B_SAME: [Row; 6] = [
    Row { pre: pre(1, 12, 0, -2, 0), poly: "x1^2 - x2" },
    Row { pre: pre(1, 135, 1, -3, 0), poly: "-10 x1^3 + 15 x2 x1 - 9/2 x3" },
    Row { pre: pre(1, 1440, 0, -4, 0), poly: "175 x1^4 - 350 x2 x1^2 + 120 x3 x1 + 75 x2^2 - 24 x4" },
    Row { pre: pre(1, 270, 0, -4, 0), poly: "40 x1^4 - 80 x2 x1^2 + 30 x3 x1 + 15 x2^2 - 6 x4" },
    Row {
        pre: pre(1, 3780, 1, -5, 0),
        poly: "-490 x1^5 + 1225 x2 x1^3 - 945/2 x3 x1^2 - 525 x2^2 x1 + 126 x4 x1 \
               + 315/2 x2 x3 - 18 x5",
    },
    Row {
        pre: pre(1, 181440, 0, -5, 0),
        poly: "42875 x1^6 - 128625 x2 x1^4 + 50400 x3 x1^3 + 86625 x2^2 x1^2 - 15120 x4 x1^2 \
               - 37800 x2 x3 x1 + 3024 x5 x1 - 7875 x2^3 + 2268 x3^2 + 4536 x2 x4 - 324 x6",
    },
];

const B_SAME_INDEX: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// The `(2,2)` entry carries `x_{a,0}^{−3}` by homogeneity.
const B_SAME_FIX: [i64; 6] = [0, 0, 0, 0, 0, -1];

/// `Δ^{k+k'+2} B_{a₁,k;a₂,k'}`, row-major over `k, k' ≤ 2`.
const B_MIXED: [Row; 9] = [
    Row { pre: pre2(2, 1, 0, -1, -1), poly: "1" },
    Row { pre: pre2(-2, 3, 1, -1, -2), poly: "D q1 - 6" },
    Row { pre: pre2(1, 6, 0, -1, -3), poly: "5 D^2 q1^2 - 3 D^2 q2 - 24 D q1 + 72" },
    Row { pre: pre2(-2, 3, 1, -2, -1), poly: "D p1 + 6" },
    Row { pre: pre2(1, 9, 0, -2, -2), poly: "4 D^2 p1 q1 - 24 D p1 + 24 D q1 - 216" },
    Row {
        pre: pre2(1, 9, -1, -2, -3),
        poly: "-5 D^3 p1 q1^2 + 3 D^3 p1 q2 - 30 D^2 q1^2 + 24 D^2 p1 q1 + 18 D^2 q2 \
               - 72 D p1 + 216 D q1 - 864",
    },
    Row { pre: pre2(1, 6, 0, -3, -1), poly: "5 D^2 p1^2 - 3 D^2 p2 + 24 D p1 + 72" },
    Row {
        pre: pre2(1, 9, -1, -3, -2),
        poly: "-5 D^3 p1^2 q1 + 3 D^3 p2 q1 + 30 D^2 p1^2 - 18 D^2 p2 - 24 D^2 p1 q1 \
               + 216 D p1 - 72 D q1 + 864",
    },
    Row {
        pre: pre2(1, 72, 0, -3, -3),
        poly: "25 D^4 p1^2 q1^2 - 15 D^4 p2 q1^2 - 15 D^4 p1^2 q2 + 9 D^4 p2 q2 \
               + 120 D^3 p1 q1^2 - 120 D^3 p1^2 q1 + 72 D^3 p2 q1 - 72 D^3 p1 q2 \
               + 360 D^2 p1^2 + 360 D^2 q1^2 - 216 D^2 p2 - 864 D^2 p1 q1 - 216 D^2 q2 \
               + 3456 D p1 - 3456 D q1 + 17280",
    },
];

/// Evaluates a polynomial string; `lookup` supplies variable values.
pub(crate) fn eval_poly(src: &str, lookup: &dyn Fn(&str) -> Rational) -> Result<Rational> {
    let mut total = Rational::from_integer(0.into());
    let normalized = src.replace('-', " - ").replace('+', " + ");
    let mut sign = 1i64;
    let mut term: Option<Rational> = None;
    let flush = |term: &mut Option<Rational>, sign: i64, total: &mut Rational| {
        if let Some(t) = term.take() {
            *total += t * int(sign);
        }
    };
    for tok in normalized.split_whitespace() {
        match tok {
            "+" | "-" => {
                flush(&mut term, sign, &mut total);
                sign = if tok == "-" { -1 } else { 1 };
            }
            _ => {
                let value = if tok.starts_with(|ch: char| ch.is_ascii_digit()) {
                    parse_rational(tok)?
                } else {
                    let (name, exp) = match tok.split_once('^') {
                        Some((n, e)) => (n, e.parse::<i32>().map_err(|e| Error::Parse(e.to_string()))?),
                        None => (tok, 1),
                    };
                    lookup(name).pow(exp)
                };
                term = Some(match term {
                    Some(t) => t * value,
                    None => value,
                });
            }
        }
    }
    flush(&mut term, sign, &mut total);
    Ok(total)
}

fn single_lookup(m: &LocalModuli) -> impl Fn(&str) -> Rational + '_ {
    move |name: &str| {
        let idx: usize = name[1..].parse().expect("variable index");
        match &name[..1] {
            "x" => m.x_n[idx].clone(),
            "y" => m.y_n[idx].clone(),
            _ => panic!("unknown variable {name}"),
        }
    }
}

fn prefactor(p: &Prefactor, sx: &SumElem, sx2: &SumElem, y0: &Rational) -> Result<SumElem> {
    let mut out = SumElem::rational(Rational::new(p.num.into(), p.den.into()));
    out = &out * &sqrt2().powi(p.sqrt2)?;
    out = &out * &sx.powi(p.sx)?;
    out = &out * &sx2.powi(p.sx2)?;
    Ok(out.scale(&y0.pow(p.y0 as i32)))
}

/// Whether to apply the homogeneity corrections to the printed rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    Printed,
    Corrected,
}

/// Closed form of `t_{a,k}`, `k = 3..=9`.
pub fn time_closed_form(k: usize, m: &LocalModuli, sqrt_x0: &SumElem, v: Variant) -> Result<SumElem> {
    let row = &TIMES[k - 3];
    let mut p = row.pre;
    if v == Variant::Corrected {
        p.sx += TIMES_FIX[k - 3];
    }
    let poly = eval_poly(row.poly, &single_lookup(m))?;
    Ok(prefactor(&p, sqrt_x0, &SumElem::one(), &m.y_n[0])?.scale(&poly))
}

/// Closed form of `e^{t̂_{a,0}} = √x_{a,0}/(2√2 y_{a,0})`.
pub fn exp_dual_time0_closed_form(m: &LocalModuli, sqrt_x0: &SumElem) -> Result<SumElem> {
    let p = pre(1, 2, -1, 1, -1);
    prefactor(&p, sqrt_x0, &SumElem::one(), &m.y_n[0])
}

/// `x/y` closed form of `t̂_{a,k}`, `k = 1..=3`.
pub fn dual_time_closed_form(k: usize, m: &LocalModuli, sqrt_x0: &SumElem) -> Result<SumElem> {
    let row = &DUAL[k - 1];
    let poly = eval_poly(row.poly, &single_lookup(m))?;
    Ok(prefactor(&row.pre, sqrt_x0, &SumElem::one(), &m.y_n[0])?.scale(&poly))
}

/// `t`-form of `t̂_{a,k}` in terms of the times.
pub fn dual_time_from_times(k: usize, t: &dyn Fn(usize) -> SumElem) -> Result<SumElem> {
    let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
    let inv3 = t(3).inverse()?;
    let a5 = &t(5) * &inv3;
    Ok(match k {
        1 => a5.scale(&r(-3, 2)),
        2 => &(&a5 * &a5).scale(&r(9, 8)) - &(&t(7) * &inv3).scale(&r(15, 4)),
        3 => {
            let cube = &(&a5 * &a5) * &a5;
            &(&cube.scale(&r(-9, 8)) + &(&(&t(7) * &a5) * &inv3).scale(&r(45, 8)))
                - &(&t(9) * &inv3).scale(&r(105, 8))
        }
        _ => return Err(Error::NotTabulated(format!("dual time {k}"))),
    })
}

/// Closed form of `B_{a,k;a,k'}`, `k, k' ≤ 2`.
pub fn b_same_closed_form(k: usize, k2: usize, m: &LocalModuli, sqrt_x0: &SumElem, v: Variant) -> Result<SumElem> {
    let key = (k.min(k2), k.max(k2));
    let i = B_SAME_INDEX.iter().position(|x| *x == key).ok_or(Error::NotTabulated(format!("B({k},{k2})")))?;
    let row = &B_SAME[i];
    let mut p = row.pre;
    if v == Variant::Corrected {
        p.sx += B_SAME_FIX[i];
    }
    let poly = eval_poly(row.poly, &single_lookup(m))?;
    Ok(prefactor(&p, sqrt_x0, &SumElem::one(), &m.y_n[0])?.scale(&poly))
}

/// Closed form of `B_{a₁,k;a₂,k'}`, `k, k' ≤ 2`, including `Δ^{−(k+k'+2)}`.
pub fn b_mixed_closed_form(
    k: usize,
    k2: usize,
    m1: &LocalModuli,
    m2: &LocalModuli,
    delta: &Rational,
    sx1: &SumElem,
    sx2: &SumElem,
) -> Result<SumElem> {
    if k > 2 || k2 > 2 {
        return Err(Error::NotTabulated(format!("B({k},{k2})")));
    }
    let row = &B_MIXED[3 * k + k2];
    let lookup = |name: &str| -> Rational {
        match name {
            "D" => delta.clone(),
            "p1" => m1.x_n[1].clone(),
            "p2" => m1.x_n[2].clone(),
            "q1" => m2.x_n[1].clone(),
            "q2" => m2.x_n[2].clone(),
            _ => panic!("unknown variable {name}"),
        }
    };
    let poly = eval_poly(row.poly, &lookup)?;
    let caption = delta.pow(-(k as i32 + k2 as i32 + 2));
    Ok(prefactor(&row.pre, sx1, sx2, &int(1))?.scale(&(poly * caption)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableEntry {
    pub table: String,
    pub index: String,
    pub point: RamPoint,
    pub series: SumElem,
    pub closed: SumElem,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    pub entries: Vec<TableEntry>,
}

impl TableReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn first_failure(&self) -> Option<&TableEntry> {
        self.entries.iter().find(|e| !e.ok)
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<6} {:<8} {:<3} {:<4} {}",
                e.table,
                e.index,
                e.point.label(),
                if e.ok { "ok" } else { "FAIL" },
                e.series
            )?;
        }
        Ok(())
    }
}

/// Compares every tabulated entry with the series-derived data. The
/// homogeneity-corrected rows are used for the times and `B_{a,2;a,2}`.
pub fn table_report(c: &SpectralCurve, data: &[ModuliData; 2]) -> Result<TableReport> {
    let mut entries = Vec::new();
    let mut push = |table: &str, index: String, point: RamPoint, series: SumElem, closed: SumElem| {
        let ok = series == closed;
        entries.push(TableEntry { table: table.into(), index, point, series, closed, ok });
    };
    for d in data {
        let m = c.local_moduli(d.point, 6)?;
        let sx = d.sqrt_x0();
        for k in 3..=9 {
            push("t", k.to_string(), d.point, d.time(k).clone(), time_closed_form(k, &m, &sx, Variant::Corrected)?);
        }
        let t = |k: usize| d.time(k).clone();
        push("t_hat", "0:t".into(), d.point, d.dual_times.exp_t0.clone(), (&t(3) * &SumElem::from_i64(2)).inverse()?);
        push("t_hat", "0:xy".into(), d.point, d.dual_times.exp_t0.clone(), exp_dual_time0_closed_form(&m, &sx)?);
        for k in 1..=3 {
            let series = d.dual_times.get(k).cloned().unwrap_or_else(SumElem::zero);
            push("t_hat", format!("{k}:t"), d.point, series.clone(), dual_time_from_times(k, &t)?);
            push("t_hat", format!("{k}:xy"), d.point, series, dual_time_closed_form(k, &m, &sx)?);
        }
        for k in 0..=2 {
            for k2 in 0..=2 {
                push(
                    "B_aa",
                    format!("({k},{k2})"),
                    d.point,
                    d.b(k, d.point, k2).clone(),
                    b_same_closed_form(k, k2, &m, &sx, Variant::Corrected)?,
                );
            }
        }
        let o = &data[d.point.other().index()];
        let m2 = c.local_moduli(o.point, 6)?;
        let delta = c.point(d.point) - c.point(o.point);
        for k in 0..=2 {
            for k2 in 0..=2 {
                push(
                    "B_a1a2",
                    format!("({k},{k2})"),
                    d.point,
                    d.b(k, o.point, k2).clone(),
                    b_mixed_closed_form(k, k2, &m, &m2, &delta, &sx, &o.sqrt_x0())?,
                );
            }
        }
    }
    Ok(TableReport { entries })
}

/// Like [`table_report`], but fails on the first mismatch.
pub fn check_tables(c: &SpectralCurve, data: &[ModuliData; 2]) -> Result<TableReport> {
    let report = table_report(c, data)?;
    if let Some(e) = report.first_failure() {
        return Err(Error::TableMismatch {
            table: e.table.clone(),
            index: format!("{} at {}", e.index, e.point),
            series: e.series.to_string(),
            closed: e.closed.to_string(),
        });
    }
    Ok(report)
}

pub fn verify_closed_form_tables(c: &SpectralCurve) -> Result<TableReport> {
    let data = compute_moduli(c, &ModuliOptions::default())?;
    check_tables(c, &data)
}

/// Printed rows that differ from the series values, with the power of
/// `√x_{a,0}` that restores them.
pub fn printed_row_corrections() -> Vec<(&'static str, String, i64)> {
    let mut out = Vec::new();
    for (i, fix) in TIMES_FIX.iter().enumerate() {
        if *fix != 0 {
            out.push(("t", (i + 3).to_string(), *fix));
        }
    }
    for (i, fix) in B_SAME_FIX.iter().enumerate() {
        if *fix != 0 {
            out.push(("B_aa", format!("{:?}", B_SAME_INDEX[i]), *fix));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_lsz_curve, CurveParams};
    use crate::field::rat;
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
    fn polynomial_strings() {
        let lookup = |n: &str| match n {
            "x1" => int(2),
            "y1" => int(3),
            _ => int(0),
        };
        assert_eq!(eval_poly("-x1 + 3 y1", &lookup).unwrap(), int(7));
        assert_eq!(eval_poly("5 x1^2 - 9/2 y1", &lookup).unwrap(), rat(13, 2));
        assert_eq!(eval_poly("1", &lookup).unwrap(), int(1));
    }

    #[test]
    fn reference_closed_forms() {
        let c = build_lsz_curve(CurveParams::reference()).unwrap();
        let m = c.local_moduli(RamPoint::Plus, 6).unwrap();
        let sx = sqrt2();
        let t3 = time_closed_form(3, &m, &sx, Variant::Printed).unwrap();
        assert_eq!(t3, SumElem::rational(rat(-3, 4)));
        let b00 = b_same_closed_form(0, 0, &m, &sx, Variant::Printed).unwrap();
        assert_eq!(b00, SumElem::rational(rat(-1, 8)));
    }

    #[test]
    fn all_tables_match_on_three_curves() {
        for c in curves() {
            let report = verify_closed_form_tables(&c).unwrap();
            assert!(report.all_ok());
            // 7 times, 8 dual-time checks, 9 + 9 Bergman entries, per point
            assert_eq!(report.entries.len(), 2 * (7 + 8 + 18));
        }
    }

    #[test]
    fn printed_rows_differ_by_the_missing_power() {
        for c in curves() {
            let data = compute_moduli(&c, &ModuliOptions::default()).unwrap();
            for d in &data {
                let m = c.local_moduli(d.point, 6).unwrap();
                let sx = d.sqrt_x0();
                for k in 3..=9 {
                    let printed = time_closed_form(k, &m, &sx, Variant::Printed).unwrap();
                    let fix = TIMES_FIX[k - 3];
                    let restored = &printed * &sx.powi(fix).unwrap();
                    assert_eq!(&restored, d.time(k), "t_{k}");
                    if fix != 0 && sx.powi(fix).unwrap() != SumElem::one() {
                        assert_ne!(&printed, d.time(k));
                    }
                }
                let printed = b_same_closed_form(2, 2, &m, &sx, Variant::Printed).unwrap();
                if sx != SumElem::one() {
                    assert_ne!(&printed, d.b(2, d.point, 2));
                }
                assert_eq!(&(&printed * &sx.inverse().unwrap()), d.b(2, d.point, 2));
            }
        }
        assert_eq!(printed_row_corrections().len(), 6);
    }

    #[test]
    fn injected_sign_flip_is_caught() {
        let c = curves().remove(1);
        let mut data = compute_moduli(&c, &ModuliOptions::default()).unwrap();
        let t5 = data[0].times.get_mut(&5).unwrap();
        *t5 = -t5.clone();
        match check_tables(&c, &data) {
            Err(Error::TableMismatch { table, index, .. }) => {
                assert_eq!(table, "t");
                assert!(index.starts_with("5 "), "{index}");
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn dual_times_match_closed_forms_on_random_curves(
            e in 2i64..12, et in -3i64..3, gx in 1i64..4, gy in 1i64..3, d in 1i64..3,
        ) {
            let params = CurveParams::new(rat(e, 1), rat(et, d), int(gx), rat(gy, d));
            let Ok(c) = build_lsz_curve(params) else { return Ok(()); };
            let data = compute_moduli(&c, &ModuliOptions { b_k_max: 2, ..Default::default() }).unwrap();
            for dd in &data {
                let m = c.local_moduli(dd.point, 6).unwrap();
                let sx = dd.sqrt_x0();
                for k in 1..=3 {
                    prop_assert_eq!(dd.dual_times.get(k).unwrap(), &dual_time_closed_form(k, &m, &sx).unwrap());
                }
            }
        }
    }
}
