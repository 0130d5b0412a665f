//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use lsz_tr::cli::run;
use lsz_tr::curve::{build_lsz_curve, CurveParams, RamPoint, SpectralCurve};
use lsz_tr::field::{int, rat, SumElem};
use lsz_tr::intersect::{enumerate_colored_strata, verify_identity, verify_identity_with, AssemblyInputs};
use lsz_tr::maps::{calibrate_dictionary, length_tuples, map_counts, wick_moments};
use lsz_tr::moduli::tables::verify_closed_form_tables;
use lsz_tr::toprec::{stable_omega, PoleFactor};

type Check = Result<String, String>;

fn curves() -> Vec<SpectralCurve> {
    [
        CurveParams::reference(),
        CurveParams::from_ints(5, 1, 2, 1),
        CurveParams::new(int(7), rat(1, 2), int(3), int(2)),
    ]
    .into_iter()
    .map(|p| build_lsz_curve(p).expect("admissible curve"))
    .collect()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn identity(g: u32, n: u32) -> Result<Vec<String>, String> {
    let mut notes = Vec::new();
    for c in curves() {
        let start = Instant::now();
        let r = verify_identity(&c, g, n).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(r.pass, format!("{}: {r}", c.params()))?;
        ensure(took < Duration::from_secs(60), format!("{}: took {took:?}", c.params()))?;
        ensure(
            r.monomials_checked >= 40,
            format!("{}: only {} monomials checked", c.params(), r.monomials_checked),
        )?;
        notes.push(format!("{} monomials ({} nonzero) in {:.2?}", r.monomials_checked, r.nonzero_monomials, took));
    }
    Ok(notes)
}

fn criterion_1() -> Check {
    Ok(identity(0, 4)?.join("; "))
}

fn criterion_2() -> Check {
    let c = build_lsz_curve(CurveParams::reference()).unwrap();
    let tr = stable_omega(&c, 1, 1).map_err(|e| e.to_string())?;
    let inputs = AssemblyInputs::from_curve(&c).map_err(|e| e.to_string())?;
    let inn = lsz_tr::intersect::assemble_from_strata(&inputs, 1, 1).map_err(|e| e.to_string())?;
    let top = [PoleFactor::new(RamPoint::Plus, 4)];
    let expected = SumElem::rational(rat(1, 6));
    let spot = format!(
        "coefficient of dz/(z-a+)^4: TR {}, IN {}, expected 1/6",
        tr.coefficient(&top),
        inn.coefficient(&top)
    );
    let spot_ok = tr.coefficient(&top) == expected && inn.coefficient(&top) == expected;
    match (identity(1, 1), spot_ok) {
        (Ok(notes), true) => Ok(format!("{}; {spot}", notes.join("; "))),
        (Ok(_), false) => Err(spot),
        (Err(why), _) => Err(format!("{why}; {spot}")),
    }
}

fn criterion_3() -> Check {
    let mut total = 0;
    for c in curves() {
        let r = verify_closed_form_tables(&c).map_err(|e| e.to_string())?;
        ensure(r.all_ok(), format!("{}: {:?}", c.params(), r.first_failure()))?;
        for p in RamPoint::ALL {
            ensure(r.entries.iter().any(|e| e.point == p), format!("no entries at {p}"))?;
        }
        for t in ["t", "t_hat", "B_aa", "B_a1a2"] {
            ensure(r.entries.iter().any(|e| e.table == t), format!("no entries for {t}"))?;
        }
        for col in [":t", ":xy"] {
            ensure(
                r.entries.iter().any(|e| e.table == "t_hat" && e.index.ends_with(col)),
                format!("no dual-time column {col}"),
            )?;
        }
        total += r.entries.len();
    }
    Ok(format!("{total} entries"))
}

fn criterion_4() -> Check {
    for c in curves() {
        for p in RamPoint::ALL {
            let direct = c.local_moduli(p, 6).map_err(|e| e.to_string())?;
            let closed = c.closed_form_moduli(p, 6);
            ensure(direct.x_n.len() >= 7 && direct.y_n.len() >= 7, "short derivative list")?;
            ensure(direct == closed, format!("{} at {p}: {direct:?} vs {closed:?}", c.params()))?;
        }
    }
    Ok("x_n, y_n for n <= 6".into())
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for c in curves().into_iter().take(2) {
        for (g, n) in [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2)] {
            let w = stable_omega(&c, g, n).map_err(|e| e.to_string())?;
            let tag = format!("{} ({g},{n})", c.params());
            ensure(!w.is_empty(), format!("{tag}: empty"))?;
            ensure(w.is_symmetric(), format!("{tag}: not symmetric"))?;
            ensure(w.is_rational(), format!("{tag}: irrational coefficient"))?;
            for v in 0..n as usize {
                for p in RamPoint::ALL {
                    ensure(w.residue_part(v, p).is_empty(), format!("{tag}: residue in z{v} at {p}"))?;
                }
                let bound = 6 * g + 2 * n - 4;
                ensure(w.max_order(v) <= bound, format!("{tag}: pole order {} > {bound}", w.max_order(v)))?;
            }
            ensure(
                w.terms().keys().all(|m| m.iter().all(|f| f.order >= 2)),
                format!("{tag}: simple pole"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} correlators"))
}

fn criterion_6() -> Check {
    let count = |g, n| -> Result<(usize, usize), String> {
        let s = enumerate_colored_strata(g, n, 2).map_err(|e| e.to_string())?;
        let poly = s.iter().filter(|x| x.is_polychrome()).count();
        Ok((s.len() - poly, poly))
    };
    let a = count(0, 4)?;
    let b = count(1, 1)?;
    ensure(a == (2, 6), format!("(0,4,2): {a:?}"))?;
    ensure(b == (2, 0), format!("(1,1,2): {b:?}"))?;
    Ok("(0,4,2) = 2 + 6, (1,1,2) = 2 + 0".into())
}

fn criterion_7() -> Check {
    let c = build_lsz_curve(CurveParams::reference()).unwrap();
    let inputs = AssemblyInputs::from_curve(&c).map_err(|e| e.to_string())?;
    let mut n_mut = 0;
    for (g, n) in [(0, 4), (1, 1)] {
        ensure(verify_identity_with(&c, &inputs, g, n).map_err(|e| e.to_string())?.pass, "unmutated run fails")?;
        for (name, m) in inputs.unit_mutations(g, n) {
            let r = verify_identity_with(&c, &m, g, n).map_err(|e| e.to_string())?;
            ensure(!r.pass, format!("({g},{n}): mutation {name} not detected"))?;
            n_mut += 1;
        }
    }
    Ok(format!("{n_mut} mutations detected"))
}

fn permutations(v: &[u32]) -> Vec<Vec<u32>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn criterion_8() -> Check {
    let mut n = 0;
    for c in curves() {
        for g in 0..=1 {
            for sorted in length_tuples(4) {
                let base = map_counts(&c, g, &sorted).map_err(|e| e.to_string())?;
                for ls in permutations(&sorted) {
                    let m = map_counts(&c, g, &ls).map_err(|e| e.to_string())?;
                    ensure(m.value == base.value, format!("g={g} {ls:?} not symmetric"))?;
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} tuples, both routes equal"))
}

fn criterion_9() -> Check {
    let (e, et) = (rat(1, 2), rat(1, 2));
    let free = wick_moments(&e, &et, 0, &[1]).map_err(|e| e.to_string())?;
    ensure(
        free.full.0.len() == 1 && free.full.coeff(1) == (&e + &et).recip(),
        format!("<tr PhiPhi^+> at lambda^0 = {}", free.full),
    )?;
    let c = build_lsz_curve(CurveParams::reference()).unwrap();
    let report = calibrate_dictionary(&c, &e, &et, &rat(1, 10)).map_err(|e| e.to_string())?;
    let residual = format!(
        "calibrated lambda^1 planar residual k=1: {}, k=2: {}",
        report.lambda1[0].residual, report.lambda1[1].residual
    );
    let first = wick_moments(&e, &et, 1, &[1]).map_err(|e| e.to_string())?;
    ensure(first.connected == first.cumulant, "connected part disagrees with cumulant")?;
    ensure(
        first.connected.degrees() == vec![-1, 1],
        format!("lambda^1 connected <tr PhiPhi^+> = {} has N-degrees {:?}; {residual}", first.connected, first.connected.degrees()),
    )?;
    Ok(residual)
}

fn call(args: &[&str]) -> (i32, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["lsz-tr", "--json"];
    argv.extend_from_slice(args);
    (run(argv, &mut out, &mut err), out)
}

fn criterion_10() -> Check {
    let runs: [&[&str]; 7] = [
        &["curve", "--curve", "ref"],
        &["expand", "--verify-tables", "--curve", "5,1,2,1"],
        &["omega", "--g", "0", "--n", "4"],
        &["verify", "--g", "1", "--n", "1", "--samples", "2", "--seed", "11"],
        &["verify", "--g", "0", "--n", "4"],
        &["maps", "--max-total", "4"],
        &["wick", "--order", "1", "--word", "1,1"],
    ];
    for args in runs {
        let a = call(args);
        let b = call(args);
        ensure(a.0 == 0, format!("{args:?} exited {}", a.0))?;
        ensure(!a.1.is_empty() && a.1 == b.1, format!("{args:?} output differs"))?;
    }
    Ok(format!("{} commands byte-identical", runs.len()))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("identity (0,4)", criterion_1),
        ("identity (1,1) and spot value", criterion_2),
        ("closed-form tables", criterion_3),
        ("local derivative closed forms", criterion_4),
        ("structural invariants", criterion_5),
        ("colored strata counts", criterion_6),
        ("mutation sensitivity", criterion_7),
        ("map-count routes", criterion_8),
        ("Wick oracle", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match f() {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
