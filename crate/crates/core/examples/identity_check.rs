//! Topological recursion against the intersection-number expansion, then
//! the same comparison after perturbing each input in turn.

use lsz_tr::curve::{build_lsz_curve, CurveParams};
use lsz_tr::field::{int, rat};
use lsz_tr::intersect::{enumerate_colored_strata, verify_identity, verify_identity_with, AssemblyInputs};

fn main() -> lsz_tr::Result<()> {
    for s in enumerate_colored_strata(0, 4, 2)? {
        println!("{s}");
    }
    let curves = [
        CurveParams::reference(),
        CurveParams::from_ints(5, 1, 2, 1),
        CurveParams::new(int(7), rat(1, 2), int(3), int(2)),
    ];
    for p in curves {
        let c = build_lsz_curve(p)?;
        println!("{}", c.params());
        for (g, n) in [(0, 4), (1, 1)] {
            println!("  {}", verify_identity(&c, g, n)?);
        }
    }

    let c = build_lsz_curve(CurveParams::reference())?;
    let inputs = AssemblyInputs::from_curve(&c)?;
    for (name, m) in inputs.unit_mutations(1, 1) {
        let r = verify_identity_with(&c, &m, 1, 1)?;
        println!("{name:>24}: {}", if r.pass { "PASS" } else { "FAIL" });
    }
    Ok(())
}
