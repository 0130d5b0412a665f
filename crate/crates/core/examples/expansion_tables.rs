//! Times, dual times and Bergman coefficients at both ramification points,
//! checked against their closed forms.

use lsz_tr::curve::{build_lsz_curve, CurveParams};
use lsz_tr::moduli::tables::{printed_row_corrections, verify_closed_form_tables};
use lsz_tr::moduli::{compute_moduli, ModuliOptions};

fn main() -> lsz_tr::Result<()> {
    let c = build_lsz_curve(CurveParams::from_ints(5, 1, 2, 1))?;
    let data = compute_moduli(&c, &ModuliOptions::default())?;
    for d in &data {
        println!("{} (sqrt x_0 = {})", d.point, d.sqrt_x0());
        for (k, t) in &d.times {
            println!("  t_{k} = {t}");
        }
        println!("  exp(that_0) = {}", d.dual_times.exp_t0);
        for (k, t) in &d.dual_times.higher {
            println!("  that_{k} = {t}");
        }
    }
    let report = verify_closed_form_tables(&c)?;
    print!("{report}");
    println!("all match: {}", report.all_ok());
    for (table, index, power) in printed_row_corrections() {
        println!("row {table} {index}: extra factor x_0^({power}/2)");
    }
    Ok(())
}
