//! Exact arithmetic in Q(i)(√q₁, √q₂, …).

use lsz_tr::field::{rat, SumElem};

fn main() -> lsz_tr::Result<()> {
    let s2 = SumElem::sqrt_rational(&rat(2, 1))?;
    let s8 = SumElem::sqrt_rational(&rat(8, 1))?;
    println!("sqrt(8) normalizes to {s8}");
    println!("sqrt(2) * sqrt(8) = {}", &s2 * &s8);

    let m = SumElem::sqrt_rational(&rat(-3, 4))?;
    println!("sqrt(-3/4) = {m}, squared = {}", &m * &m);

    let x = &SumElem::one() + &s2;
    let inv = x.inv()?;
    println!("1/(1 + sqrt 2) = {inv}");
    println!("check: {}", &x * &inv);

    println!("json: {}", serde_json::to_string(&x).unwrap());
    Ok(())
}
