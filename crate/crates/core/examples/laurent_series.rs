use lsz_tr::field::{int, rat, Rational};
use lsz_tr::series::{Center, LaurentSeries};

type S = LaurentSeries<Rational>;

fn main() -> lsz_tr::Result<()> {
    let c = Center::At(int(0));
    let z = S::variable(c.clone(), 10);

    // 1/(z - z^2) has a simple pole with residue 1
    let f = z.sub(&z.mul(&z)).inv()?;
    println!("1/(z - z^2) = {f}");
    println!("residue = {}", f.residue()?);

    // log, exp and sqrt on 1 + z
    let one_plus = S::constant(c.clone(), int(1), 10).add(&z);
    let l = one_plus.log()?;
    println!("log(1+z) = {l}");
    println!("exp(log(1+z)) = {}", l.exp()?);
    println!("sqrt(1+z) = {}", one_plus.sqrt()?);

    // Lagrange inversion: w = z - z^2 reverts to the Catalan series
    let w = z.sub(&z.mul(&z));
    let r = w.revert()?;
    println!("reversion of z - z^2 = {r}");
    let cats: Vec<Rational> = (1..8).map(|k| r.coeff(k).unwrap()).collect();
    println!("coefficients: {}", cats.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));

    let half = z.scale(&rat(1, 2));
    println!("compose: (1+z)^(-1) at z/2 = {}", one_plus.inv()?.compose(&half)?);
    Ok(())
}
