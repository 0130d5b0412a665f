//! Builds the LSZ curve from the command line or the reference parameters
//! and prints its ramification data.
//!
//!     cargo run --example spectral_curve -- 5 1 2 1

use lsz_tr::curve::{build_lsz_curve, CurveParams, RamPoint};
use lsz_tr::field::parse_rational;

fn main() -> lsz_tr::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let params = if args.len() == 4 {
        let v = args.iter().map(|a| parse_rational(a)).collect::<lsz_tr::Result<Vec<_>>>()?;
        CurveParams::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())
    } else {
        CurveParams::reference()
    };
    let c = build_lsz_curve(params)?;
    println!("{}", c.params());
    println!("x(z) = {}", c.x());
    println!("y(z) = {}", c.y());
    for p in RamPoint::ALL {
        let a = c.point(p);
        let m = c.local_moduli(p, 4)?;
        println!("{p} = {a}: x_0 = {}, y_0 = {}", m.x_n[0], m.y_n[0]);
        println!("  x_n = {:?}", m.x_n.iter().map(|q| q.to_string()).collect::<Vec<_>>());
        println!("  sigma({a}) = {}", c.involution(a)?);
        assert_eq!(m, c.closed_form_moduli(p, 4));
    }
    print!("config:\n{}", c.params().to_config());
    Ok(())
}
