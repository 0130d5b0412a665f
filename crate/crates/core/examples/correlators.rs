use lsz_tr::curve::{build_lsz_curve, CurveParams, RamPoint};
use lsz_tr::toprec::{stable_omega, PoleFactor};

fn main() -> lsz_tr::Result<()> {
    let c = build_lsz_curve(CurveParams::reference())?;
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
        let w = stable_omega(&c, g, n)?;
        println!("omega_{{{g},{n}}}: {} terms, symmetric {}, rational {}", w.len(), w.is_symmetric(), w.is_rational());
        if w.len() <= 8 {
            println!("{w}");
        }
    }
    let w11 = stable_omega(&c, 1, 1)?;
    println!("top pole of omega_{{1,1}} at a+: {}", w11.coefficient(&[PoleFactor::new(RamPoint::Plus, 4)]));
    Ok(())
}
