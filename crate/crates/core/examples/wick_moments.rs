use lsz_tr::curve::{build_lsz_curve, CurveParams};
use lsz_tr::field::rat;
use lsz_tr::maps::{calibrate_dictionary, wick_moments};

fn main() -> lsz_tr::Result<()> {
    let (e, et) = (rat(1, 2), rat(1, 2));
    for (order, word) in [(0, vec![1]), (0, vec![3]), (1, vec![1]), (1, vec![2]), (1, vec![1, 1]), (2, vec![1])] {
        let w = wick_moments(&e, &et, order, &word)?;
        println!("lambda^{order} {word:?}: {} pairings", w.pairings);
        println!("  connected {}", w.connected);
        assert_eq!(w.connected, w.cumulant);
    }
    let c = build_lsz_curve(CurveParams::reference())?;
    println!("{}", calibrate_dictionary(&c, &e, &et, &rat(1, 10))?);
    Ok(())
}
