use lsz_tr::curve::{build_lsz_curve, CurveParams};
use lsz_tr::field::{int, rat};
use lsz_tr::maps::map_count_table;

fn main() -> lsz_tr::Result<()> {
    // at gamma_x = 0, eps~ = 0 the disk counts are Catalan numbers
    let free = build_lsz_curve(CurveParams::new(int(3), int(0), int(0), rat(1, 2)))?;
    for m in map_count_table(&free, 0, 6)?.iter().filter(|m| m.boundary.len() == 1) {
        println!("T^(0)_{:?} = {}", m.boundary, m.value);
    }

    let c = build_lsz_curve(CurveParams::reference())?;
    for m in map_count_table(&c, 1, 4)? {
        println!("T^({})_{:?} = {}", m.g, m.boundary, m.value);
    }
    Ok(())
}
