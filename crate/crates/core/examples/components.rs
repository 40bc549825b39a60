//! Connected components under 4- and 8-connectivity, plus region boundaries.

use segeval::mask::{boundary, connected_components, Connectivity};
use segeval::LabelMask;

fn main() -> segeval::Result<()> {
    let mask = LabelMask::from_rows(&[
        [1, 1, 0, 0, 0, 2],
        [1, 1, 0, 0, 0, 2],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 1],
    ])?;

    for conn in [Connectivity::Four, Connectivity::Eight] {
        let segs = connected_components(&mask, 1, conn);
        println!("label 1, {}-connectivity: {} segments", conn.neighbors(), segs.len());
        for (i, s) in segs.iter().enumerate() {
            println!("  #{i}: area {} bbox {:?}", s.area(), s.bbox);
        }
    }

    let b = boundary(&mask, 1);
    println!("label 1 boundary has {} pixels: {:?}", b.len(), b.points);
    Ok(())
}
