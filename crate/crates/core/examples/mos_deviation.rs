//! How closely two metrics track mean opinion scores.

use segeval::stats::mos_deviation;

fn main() -> segeval::Result<()> {
    let mos = [0.75, 0.20, 0.76, 0.81, 0.03];
    let ssegep = [0.63, 0.20, 0.75, 0.82, 0.00];
    let dice = [0.68, 0.22, 0.68, 0.53, 0.04];
    println!("ssegep deviation: {:.3}", mos_deviation(&ssegep, &mos)?);
    println!("dice deviation:   {:.3}", mos_deviation(&dice, &mos)?);
    Ok(())
}
