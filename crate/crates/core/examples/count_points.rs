//! Point counts of the Fermat quartic over F_{3^n}, with the field
//! arithmetic underneath.

use k3picard::counter::{count_points, traces};
use k3picard::gf::FieldTable;
use k3picard::surface::parse_surface;

fn main() -> k3picard::Result<()> {
    let f = FieldTable::new(3, 2)?;
    let g = f.generator();
    println!(
        "F_9: generator {g}, g^4 = {}, frob(g) = {}, g^-1 = {:?}",
        f.pow(g, 4),
        f.frobenius(g),
        f.inv(g)
    );

    let fermat = parse_surface(include_str!("../data/fermat.txt"))?;
    let mod3 = fermat.reduce_mod_p(3)?;
    let counts: Vec<(u32, u64)> = (1..=4)
        .map(|n| Ok((n, count_points(&mod3, n)?)))
        .collect::<k3picard::Result<_>>()?;
    let record = traces(3, &fermat.id, &counts)?;
    for e in &record.entries {
        println!("n = {}: N = {:>10}  t = {:>6}", e.n, e.count, e.trace);
    }
    Ok(())
}
