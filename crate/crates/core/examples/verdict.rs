//! Combining per-prime evidence: the same stored report read under
//! different lower bounds.

use k3picard::bounds::LowerBound;
use k3picard::pipeline::{run_surface, RunConfig};
use k3picard::report::{recombine, summary, AssertedFactor};
use k3picard::surface::parse_surface;

fn lower(value: usize, why: &str) -> LowerBound {
    LowerBound {
        value,
        justification: why.into(),
    }
}

fn main() -> k3picard::Result<()> {
    let fermat = parse_surface(include_str!("../data/fermat.txt"))?;
    let mut config = RunConfig::new("data/fermat.txt", vec![5, 17], 2);
    config.known_factors = vec![
        AssertedFactor {
            p: 5,
            order: 1,
            multiplicity: 8,
        },
        AssertedFactor {
            p: 5,
            order: 2,
            multiplicity: 12,
        },
        AssertedFactor {
            p: 17,
            order: 1,
            multiplicity: 20,
        },
    ];
    let report = run_surface(&fermat, &config)?.report;
    print!("{}", summary(&report));

    println!();
    let with_lines = recombine(&report, lower(20, "the 48 lines span a rank 20 lattice"), lower(1, ""))?;
    print!("{}", summary(&with_lines));

    println!();
    match recombine(&report, lower(21, "wrong"), lower(1, "")) {
        Ok(_) => println!("unexpected"),
        Err(e) => println!("rho_low = 21 rejected: {e}"),
    }
    Ok(())
}
