//! Frobenius characteristic polynomial of the Fermat quartic at p = 5.
//!
//! With only the hyperplane class known, ten traces are needed. Asserting
//! the algebraic part coming from the 48 lines leaves a quadratic, which one
//! trace pins down.

use k3picard::counter::{count_points, traces};
use k3picard::surface::parse_surface;
use k3picard::weil::{reconstruct, required_traces, KnownFactor, Reconstruction, SignPolicy};

fn main() -> k3picard::Result<()> {
    let fermat = parse_surface(include_str!("../data/fermat.txt"))?;
    let p = 5;
    let mod_p = fermat.reduce_mod_p(p)?;
    let counts = vec![(1, count_points(&mod_p, 1)?), (2, count_points(&mod_p, 2)?)];
    let record = traces(p, &fermat.id, &counts)?;

    let hyperplane = [KnownFactor::hyperplane()];
    let lines = [
        KnownFactor {
            order: 1,
            multiplicity: 8,
        },
        KnownFactor {
            order: 2,
            multiplicity: 12,
        },
    ];
    for (name, known) in [("hyperplane only", &hyperplane[..]), ("with lines", &lines[..])] {
        println!("{name}: {} traces needed", required_traces(known, SignPolicy::Both));
        match reconstruct(&record, known, SignPolicy::Both)? {
            Reconstruction::NeedMoreTraces { required, available } => {
                println!("  have {available} of {required}")
            }
            Reconstruction::Candidates(cands) => {
                for c in cands {
                    let coeffs: Vec<String> = c.coeffs.iter().map(|x| x.to_string()).collect();
                    println!("  sign {:+}: [{}]", c.sign, coeffs.join(", "));
                }
            }
        }
    }
    Ok(())
}
