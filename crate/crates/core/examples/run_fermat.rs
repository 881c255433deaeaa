//! End-to-end run on a surface file, writing the report and its summary.
//!
//! cargo run --example run_fermat -- [out.json]

use std::path::PathBuf;

use k3picard::bounds::LowerBound;
use k3picard::pipeline::{run_pipeline, RunConfig};
use k3picard::report::AssertedFactor;

fn main() -> k3picard::Result<()> {
    let surface = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fermat.txt");
    let mut config = RunConfig::new(surface, vec![5, 13, 17], 3);
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
    config.rho_low = LowerBound {
        value: 20,
        justification: "48 lines".into(),
    };
    config.out = std::env::args().nth(1).map(PathBuf::from);
    let outcome = run_pipeline(&config)?;
    println!(
        "{} counts computed, {} from cache",
        outcome.log.counted, outcome.log.cache_hits
    );
    print!("{}", k3picard::report::summary(&outcome.report));
    Ok(())
}
