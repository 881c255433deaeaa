//! Upper bound and discriminant class from a single Weil polynomial.

use num_bigint::BigInt;

use k3picard::bounds::evaluate_candidate;
use k3picard::weil::{KnownFactor, WeilCandidate};

fn main() -> k3picard::Result<()> {
    // (1 - 5T)^8 (1 + 5T)^12 (1 - 6T + 25T^2): the Fermat quartic at 5.
    let p = 5i64;
    let mut coeffs = vec![BigInt::from(1)];
    let mut mul = |f: &[i64]| {
        let mut out = vec![BigInt::from(0); coeffs.len() + f.len() - 1];
        for (i, a) in coeffs.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        coeffs = out;
    };
    for _ in 0..8 {
        mul(&[1, -p]);
    }
    for _ in 0..12 {
        mul(&[1, p]);
    }
    mul(&[1, -6, p * p]);

    let cand = WeilCandidate {
        p: 5,
        coeffs,
        sign: 1,
        traces_used: 0,
        known_factors: vec![KnownFactor::hyperplane()],
    };
    let ev = evaluate_candidate(&cand)?;
    println!("cyclotomic factors (m, k): {:?}", ev.profile.factors);
    println!("rho <= {}  (m = {})", ev.profile.rho_upper, ev.profile.m_lcm);
    println!("ordinary: {}", ev.ordinary);
    match ev.delta {
        Some(d) => println!("discriminant square class: {}", d.value()),
        None => println!("discriminant class unavailable: {:?}", ev.delta_note),
    }
    Ok(())
}
