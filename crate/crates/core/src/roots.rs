//! Numerical complex roots (Aberth–Ehrlich iteration).
//!
//! Used only as a screen. Repeated roots converge slowly, so callers pass
//! squarefree polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

const MAX_ITER: usize = 500;

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Roots of `Σ c_i z^i` (lowest degree first, nonzero leading coefficient).
pub fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Cauchy-style radius for the initial circle.
    let lead = c[n].norm();
    let radius = c[..n]
        .iter()
        .enumerate()
        .map(|(i, a)| (a.norm() / lead).powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..MAX_ITER {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of an integer polynomial `a(T)` evaluated as `a(T / s)`, i.e. the
/// roots of `a` multiplied by `s`. Coefficients are rescaled exactly before
/// conversion to floating point.
pub fn scaled_roots(a: &[BigInt], s: &BigInt) -> Vec<Complex64> {
    // a(T/s) · s^d has integer coefficients a_i s^{d-i}.
    let d = match crate::poly::degree(a) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let ints: Vec<BigInt> = (0..=d).map(|i| &a[i] * s.pow((d - i) as u32)).collect();
    let top = ints.iter().map(|c| c.bits()).max().unwrap_or(0);
    let shift = top.saturating_sub(60);
    let f: Vec<f64> = ints.iter().map(|c| (c >> shift).to_f64().unwrap_or(0.0)).collect();
    aberth(&f)
}
