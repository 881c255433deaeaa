//! Bounds on the geometric Picard number of quartic K3 surfaces over ℚ,
//! obtained by counting points on reductions modulo primes.

pub mod arith;
pub mod bounds;
pub mod counter;
pub mod error;
pub mod gf;
pub mod lab;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod roots;
pub mod surface;
pub mod upoly;
pub mod weil;

pub use error::{Error, Result};
