use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field F_{p}^{n} exceeds the ceiling of {ceiling} elements")]
    FieldTooLarge { p: u64, n: u32, ceiling: u64 },

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("no monic irreducible polynomial of degree {n} over F_{p}")]
    NoIrreducible { p: u64, n: u32 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("the quartic form is identically zero")]
    ZeroSurface,

    #[error("reduction modulo {0} is identically zero")]
    ZeroReduction(u64),

    #[error("Weil bound violated at n = {n}: trace {trace} exceeds 22*p^n = {bound}")]
    WeilBound { n: u32, trace: String, bound: String },

    #[error("counts missing for n = {0}")]
    MissingCount(u32),

    #[error("Newton recursion gives a non-integral coefficient c_{0}; the traces are inconsistent")]
    NonIntegral(usize),

    #[error("too many power sums: {got} > {max}")]
    TooManyTraces { got: usize, max: usize },

    #[error("known factor does not divide the polynomial exactly")]
    InexactDivision,

    #[error("functional equation: {0}")]
    FunctionalEquation(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
