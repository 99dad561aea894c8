use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} is outside the operator domain (x >= {min})")]
    OutOfDomain { x: f64, min: f64 },

    #[error("weight series reached k_cap = {k_cap} with mass {mass} < {target}")]
    TruncationFailure {
        k_cap: usize,
        mass: f64,
        target: f64,
    },

    #[error("function `{name}` sampled at t = {t}, beyond its evaluation cap {hi}")]
    EvaluationOutOfRange { name: String, t: f64, hi: f64 },

    #[error("unsupported moment order {0}")]
    UnsupportedOrder(u32),

    #[error("`{name}` violates the Lip* inequality at t = {t}, x = {x}")]
    MembershipViolation { name: String, t: f64, x: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
