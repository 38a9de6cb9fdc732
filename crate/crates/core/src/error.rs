use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n = {0} rejected: need n >= 5 so 2/(n-4) is defined and positive")]
    Dimension(u32),
    #[error("exponent p = {0} rejected: need p > 1")]
    Exponent(f64),
    #[error("weight a = {0} rejected: need a >= 0")]
    Weight(f64),
    #[error("strict mode rejects p = {p}: need p > (n+4+2a)/(n-4) = {critical}")]
    Subcritical { p: f64, critical: f64 },
    #[error("tolerance {0} outside the accepted range ({1}, {2})")]
    Tolerance(f64, f64, f64),
    #[error("initial value rejected: {0}")]
    InitialValue(String),
    #[error("no sign change for v0 in [{lo:e}, {hi:e}]: event classes {lo_event} / {hi_event} at both ends; likely mis-specified regime")]
    NoSignChange { lo: f64, hi: f64, lo_event: String, hi_event: String },
    #[error("inconsistent bisection trace: {0}")]
    InconsistentTrace(String),
    #[error("weight-bound denominator nonpositive at k = {k}: beta*(q-alpha)^2 - I3 = {value:e}")]
    WeightBoundDenominator { k: usize, value: f64 },
    #[error("profile rejected: {0}")]
    Profile(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("quadrature tail does not converge: fitted decay rate {rate} needs rate*p > a+2 = {threshold}")]
    TailDivergent { rate: f64, threshold: f64 },
    #[error("matrix must be square, got {rows} rows but a row of length {cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
