use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("requested α-order {requested} exceeds the available order {available}")]
    OrderMismatch { requested: u32, available: u32 },

    #[error("wrong solution family: expected {expected}, got {got}")]
    WrongFamily {
        expected: &'static str,
        got: &'static str,
    },

    #[error("adaptive quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    NonConvergence { subdivisions: usize, error: f64 },

    #[error("no sign change on [{lo:e}, {hi:e}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root iteration cap of {0} reached")]
    IterationCap(usize),

    #[error("ODE step size underflow at s = {s:e} (h = {h:e})")]
    StepUnderflow { s: f64, h: f64 },

    #[error("angular quadrature too coarse: {0}")]
    QuadratureResolution(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
