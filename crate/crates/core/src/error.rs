//! Error type shared by all solvers.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("{what} did not converge after {iterations} iterations (last change {residual:.3e})")]
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },
    #[error("step-size rejection exhausted at t = {t:.6e} (dt = {dt:.3e})")]
    StepRejection { t: f64, dt: f64 },
    #[error("CFL violation: dt = {dt:.3e} exceeds h = {h:.3e}")]
    Cfl { dt: f64, h: f64 },
    #[error("range escape: {0}")]
    RangeEscape(String),
    #[error("degenerate operator: {0}")]
    Degenerate(String),
    #[error("basin escape: {0}")]
    BasinEscape(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
