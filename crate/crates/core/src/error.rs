use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid flux p/q = {p}/{q}: need gcd(p, q) = 1 and 1 <= p < q (or p/q = 0/1)")]
    InvalidFlux { p: u32, q: u32 },

    #[error("operands live in different cyclotomic contexts ({left} vs {right})")]
    ContextMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("series division needs an invertible constant term in the denominator")]
    NonInvertibleConstantTerm,

    #[error("walk length {0} must be even")]
    InvalidLength(usize),

    #[error("naive enumeration of {total} steps exceeds the cap of {cap}; use the dp route")]
    SizeGuard { total: usize, cap: usize },

    #[error("z0 = {z0} lies outside the disc of convergence (radius {radius})")]
    OutsideRadius { z0: f64, radius: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    RootFinding { iterations: usize },

    #[error("dominant singularities are not a real pair: {0:?}")]
    ComplexDominant(Vec<Complex64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
