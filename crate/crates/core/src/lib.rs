//! Numerical laboratory for the lifespan of 2D semilinear damped wave equations.
//!
//! The model problem is
//!
//! ```text
//! v_tt - Δv + μ/(1+t) v_t = |v|^p,   v(x,0) = ε f(x),  v_t(x,0) = ε g(x)
//! ```
//!
//! in two space dimensions with scale-invariant damping, specialized to the
//! threshold coefficient μ = 2 where the Liouville transform u = (1+t) v
//! removes the damping in exchange for a time-weighted nonlinearity.
//!
//! The crate provides, end to end:
//!
//! * [`exponents`] — Fujita / Strauss exponents, the damping threshold μ₀(n),
//!   regime classification and theoretical lifespan predictions;
//! * [`initial_data`] — smooth compactly supported radial data realizing the
//!   hypotheses of the blow-up theorems (nonzero-integral and zero-sum cases);
//! * [`kernel`] — the free 2D wave propagator via spherical means together
//!   with numerical checks of its sharp decay estimates;
//! * [`field`] — radial space-time grids with light-cone support tracking;
//! * [`duhamel`] — the weighted norms, the Duhamel integral operator in both
//!   its disc and radial-kernel forms, a-priori-estimate ratios and the
//!   Picard solver for the associated integral equation;
//! * [`solver`] — a radial finite-difference integrator with blow-up
//!   detection producing numerical lifespans T(ε);
//! * [`functional`] — averaged-functional blow-up machinery: F(t), the
//!   Bessel-weighted functional, Kato-lemma quantities, an ODE-inequality
//!   integrator and the slicing recursions of the critical case;
//! * [`sweep`] — the ε-sweep experiment driver with scaling-law fitting and
//!   model selection between power laws and exponential laws.
//!
//! Background and worked examples live in the mdbook under `book/`; its code
//! snippets are compiled as doc-tests.

pub mod duhamel;
pub mod exponents;
pub mod field;
pub mod functional;
pub mod initial_data;
pub mod kernel;
pub mod quad;
pub mod rational;
pub mod solver;
pub mod sweep;

use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidParameter(String),
    /// A mathematical hypothesis required by an operation does not hold for
    /// the given input (e.g. an envelope fit with the wrong sign of data).
    HypothesisMismatch(String),
    /// Malformed structured text (config files, CSV records, descriptors).
    Parse(String),
    /// Underlying I/O failure, stringified.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::HypothesisMismatch(msg) => write!(f, "hypothesis mismatch: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
