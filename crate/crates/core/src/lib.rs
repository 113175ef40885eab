//! Mean-field lower-tail machinery for weighted uniform hypergraphs.
//!
//! Everything is built around one object: an `r`-uniform hypergraph `H`
//! with positive edge weights, a retention probability `p`, and the event
//! that a `p`-random vertex subset induces atypically little edge weight.
//! The crate computes the naive mean-field rate
//!
//! ```text
//! Phi_p^H(eta) = min { sum_v i_p(q_v) : f(q) <= eta * p^r * e(H) }
//! ```
//!
//! where `i_p(q)` is the Bernoulli relative entropy and `f(q)` the expected
//! induced weight under the product measure `q`, together with the
//! information-theoretic inequalities, degree conditions, and tilted
//! lower-bound certificates that bracket `-log Pr(tail)` around it.
//!
//! Modules:
//! - [`entropy`]: relative entropies, divergences, and inequality gaps.
//! - [`hypergraph`]: the weighted hypergraph, degrees, restrictions.
//! - [`builders`]: subgraph-copy and arithmetic-progression hypergraphs.
//! - [`variational`]: the constrained minimization and its certificates.
//! - [`oracle`]: exact enumeration, Monte Carlo, and tilting oracles.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable default
//! features and enable `libm` for freestanding targets.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("lowertail-core needs either the `std` or the `libm` feature");

pub mod builders;
pub mod entropy;
pub mod hypergraph;
mod math;
pub mod oracle;
pub mod rng;
pub mod variational;

pub use entropy::{BernoulliParam, FiniteDistribution, JointBinaryDistribution};
pub use hypergraph::{ProductMeasure, VertexSet, WeightedHypergraph};
pub use variational::{SolveStatus, TailSpec, VariationalSolution};

use alloc::boxed::Box;
use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its domain.
    InvalidParameter(&'static str),
    /// A probability vector violates its invariants.
    InvalidDistribution(&'static str),
    /// Two distributions that must share a support do not.
    SupportMismatch { left: usize, right: usize },
    /// `P` puts mass where `Q` does not (KL divergence undefined).
    AbsoluteContinuity { index: usize },
    /// A hypergraph edge violates the construction invariants.
    InvalidEdge(&'static str),
    /// An exact computation would exceed its stated budget.
    BudgetExceeded {
        what: &'static str,
        limit: u64,
        requested: u64,
    },
    /// Conditioning event has probability zero.
    ZeroProbabilityConditioning,
    /// Tilting measure is not feasible for the shrunk constraint.
    InfeasibleTilt { constraint: f64, threshold: f64 },
    /// The tilted event has empirical probability zero.
    VacuousCertificate,
    /// The solver failed to converge; carries the best iterate found.
    NonConvergence(Box<VariationalSolution>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::SupportMismatch { left, right } => {
                write!(f, "support sizes differ: {left} vs {right}")
            }
            Error::AbsoluteContinuity { index } => {
                write!(f, "absolute continuity violated at index {index}")
            }
            Error::InvalidEdge(msg) => write!(f, "invalid edge: {msg}"),
            Error::BudgetExceeded {
                what,
                limit,
                requested,
            } => write!(
                f,
                "instance too large: {what} needs {requested} > budget {limit}"
            ),
            Error::ZeroProbabilityConditioning => {
                write!(f, "conditioning event has probability zero")
            }
            Error::InfeasibleTilt {
                constraint,
                threshold,
            } => write!(
                f,
                "tilting measure infeasible: f(q*) = {constraint} > {threshold}"
            ),
            Error::VacuousCertificate => write!(f, "certificate vacuous: no tilted mass observed"),
            Error::NonConvergence(best) => write!(
                f,
                "solver did not converge: best residual {}",
                best.kkt_residual
            ),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
