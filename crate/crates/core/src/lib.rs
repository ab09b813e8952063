//! Quantum-illumination radar performance: Gaussian-state hypothesis
//! testing with a generic correlated source, classical benchmarks, and a
//! truncated-Fock brute-force verification oracle.
//!
//! Conventions used throughout: quadratures ordered (q_1..q_N, p_1..p_N),
//! vacuum variance 1/2, natural logs, equal priors (1/2, 1/2) in symmetric
//! bounds. Deep-tail probabilities are carried in log domain.

// Negated comparisons like `!(x > 0.0)` are used deliberately in argument
// guards: they reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;

pub use error::{Error, Result};
pub mod gaussian;
pub mod scenario;
pub mod specfun;
pub mod symmetric;
pub mod asymmetric;
pub mod classical;
pub mod fock;
pub mod verify;
