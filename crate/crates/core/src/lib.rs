//! Weak pre- and post-selected quantum measurements.
//!
//! Weak values, meter moments, pointer-response formulas in the linear,
//! nonlinear and inverted regimes, exact solutions for observables with two
//! eigenvalues, metrology helpers and brute-force verification oracles.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::too_many_arguments)]

pub mod error;
pub mod meters;
pub mod metrology;
pub mod oracle;
pub mod pps;
pub mod quantum_core;
pub mod scenarios;
pub mod selfcheck;
pub mod tol;
pub mod weak_values;

pub use error::{Error, Result};
