//! Glauber-dynamics CSMA scheduling on interference graphs.
//!
//! The crate simulates the single-site GD-CSMA chain, computes its
//! product-form stationary law exactly over the enumerated schedule space,
//! builds the dependencies (Dobrushin) matrices that diagnose fast mixing,
//! and solves the throughput problem in primal, max-entropy dual and
//! complexity-constrained dual form.
//!
//! Modules:
//!
//! - [`graph`]: interference graphs, schedule enumeration, MIS / vertex cover.
//! - [`dynamics`]: the chain, its stationary distribution, simulation traces,
//!   mixing gaps and capacity-region membership.
//! - [`dependencies`]: total variation, the matrices `R`, `R^X`, `I`, the
//!   empirical estimator, operator norms and the Dobrushin condition.
//! - [`optimize`]: primal ascent, max-entropy dual, duality verification,
//!   the constrained dual and the auxiliary-function `ζ` iteration.
//! - [`cli`]: scenario sweeps and the batch commands behind the `gdcsma` binary.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dependencies;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod optimize;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
