//! Non-linear traces of Choquet type on finite direct sums of matrix
//! algebras and on AF algebras given by Bratteli diagrams.
//!
//! A trace is determined by an increasing function `α` on the dimension
//! scale (ranks of projections) and evaluated on a positive element through
//! its spectral projections. [`trace_engine`] holds the evaluation,
//! [`verifier`] checks the trace axioms and structure identities on seeded
//! random instances.

// NaN must fail these checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bratteli;
pub mod discrete_choquet;
mod error;
pub mod linalg;
pub mod multimatrix;
pub mod scale;
pub mod trace_engine;
pub mod verifier;

pub use error::{Error, Result};
