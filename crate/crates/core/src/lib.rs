//! Bayesian and frequentist hypothesis testing for interferometric phase
//! detection.
//!
//! The crate models three measurements of a phase shift (homodyne detection of
//! a squeezed-coherent state, a Mach-Zehnder interferometer fed with coherent
//! light, and one fed with coherent plus squeezed-vacuum light), computes the
//! posterior probability of the "no shift" hypothesis for an observed outcome,
//! and compares it with a sampling-theory significance test to locate the
//! outcomes where the two verdicts disagree (the Lindley paradox).

pub mod bayes;
mod error;
pub mod homodyne;
pub mod mz;
pub mod numerics;
pub mod paradox;
pub mod sim;

pub use error::{Error, Result};
