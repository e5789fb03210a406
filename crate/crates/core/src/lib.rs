//! Numerical toolkit for quantum process matrices with arbitrary causal
//! structure and their exchangeable (de Finetti) decompositions.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: dense operators over labelled tensor factors, partial traces,
//!   factor permutations and superoperators in an orthonormal Hermitian basis.
//! * [`process`]: Choi operators, instruments, process matrices, the
//!   generalised Born rule and reduced processes.
//! * [`constraints`]: no-signalling residuals, product expectation constraints
//!   and their linearised forms.
//! * [`exchange`]: trial permutations, symmetrisation and the extendibility
//!   notions for sequences of multi-trial operators.
//! * [`definetti`]: i.i.d. mixtures, constrained dictionaries and nonnegative
//!   mixture fitting.
//! * [`bayes`]: outcome simulation and posterior updates over process
//!   hypotheses.
//! * [`suite`]: named constructions with their expected properties.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod bayes;
pub mod constraints;
pub mod definetti;
mod error;
pub mod exchange;
pub mod io;
pub mod linalg;
pub mod par;
pub mod process;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Absolute tolerance used on max-entry residuals unless a caller overrides it.
pub const DEFAULT_ATOL: f64 = 1e-9;

/// Dense complex matrix type used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
