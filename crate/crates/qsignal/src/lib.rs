//! Classical and quantum equilibrium analysis of a two-type signaling game.
//!
//! The library has two halves that share one leaf-payoff table:
//!
//! * [`classical`] — the extensive-form signaling game, its normal form,
//!   pure Nash enumeration, and weak perfect Bayesian equilibrium.
//! * [`hilbert`], [`ewl`], [`qsignaling`], [`qpbe`] — the five-qubit
//!   quantization of the same game: Ψ-basis states, SU(2) strategy
//!   operators, payoff observables, the quantum normal form, and the
//!   quantum counterpart of weak perfect Bayesian equilibrium built on
//!   projective conditioning and best-response maximization.
//!
//! [`specfile`] and [`report`] back the `qsignal` CLI binary.

mod error;

pub mod classical;
pub mod ewl;
pub mod hilbert;
pub mod qpbe;
pub mod qsignaling;
pub mod report;
pub mod search;
pub mod specfile;

pub use error::{Error, Result};

/// Tolerance for algebraic identities (unitarity, idempotence, Hermiticity).
pub const TOL_ALG: f64 = 1e-12;
/// Tolerance for normalized quantities (norms, traces, probabilities).
pub const TOL_NORM: f64 = 1e-9;
/// Optimality tolerance for best-response gaps; absorbs grid-refinement error.
pub const TOL_OPT: f64 = 1e-7;
