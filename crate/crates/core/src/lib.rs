//! Band-edge eigenvalue asymptotics for one-dimensional Schrödinger operators
//! `H = -d²/dx² + V(x, x/ε)` whose potential oscillates fast in `x/ε`, is
//! 1-periodic in the fast variable, has zero mean over the period and is
//! compactly supported in `x`.
//!
//! The crate has two halves that check each other:
//!
//! * [`asymptotics`] computes the constant `k₂ = ½∫⟨(P[V])²⟩dx`, decides
//!   whether an eigenvalue detaches from the spectral edge `0`, and predicts
//!   `λ(ε) ≈ -ε⁴k₂²`. It leans on [`potentials`], [`averaging`] and [`gauge`].
//! * [`solver`] finds the eigenvalue directly by shooting transfer matrices
//!   across the support and matching decaying exponential tails.
//!
//! [`harness`] ties both together into sweeps with deterministic CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod averaging;
pub mod error;
pub mod gauge;
pub mod harness;
pub mod potentials;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
