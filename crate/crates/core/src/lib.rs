//! Numerical model of atoms driven into a cascaded-Λ ladder by two Raman fields.
//!
//! The crate covers the chain of computations from the rotating-frame
//! Hamiltonian to the harmonic peaks of the ground-manifold coherence spectrum:
//!
//! - [`level_system`]: parameters, level indexing and the rotating-frame Hamiltonian.
//! - [`liouvillian`]: the vectorized master-equation generator, its steady state
//!   and an adaptive time propagator used to cross-check the solver.
//! - [`effective`]: the reduced ground-manifold dynamics with imaginary hopping
//!   `iJ_o` and the closed-form steady-state coherences for N = 3, 5, 7.
//! - [`rates`]: multi-photon transition-rate amplitudes from perturbation theory.
//! - [`spectrum`]: δ-peak weights, height ratios, log-linear fits and broadened curves.
//! - [`rb85`]: the 16 Zeeman-state ⁸⁵Rb F=3 ↔ F'=4 model and its 13-level truncation.
//!
//! All rates and frequencies are angular frequencies in rad/µs internally; see
//! [`units`] for the MHz conversion used at I/O boundaries.

// Guards like `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod level_system;
pub mod liouvillian;
pub mod rates;
pub mod rb85;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;
