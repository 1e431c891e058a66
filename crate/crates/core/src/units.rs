//! Unit convention.
//!
//! Every rate, detuning and splitting is stored as an angular frequency in
//! rad/µs. Configuration files and reports use ordinary frequency in MHz.
//! The two are related by `ω [rad/µs] = 2π · f [MHz]`; these helpers are the
//! only place that factor appears.

use std::f64::consts::TAU;

/// Converts an ordinary frequency in MHz to an angular frequency in rad/µs.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

/// Converts an angular frequency in rad/µs to an ordinary frequency in MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU
}
