//! Multi-photon transition rates `|1⟩ → |1+2n⟩` from time-dependent
//! perturbation theory.
//!
//! The rate is an on-shell δ-function `𝒲^(2n) δ(ω_{1+2n,1} - n δω_s)`; this
//! module returns the prefactor `𝒲^(2n)` together with the resonance frequency
//! instead of broadening the δ.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::level_system::{rotating_energies, SystemParams};
use crate::{Error, Result, C64};

/// Highest order with a detuned closed form.
pub const MAX_DETUNED_ORDER: usize = 3;

/// Relative tolerance (in units of `δω_s`) of the energy-conservation check.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// Photon order `2n`.
    pub order_2n: usize,
    /// Prefactor `𝒲^(2n)` of the δ-function.
    pub amplitude: f64,
    /// `n·δω_s`.
    pub resonance_frequency: f64,
    /// Whether `ω_{1+2n,1} = n δω_s` holds for the level energies used.
    pub resonant: bool,
}

/// Resonant limit `2π J_o^{2n} / γ'^{2n-2}`.
pub fn resonant_amplitude(params: &SystemParams, n: usize) -> Result<f64> {
    check_order(n)?;
    let ratio = params.j_o() / params.gamma_prime();
    Ok(TAU * params.j_o().powi(2) * ratio.powi(2 * n as i32 - 2))
}

/// Detuned amplitude `2π |Ω^{2n} / Π_{k=2}^{2n} (-E_k + iγ_k)|²` where
/// `E_k` are rotating-frame energies and `γ_k` is `γ` for excited and `γ'`
/// for ground intermediate levels.
pub fn detuned_amplitude(params: &SystemParams, energies: &[f64], n: usize) -> Result<f64> {
    check_order(n)?;
    if n > MAX_DETUNED_ORDER {
        return Err(Error::UnsupportedOrder {
            n,
            reason: format!("detuned rates are available up to n = {MAX_DETUNED_ORDER}"),
        });
    }
    if 2 * n + 1 > energies.len() {
        return Err(Error::UnsupportedOrder {
            n,
            reason: format!("level 1 + 2n = {} exceeds the chain length {}", 2 * n + 1, energies.len()),
        });
    }
    let mut denominator = C64::new(1.0, 0.0);
    for k in 2..=2 * n {
        let width = if k % 2 == 0 { params.gamma() } else { params.gamma_prime() };
        denominator *= C64::new(-energies[k - 1], width);
    }
    let numerator = params.rabi().powi(2 * n as i32);
    Ok(TAU * (numerator / denominator.norm()).powi(2))
}

/// `𝒲^(2n)` for the chain described by `params`.
///
/// `level_energies` optionally overrides the rotating-frame diagonal
/// (`N` values, the first being 0). When every energy vanishes the resonant
/// closed form is used and any `n ≥ 1` is accepted; otherwise `n ≤ 3` and
/// `1 + 2n ≤ N` are required.
pub fn transition_amplitude(
    params: &SystemParams,
    level_energies: Option<&[f64]>,
    n: usize,
) -> Result<RateResult> {
    check_order(n)?;
    let energies = match level_energies {
        Some(e) => {
            if e.len() != params.n_levels() {
                return Err(Error::DimensionMismatch {
                    expected: params.n_levels(),
                    actual: e.len(),
                });
            }
            e.to_vec()
        }
        None => rotating_energies(params.detunings()),
    };
    let all_zero = energies.iter().all(|e| *e == 0.0);
    let amplitude = if all_zero {
        resonant_amplitude(params, n)?
    } else {
        detuned_amplitude(params, &energies, n)?
    };
    let dws = params.delta_omega_s();
    // The rotating energy of ground level 1+2n is ω_{1+2n,1} - n δω_s.
    let resonant = all_zero
        || energies
            .get(2 * n)
            .is_some_and(|e| e.abs() <= RESONANCE_TOLERANCE * dws);
    Ok(RateResult {
        order_2n: 2 * n,
        amplitude,
        resonance_frequency: n as f64 * dws,
        resonant,
    })
}

/// `𝒲^(2n) / 𝒲^(2) = (J_o/γ')^{2n-2}` at resonance.
pub fn rate_ratio(params: &SystemParams, n: usize) -> Result<f64> {
    check_order(n)?;
    Ok((params.j_o() / params.gamma_prime()).powi(2 * n as i32 - 2))
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::UnsupportedOrder {
            n,
            reason: "order must be at least 1".to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonant_examples() {
        let p = SystemParams::resonant(7, 2.0, 8.0, 0.25, 1.0).unwrap();
        let j = p.j_o();
        let w1 = transition_amplitude(&p, None, 1).unwrap();
        assert!((w1.amplitude / (TAU * j * j) - 1.0).abs() < 1e-15);
        assert!(w1.resonant);
        let w2 = transition_amplitude(&p, None, 2).unwrap();
        assert!((w2.amplitude / (TAU * (j * j / 0.25).powi(2)) - 1.0).abs() < 1e-14);
        assert_eq!(w2.resonance_frequency, 2.0);
    }

    #[test]
    fn unit_lorentzian_center() {
        let p = SystemParams::resonant(3, 1.0, 1.0, 0.1, 1.0).unwrap();
        let a = detuned_amplitude(&p, &[0.0, 0.0, 0.0], 1).unwrap();
        assert!((a - TAU).abs() < 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let p = |j_over_gp: f64| SystemParams::resonant(7, j_over_gp.sqrt(), 1.0, 1.0, 1.0).unwrap();
        assert_eq!(rate_ratio(&p(0.3), 1).unwrap(), 1.0);
        assert!((rate_ratio(&p(0.1), 2).unwrap() - 0.01).abs() < 1e-15);
        assert!((rate_ratio(&p(0.5), 3).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn detuned_order_limits() {
        let p = SystemParams::with_two_photon_detuning(9, 1.0, 10.0, 1.0, 0.1, 1.0).unwrap();
        assert!(transition_amplitude(&p, None, 3).is_ok());
        assert!(matches!(
            transition_amplitude(&p, None, 4),
            Err(Error::UnsupportedOrder { n: 4, .. })
        ));
        let q = SystemParams::with_two_photon_detuning(5, 1.0, 10.0, 1.0, 0.1, 1.0).unwrap();
        assert!(transition_amplitude(&q, None, 3).is_err());
        // Resonant mode accepts any order, even past the chain end.
        let r = SystemParams::resonant(3, 1.0, 10.0, 1.0, 1.0).unwrap();
        assert!(transition_amplitude(&r, None, 5).is_ok());
        assert!(transition_amplitude(&r, None, 0).is_err());
    }

    #[test]
    fn off_resonant_final_level_is_flagged() {
        let p = SystemParams::with_two_photon_detuning(5, 1.0, 10.0, 1.0, 0.1, 1.0).unwrap();
        assert!(!transition_amplitude(&p, None, 1).unwrap().resonant);
        // Detuning only the excited level keeps the two-photon resonance.
        let q = SystemParams::new(5, 1.0, 10.0, 1.0, vec![0.3, 0.3, 0.0, 0.0], 1.0).unwrap();
        assert!(transition_amplitude(&q, None, 1).unwrap().resonant);
    }
}
