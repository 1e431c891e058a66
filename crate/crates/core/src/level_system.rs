//! Parameters, level indexing and the rotating-frame Hamiltonian of an
//! N-level cascaded-Λ system (N-LCΛS).
//!
//! Levels are labelled `m = 1..=N`. Odd `m` are ground Zeeman states and even
//! `m` are excited ones; neighbouring levels `m, m+1` are coupled by one of the
//! two Raman fields. The field driving `m → m+1` has frequency
//! `ω_s + δω_s` for odd `m` and `ω_s` for even `m`.

use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Ground,
    Excited,
}

/// A 1-based level label `m` in an N-level chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelIndex(usize);

impl LevelIndex {
    pub fn new(m: usize, n_levels: usize) -> Result<Self> {
        if m == 0 || m > n_levels {
            return Err(Error::IndexOutOfRange { index: m, n_levels });
        }
        Ok(LevelIndex(m))
    }

    pub fn m(self) -> usize {
        self.0
    }

    /// Zero-based position in matrices.
    pub fn offset(self) -> usize {
        self.0 - 1
    }

    pub fn parity(self) -> Parity {
        if self.0 % 2 == 1 {
            Parity::Ground
        } else {
            Parity::Excited
        }
    }
}

/// Physical parameters of an N-LCΛS. Immutable once constructed.
///
/// `detunings[k]` holds `Δ_{k+1}`, the detuning of the Raman field on the
/// `k+1 ↔ k+2` transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    n_levels: usize,
    rabi: f64,
    gamma: f64,
    gamma_prime: f64,
    detunings: Vec<f64>,
    delta_omega_s: f64,
}

pub(crate) fn check_level_count(n_levels: usize) -> Result<()> {
    if n_levels < 3 || n_levels.is_multiple_of(2) {
        return Err(Error::InvalidLevelCount(n_levels));
    }
    Ok(())
}

impl SystemParams {
    pub fn new(
        n_levels: usize,
        rabi: f64,
        gamma: f64,
        gamma_prime: f64,
        detunings: Vec<f64>,
        delta_omega_s: f64,
    ) -> Result<Self> {
        check_level_count(n_levels)?;
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(Error::param("rabi", format!("must be finite and >= 0, got {rabi}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be finite and > 0, got {gamma}")));
        }
        if !(gamma_prime > 0.0 && gamma_prime.is_finite()) {
            return Err(Error::param(
                "gamma_prime",
                format!("must be finite and > 0, got {gamma_prime}"),
            ));
        }
        if !(delta_omega_s > 0.0 && delta_omega_s.is_finite()) {
            return Err(Error::param(
                "delta_omega_s",
                format!("must be finite and > 0, got {delta_omega_s}"),
            ));
        }
        if detunings.len() != n_levels - 1 {
            return Err(Error::param(
                "detunings",
                format!("expected {} values, got {}", n_levels - 1, detunings.len()),
            ));
        }
        if detunings.iter().any(|d| !d.is_finite()) {
            return Err(Error::param("detunings", "all values must be finite"));
        }
        Ok(SystemParams {
            n_levels,
            rabi,
            gamma,
            gamma_prime,
            detunings,
            delta_omega_s,
        })
    }

    /// All Raman fields on resonance.
    pub fn resonant(
        n_levels: usize,
        rabi: f64,
        gamma: f64,
        gamma_prime: f64,
        delta_omega_s: f64,
    ) -> Result<Self> {
        check_level_count(n_levels)?;
        Self::new(n_levels, rabi, gamma, gamma_prime, vec![0.0; n_levels - 1], delta_omega_s)
    }

    /// Two-photon detuning `Δ` applied with the equal-splitting pattern of
    /// [`alternating_detunings`].
    pub fn with_two_photon_detuning(
        n_levels: usize,
        rabi: f64,
        gamma: f64,
        gamma_prime: f64,
        delta: f64,
        delta_omega_s: f64,
    ) -> Result<Self> {
        check_level_count(n_levels)?;
        Self::new(
            n_levels,
            rabi,
            gamma,
            gamma_prime,
            alternating_detunings(n_levels, delta),
            delta_omega_s,
        )
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn n_ground(&self) -> usize {
        self.n_levels.div_ceil(2)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn delta_omega_s(&self) -> f64 {
        self.delta_omega_s
    }

    /// Emergent dissipative hopping `J_o = Ω²/γ`.
    pub fn j_o(&self) -> f64 {
        self.rabi * self.rabi / self.gamma
    }

    /// Copy with a different Rabi frequency.
    pub fn with_rabi(&self, rabi: f64) -> Result<Self> {
        Self::new(
            self.n_levels,
            rabi,
            self.gamma,
            self.gamma_prime,
            self.detunings.clone(),
            self.delta_omega_s,
        )
    }

    /// Copy with different detunings.
    pub fn with_detunings(&self, detunings: Vec<f64>) -> Result<Self> {
        Self::new(
            self.n_levels,
            self.rabi,
            self.gamma,
            self.gamma_prime,
            detunings,
            self.delta_omega_s,
        )
    }

    /// Ground labels `1, 3, ..., N`.
    pub fn ground_levels(&self) -> impl Iterator<Item = LevelIndex> {
        (1..=self.n_levels).step_by(2).map(LevelIndex)
    }

    /// Rotating-frame diagonal `E_1 = 0, E_2, ..., E_N`.
    pub fn rotating_energies(&self) -> Vec<f64> {
        rotating_energies(&self.detunings)
    }

    /// Rotating-frame energy of level `m`: `Σ_{n<m} (-1)^{n+1} Δ_n`.
    pub fn rotating_energy(&self, m: LevelIndex) -> f64 {
        rotating_energies(&self.detunings)[m.offset()]
    }
}

/// Rotating-frame diagonal for a chain with the given detunings; the result
/// has one more entry than `detunings`.
pub(crate) fn rotating_energies(detunings: &[f64]) -> Vec<f64> {
    let mut energies = Vec::with_capacity(detunings.len() + 1);
    let mut acc = 0.0;
    energies.push(acc);
    for (k, d) in detunings.iter().enumerate() {
        // n = k + 1; (-1)^{n+1} is +1 for odd n.
        if k % 2 == 0 {
            acc += d;
        } else {
            acc -= d;
        }
        energies.push(acc);
    }
    energies
}

/// Detuning pattern for equal ground and excited Zeeman splittings: every
/// field leaving a ground state (odd `m`) carries `Δ`, the others carry 0.
/// Ground pair `(l, l+2n)` then has two-photon detuning `n·Δ`.
pub fn alternating_detunings(n_levels: usize, delta: f64) -> Vec<f64> {
    (1..n_levels)
        .map(|m| if m % 2 == 1 { delta } else { 0.0 })
        .collect()
}

/// Detunings `Δ_m = (-1)^m ω_{m,m+1} - ω^s_m` from bare level energies and
/// the two Raman frequencies `ω_s` and `ω_s + δω_s`.
pub fn detunings_from_energies(
    level_energies: &[f64],
    omega_s: f64,
    delta_omega_s: f64,
) -> Result<Vec<f64>> {
    check_level_count(level_energies.len())?;
    Ok((1..level_energies.len())
        .map(|m| {
            let w_mm1 = level_energies[m - 1] - level_energies[m];
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * w_mm1 - raman_frequency(m, omega_s, delta_omega_s)
        })
        .collect())
}

/// `ω^s_n`: `ω_s + δω_s` for odd `n`, `ω_s` for even `n`.
pub fn raman_frequency(n: usize, omega_s: f64, delta_omega_s: f64) -> f64 {
    if n % 2 == 1 {
        omega_s + delta_omega_s
    } else {
        omega_s
    }
}

/// Time-independent Hamiltonian in the rotating frame.
///
/// Diagonal: `Σ_{n<m} (-1)^{n+1} Δ_n`; off-diagonal: `Ω` on every `(m, m±1)`.
pub fn build_rotating_hamiltonian(params: &SystemParams) -> CMatrix {
    let n = params.n_levels();
    let energies = rotating_energies(params.detunings());
    let mut h = CMatrix::zeros(n, n);
    for (i, e) in energies.iter().enumerate() {
        h[(i, i)] = C64::new(*e, 0.0);
    }
    let rabi = C64::new(params.rabi(), 0.0);
    for i in 0..n - 1 {
        h[(i, i + 1)] = rabi;
        h[(i + 1, i)] = rabi;
    }
    h
}

fn phase_sum(m: LevelIndex, omega_s: f64, delta_omega_s: f64) -> f64 {
    (1..m.m())
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * raman_frequency(n, omega_s, delta_omega_s)
        })
        .sum()
}

/// Frequency `θ_{m,m'}` relating lab- and rotating-frame transition operators,
/// `σ_{m,m'}(t) = e^{-iθ_{m,m'} t} σ^R_{m,m'}(t)`.
///
/// `omega_s` only matters for pairs of opposite parity; for two ground states
/// `(l, l+2n)` the result is `n·δω_s`.
pub fn rotating_phase(
    m: LevelIndex,
    m_prime: LevelIndex,
    params: &SystemParams,
    omega_s: f64,
) -> Result<f64> {
    for idx in [m, m_prime] {
        if idx.m() > params.n_levels() {
            return Err(Error::IndexOutOfRange {
                index: idx.m(),
                n_levels: params.n_levels(),
            });
        }
    }
    let dws = params.delta_omega_s();
    Ok(phase_sum(m, omega_s, dws) - phase_sum(m_prime, omega_s, dws))
}
