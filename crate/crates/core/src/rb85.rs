//! Zeeman-resolved ⁸⁵Rb D2 model: ground F = 3 (7 states) and excited
//! F' = 4 (9 states), driven by a σ⁺ and a π Raman field.
//!
//! Relative dipole strengths come from Clebsch–Gordan coefficients evaluated
//! exactly in rational arithmetic. The reduced dipole element is absorbed into
//! the Rabi frequency.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::level_system::SystemParams;
use crate::liouvillian::{
    build_generator, cascaded_lambda_graph, steady_state, CouplingGraph, Decay, DensityMatrix,
};
use crate::spectrum::{coherence_peaks, PeakSet};
use crate::{CMatrix, Error, Result, C64};

// ---------------------------------------------------------------------------
// Clebsch–Gordan coefficients

type Ratio = BigRational;

fn ratio_to_f64(r: &Ratio) -> f64 {
    r.to_f64().expect("coefficient magnitudes are at most 1")
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Largest doubled angular momentum accepted.
const MAX_TWICE_J: i64 = 200;

/// `⟨j1 m1; j2 m2 | j m⟩²` as an exact fraction, with every quantum number
/// passed doubled so half-integers are representable. Also returns the sign of
/// the amplitude.
fn cg_squared_doubled(
    j1: i64,
    m1: i64,
    j2: i64,
    m2: i64,
    j: i64,
    m: i64,
) -> Result<(Ratio, i32)> {
    let bad = |reason: &str| Err(Error::InvalidQuantumNumbers(reason.to_string()));
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if !(0..=MAX_TWICE_J).contains(&jj) {
            return bad("angular momentum out of supported range");
        }
        if mm.abs() > jj || (jj - mm) % 2 != 0 {
            return bad("projection must satisfy |m| <= j with j - m integral");
        }
    }
    if (j1 + j2 + j) % 2 != 0 {
        return bad("j1 + j2 + j must be integral");
    }
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 {
        return Ok((Ratio::zero(), 1));
    }
    // Undoubled integer combinations.
    let h = |x: i64| x / 2;
    let prefactor = Ratio::new(
        BigInt::from(j + 1)
            * factorial(h(j + j1 - j2))
            * factorial(h(j - j1 + j2))
            * factorial(h(j1 + j2 - j))
            * factorial(h(j + m))
            * factorial(h(j - m))
            * factorial(h(j1 - m1))
            * factorial(h(j1 + m1))
            * factorial(h(j2 - m2))
            * factorial(h(j2 + m2)),
        factorial(h(j1 + j2 + j) + 1),
    );
    let mut sum = Ratio::zero();
    for k in 0.. {
        let args = [
            h(j1 + j2 - j) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
            h(j - j2 + m1) + k,
            h(j - j1 - m2) + k,
        ];
        if args[..3].iter().any(|a| *a < 0) {
            break;
        }
        if args[3..].iter().any(|a| *a < 0) {
            continue;
        }
        let den = args.iter().fold(factorial(k), |acc, a| acc * factorial(*a));
        let sign = if k % 2 == 0 { 1 } else { -1 };
        sum += Ratio::new(BigInt::from(sign), den);
    }
    let sign = if sum.is_negative() { -1 } else { 1 };
    let square = &sum * &sum;
    Ok((prefactor * square, sign))
}

/// Signed Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | j m⟩` for integer
/// angular momenta.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64> {
    let d = |x: i32| 2 * i64::from(x);
    let (sq, sign) = cg_squared_doubled(d(j1), d(m1), d(j2), d(m2), d(j), d(m))?;
    Ok(f64::from(sign) * ratio_to_f64(&sq).sqrt())
}

/// Squared coefficient `|⟨F_g m_g; 1 q | F_e m_e⟩|²` of an E1 transition.
/// Zero unless `m_e = m_g + q`.
pub fn cg_weight(f_g: i32, m_g: i32, q: i32, f_e: i32, m_e: i32) -> Result<f64> {
    if !(-1..=1).contains(&q) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "photon helicity q must be -1, 0 or 1, got {q}"
        )));
    }
    let d = |x: i32| 2 * i64::from(x);
    let (sq, _) = cg_squared_doubled(d(f_g), d(m_g), 2, d(q), d(f_e), d(m_e))?;
    Ok(ratio_to_f64(&sq))
}

// ---------------------------------------------------------------------------
// Model

/// Hyperfine level with Zeeman splitting `splitting` per unit of `m_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanManifold {
    pub f: i32,
    pub splitting: f64,
}

impl ZeemanManifold {
    pub fn new(f: i32, splitting: f64) -> Result<Self> {
        if f < 0 || !splitting.is_finite() {
            return Err(Error::param("manifold", format!("need F >= 0 and finite splitting, got F = {f}")));
        }
        Ok(ZeemanManifold { f, splitting })
    }

    pub fn n_states(&self) -> usize {
        (2 * self.f + 1) as usize
    }

    pub fn m_values(&self) -> impl Iterator<Item = i32> {
        -self.f..=self.f
    }

    pub fn energy(&self, m: i32) -> f64 {
        f64::from(m) * self.splitting
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    SigmaMinus,
    Pi,
    SigmaPlus,
}

impl Polarization {
    pub fn q(self) -> i32 {
        match self {
            Polarization::SigmaMinus => -1,
            Polarization::Pi => 0,
            Polarization::SigmaPlus => 1,
        }
    }
}

/// A Raman field. Its frequency is `ω_line + detuning + frequency_offset`,
/// with `ω_line` the `m = 0 → m' = 0` transition frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    pub polarization: Polarization,
    pub rabi: f64,
    pub detuning: f64,
    pub frequency_offset: f64,
}

/// The assembled 16-state model.
#[derive(Debug, Clone, PartialEq)]
pub struct Rb85Model {
    pub graph: CouplingGraph,
    /// Ground states ordered by increasing `m_F`.
    pub ground_indices: Vec<usize>,
    /// Excited states ordered by increasing `m_F'`.
    pub excited_indices: Vec<usize>,
    /// Rotating-frame frequency subtracted from each state's energy.
    pub frames: Vec<f64>,
    pub delta_omega_s: f64,
}

impl Rb85Model {
    pub fn steady_state(&self) -> Result<DensityMatrix> {
        steady_state(&build_generator(&self.graph))
    }

    pub fn peaks(&self, rho: &DensityMatrix) -> Result<PeakSet> {
        coherence_peaks(&rho.ground_block(&self.ground_indices)?, self.delta_omega_s)
    }
}

const FRAME_TOLERANCE: f64 = 1e-9;

/// Builds the driven ground/excited model.
///
/// States are numbered ground first (`m_F = -F..F`), then excited. Each
/// excited state decays to every E1-allowed ground state at `γ·|CG|²`, and
/// adjacent ground Zeeman states exchange population at `γ'` both ways.
/// Each state is moved into the frame reached by following drive couplings
/// from the lowest ground state, which makes the Hamiltonian time independent
/// when the coupling graph has no closed loops.
pub fn build_full_model(
    ground: &ZeemanManifold,
    excited: &ZeemanManifold,
    drives: &[DriveField],
    gamma: f64,
    gamma_prime: f64,
) -> Result<Rb85Model> {
    if drives.len() != 2 {
        return Err(Error::InvalidDrives(format!("expected two drives, got {}", drives.len())));
    }
    if drives[0].polarization == drives[1].polarization {
        return Err(Error::InvalidDrives("drives share a polarization".to_string()));
    }
    let delta_omega_s = (drives[0].frequency_offset - drives[1].frequency_offset).abs();
    if !(delta_omega_s > 0.0 && delta_omega_s.is_finite()) {
        return Err(Error::InvalidDrives(
            "drives need distinct frequency offsets (δω_s)".to_string(),
        ));
    }
    for d in drives {
        if !(d.rabi >= 0.0 && d.rabi.is_finite() && d.detuning.is_finite()) {
            return Err(Error::InvalidDrives("rabi must be >= 0 and finite".to_string()));
        }
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    if !(gamma_prime >= 0.0 && gamma_prime.is_finite()) {
        return Err(Error::param("gamma_prime", format!("must be finite and >= 0, got {gamma_prime}")));
    }
    if (ground.f - excited.f).abs() > 1 || ground.f + excited.f == 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "no E1 transition between F = {} and F' = {}",
            ground.f, excited.f
        )));
    }

    let n_g = ground.n_states();
    let n_e = excited.n_states();
    let d = n_g + n_e;
    let g_idx = |m: i32| (m + ground.f) as usize;
    let e_idx = |m: i32| n_g + (m + excited.f) as usize;
    let mut energy = vec![0.0; d];
    for m in ground.m_values() {
        energy[g_idx(m)] = ground.energy(m);
    }
    for m in excited.m_values() {
        energy[e_idx(m)] = excited.energy(m);
    }

    // Drive edges (ground, excited, frequency, coupling).
    let mut edges = Vec::new();
    for drive in drives {
        let q = drive.polarization.q();
        let frequency = drive.detuning + drive.frequency_offset;
        for m in ground.m_values() {
            let m_e = m + q;
            if m_e.abs() > excited.f {
                continue;
            }
            let cg = clebsch_gordan(ground.f, m, 1, q, excited.f, m_e)?;
            if cg != 0.0 {
                edges.push((g_idx(m), e_idx(m_e), frequency, drive.rabi * cg));
            }
        }
    }

    let frames = assign_frames(d, &energy, &edges, delta_omega_s)?;
    let mut h = CMatrix::zeros(d, d);
    for s in 0..d {
        h[(s, s)] = C64::new(energy[s] - frames[s], 0.0);
    }
    for &(g, e, _, coupling) in &edges {
        h[(g, e)] += C64::new(coupling, 0.0);
        h[(e, g)] += C64::new(coupling, 0.0);
    }

    let mut decays = Vec::new();
    for m_e in excited.m_values() {
        for q in -1..=1 {
            let m_g = m_e - q;
            if m_g.abs() > ground.f {
                continue;
            }
            let w = cg_weight(ground.f, m_g, q, excited.f, m_e)?;
            if w > 0.0 {
                decays.push(Decay::new(e_idx(m_e), g_idx(m_g), gamma * w));
            }
        }
    }
    for m in -ground.f..ground.f {
        decays.push(Decay::new(g_idx(m), g_idx(m + 1), gamma_prime));
        decays.push(Decay::new(g_idx(m + 1), g_idx(m), gamma_prime));
    }

    Ok(Rb85Model {
        graph: CouplingGraph::new(h, decays)?,
        ground_indices: ground.m_values().map(g_idx).collect(),
        excited_indices: excited.m_values().map(e_idx).collect(),
        frames,
        delta_omega_s,
    })
}

fn assign_frames(
    d: usize,
    energy: &[f64],
    edges: &[(usize, usize, f64, f64)],
    scale: f64,
) -> Result<Vec<f64>> {
    let mut frames: Vec<Option<f64>> = vec![None; d];
    for root in 0..d {
        if frames[root].is_some() {
            continue;
        }
        frames[root] = Some(energy[root]);
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            let phi = frames[s].expect("queued states have frames");
            for &(g, e, freq, _) in edges {
                let (other, target) = if s == g {
                    (e, phi + freq)
                } else if s == e {
                    (g, phi - freq)
                } else {
                    continue;
                };
                match frames[other] {
                    None => {
                        frames[other] = Some(target);
                        queue.push_back(other);
                    }
                    Some(existing) if (existing - target).abs() > FRAME_TOLERANCE * scale => {
                        return Err(Error::InvalidDrives(
                            "drive couplings form a loop with no common rotating frame".to_string(),
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(frames.into_iter().map(|f| f.unwrap_or(0.0)).collect())
}

/// Parameters of the ⁸⁵Rb simulation in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rb85Params {
    pub rabi: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub ground_splitting: f64,
    pub excited_splitting: f64,
    pub delta_omega_s: f64,
    /// One-photon detuning shared by both fields.
    pub detuning: f64,
    /// Put the `δω_s` offset on the π field instead of the σ⁺ field.
    pub offset_on_pi: bool,
}

impl Rb85Params {
    /// γ = 2π·1.9 GHz, γ' = 2π·200 kHz, Ω = 8·10⁻³ γ and equal Zeeman
    /// splittings of 2π·2.34 MHz matching `δω_s`.
    pub fn reference() -> Self {
        let gamma = crate::units::mhz_to_angular(1900.0);
        let split = crate::units::mhz_to_angular(2.34);
        Rb85Params {
            rabi: 8e-3 * gamma,
            gamma,
            gamma_prime: crate::units::mhz_to_angular(0.2),
            ground_splitting: split,
            excited_splitting: split,
            delta_omega_s: split,
            detuning: 0.0,
            offset_on_pi: false,
        }
    }

    pub fn j_o(&self) -> f64 {
        self.rabi * self.rabi / self.gamma
    }

    pub fn drives(&self) -> [DriveField; 2] {
        let (sigma_offset, pi_offset) = if self.offset_on_pi {
            (0.0, self.delta_omega_s)
        } else {
            (self.delta_omega_s, 0.0)
        };
        [
            DriveField {
                polarization: Polarization::SigmaPlus,
                rabi: self.rabi,
                detuning: self.detuning,
                frequency_offset: sigma_offset,
            },
            DriveField {
                polarization: Polarization::Pi,
                rabi: self.rabi,
                detuning: self.detuning,
                frequency_offset: pi_offset,
            },
        ]
    }

    pub fn full_model(&self) -> Result<Rb85Model> {
        build_full_model(
            &ZeemanManifold::new(3, self.ground_splitting)?,
            &ZeemanManifold::new(4, self.excited_splitting)?,
            &self.drives(),
            self.gamma,
            self.gamma_prime,
        )
    }

    /// Chain parameters of the 13-level truncation.
    pub fn truncated_params(&self) -> Result<SystemParams> {
        SystemParams::resonant(13, self.rabi, self.gamma, self.gamma_prime, self.delta_omega_s)
    }
}

/// 13-level cascaded-Λ truncation (7 ground, 6 excited) with uniform `Ω` and
/// two decay channels per excited level.
pub fn build_truncated_13(params: &Rb85Params) -> Result<CouplingGraph> {
    cascaded_lambda_graph(&params.truncated_params()?)
}

/// Steady-state peaks of the 16-state model.
pub fn full_model_peaks(params: &Rb85Params) -> Result<PeakSet> {
    let model = params.full_model()?;
    let rho = model.steady_state()?;
    model.peaks(&rho)
}

/// Steady-state peaks of the 13-level truncation.
pub fn truncated_peaks(params: &Rb85Params) -> Result<PeakSet> {
    let rho = steady_state(&build_generator(&build_truncated_13(params)?))?;
    coherence_peaks(&rho.chain_ground_block()?, params.delta_omega_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_weights() {
        let cases = [
            ((-3, 1, -2), 1.0 / 28.0),
            ((-3, 0, -3), 0.25),
            ((0, 1, 1), 5.0 / 14.0),
            ((0, 0, 0), 4.0 / 7.0),
            ((2, -1, 1), 3.0 / 28.0),
            ((3, 0, 3), 0.25),
            ((1, 1, 2), 15.0 / 28.0),
        ];
        for ((m_g, q, m_e), want) in cases {
            let w = cg_weight(3, m_g, q, 4, m_e).unwrap();
            assert!((w - want).abs() < 1e-15, "({m_g},{q},{m_e}): {w} vs {want}");
        }
        assert_eq!(cg_weight(3, 3, 1, 4, 4).unwrap(), 1.0);
        assert_eq!(cg_weight(3, 0, 1, 4, 2).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_quantum_numbers() {
        assert!(cg_weight(3, 4, 0, 4, 4).is_err());
        assert!(cg_weight(3, 0, 2, 4, 2).is_err());
        assert!(cg_weight(3, 0, 0, 4, 5).is_err());
        assert!(clebsch_gordan(-1, 0, 1, 0, 1, 0).is_err());
    }

    #[test]
    fn spin_half_coupling() {
        // ⟨1 0; 1 0 | 2 0⟩ = √(2/3), ⟨1 1; 1 -1 | 0 0⟩ = 1/√3, ⟨1 0; 1 0 | 1 0⟩ = 0.
        assert!((clebsch_gordan(1, 0, 1, 0, 2, 0).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(clebsch_gordan(1, 0, 1, 0, 1, 0).unwrap(), 0.0);
        // Condon–Shortley: ⟨1 1; 1 -1 | 1 0⟩ = +1/√2.
        assert!((clebsch_gordan(1, 1, 1, -1, 1, 0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((clebsch_gordan(1, -1, 1, 1, 1, 0).unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn drive_validation() {
        let p = Rb85Params::reference();
        let g = ZeemanManifold::new(3, p.ground_splitting).unwrap();
        let e = ZeemanManifold::new(4, p.excited_splitting).unwrap();
        let mut drives = p.drives();
        drives[1].polarization = Polarization::SigmaPlus;
        assert!(matches!(
            build_full_model(&g, &e, &drives, p.gamma, p.gamma_prime),
            Err(Error::InvalidDrives(_))
        ));
        let mut drives = p.drives();
        drives[0].frequency_offset = 0.0;
        assert!(build_full_model(&g, &e, &drives, p.gamma, p.gamma_prime).is_err());
        assert!(build_full_model(&g, &e, &drives[..1], p.gamma, p.gamma_prime).is_err());
    }

    #[test]
    fn reference_model_structure() {
        let p = Rb85Params::reference();
        let model = p.full_model().unwrap();
        assert_eq!(model.graph.n_states(), 16);
        // J_o = 121.6 kHz.
        let j_khz = crate::units::angular_to_mhz(p.j_o()) * 1e3;
        assert!((j_khz - 121.6).abs() < 1e-9, "{j_khz}");
        let h = model.graph.hamiltonian();
        // Resonant: every driven state sits at zero rotating energy.
        for s in 0..16 {
            assert!(h[(s, s)].norm() < 1e-9, "state {s}: {}", h[(s, s)]);
        }
        // e(m'=-4) is not driven.
        let e_m4 = model.excited_indices[0];
        assert!((0..16).all(|s| s == e_m4 || h[(s, e_m4)] == C64::new(0.0, 0.0)));
        let out = model.graph.outflow_rates();
        for &e in &model.excited_indices {
            assert!((out[e] / p.gamma - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn undriven_model_relaxes_to_uniform_ground() {
        let mut p = Rb85Params::reference();
        p.rabi = 0.0;
        let model = p.full_model().unwrap();
        let rho = model.steady_state().unwrap();
        for &g in &model.ground_indices {
            assert!((rho.population(g) - 1.0 / 7.0).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_matches_generic_chain() {
        let p = Rb85Params::reference();
        let direct = cascaded_lambda_graph(&p.truncated_params().unwrap()).unwrap();
        assert_eq!(build_truncated_13(&p).unwrap(), direct);
    }
}
