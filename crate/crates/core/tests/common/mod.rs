#![allow(dead_code)]

use cascade_core::effective::{effective_steady_state, EffectiveGenerator, EffectiveParams};
use cascade_core::level_system::SystemParams;
use cascade_core::liouvillian::{chain_steady_state, CouplingGraph, Decay};
use cascade_core::spectrum::{coherence_peaks, height_ratios, HeightRatios};
use cascade_core::{CMatrix, C64};
use rand::Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn crel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Height ratios of the full adjacent-decay chain.
pub fn full_ratios(params: &SystemParams) -> HeightRatios {
    let rho = chain_steady_state(params).unwrap();
    let peaks = coherence_peaks(&rho.chain_ground_block().unwrap(), params.delta_omega_s()).unwrap();
    height_ratios(&peaks).unwrap()
}

pub fn effective(n: usize, j_o: f64, gamma_prime: f64, delta: f64) -> EffectiveGenerator {
    EffectiveGenerator::new(
        EffectiveParams::with_two_photon_detuning(n, j_o, gamma_prime, delta).unwrap(),
    )
}

/// Height ratios of the reduced model with the equal-splitting detuning pattern.
pub fn effective_ratios(n: usize, j_o: f64, gamma_prime: f64, delta: f64) -> HeightRatios {
    let rho = effective_steady_state(&effective(n, j_o, gamma_prime, delta)).unwrap();
    height_ratios(&coherence_peaks(&rho.as_ground(), 1.0).unwrap()).unwrap()
}

/// `H_{2,1}` of the five-level system in closed form.
pub fn five_level_h21(j: f64, gp: f64, delta: f64) -> f64 {
    2.0 * j * j / ((gp + 2.0 * j).powi(2) + 4.0 * delta * delta)
}

/// Exact resonant steady-state coherences of the reduced seven-level model,
/// `(ρ13, ρ35, ρ15, ρ17)`, from a symbolic solution of its linear system.
pub fn seven_level_exact(j: f64, g: f64) -> (f64, f64, f64, f64) {
    let q = 14.0 * j * j + 36.0 * j * g + 9.0 * g * g;
    let r13 = -j * (7.0 * j * j + 12.0 * j * g + 3.0 * g * g) / ((2.0 * j + g) * q);
    let r35 = -j * (28.0 * j * j + 36.0 * j * g + 9.0 * g * g) / (4.0 * (2.0 * j + g) * q);
    let r15 = 7.0 * j * j / (2.0 * q);
    let r17 = -7.0 * j.powi(3) / ((2.0 * j + g) * q);
    (r13, r35, r15, r17)
}

/// `(H21, H31)` from [`seven_level_exact`].
pub fn seven_level_exact_ratios(j: f64, g: f64) -> (f64, f64) {
    let (r13, r35, r15, r17) = seven_level_exact(j, g);
    let w1 = 2.0 * r13 * r13 + r35 * r35;
    (2.0 * r15 * r15 / w1, r17 * r17 / w1)
}

/// Random graph with a decay ring (so the steady state is unique), a few
/// extra decays and a random Hermitian Hamiltonian.
pub fn random_graph<R: Rng>(rng: &mut R, d: usize) -> CouplingGraph {
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..d {
            if rng.gen_bool(0.5) {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
    }
    let mut decays: Vec<Decay> = (0..d)
        .map(|i| Decay::new(i, (i + 1) % d, rng.gen_range(0.2..1.0)))
        .collect();
    for _ in 0..d {
        let s = rng.gen_range(0..d);
        let t = rng.gen_range(0..d);
        if s != t {
            decays.push(Decay::new(s, t, rng.gen_range(0.0..1.0)));
        }
    }
    CouplingGraph::new(h, decays).unwrap()
}

/// Random density matrix `A A† / tr(A A†)`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    m / tr
}
