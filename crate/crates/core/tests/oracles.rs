//! Independent reference values: literal rate formulas written in bare level
//! energies, exact symbolic steady states and angular-momentum identities.

mod common;

use std::f64::consts::TAU;

use cascade_core::effective::{closed_form_coherences, effective_steady_state};
use cascade_core::level_system::{detunings_from_energies, raman_frequency, SystemParams};
use cascade_core::liouvillian::chain_steady_state;
use cascade_core::rates::{detuned_amplitude, rate_ratio, transition_amplitude};
use cascade_core::rb85::{cg_weight, clebsch_gordan};
use cascade_core::C64;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rates transcribed term by term in lab-frame quantities `ω_m`, `ω^s_n`.
fn literal_rate(n: usize, w: &[f64], ws: f64, dws: f64, rabi: f64, gamma: f64, gp: f64) -> f64 {
    let wab = |a: usize, b: usize| w[a - 1] - w[b - 1];
    let s = |k: usize| raman_frequency(k, ws, dws);
    let f1 = C64::new(s(1) - wab(2, 1), gamma);
    let f2 = C64::new(dws - wab(3, 1), gp);
    let f3 = C64::new(2.0 * s(1) - s(2) - wab(4, 1), gamma);
    let den = match n {
        1 => f1,
        2 => f3 * f2 * f1,
        3 => {
            let f4 = C64::new(2.0 * dws - wab(5, 1), gp);
            let f5 = C64::new(wab(1, 6) - 2.0 * s(2) + 3.0 * s(1), gamma);
            let f3b = C64::new(wab(1, 4) - s(2) + 2.0 * s(1), gamma);
            f5 * f4 * f3b * f2 * f1
        }
        _ => unreachable!(),
    };
    TAU * (rabi.powi(2 * n as i32) / den.norm()).powi(2)
}

#[test]
fn detuned_rates_match_literal_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // The literal forms subtract lab-frame energies of order ω_s, which costs
    // about ω_s·ε/|denominator| of relative precision.
    let (ws, dws) = (40.0, 2.34);
    for _ in 0..50 {
        // Near-resonant ladder with random level shifts.
        let mut w = vec![0.0; 7];
        for m in 2..=7 {
            let ideal = if m % 2 == 0 {
                ws + (m / 2) as f64 * dws
            } else {
                ((m - 1) / 2) as f64 * dws
            };
            w[m - 1] = ideal + rng.gen_range(-0.5..0.5);
        }
        let (rabi, gamma, gp) = (rng.gen_range(0.1..2.0), rng.gen_range(1.0..10.0), rng.gen_range(0.05..1.0));
        let det = detunings_from_energies(&w, ws, dws).unwrap();
        let p = SystemParams::new(7, rabi, gamma, gp, det, dws).unwrap();
        let energies = p.rotating_energies();
        for n in 1..=3 {
            let got = detuned_amplitude(&p, &energies, n).unwrap();
            let want = literal_rate(n, &w, ws, dws, rabi, gamma, gp);
            assert!(rel(got, want) < 1e-11, "n = {n}: {got} vs {want}");
        }
    }
}

#[test]
fn zero_detuning_rates_are_resonant_forms() {
    let p = SystemParams::resonant(7, 0.4, 3.0, 0.2, 1.0).unwrap();
    let j = p.j_o();
    let zeros = [0.0; 7];
    for n in 1..=3usize {
        let detuned = detuned_amplitude(&p, &zeros, n).unwrap();
        let closed = TAU * j.powi(2 * n as i32) / 0.2f64.powi(2 * n as i32 - 2);
        assert!(rel(detuned, closed) < 1e-12);
        let resonant = transition_amplitude(&p, None, n).unwrap().amplitude;
        assert!(rel(resonant, closed) < 1e-12);
        let w1 = transition_amplitude(&p, None, 1).unwrap().amplitude;
        assert!(rel(resonant / w1, rate_ratio(&p, n).unwrap()) < 1e-12);
    }
}

#[test]
fn five_level_unit_parameters() {
    let rho = effective_steady_state(&effective(5, 1.0, 1.0, 0.0)).unwrap();
    let r15 = rho.as_ground().by_label(1, 5).unwrap();
    assert!((r15 - C64::new(8.0 / 69.0, 0.0)).norm() < 1e-13);
    let c = closed_form_coherences(5, 1.0, 1.0, 0.0).unwrap();
    assert!((c.get(1, 5).unwrap() - C64::new(8.0 / 69.0, 0.0)).norm() < 1e-15);
}

#[test]
fn seven_level_matches_symbolic_solution() {
    for j in [1e-3, 0.05, 0.7, 3.0, 40.0] {
        let g = effective_steady_state(&effective(7, j, 1.0, 0.0)).unwrap().as_ground();
        let (r13, r35, r15, r17) = seven_level_exact(j, 1.0);
        for ((a, b), want) in [((1, 3), r13), ((3, 5), r35), ((5, 7), r13), ((1, 5), r15), ((3, 7), r15), ((1, 7), r17)] {
            let got = g.by_label(a, b).unwrap();
            assert!(crel(got, C64::new(want, 0.0)) < 1e-10, "J = {j}, ({a},{b}): {got} vs {want}");
        }
    }
}

#[test]
fn seven_level_leading_order_forms() {
    // The leading-order forms follow from the exact solution as J → 0.
    let j = 1e-7;
    let (r13, r35, r15, r17) = seven_level_exact(j, 1.0);
    let c = closed_form_coherences(7, j, 1.0, 0.0).unwrap();
    assert!(rel(c.get(1, 3).unwrap().re, r13) < 1e-5);
    assert!(rel(c.get(3, 5).unwrap().re, r35) < 1e-5);
    assert!(rel(c.get(1, 5).unwrap().re, r15) < 1e-5);
    assert!(rel(c.get(1, 7).unwrap().re, r17) < 1e-5);
    // Detuned forms agree with the reduced model at small J for any Δ.
    for delta in [-3.0, -0.4, 0.25, 2.0] {
        let j = 1e-6;
        let g = effective_steady_state(&effective(7, j, 1.0, delta)).unwrap().as_ground();
        let c = closed_form_coherences(7, j, 1.0, delta).unwrap();
        for (a, b) in [(1, 3), (3, 5), (5, 7), (1, 5), (3, 7), (1, 7)] {
            let err = crel(g.by_label(a, b).unwrap(), c.get(a, b).unwrap());
            assert!(err < 1e-4, "Δ = {delta}, ({a},{b}): {err}");
        }
    }
}

#[test]
fn three_level_full_model_approaches_closed_form() {
    let mut last = f64::INFINITY;
    for ratio in [1e-2, 1e-3, 1e-4] {
        let gamma = 1.0;
        let rabi = ratio * gamma;
        let j = rabi * rabi / gamma;
        let delta = 0.7 * j;
        let p = SystemParams::with_two_photon_detuning(3, rabi, gamma, j, delta, 1.0).unwrap();
        let rho = chain_steady_state(&p).unwrap();
        let want = -C64::new(j, 0.0) / C64::new(3.0 * j, -delta);
        let err = crel(rho.get(0, 2), want);
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-6, "{last}");
}

#[test]
fn thirteen_level_ground_populations() {
    let p = SystemParams::resonant(13, 1e-5, 1.0, 1e-3, 1.0).unwrap();
    let rho = chain_steady_state(&p).unwrap();
    for g in (0..13).step_by(2) {
        assert!((rho.population(g) - 1.0 / 7.0).abs() < 1e-8);
    }
}

#[test]
fn clebsch_gordan_orthogonality() {
    // Σ_{m1} ⟨j1 m1; j2 M-m1 | J M⟩⟨j1 m1; j2 M-m1 | J' M⟩ = δ_{JJ'}.
    for (j1, j2) in [(3i32, 1i32), (2, 2), (4, 1), (1, 1)] {
        for jj in (j1 - j2).abs()..=j1 + j2 {
            for jp in (j1 - j2).abs()..=j1 + j2 {
                for m in -jj.min(jp)..=jj.min(jp) {
                    let s: f64 = (-j1..=j1)
                        .filter(|m1| (m - m1).abs() <= j2)
                        .map(|m1| {
                            clebsch_gordan(j1, m1, j2, m - m1, jj, m).unwrap()
                                * clebsch_gordan(j1, m1, j2, m - m1, jp, m).unwrap()
                        })
                        .sum();
                    let want = if jj == jp { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-13, "j1={j1} j2={j2} J={jj} J'={jp} M={m}: {s}");
                }
            }
        }
    }
}

#[test]
fn excited_branching_sums_to_one() {
    for m_e in -4..=4 {
        let total: f64 = (-1..=1)
            .filter(|q: &i32| (m_e - q).abs() <= 3)
            .map(|q| cg_weight(3, m_e - q, q, 4, m_e).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-14, "m_e = {m_e}: {total}");
    }
}
