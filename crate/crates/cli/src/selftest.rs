//! Quick in-process equivalence checks between the numerical solvers and the
//! closed forms. Random parameters come from the configured seed.

use std::f64::consts::TAU;

use cascade_core::effective::{
    anti_pt_defect, closed_form_coherences, effective_steady_state, EffectiveGenerator, EffectiveParams,
};
use cascade_core::level_system::SystemParams;
use cascade_core::liouvillian::chain_steady_state;
use cascade_core::rates::{detuned_amplitude, rate_ratio, resonant_amplitude};
use cascade_core::rb85::cg_weight;
use cascade_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn effective(n: usize, j: f64, gp: f64, delta: f64) -> Result<EffectiveGenerator, String> {
    EffectiveParams::with_two_photon_detuning(n, j, gp, delta)
        .map(EffectiveGenerator::new)
        .map_err(|e| e.to_string())
}

fn closed_vs_effective(rng: &mut ChaCha8Rng, n: usize, tol: f64) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let j = 10f64.powf(rng.gen_range(-3.0..2.0));
        let delta = rng.gen_range(-5.0..5.0);
        let rho = effective_steady_state(&effective(n, j, 1.0, delta)?).map_err(|e| e.to_string())?;
        let g = rho.as_ground();
        let c = closed_form_coherences(n, j, 1.0, delta).map_err(|e| e.to_string())?;
        for pair in &c.pairs {
            let got = g.by_label(pair.l, pair.l_prime).map_err(|e| e.to_string())?;
            worst = worst.max((got - pair.value).norm() / pair.value.norm());
        }
    }
    judge(worst, tol)
}

fn judge(worst: f64, tol: f64) -> Check {
    let msg = format!("max relative deviation {worst:.2e} (tolerance {tol:.0e})");
    if worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn three_level_full(rng: &mut ChaCha8Rng) -> Check {
    let rabi = 1e-3;
    let j = rabi * rabi;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let delta = rng.gen_range(-10.0..10.0) * j;
        let p = SystemParams::with_two_photon_detuning(3, rabi, 1.0, j, delta, 1.0).map_err(|e| e.to_string())?;
        let rho = chain_steady_state(&p).map_err(|e| e.to_string())?;
        let want = -C64::new(j, 0.0) / C64::new(3.0 * j, -delta);
        worst = worst.max((rho.get(0, 2) - want).norm() / want.norm());
    }
    judge(worst, 1e-2)
}

fn seven_level_leading_order() -> Check {
    let j = 1e-6;
    let g = effective_steady_state(&effective(7, j, 1.0, 0.0)?)
        .map_err(|e| e.to_string())?
        .as_ground();
    let c = closed_form_coherences(7, j, 1.0, 0.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for pair in &c.pairs {
        let got = g.by_label(pair.l, pair.l_prime).map_err(|e| e.to_string())?;
        worst = worst.max((got - pair.value).norm() / pair.value.norm());
    }
    judge(worst, 1e-4)
}

fn rates_at_resonance(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (rabi, gamma, gp) = (rng.gen_range(0.01..1.0), rng.gen_range(1.0..10.0), rng.gen_range(0.01..1.0));
        let p = SystemParams::resonant(7, rabi, gamma, gp, 1.0).map_err(|e| e.to_string())?;
        let w1 = resonant_amplitude(&p, 1).map_err(|e| e.to_string())?;
        for n in 1..=3 {
            let detuned = detuned_amplitude(&p, &[0.0; 7], n).map_err(|e| e.to_string())?;
            let closed = TAU * p.j_o().powi(2 * n as i32) / gp.powi(2 * n as i32 - 2);
            worst = worst.max((detuned / closed - 1.0).abs());
            let ratio = rate_ratio(&p, n).map_err(|e| e.to_string())?;
            let resonant = resonant_amplitude(&p, n).map_err(|e| e.to_string())?;
            worst = worst.max((resonant / w1 / ratio - 1.0).abs());
        }
    }
    judge(worst, 1e-12)
}

fn branching() -> Check {
    let mut worst = 0.0f64;
    for m_e in -4..=4 {
        let mut total = 0.0;
        for q in -1..=1i32 {
            if (m_e - q).abs() <= 3 {
                total += cg_weight(3, m_e - q, q, 4, m_e).map_err(|e| e.to_string())?;
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    judge(worst, 1e-12)
}

fn anti_pt() -> Check {
    let mut worst = 0.0f64;
    for n in [3, 5, 7, 13] {
        worst = worst.max(anti_pt_defect(&effective(n, 0.7, 1.0, 0.2)?));
    }
    judge(worst, 1e-14)
}

/// Runs every check, printing one line each. Returns the number of failures.
pub fn run(seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<(&str, Check)> = vec![
        ("three-level reduced vs closed form", closed_vs_effective(&mut rng, 3, 1e-10)),
        ("five-level reduced vs closed form", closed_vs_effective(&mut rng, 5, 1e-10)),
        ("seven-level reduced vs leading order", seven_level_leading_order()),
        ("three-level full model vs closed form", three_level_full(&mut rng)),
        ("resonant rates", rates_at_resonance(&mut rng)),
        ("branching ratios", branching()),
        ("anti-PT symmetry", anti_pt()),
    ];
    let mut failures = 0;
    for (name, result) in results {
        match result {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    failures
}
