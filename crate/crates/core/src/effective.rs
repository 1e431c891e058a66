//! Reduced dynamics of the ground manifold after eliminating the excited levels.
//!
//! The ground states `l = 1, 3, ..., N` form a tight-binding chain with
//! imaginary nearest-neighbour hopping `iJ_o`. Coherences evolve under the
//! non-Hermitian sandwich `i(ρ H_eff - H_eff† ρ)` plus damping, populations
//! under a pure rate equation. Everything is expressed in the rotating frame,
//! where the steady state is time independent.

use serde::{Deserialize, Serialize};

use crate::level_system::{alternating_detunings, check_level_count, rotating_energies, SystemParams};
use crate::liouvillian::{steady_state, vec_index, DensityMatrix, GeneratorMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Above this `Ω/γ` the adiabatic elimination is no longer trustworthy.
pub const ELIMINATION_WARN_RATIO: f64 = 0.05;

/// Closed forms for N = 7 are leading order in `J_o/γ'`; beyond this ratio
/// they are flagged as out of domain.
pub const LEADING_ORDER_LIMIT: f64 = 0.05;

/// Parameters of the reduced ground-manifold model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    n_levels: usize,
    j_o: f64,
    gamma_prime: f64,
    detunings: Vec<f64>,
}

impl EffectiveParams {
    pub fn new(n_levels: usize, j_o: f64, gamma_prime: f64, detunings: Vec<f64>) -> Result<Self> {
        check_level_count(n_levels)?;
        if !(j_o >= 0.0 && j_o.is_finite()) {
            return Err(Error::param("j_o", format!("must be finite and >= 0, got {j_o}")));
        }
        if !(gamma_prime > 0.0 && gamma_prime.is_finite()) {
            return Err(Error::param(
                "gamma_prime",
                format!("must be finite and > 0, got {gamma_prime}"),
            ));
        }
        if detunings.len() != n_levels - 1 || detunings.iter().any(|d| !d.is_finite()) {
            return Err(Error::param(
                "detunings",
                format!("expected {} finite values", n_levels - 1),
            ));
        }
        Ok(EffectiveParams {
            n_levels,
            j_o,
            gamma_prime,
            detunings,
        })
    }

    /// Equal-splitting detuning pattern with two-photon detuning `Δ`.
    pub fn with_two_photon_detuning(
        n_levels: usize,
        j_o: f64,
        gamma_prime: f64,
        delta: f64,
    ) -> Result<Self> {
        check_level_count(n_levels)?;
        Self::new(n_levels, j_o, gamma_prime, alternating_detunings(n_levels, delta))
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn n_ground(&self) -> usize {
        self.n_levels.div_ceil(2)
    }

    pub fn j_o(&self) -> f64 {
        self.j_o
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    /// Rotating-frame energies of the ground levels, in chain order.
    pub fn ground_energies(&self) -> Vec<f64> {
        rotating_energies(&self.detunings).into_iter().step_by(2).collect()
    }

    /// Population transfer rate `γ'^eff_{l,l'}` between odd labels.
    pub fn eff_pop_rate(&self, l: usize, l_prime: usize) -> f64 {
        if l.abs_diff(l_prime) == 2 {
            self.j_o + self.gamma_prime
        } else {
            0.0
        }
    }

    /// Extra coherence damping `γ̃^eff_{l,l'}` between odd labels.
    pub fn eff_coh_damp(&self, l: usize, l_prime: usize) -> f64 {
        let n = self.n_levels;
        let edge = |x: usize| (x == 1) as u32 + (x == n) as u32;
        let count = 4 - edge(l) - edge(l_prime);
        f64::from(count) * self.j_o / 2.0
    }
}

/// Reduced-model generator together with its non-Hermitian Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGenerator {
    params: EffectiveParams,
    hamiltonian: CMatrix,
    coupling: CMatrix,
    generator: GeneratorMatrix,
}

impl EffectiveGenerator {
    pub fn new(params: EffectiveParams) -> Self {
        let n = params.n_ground();
        let label = |k: usize| 2 * k + 1;
        let energies = params.ground_energies();
        let j = params.j_o();

        let coupling = hopping_matrix(n, C64::new(0.0, j));
        let mut hamiltonian = coupling.clone();
        for (k, e) in energies.iter().enumerate() {
            hamiltonian[(k, k)] += C64::new(*e, 0.0);
        }

        let outflow: Vec<f64> = (0..n)
            .map(|a| (0..n).map(|c| params.eff_pop_rate(label(a), label(c))).sum())
            .collect();
        let mut l = CMatrix::zeros(n * n, n * n);
        for b in 0..n {
            for a in 0..n {
                let row = vec_index(a, b, n);
                if a == b {
                    for c in 0..n {
                        let rate = params.eff_pop_rate(label(c), label(a));
                        if rate != 0.0 {
                            l[(row, vec_index(c, c, n))] += C64::new(rate, 0.0);
                        }
                    }
                    l[(row, row)] -= C64::new(outflow[a], 0.0);
                    continue;
                }
                // i(ρH - H†ρ) with H = H_d + iJK gives -i[H_d, ρ] - J(Kρ + ρK).
                let damp =
                    params.eff_coh_damp(label(a), label(b)) + 0.5 * (outflow[a] + outflow[b]);
                l[(row, row)] += C64::new(-damp, -(energies[a] - energies[b]));
                for c in neighbours(a, n) {
                    l[(row, vec_index(c, b, n))] -= C64::new(j, 0.0);
                }
                for c in neighbours(b, n) {
                    l[(row, vec_index(a, c, n))] -= C64::new(j, 0.0);
                }
            }
        }
        let generator = GeneratorMatrix::from_matrix(n, l)
            .expect("dimension is n_ground² by construction");
        EffectiveGenerator {
            params,
            hamiltonian,
            coupling,
            generator,
        }
    }

    pub fn params(&self) -> &EffectiveParams {
        &self.params
    }

    /// `H_eff = H_d + iJ_o K` on the ground chain.
    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    /// The hopping part `V_eff = iJ_o K`.
    pub fn coupling(&self) -> &CMatrix {
        &self.coupling
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }
}

fn neighbours(k: usize, n: usize) -> impl Iterator<Item = usize> {
    [k.checked_sub(1), (k + 1 < n).then_some(k + 1)].into_iter().flatten()
}

fn hopping_matrix(n: usize, amplitude: C64) -> CMatrix {
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        k[(i, i + 1)] = amplitude;
        k[(i + 1, i)] = amplitude;
    }
    k
}

/// Eliminates the excited levels of an N-LCΛS, `J_o = Ω²/γ`.
pub fn reduce(params: &SystemParams) -> Result<EffectiveGenerator> {
    let ratio = params.rabi() / params.gamma();
    if ratio > ELIMINATION_WARN_RATIO {
        log::warn!("Ω/γ = {ratio:.3e} exceeds {ELIMINATION_WARN_RATIO}; the reduced model may be inaccurate");
    }
    let eff = EffectiveParams::new(
        params.n_levels(),
        params.j_o(),
        params.gamma_prime(),
        params.detunings().to_vec(),
    )?;
    Ok(EffectiveGenerator::new(eff))
}

/// Unique trace-one steady state of the reduced dynamics, on the ground chain.
pub fn effective_steady_state(gen: &EffectiveGenerator) -> Result<DensityMatrix> {
    steady_state(gen.generator())
}

/// `ρ^R_{l,l'}` by odd labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCoherence {
    pub l: usize,
    pub l_prime: usize,
    pub value: C64,
}

/// Closed-form steady-state coherences of the reduced model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCoherences {
    pub n_levels: usize,
    pub pairs: Vec<PairCoherence>,
    /// True when the forms are only leading order in `J_o/γ'` (N = 7).
    pub leading_order: bool,
    /// False when a leading-order form is evaluated outside its domain.
    pub within_domain: bool,
}

impl ClosedFormCoherences {
    /// Coherence for the pair `(l, l')` with `l < l'`; the mirrored pair is
    /// the complex conjugate.
    pub fn get(&self, l: usize, l_prime: usize) -> Option<C64> {
        self.pairs.iter().find_map(|p| {
            if (p.l, p.l_prime) == (l, l_prime) {
                Some(p.value)
            } else if (p.l_prime, p.l) == (l, l_prime) {
                Some(p.value.conj())
            } else {
                None
            }
        })
    }
}

/// Analytic steady-state coherences for N = 3 and 5 (exact) and N = 7
/// (leading order in `J_o/γ'`, exact in `Δ`).
pub fn closed_form_coherences(
    n_levels: usize,
    j_o: f64,
    gamma_prime: f64,
    delta: f64,
) -> Result<ClosedFormCoherences> {
    let j = C64::new(j_o, 0.0);
    let g = C64::new(gamma_prime, 0.0);
    let d = C64::new(0.0, delta); // iΔ
    let pair = |l, l_prime, value| PairCoherence { l, l_prime, value };
    let (pairs, leading_order) = match n_levels {
        3 => (vec![pair(1, 3, -j / (g + 2.0 * j - d))], false),
        5 => {
            let den = 8.0 * j * j + 12.0 * j * g + 3.0 * g * g - 8.0 * d * (2.0 * j + g)
                + 4.0 * d * d;
            let r13 = -(4.0 / 3.0) * j * (2.0 * j + g - 2.0 * d) / den;
            let r15 = (8.0 / 3.0) * j * j / den;
            (vec![pair(1, 3, r13), pair(3, 5, r13), pair(1, 5, r15)], false)
        }
        7 => {
            let r13 = -j / (3.0 * g - 2.0 * d);
            let r35 = -j / (4.0 * g - 2.0 * d);
            let r15 = j * j * (7.0 * g - 4.0 * d)
                / (18.0 * g.powi(3) - 45.0 * g * g * d + 34.0 * g * d * d - 8.0 * d.powi(3));
            let r17 = -2.0 * j.powi(3) * (7.0 * g - 4.0 * d)
                / (18.0 * g.powi(4) - 99.0 * g.powi(3) * d + 169.0 * g * g * d * d
                    - 110.0 * g * d.powi(3)
                    + 24.0 * d.powi(4));
            (
                vec![
                    pair(1, 3, r13),
                    pair(3, 5, r35),
                    pair(5, 7, r13),
                    pair(1, 5, r15),
                    pair(3, 7, r15),
                    pair(1, 7, r17),
                ],
                true,
            )
        }
        other => return Err(Error::UnsupportedLevelCount(other)),
    };
    let within_domain = !leading_order || j_o / gamma_prime <= LEADING_ORDER_LIMIT;
    Ok(ClosedFormCoherences {
        n_levels,
        pairs,
        leading_order,
        within_domain,
    })
}

/// `‖P conj(V) P + V‖₂` with `P` the chain reflection `l ↦ N + 1 - l`.
pub fn anti_pt_defect_of(v: &CMatrix) -> f64 {
    let n = v.nrows();
    let reflected = CMatrix::from_fn(n, n, |i, j| v[(n - 1 - i, n - 1 - j)].conj());
    let defect = reflected + v;
    if n == 0 {
        return 0.0;
    }
    defect
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Anti-PT defect of the hopping part of `gen`.
pub fn anti_pt_defect(gen: &EffectiveGenerator) -> f64 {
    anti_pt_defect_of(gen.coupling())
}

/// Hermitian-hopping counterpart `J_o K` of `V_eff`, which breaks anti-PT.
pub fn hermitian_hopping(n_ground: usize, j_o: f64) -> CMatrix {
    hopping_matrix(n_ground, C64::new(j_o, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eff(n: usize, j: f64, gp: f64, delta: f64) -> EffectiveGenerator {
        EffectiveGenerator::new(EffectiveParams::with_two_photon_detuning(n, j, gp, delta).unwrap())
    }

    #[test]
    fn rate_tables() {
        let p = EffectiveParams::with_two_photon_detuning(5, 2.0, 0.5, 0.0).unwrap();
        assert_eq!(p.eff_pop_rate(1, 3), 2.5);
        assert_eq!(p.eff_pop_rate(3, 1), 2.5);
        assert_eq!(p.eff_pop_rate(1, 5), 0.0);
        assert_eq!(p.eff_coh_damp(1, 5), 2.0);
        assert_eq!(p.eff_coh_damp(1, 3), 3.0);
        assert_eq!(p.eff_coh_damp(3, 3), 4.0);
        let p3 = EffectiveParams::with_two_photon_detuning(3, 2.0, 0.5, 0.0).unwrap();
        assert_eq!(p3.eff_coh_damp(3, 1), 2.0);
    }

    #[test]
    fn zero_drive_is_pure_ground_relaxation() {
        let g = eff(5, 0.0, 0.3, 0.0);
        let rho = effective_steady_state(&g).unwrap();
        for k in 0..3 {
            assert!((rho.population(k) - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!(rho.get(0, 2).norm() < 1e-14);
    }

    #[test]
    fn matches_low_order_closed_forms() {
        let rho = effective_steady_state(&eff(3, 1.0, 1.0, 0.0)).unwrap();
        assert!((rho.get(0, 1) - C64::new(-1.0 / 3.0, 0.0)).norm() < 1e-12);
        let rho = effective_steady_state(&eff(5, 1.0, 1.0, 0.0)).unwrap();
        assert!((rho.get(0, 2) - C64::new(8.0 / 69.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn populations_do_not_see_coherences() {
        let g = eff(7, 0.7, 0.2, 0.1);
        let n = 4;
        let m = g.generator().matrix();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if b != c {
                        assert_eq!(m[(vec_index(a, a, n), vec_index(b, c, n))], C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let c = closed_form_coherences(3, 1.0, 1.0, 0.0).unwrap();
        assert!((c.get(1, 3).unwrap() + 1.0 / 3.0).norm() < 1e-15);
        let c = closed_form_coherences(5, 1e-6, 1.0, 0.0).unwrap();
        assert!((c.get(1, 3).unwrap().re / (-4e-6 / 9.0) - 1.0).abs() < 1e-5);
        let c = closed_form_coherences(7, 1e-3, 1.0, 0.0).unwrap();
        assert!((c.get(1, 7).unwrap().re / (-7e-9 / 9.0) - 1.0).abs() < 1e-12);
        assert!(c.leading_order && c.within_domain);
        assert!(!closed_form_coherences(7, 0.1, 1.0, 0.0).unwrap().within_domain);
        assert_eq!(
            closed_form_coherences(9, 1.0, 1.0, 0.0).unwrap_err(),
            Error::UnsupportedLevelCount(9)
        );
    }

    #[test]
    fn anti_pt() {
        for n in [3, 5, 7, 13] {
            let g = eff(n, 0.37, 1.0, 0.2);
            assert!(anti_pt_defect(&g) < 1e-14);
            assert!(anti_pt_defect_of(&hermitian_hopping(g.params().n_ground(), 0.37)) > 0.1);
        }
        assert_eq!(anti_pt_defect(&eff(5, 0.0, 1.0, 0.0)), 0.0);
    }
}
