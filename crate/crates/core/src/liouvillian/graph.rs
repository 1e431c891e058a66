use serde::{Deserialize, Serialize};

use crate::level_system::{build_rotating_hamiltonian, SystemParams};
use crate::{CMatrix, Error, Result};

/// Incoherent population transfer `source → target` at `rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    pub source: usize,
    pub target: usize,
    pub rate: f64,
}

impl Decay {
    pub fn new(source: usize, target: usize, rate: f64) -> Self {
        Decay {
            source,
            target,
            rate,
        }
    }
}

/// States, rotating-frame Hamiltonian and decay channels of a driven atom.
///
/// Coherence damping is not stored: it follows from the decays by the
/// half-sum rule, `ρ_{ij}` decaying at `(Γ_i + Γ_j)/2` with `Γ_i` the total
/// rate out of state `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    hamiltonian: CMatrix,
    decays: Vec<Decay>,
}

const HERMITIAN_TOLERANCE: f64 = 1e-12;

impl CouplingGraph {
    pub fn new(hamiltonian: CMatrix, decays: Vec<Decay>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: hamiltonian.ncols(),
            });
        }
        if d == 0 {
            return Err(Error::param("hamiltonian", "graph needs at least one state"));
        }
        let scale = hamiltonian.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut deviation: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                deviation = deviation.max((hamiltonian[(i, j)] - hamiltonian[(j, i)].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NonHermitian(deviation));
        }
        for decay in &decays {
            let reason = if decay.source >= d || decay.target >= d {
                Some(format!("state index out of range for d = {d}"))
            } else if decay.source == decay.target {
                Some("source and target coincide".to_string())
            } else if !(decay.rate >= 0.0 && decay.rate.is_finite()) {
                Some(format!("rate must be finite and >= 0, got {}", decay.rate))
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(Error::InvalidDecay {
                    source_state: decay.source,
                    target: decay.target,
                    reason,
                });
            }
        }
        Ok(CouplingGraph {
            hamiltonian,
            decays,
        })
    }

    pub fn n_states(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn decays(&self) -> &[Decay] {
        &self.decays
    }

    /// Total population outflow `Γ_i` of every state.
    pub fn outflow_rates(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_states()];
        for decay in &self.decays {
            out[decay.source] += decay.rate;
        }
        out
    }

    /// Damping rate of the coherence `ρ_{ij}`.
    pub fn dephasing_rate(&self, i: usize, j: usize) -> f64 {
        let out = self.outflow_rates();
        0.5 * (out[i] + out[j])
    }
}

/// The N-LCΛS with the adjacent-decay model: every excited level `m` decays to
/// `m-1` and `m+1` at `γ` per channel, and every ground level relaxes to each
/// existing ground neighbour `l±2` at `γ'` per channel.
pub fn cascaded_lambda_graph(params: &SystemParams) -> Result<CouplingGraph> {
    let n = params.n_levels();
    let mut decays = Vec::new();
    // 0-based offsets: excited levels sit at odd offsets.
    for e in (1..n).step_by(2) {
        decays.push(Decay::new(e, e - 1, params.gamma()));
        decays.push(Decay::new(e, e + 1, params.gamma()));
    }
    for g in (0..n).step_by(2) {
        if g >= 2 {
            decays.push(Decay::new(g, g - 2, params.gamma_prime()));
        }
        if g + 2 < n {
            decays.push(Decay::new(g, g + 2, params.gamma_prime()));
        }
    }
    CouplingGraph::new(build_rotating_hamiltonian(params), decays)
}
