use crate::{CMatrix, Error, Result, C64};

use super::graph::CouplingGraph;

/// Position of `ρ[i, j]` in the column-stacked vector of a `d × d` matrix.
#[inline]
pub fn vec_index(i: usize, j: usize, d: usize) -> usize {
    i + j * d
}

pub fn vectorize(rho: &CMatrix) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &nalgebra::DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Linear generator `L` with `d vec(ρ)/dt = L vec(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n_states: usize,
    matrix: CMatrix,
}

impl GeneratorMatrix {
    /// Wraps a `d² × d²` matrix. No physical checks are made here.
    pub fn from_matrix(n_states: usize, matrix: CMatrix) -> Result<Self> {
        let dim = n_states * n_states;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(GeneratorMatrix { n_states, matrix })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Vectorized dimension `d²`.
    pub fn dim(&self) -> usize {
        self.n_states * self.n_states
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Largest entry magnitude; sets the scale of residual tolerances.
    pub fn scale(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `L ρ` as a matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.n_states)
    }

    /// Row vector of the trace functional applied to `L`, i.e. `d tr ρ / dt`
    /// per input coordinate. Vanishes for a trace-preserving generator.
    pub fn trace_row(&self) -> Vec<C64> {
        let d = self.n_states;
        (0..self.dim())
            .map(|col| (0..d).map(|i| self.matrix[(vec_index(i, i, d), col)]).sum())
            .collect()
    }

    /// Eigenvalues from a complex Schur decomposition, sorted by decreasing
    /// real part (the steady-state eigenvalue 0 comes first).
    pub fn eigenvalues(&self) -> Vec<C64> {
        let (_, t) = self.matrix.clone().schur().unpack();
        let mut ev: Vec<C64> = t.diagonal().iter().copied().collect();
        ev.sort_by(|a, b| b.re.total_cmp(&a.re));
        ev
    }

    /// Slowest nonzero relaxation rate, `-Re λ₂`.
    pub fn spectral_gap(&self) -> f64 {
        self.eigenvalues().get(1).map_or(f64::INFINITY, |z| -z.re)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let sv = self.matrix.clone().svd(false, false).singular_values;
        let mut v: Vec<f64> = sv.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Assembles the master-equation generator of `graph`:
///
/// - coherent part `-i[H, ρ]`,
/// - damping of `ρ_{ij}` at `(Γ_i + Γ_j)/2`,
/// - feeding of `ρ_{tt}` by `rate · ρ_{ss}` for every decay `s → t`.
pub fn build_generator(graph: &CouplingGraph) -> GeneratorMatrix {
    let d = graph.n_states();
    let h = graph.hamiltonian();
    let out = graph.outflow_rates();
    let mut l = CMatrix::zeros(d * d, d * d);
    let minus_i = C64::new(0.0, -1.0);

    for j in 0..d {
        for i in 0..d {
            let col = vec_index(i, j, d);
            // -i (H ρ)_{aj} picks up H_{ai} ρ_{ij}.
            for a in 0..d {
                let h_ai = h[(a, i)];
                if h_ai != C64::new(0.0, 0.0) {
                    l[(vec_index(a, j, d), col)] += minus_i * h_ai;
                }
            }
            // +i (ρ H)_{ib} picks up ρ_{ij} H_{jb}.
            for b in 0..d {
                let h_jb = h[(j, b)];
                if h_jb != C64::new(0.0, 0.0) {
                    l[(vec_index(i, b, d), col)] -= minus_i * h_jb;
                }
            }
            l[(col, col)] -= C64::new(0.5 * (out[i] + out[j]), 0.0);
        }
    }
    for decay in graph.decays() {
        let s = decay.source;
        let t = decay.target;
        l[(vec_index(t, t, d), vec_index(s, s, d))] += C64::new(decay.rate, 0.0);
    }
    GeneratorMatrix { n_states: d, matrix: l }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::graph::Decay;

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let (ar, ac) = a.shape();
        let (br, bc) = b.shape();
        let mut k = CMatrix::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                for p in 0..br {
                    for q in 0..bc {
                        k[(i * br + p, j * bc + q)] = a[(i, j)] * b[(p, q)];
                    }
                }
            }
        }
        k
    }

    /// Independent construction from the Lindblad superoperator identity
    /// vec(AρB) = (Bᵀ ⊗ A) vec(ρ) with jump operators |t⟩⟨s|.
    fn kron_generator(graph: &CouplingGraph) -> CMatrix {
        let d = graph.n_states();
        let id = CMatrix::identity(d, d);
        let h = graph.hamiltonian();
        let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * C64::new(0.0, -1.0);
        for decay in graph.decays() {
            let mut jump = CMatrix::zeros(d, d);
            jump[(decay.target, decay.source)] = C64::new(1.0, 0.0);
            let jdj = jump.adjoint() * &jump;
            let r = C64::new(decay.rate, 0.0);
            l += (kron(&jump.conjugate(), &jump)
                - kron(&id, &jdj) * C64::new(0.5, 0.0)
                - kron(&jdj.transpose(), &id) * C64::new(0.5, 0.0))
                * r;
        }
        l
    }

    #[test]
    fn matches_kronecker_construction() {
        let d = 4;
        let mut h = CMatrix::zeros(d, d);
        let entries = [(0, 1, 0.3, 0.2), (1, 2, -0.7, 0.0), (0, 3, 0.1, -0.4), (2, 3, 0.5, 0.5)];
        for (i, j, re, im) in entries {
            h[(i, j)] = C64::new(re, im);
            h[(j, i)] = C64::new(re, -im);
        }
        for (i, e) in [0.0, 0.4, -0.2, 1.1].iter().enumerate() {
            h[(i, i)] = C64::new(*e, 0.0);
        }
        let decays = vec![
            Decay::new(1, 0, 1.3),
            Decay::new(3, 2, 0.4),
            Decay::new(2, 0, 0.2),
            Decay::new(0, 3, 0.05),
        ];
        let graph = CouplingGraph::new(h, decays).unwrap();
        let fast = build_generator(&graph);
        let oracle = kron_generator(&graph);
        let diff = (fast.matrix() - &oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14, "max deviation {diff}");
        assert!(fast.trace_row().iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn vectorization_is_column_major() {
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let v = vectorize(&m);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v[vec_index(i, j, 3)], m[(i, j)]);
            }
        }
        assert_eq!(unvectorize(&v, 3), m);
    }
}
