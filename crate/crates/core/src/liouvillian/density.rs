use crate::{CMatrix, Error, Result, C64};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Rotating-frame density matrix `ρ^R`, `ρ[i, j] = ⟨i|ρ|j⟩`.
///
/// Construction checks Hermiticity, unit trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, HERMITIAN_TOLERANCE, TRACE_TOLERANCE)
    }

    pub(crate) fn with_tolerances(
        matrix: CMatrix,
        hermitian_tol: f64,
        trace_tol: f64,
    ) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "matrix must be square and nonempty, got {}x{}",
                d,
                matrix.ncols()
            )));
        }
        let mut deviation: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > hermitian_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} differs from 1"
            )));
        }
        let rho = DensityMatrix { matrix };
        let min_eig = rho.min_eigenvalue();
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    /// Pure state `|k⟩⟨k|`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::IndexOutOfRange { index: k, n_levels: d });
        }
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Coherence block over the given states, in the given order.
    pub fn ground_block(&self, indices: &[usize]) -> Result<GroundCoherences> {
        for &i in indices {
            if i >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n_levels: self.dim(),
                });
            }
        }
        let n = indices.len();
        let block = CMatrix::from_fn(n, n, |a, b| self.matrix[(indices[a], indices[b])]);
        GroundCoherences::new(block)
    }

    /// Ground block of an N-LCΛS state (0-based offsets `0, 2, ..., N-1`).
    pub fn chain_ground_block(&self) -> Result<GroundCoherences> {
        let indices: Vec<usize> = (0..self.dim()).step_by(2).collect();
        self.ground_block(&indices)
    }

    /// The whole matrix viewed as ground-manifold coherences, for states that
    /// already live on the ground manifold only.
    pub fn as_ground(&self) -> GroundCoherences {
        GroundCoherences {
            matrix: self.matrix.clone(),
        }
    }
}

/// Density-matrix block on the ground manifold, ordered along the chain:
/// position `k` carries the label `l = 2k + 1`, and pairs `(k, k+n)` are the
/// coherences radiating at the `n`-th harmonic `n·δω_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundCoherences {
    matrix: CMatrix,
}

impl GroundCoherences {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        Ok(GroundCoherences { matrix })
    }

    pub fn n_ground(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `ρ^R_{l,l'}` by odd chain labels.
    pub fn by_label(&self, l: usize, l_prime: usize) -> Result<C64> {
        let n_levels = 2 * self.n_ground() - 1;
        for x in [l, l_prime] {
            if x == 0 || x > n_levels || x % 2 == 0 {
                return Err(Error::IndexOutOfRange { index: x, n_levels });
            }
        }
        Ok(self.matrix[((l - 1) / 2, (l_prime - 1) / 2)])
    }
}
