use nalgebra::DVector;

use crate::{CMatrix, Error, Result, C64};

use super::density::DensityMatrix;
use super::generator::{unvectorize, vec_index, vectorize, GeneratorMatrix};

/// Residual bound `‖L ρ‖₂ ≤ RESIDUAL_TOLERANCE · scale(L) · ‖ρ‖₂`, where
/// `scale(L)` is the largest entry magnitude of the generator.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Pivot ratio below which the bordered system is treated as singular.
const PIVOT_RATIO_FLOOR: f64 = 1e-13;

/// Relative singular-value cut used to estimate the null-space dimension.
const NULL_SPACE_CUT: f64 = 1e-10;

/// Unique trace-one solution of `L ρ = 0`.
///
/// The row of `L` belonging to `ρ[0, 0]` is replaced by the trace functional
/// (valid because the diagonal rows of a trace-preserving generator sum to
/// zero), the square system is solved by LU with one refinement step, and the
/// residual is checked against the unmodified `L`.
pub fn steady_state(generator: &GeneratorMatrix) -> Result<DensityMatrix> {
    let d = generator.n_states();
    let dim = generator.dim();
    let l = generator.matrix();
    let scale = generator.scale().max(f64::MIN_POSITIVE);

    let mut bordered = l.clone();
    for col in 0..dim {
        bordered[(0, col)] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        bordered[(0, vec_index(i, i, d))] = C64::new(scale, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(dim);
    rhs[0] = C64::new(scale, 0.0);

    let lu = bordered.clone().lu();
    let pivots = lu.u().diagonal();
    let max_pivot = pivots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_pivot = pivots.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > PIVOT_RATIO_FLOOR * max_pivot) {
        let null_dim = null_space_dimension(l);
        if null_dim != 1 {
            return Err(Error::DegenerateSteadyState { null_dim });
        }
    }
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateSteadyState {
            null_dim: null_space_dimension(l),
        })?;
    let correction = lu.solve(&(&rhs - &bordered * &x));
    if let Some(dx) = correction {
        x += dx;
    }

    let mut rho = unvectorize(&x, d);
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let trace = rho.trace();
    rho /= trace;

    let residual = (l * vectorize(&rho)).norm();
    let bound = RESIDUAL_TOLERANCE * scale * rho.norm();
    if !(residual <= bound) {
        let null_dim = null_space_dimension(l);
        if null_dim > 1 {
            return Err(Error::DegenerateSteadyState { null_dim });
        }
        return Err(Error::ResidualTooLarge {
            residual: residual / (scale * rho.norm()),
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    DensityMatrix::new(rho)
}

fn null_space_dimension(l: &CMatrix) -> usize {
    let sv = l.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s <= NULL_SPACE_CUT * max).count()
}
