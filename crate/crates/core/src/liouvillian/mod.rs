//! Rotating-frame master equation.
//!
//! A [`CouplingGraph`] lists the states, their rotating-frame Hamiltonian and
//! the incoherent population-transfer channels. [`build_generator`] turns it
//! into a [`GeneratorMatrix`] acting on column-stacked density matrices,
//! [`steady_state`] finds its unique trace-one null vector and [`propagate`]
//! integrates `dρ/dt = Lρ` as an independent cross-check.
//!
//! Vectorization convention (used everywhere in this crate): column stacking,
//! `vec(ρ)[i + j·d] = ρ[i, j]`.

mod density;
mod generator;
mod graph;
mod propagate;
mod steady;

pub use density::{DensityMatrix, GroundCoherences};
pub use generator::{build_generator, unvectorize, vec_index, vectorize, GeneratorMatrix};
pub use graph::{cascaded_lambda_graph, CouplingGraph, Decay};
pub use propagate::propagate;
pub use steady::{steady_state, RESIDUAL_TOLERANCE};

use std::io::{self, Write};

use crate::level_system::SystemParams;
use crate::{CMatrix, Result};

/// Steady state of the N-LCΛS with the adjacent-decay model.
pub fn chain_steady_state(params: &SystemParams) -> Result<DensityMatrix> {
    steady_state(&build_generator(&cascaded_lambda_graph(params)?))
}

/// Writes a complex matrix as CSV, one matrix row per line, with real and
/// imaginary parts interleaved: `re(a00),im(a00),re(a01),im(a01),...`.
pub fn write_interleaved_csv<W: Write>(matrix: &CMatrix, mut out: W) -> io::Result<()> {
    for i in 0..matrix.nrows() {
        let mut first = true;
        for j in 0..matrix.ncols() {
            let z = matrix[(i, j)];
            if !first {
                write!(out, ",")?;
            }
            first = false;
            write!(out, "{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
