//! The effective master equation
//! `dρ/dt = −i[H, ρ] + LρL† − ½{L†L, ρ}` with `H = (Δ_c′/2κ) L†L`, its
//! fixed-step integration and the purity and DFS-overlap diagnostics.

mod integrator;
mod operators;
mod state;

pub use integrator::{
    integrate, integrate_converged, Drive, IntegrationOptions, Sample, TrajectoryRecord, RUN_INVARIANT_TOLERANCE,
};
pub use operators::{
    build_hamiltonian, build_jump, lindblad_rhs, Controls, Generator, LiouvillianModel, SparseOperator, Workspace,
};
pub use state::{purity, DensityState, EffectiveParams, HERMITIAN_TOLERANCE, POSITIVITY_TOLERANCE, TRACE_TOLERANCE};

pub use crate::linalg::gram_schmidt;

use crate::dfs::dfs_frame;
use crate::error::{Error, Result};
use crate::fock::SymmetricBasis;

/// `Σᵢ ⟨φᵢ|ρ|φᵢ⟩` over an orthonormal basis of the DFS with index `c` at
/// pump ratio `mu`. Reduces to the fidelity with the single member when the
/// DFS is one-dimensional.
pub fn dfs_overlap(rho: &DensityState, n: usize, c: i64, mu: f64) -> Result<f64> {
    let basis = SymmetricBasis::new(n)?;
    if rho.dim() != basis.dim() {
        return Err(Error::param("rho", format!("dimension {} does not match N = {n}", rho.dim())));
    }
    let frame = dfs_frame(&basis, c, mu)?;
    Ok(frame.iter().map(|v| rho.population(v)).sum())
}
