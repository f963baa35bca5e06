//! Decoherence-free subspaces of a driven atom-cavity system with collective
//! three-level dynamics.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: the permutationally symmetric three-mode Fock sector and dense
//!   matrices for bilinear and collective operators.
//! * [`dfs`]: the non-unitary diagonalisation of the jump operator, its
//!   biorthogonal eigenstate families and the enumeration of every DFS.
//! * [`lindblad`]: jump operator and Hamiltonian assembly, the fixed-step RK4
//!   master-equation integrator and purity/overlap diagnostics.
//! * [`protocols`]: quench, ramp and shortcut control schedules, the
//!   physical-to-effective parameter map and minimum-time searches.
//! * [`shells`]: `J²` shell decomposition, final-state prediction and quantum
//!   Fisher information.
//!
//! `ħ = 1` throughout and rates are expressed in the same unit as `Γ_c`.

// Validation uses `!(x <= tol)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dfs;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod lindblad;
pub mod protocols;
pub mod shells;

pub use dfs::{
    complementary_normalization, complementary_vector, coupling_set, derivative_overlap, dfs_dimension, dfs_frame,
    dfs_members, eigenstate_normalization, eigenstate_overlap, eigenstate_vector, jump_eigenvalue, transform_matrices,
    EigenstateLabel, ModeTransform, NormalizationValue,
};
pub use error::{Error, Result};
pub use fock::{
    bilinear_matrix, collective_operators, enumerate_basis, CollectiveOperators, Mode, OccupationVector,
    SymmetricBasis, SymmetricOperator,
};
pub use lindblad::{
    build_hamiltonian, build_jump, dfs_overlap, gram_schmidt, integrate, lindblad_rhs, purity, Controls, DensityState,
    Drive, EffectiveParams, IntegrationOptions, LiouvillianModel, Sample, TrajectoryRecord,
};
pub use protocols::{
    central_shortcut_schedule, edge_shortcut_schedule, initial_state, map_physical_params, meets_threshold,
    quench_schedule, ramp_schedule, search_min_time, EdgeTarget, PhysicalParams, ProtocolFamily, ProtocolSchedule,
    SearchOutcome, SearchSettings, SUCCESS_THRESHOLD,
};
pub use shells::{keff_x, predict_final_state, qfi, shell_basis, ShellBasis, ShellGenerator, ShellLabel};

/// Complex scalar used for every state and operator.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix on the symmetric sector.
pub type Matrix = nalgebra::DMatrix<C64>;
/// Dense complex state vector on the symmetric sector.
pub type StateVector = nalgebra::DVector<C64>;
