//! The non-unitary diagonalisation of the jump operator, its biorthogonal
//! eigenstate families and the decoherence-free subspaces they span.
//!
//! With `L = √Γ_c(J₋ + μ²J₊ + χ)` and `𝐋 = V D V⁻¹`, the eigenstates are
//! `ψ_k ∝ (ĉ₁†)^{k₁}(ĉ₂†)^{k₂}(ĉ₃†)^{k₃}|0⟩` with eigenvalue
//! `√Γ_c[√2μ(k₁ − k₃) + χ]`. They are dark exactly when `χ = √2μC` with
//! `C = k₃ − k₁`.

mod eigenstates;
mod normalization;
mod subspace;
mod transform;

pub use eigenstates::{
    complementary_vector, coupling_set, derivative_overlap, eigenstate_vector, expand_product, jump_eigenvalue,
    jump_eigenvalue_complex, raw_complementary, raw_eigenstate, EigenstateLabel,
};
pub use normalization::{
    complementary_normalization, eigenstate_normalization, eigenstate_overlap, first_mode_commutator,
    orthogonalized_modes, raw_overlap_closed_form, LogSigned, NormalizationValue, OrthogonalizedModes,
};
pub use subspace::{dfs_dimension, dfs_frame, dfs_members, member_vectors};
pub use transform::{single_particle_jump, transform_matrices, ModeTransform};
