//! Jump-operator eigenstates `∝ (ĉ₁†)^{k₁}(ĉ₂†)^{k₂}(ĉ₃†)^{k₃}|0⟩` and their
//! complementary partners built from the `d̂†` modes.

use std::f64::consts::SQRT_2;

use crate::dfs::transform::{transform_matrices, ModeTransform};
use crate::error::{Error, Result};
use crate::fock::{ln_factorial, OccupationVector, SymmetricBasis};
use crate::{StateVector, C64};

/// An eigenstate index `k` together with the pump ratio it is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenstateLabel {
    pub k: OccupationVector,
    pub mu: f64,
}

impl EigenstateLabel {
    pub const fn new(k: OccupationVector, mu: f64) -> Self {
        Self { k, mu }
    }

    pub const fn charge(&self) -> i64 {
        self.k.charge()
    }

    pub const fn atoms(&self) -> usize {
        self.k.total()
    }
}

/// `√Γ_c [√2 μ (k₁ − k₃) + χ]`.
///
/// The complementary state with the same index is an eigenstate of `L†` with
/// the conjugate of this value.
pub fn jump_eigenvalue(k: OccupationVector, mu: f64, chi: f64, gamma_c: f64) -> C64 {
    jump_eigenvalue_complex(k, mu, C64::new(chi, 0.0), gamma_c)
}

pub fn jump_eigenvalue_complex(k: OccupationVector, mu: f64, chi: C64, gamma_c: f64) -> C64 {
    let shift = SQRT_2 * mu * (k.k1 as f64 - k.k3 as f64);
    (chi + shift) * gamma_c.sqrt()
}

/// Expands `Π_i (Σ_a f_i[a] b_a†)^{k_i} |0⟩` in the occupation basis without
/// normalising. `forms[i]` holds the bare-mode coefficients of the `i`-th
/// creation operator.
pub fn expand_product(basis: &SymmetricBasis, forms: &[[f64; 3]; 3], k: OccupationVector) -> Result<StateVector> {
    let n = basis.atoms();
    k.check_total(n)?;
    let side = n + 1;
    // Polynomial coefficients of b₋₁^a b₀^b b₁^(deg−a−b), indexed [a * side + b].
    let mut poly = vec![0.0f64; side * side];
    poly[0] = 1.0;
    let mut degree = 0usize;
    for (form, &power) in forms.iter().zip(k.as_array().iter()) {
        for _ in 0..power {
            let mut next = vec![0.0f64; side * side];
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let c = poly[a * side + b];
                    if c == 0.0 {
                        continue;
                    }
                    next[(a + 1) * side + b] += form[0] * c;
                    next[a * side + b + 1] += form[1] * c;
                    next[a * side + b] += form[2] * c;
                }
            }
            poly = next;
            degree += 1;
        }
    }
    let mut v = StateVector::zeros(basis.dim());
    for (i, s) in basis.states().iter().enumerate() {
        let c = poly[s.k1 * side + s.k2];
        if c != 0.0 {
            // (b†)^n |0⟩ = √(n!) |n⟩
            let scale = (0.5 * s.ln_factorial_product()).exp();
            v[i] = C64::new(c * scale, 0.0);
        }
    }
    if v.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::Overflow { k, mu: f64::NAN });
    }
    Ok(v)
}

fn creation_forms(t: &ModeTransform) -> [[f64; 3]; 3] {
    [t.creation_column(0), t.creation_column(1), t.creation_column(2)]
}

fn dual_forms(t: &ModeTransform) -> [[f64; 3]; 3] {
    [t.dual_row(0), t.dual_row(1), t.dual_row(2)]
}

/// Unnormalised eigenstate; its Euclidean norm is `1/𝒩_k`.
pub fn raw_eigenstate(basis: &SymmetricBasis, label: EigenstateLabel) -> Result<StateVector> {
    let t = transform_matrices(label.mu)?;
    expand_product(basis, &creation_forms(&t), label.k).map_err(|e| with_mu(e, label.mu))
}

/// Unnormalised complementary state; its Euclidean norm is `1/𝒩ⁿ⊥`.
pub fn raw_complementary(basis: &SymmetricBasis, label: EigenstateLabel) -> Result<StateVector> {
    let t = transform_matrices(label.mu)?;
    expand_product(basis, &dual_forms(&t), label.k).map_err(|e| with_mu(e, label.mu))
}

fn with_mu(e: Error, mu: f64) -> Error {
    match e {
        Error::Overflow { k, .. } => Error::Overflow { k, mu },
        other => other,
    }
}

fn normalized(v: StateVector, k: OccupationVector, mu: f64) -> Result<StateVector> {
    let norm = v.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Overflow { k, mu });
    }
    Ok(v.unscale(norm))
}

/// Unit-norm eigenstate of the jump operator in the bare occupation basis.
pub fn eigenstate_vector(basis: &SymmetricBasis, label: EigenstateLabel) -> Result<StateVector> {
    normalized(raw_eigenstate(basis, label)?, label.k, label.mu)
}

/// Unit-norm complementary state, an eigenstate of the adjoint jump operator.
pub fn complementary_vector(basis: &SymmetricBasis, label: EigenstateLabel) -> Result<StateVector> {
    normalized(raw_complementary(basis, label)?, label.k, label.mu)
}

/// The four complementary indices a single-quantum hop away from `k`, each
/// paired with the slot `p` that gained the quantum.
pub fn coupling_set(k: OccupationVector) -> Vec<(OccupationVector, usize)> {
    [(0, 1), (1, 0), (1, 2), (2, 1)].into_iter().filter_map(|(from, to)| k.shifted(from, to).map(|n| (n, to))).collect()
}

/// Closed form of `⟨ψⁿ⊥|∂_t ψ_k⟩` for a ramp with rate `mu_dot`, with both
/// states normalised.
///
/// Returns `None` when `n` lies in the same DFS as `k`, where the closed form
/// does not apply.
pub fn derivative_overlap(n: OccupationVector, k: OccupationVector, mu: f64, mu_dot: f64) -> Result<Option<f64>> {
    if n.total() != k.total() {
        return Err(Error::InvalidOccupation { k: n, n: k.total() });
    }
    if n.charge() == k.charge() {
        return Ok(None);
    }
    let Some(&(_, p)) = coupling_set(k).iter().find(|(m, _)| *m == n) else {
        return Ok(Some(0.0));
    };
    let norm_k = super::eigenstate_normalization(EigenstateLabel::new(k, mu))?;
    let norm_n = super::complementary_normalization(EigenstateLabel::new(n, mu))?;
    let n_p = n.as_array()[p] as f64;
    let ln_mag = norm_k.ln_value + norm_n.ln_value + k.ln_factorial_product();
    Ok(Some(-mu_dot / (SQRT_2 * mu) * ln_mag.exp() * n_p))
}

pub(crate) fn ln_binomial(n: usize, r: usize) -> f64 {
    ln_factorial(n) - ln_factorial(r) - ln_factorial(n - r)
}
