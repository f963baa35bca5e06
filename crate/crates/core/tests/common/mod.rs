//! Independent reference constructions shared by the integration tests.
//! Nothing here calls into the closed forms under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

use std::f64::consts::SQRT_2;

use dfs_core::protocols::{central_shortcut_strength, edge_shortcut_drive, edge_shortcut_hamiltonian};
use dfs_core::{
    complementary_vector, coupling_set, derivative_overlap, eigenstate_vector, Controls, EdgeTarget, EigenstateLabel,
    LiouvillianModel, Matrix, OccupationVector, StateVector, SymmetricBasis, C64,
};

/// Sparse three-mode Fock state keyed by occupations `(n₋₁, n₀, n₁)`.
pub type FockPoly = BTreeMap<[usize; 3], f64>;

/// Applies `Σ_a coeffs[a] b_a†` with the usual `√(n+1)` factors.
pub fn create(state: &FockPoly, coeffs: [f64; 3]) -> FockPoly {
    let mut out = FockPoly::new();
    for (occ, amp) in state {
        for (a, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut next = *occ;
            next[a] += 1;
            *out.entry(next).or_insert(0.0) += amp * c * (next[a] as f64).sqrt();
        }
    }
    out
}

/// `Π_i (Σ_a forms[i][a] b_a†)^{k_i}|0⟩` by repeated creation.
pub fn product_state(forms: [[f64; 3]; 3], k: OccupationVector) -> FockPoly {
    let mut state = FockPoly::from([([0, 0, 0], 1.0)]);
    for (form, power) in forms.iter().zip(k.as_array()) {
        for _ in 0..power {
            state = create(&state, *form);
        }
    }
    state
}

pub fn to_vector(basis: &SymmetricBasis, poly: &FockPoly) -> StateVector {
    let mut v = StateVector::zeros(basis.dim());
    for (occ, amp) in poly {
        let idx = basis.index_of(OccupationVector::from_array(*occ)).expect("occupation in sector");
        v[idx] = C64::new(*amp, 0.0);
    }
    v
}

/// `V = diag(μ, μ², μ³)·U` written out by hand.
pub fn creation_matrix(mu: f64) -> [[f64; 3]; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = [[0.5, h, 0.5], [h, 0.0, -h], [0.5, -h, 0.5]];
    let scale = [mu, mu * mu, mu * mu * mu];
    let mut v = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            v[r][c] = scale[r] * u[r][c];
        }
    }
    v
}

/// Columns of `V`: bare coefficients of the eigen-creation operators.
pub fn eigen_forms(mu: f64) -> [[f64; 3]; 3] {
    let v = creation_matrix(mu);
    [0, 1, 2].map(|i| [v[0][i], v[1][i], v[2][i]])
}

/// Rows of `V⁻¹ = U·diag(1/μ, 1/μ², 1/μ³)` (U is its own inverse).
pub fn dual_forms(mu: f64) -> [[f64; 3]; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = [[0.5, h, 0.5], [h, 0.0, -h], [0.5, -h, 0.5]];
    let scale = [1.0 / mu, 1.0 / (mu * mu), 1.0 / (mu * mu * mu)];
    [0, 1, 2].map(|i| [0, 1, 2].map(|c| u[i][c] * scale[c]))
}

pub fn raw_eigen(basis: &SymmetricBasis, k: OccupationVector, mu: f64) -> StateVector {
    to_vector(basis, &product_state(eigen_forms(mu), k))
}

pub fn raw_dual(basis: &SymmetricBasis, k: OccupationVector, mu: f64) -> StateVector {
    to_vector(basis, &product_state(dual_forms(mu), k))
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deterministic random Hermitian, unit-trace matrix (not necessarily
/// positive).
pub fn random_hermitian(dim: usize, rng: &mut impl rand::Rng) -> Matrix {
    let a = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = &a + a.adjoint();
    let tr = h.trace();
    h.unscale(tr.re)
}

/// Random density matrix `AA†/Tr(AA†)`.
pub fn random_density(dim: usize, rng: &mut impl rand::Rng) -> Matrix {
    let a = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let p = &a * a.adjoint();
    let tr = p.trace().re;
    p.unscale(tr)
}

/// `∂_μ` of [`raw_eigen`] by the product rule over the `N` creation factors.
pub fn raw_eigen_derivative(basis: &SymmetricBasis, k: OccupationVector, mu: f64) -> StateVector {
    let forms = eigen_forms(mu);
    // ∂V/∂μ = diag(1, 2μ, 3μ²)·U.
    let rates = [1.0, 2.0 * mu, 3.0 * mu * mu];
    let unit = eigen_forms(1.0);
    let dforms = [0, 1, 2].map(|i| [0, 1, 2].map(|r| unit[i][r] * rates[r]));
    let factors: Vec<usize> = (0..3).flat_map(|i| std::iter::repeat_n(i, k.as_array()[i])).collect();
    let mut total = FockPoly::new();
    for hit in 0..factors.len() {
        let mut state = FockPoly::from([([0, 0, 0], 1.0)]);
        for (pos, &i) in factors.iter().enumerate() {
            state = create(&state, if pos == hit { dforms[i] } else { forms[i] });
        }
        for (occ, amp) in state {
            *total.entry(occ).or_insert(0.0) += amp;
        }
    }
    to_vector(basis, &total)
}

// Shortcut-criterion helpers.

const I: C64 = C64::new(0.0, 1.0);

pub fn dark_controls(mu: f64, c: i64) -> Controls {
    Controls::plain(mu, SQRT_2 * mu * c as f64)
}

/// Central finite difference of the unit eigenstate in `μ`, times `μ̇`.
pub fn eigenstate_rate(basis: &SymmetricBasis, k: OccupationVector, mu: f64, mu_dot: f64) -> StateVector {
    let h = 1e-6;
    let plus = eigenstate_vector(basis, EigenstateLabel::new(k, mu + h)).unwrap();
    let minus = eigenstate_vector(basis, EigenstateLabel::new(k, mu - h)).unwrap();
    (plus - minus) * C64::new(mu_dot / (2.0 * h), 0.0)
}

pub fn duals(basis: &SymmetricBasis, mu: f64) -> Vec<(OccupationVector, StateVector)> {
    basis.states().iter().map(|&n| (n, complementary_vector(basis, EigenstateLabel::new(n, mu)).unwrap())).collect()
}

/// Compares `⟨ψⁿ⊥|H_s|ψ_k⟩` with `i⟨ψⁿ⊥|∂_tψ_k⟩` from the closed form over
/// every `n` outside the DFS of `k`. Returns the worst relative error on the
/// coupled states and the worst absolute element elsewhere.
pub fn criterion_errors(basis: &SymmetricBasis, hs: &Matrix, k: OccupationVector, mu: f64, mu_dot: f64) -> (f64, f64) {
    let v = eigenstate_vector(basis, EigenstateLabel::new(k, mu)).unwrap();
    let hv = hs * &v;
    let coupled: Vec<_> = coupling_set(k).into_iter().map(|(n, _)| n).collect();
    let (mut rel, mut stray) = (0.0f64, 0.0f64);
    for (n, w) in duals(basis, mu) {
        if n.charge() == k.charge() {
            continue;
        }
        let lhs = w.dotc(&hv);
        let rhs = I * derivative_overlap(n, k, mu, mu_dot).unwrap().unwrap();
        if coupled.contains(&n) {
            rel = rel.max((lhs - rhs).norm() / rhs.norm());
        } else {
            stray = stray.max(lhs.norm());
            assert_eq!(rhs.norm(), 0.0);
        }
    }
    (rel, stray)
}

pub fn edge_hamiltonian(m: &LiouvillianModel, target: EdgeTarget, mu: f64, mu_dot: f64) -> Matrix {
    let n = m.basis().atoms();
    let chi_s = edge_shortcut_drive(target, mu, mu_dot, m.gamma_c(), m.detuning_ratio());
    edge_shortcut_hamiltonian(m, &dark_controls(mu, target.charge(n)), chi_s)
}

pub fn central_hamiltonian(m: &LiouvillianModel, mu: f64, mu_dot: f64) -> Matrix {
    m.raman_generator() * C64::new(central_shortcut_strength(mu, mu_dot), 0.0)
}
