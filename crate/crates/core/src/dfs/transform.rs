//! Non-unitary diagonalisation `𝐋 = V D V⁻¹` of the single-particle jump
//! matrix.

use std::f64::consts::SQRT_2;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::C64;

/// Largest tolerated entry of `V V⁻¹ − I` before the transform is rejected.
const INVERSE_RESIDUAL: f64 = 1e-12;

/// Eigen-decomposition of the single-particle jump matrix at pump ratio `mu`.
///
/// `V` and `V⁻¹` are real for real `mu`. Column `i` of `V` holds the bare-mode
/// coefficients of `ĉ_i†`; row `i` of `V⁻¹` holds those of `d̂_i†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeTransform {
    pub mu: f64,
    pub v: Matrix3<f64>,
    pub v_inv: Matrix3<f64>,
    /// Diagonal of `D`: `(√2·mu, 0, −√2·mu)`.
    pub d: [f64; 3],
}

/// `U` with `V = diag(μ, μ², μ³)·U`. Symmetric and orthogonal.
fn rotation() -> Matrix3<f64> {
    Matrix3::new(
        0.5,
        SQRT_2 / 2.0,
        0.5, //
        SQRT_2 / 2.0,
        0.0,
        -SQRT_2 / 2.0, //
        0.5,
        -SQRT_2 / 2.0,
        0.5,
    )
}

pub fn transform_matrices(mu: f64) -> Result<ModeTransform> {
    if mu == 0.0 {
        return Err(Error::NonDiagonalizable);
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::param("mu", format!("must be positive and finite, got {mu}")));
    }
    let u = rotation();
    let grade = Matrix3::from_diagonal(&nalgebra::Vector3::new(mu, mu * mu, mu.powi(3)));
    let grade_inv = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0 / mu, 1.0 / (mu * mu), mu.powi(-3)));
    let v = grade * u;
    let v_inv = u * grade_inv;

    // V⁻¹V avoids the μ⁻³ · μ cancellation that V V⁻¹ suffers at small μ.
    let residual = (v_inv * v - Matrix3::identity()).abs().max();
    if !(residual <= INVERSE_RESIDUAL) {
        return Err(Error::Numerical(format!("mode transform inverse residual {residual:e} at mu = {mu}")));
    }
    Ok(ModeTransform { mu, v, v_inv, d: [SQRT_2 * mu, 0.0, -SQRT_2 * mu] })
}

impl ModeTransform {
    /// Bare-mode coefficients of `ĉ_i†`.
    pub fn creation_column(&self, i: usize) -> [f64; 3] {
        [self.v[(0, i)], self.v[(1, i)], self.v[(2, i)]]
    }

    /// Bare-mode coefficients of `d̂_i†`.
    pub fn dual_row(&self, i: usize) -> [f64; 3] {
        [self.v_inv[(i, 0)], self.v_inv[(i, 1)], self.v_inv[(i, 2)]]
    }

    pub fn d_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&nalgebra::Vector3::from(self.d))
    }

    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.v * self.d_matrix() * self.v_inv
    }

    /// Bilinear coefficient matrix `M` with `Σ M_ab b_a† b_b = ĉ_i† d̂_j`.
    pub fn c_dagger_d(&self, i: usize, j: usize) -> Matrix3<C64> {
        let col = self.creation_column(i);
        let row = self.v_inv.row(j);
        Matrix3::from_fn(|a, b| C64::new(col[a] * row[b], 0.0))
    }
}

/// `𝐋` with rows and columns ordered `(−1, 0, +1)`: `J₋ + μ²J₊` as a
/// single-particle matrix.
pub fn single_particle_jump(mu: f64) -> Matrix3<f64> {
    let m2 = mu * mu;
    Matrix3::new(
        0.0, 1.0, 0.0, //
        m2, 0.0, 1.0, //
        0.0, m2, 0.0,
    )
}
