//! Jump operator and Hamiltonian assembly, plus the master-equation
//! right-hand side in a dense reference form and a fast form used by the
//! integrator.

use crate::fock::{bilinear_matrix, collective_operators, Mode, SymmetricBasis, SymmetricOperator};
use crate::lindblad::state::EffectiveParams;
use crate::{Matrix, C64};

const I: C64 = C64::new(0.0, 1.0);

/// `L = √Γ_c (J₋ + μ² J₊ + χ)`.
pub fn build_jump(params: &EffectiveParams, basis: &SymmetricBasis) -> SymmetricOperator {
    let ops = collective_operators(basis);
    let m = ops.j_minus.matrix() + ops.j_plus.matrix() * C64::new(params.mu * params.mu, 0.0);
    let shift = Matrix::identity(basis.dim(), basis.dim()) * params.chi;
    let l = (m + shift) * C64::new(params.gamma_c.sqrt(), 0.0);
    SymmetricOperator::from_matrix(basis, l).expect("sector-shaped")
}

/// `H = (Δ_c′/2κ) L†L`.
pub fn build_hamiltonian(jump: &SymmetricOperator, detuning_ratio: f64) -> SymmetricOperator {
    (&jump.adjoint() * jump).scale(C64::new(detuning_ratio / 2.0, 0.0))
}

/// `−i[H, ρ] + LρL† − ½{L†L, ρ}` evaluated densely.
pub fn lindblad_rhs(rho: &Matrix, hamiltonian: &Matrix, jump: &Matrix) -> Matrix {
    let l_dag = jump.adjoint();
    let ldl = &l_dag * jump;
    let coherent = (hamiltonian * rho - rho * hamiltonian) * (-I);
    let dissipator = jump * rho * &l_dag - (&ldl * rho + rho * &ldl) * C64::new(0.5, 0.0);
    coherent + dissipator
}

/// Row-compressed sparse matrix holding only the exact non-zeros of a dense
/// operator. The collective operators are banded, so this keeps the
/// integrator inner loop small.
#[derive(Clone, Debug, Default)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    pub fn from_dense(m: &Matrix) -> Self {
        let dim = m.nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..dim {
            row_start.push(cols.len());
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                if z != C64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(z);
                }
            }
        }
        row_start.push(cols.len());
        Self { dim, row_start, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out = self · dense`.
    pub fn mul_dense(&self, dense: &Matrix, out: &mut Matrix) {
        out.fill(C64::new(0.0, 0.0));
        let n = dense.ncols();
        for r in 0..self.dim {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                let (c, v) = (self.cols[idx], self.vals[idx]);
                for j in 0..n {
                    out[(r, j)] += v * dense[(c, j)];
                }
            }
        }
    }

    /// `out = self · dense†`.
    pub fn mul_dense_adjoint(&self, dense: &Matrix, out: &mut Matrix) {
        out.fill(C64::new(0.0, 0.0));
        let n = dense.nrows();
        for r in 0..self.dim {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                let (c, v) = (self.cols[idx], self.vals[idx]);
                for j in 0..n {
                    out[(r, j)] += v * dense[(j, c)].conj();
                }
            }
        }
    }
}

/// Precomputed operator products for one sector, so that the Liouvillian at
/// any controls is a cheap linear combination.
#[derive(Clone, Debug)]
pub struct LiouvillianModel {
    basis: SymmetricBasis,
    gamma_c: f64,
    detuning_ratio: f64,
    j_minus: Matrix,
    j_plus: Matrix,
    pm: Matrix,
    pp: Matrix,
    mm: Matrix,
    mp: Matrix,
    raman: Matrix,
    j_squared: Matrix,
}

/// Controls that vary along a protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Controls {
    pub mu: f64,
    /// Total cavity drive, including any shortcut shift.
    pub chi: C64,
    /// Strength `α` of the extra term `iα(b₋₁†b₁ − b₁†b₋₁)`.
    pub raman_alpha: f64,
}

impl Controls {
    pub const fn plain(mu: f64, chi: f64) -> Self {
        Self { mu, chi: C64::new(chi, 0.0), raman_alpha: 0.0 }
    }
}

/// Jump operator and non-Hermitian effective Hamiltonian
/// `H − ½ i L†L` at fixed controls, stored sparsely.
#[derive(Clone, Debug)]
pub struct Generator {
    jump: SparseOperator,
    effective: SparseOperator,
}

/// Scratch buffers for [`Generator::apply`].
#[derive(Clone, Debug)]
pub struct Workspace {
    a: Matrix,
    y: Matrix,
    b: Matrix,
}

impl Workspace {
    pub fn new(dim: usize) -> Self {
        Self { a: Matrix::zeros(dim, dim), y: Matrix::zeros(dim, dim), b: Matrix::zeros(dim, dim) }
    }
}

impl LiouvillianModel {
    pub fn new(basis: SymmetricBasis, gamma_c: f64, detuning_ratio: f64) -> Self {
        let ops = collective_operators(&basis);
        let j_minus = ops.j_minus.matrix().clone();
        let j_plus = ops.j_plus.matrix().clone();
        let raman = (bilinear_matrix(&basis, Mode::Minus, Mode::Plus).into_matrix()
            - bilinear_matrix(&basis, Mode::Plus, Mode::Minus).into_matrix())
            * I;
        Self {
            gamma_c,
            detuning_ratio,
            pm: &j_plus * &j_minus,
            pp: &j_plus * &j_plus,
            mm: &j_minus * &j_minus,
            mp: &j_minus * &j_plus,
            j_squared: ops.j_squared.into_matrix(),
            j_minus,
            j_plus,
            raman,
            basis,
        }
    }

    pub fn basis(&self) -> &SymmetricBasis {
        &self.basis
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.detuning_ratio
    }

    pub fn j_squared(&self) -> &Matrix {
        &self.j_squared
    }

    /// `L` at the given controls.
    pub fn jump(&self, c: &Controls) -> Matrix {
        let dim = self.basis.dim();
        let m = &self.j_minus + &self.j_plus * C64::new(c.mu * c.mu, 0.0);
        (m + Matrix::identity(dim, dim) * c.chi) * C64::new(self.gamma_c.sqrt(), 0.0)
    }

    /// `L†L` assembled from the cached products.
    pub fn jump_gram(&self, c: &Controls) -> Matrix {
        let dim = self.basis.dim();
        let m2 = C64::new(c.mu * c.mu, 0.0);
        let m4 = m2 * m2;
        // M = J₋ + μ²J₊, M† = J₊ + μ²J₋.
        let mdm = &self.pm + &self.pp * m2 + &self.mm * m2 + &self.mp * m4;
        let m_dag = &self.j_plus + &self.j_minus * m2;
        let m = &self.j_minus + &self.j_plus * m2;
        let gram =
            mdm + m_dag * c.chi + m * c.chi.conj() + Matrix::identity(dim, dim) * C64::new(c.chi.norm_sqr(), 0.0);
        gram * C64::new(self.gamma_c, 0.0)
    }

    /// Full Hamiltonian `(Δ_c′/2κ) L†L + iα(b₋₁†b₁ − b₁†b₋₁)`.
    pub fn hamiltonian(&self, c: &Controls) -> Matrix {
        let mut h = self.jump_gram(c) * C64::new(self.detuning_ratio / 2.0, 0.0);
        if c.raman_alpha != 0.0 {
            h += &self.raman * C64::new(c.raman_alpha, 0.0);
        }
        h
    }

    /// `iα(b₋₁†b₁ − b₁†b₋₁)` at unit `α`.
    pub fn raman_generator(&self) -> &Matrix {
        &self.raman
    }

    pub fn generator(&self, c: &Controls) -> Generator {
        let gram = self.jump_gram(c);
        let mut effective = &gram * C64::new(self.detuning_ratio / 2.0, -0.5);
        if c.raman_alpha != 0.0 {
            effective += &self.raman * C64::new(c.raman_alpha, 0.0);
        }
        Generator { jump: SparseOperator::from_dense(&self.jump(c)), effective: SparseOperator::from_dense(&effective) }
    }
}

impl Generator {
    /// Master-equation right-hand side for Hermitian `rho`, written into
    /// `out`. The result is Hermitian by construction:
    /// `−iA + (−iA)† + ½(B + B†)` with `A = H_eff ρ` and `B = L ρ L†`.
    pub fn apply(&self, rho: &Matrix, out: &mut Matrix, ws: &mut Workspace) {
        self.effective.mul_dense(rho, &mut ws.a);
        self.jump.mul_dense(rho, &mut ws.y);
        // B = L (Lρ)† = L ρ L† for Hermitian ρ.
        self.jump.mul_dense_adjoint(&ws.y, &mut ws.b);
        let dim = rho.nrows();
        for j in 0..dim {
            for i in 0..dim {
                let a_ij = -I * ws.a[(i, j)];
                let a_ji = -I * ws.a[(j, i)];
                out[(i, j)] = a_ij + a_ji.conj() + (ws.b[(i, j)] + ws.b[(j, i)].conj()) * 0.5;
            }
        }
    }

    pub fn jump_nnz(&self) -> usize {
        self.jump.nnz()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;
    use crate::linalg::{hermitian_eigenvalues, max_abs, singular_values};
    use std::f64::consts::SQRT_2;

    fn random_hermitian(dim: usize, seed: u64) -> Matrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let m = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = &m * m.adjoint();
        let tr = h.trace();
        h / tr
    }

    #[test]
    fn ground_state_is_dark_without_drive() {
        let b = enumerate_basis(5).unwrap();
        let p = EffectiveParams::new(5, 1.0, 0.0, 0.0, 0.1).unwrap();
        let l = build_jump(&p, &b);
        assert!(l.apply(&b.ground_state()).norm() < 1e-14);
    }

    #[test]
    fn unit_mu_jump_is_hermitian() {
        let b = enumerate_basis(5).unwrap();
        let p = EffectiveParams::new(5, 1.0, 1.0, 0.7, 0.1).unwrap();
        let l = build_jump(&p, &b);
        assert!(max_abs(&(l.matrix() - l.matrix().adjoint())) < 1e-12);
    }

    #[test]
    fn unit_mu_spectrum_and_multiplicities() {
        let b = enumerate_basis(5).unwrap();
        let p = EffectiveParams::new(5, 1.0, 1.0, 0.0, 0.1).unwrap();
        let vals = hermitian_eigenvalues(build_jump(&p, &b).matrix());
        for m in -5i64..=5 {
            let count = vals.iter().filter(|v| (**v - SQRT_2 * m as f64).abs() < 1e-9).count();
            assert_eq!(count, (6 - m.unsigned_abs() as usize).div_ceil(2), "m = {m}");
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let b = enumerate_basis(5).unwrap();
        let p = EffectiveParams::new(5, 1.0, 1.0, 0.0, 0.1).unwrap();
        let l = build_jump(&p, &b);
        assert_eq!(build_hamiltonian(&l, 0.0).norm(), 0.0);
        let h = build_hamiltonian(&l, 0.1);
        let top = *hermitian_eigenvalues(h.matrix()).last().unwrap();
        let smax = singular_values(l.matrix())[0];
        assert!((top - 0.05 * smax * smax).abs() < 1e-10);
    }

    #[test]
    fn two_level_decay() {
        // 2x2 toy: L = √γ σ₋ with H = 0, excited population decays as e^{−γt}.
        let gamma: f64 = 0.7;
        let mut l = Matrix::zeros(2, 2);
        l[(0, 1)] = C64::new(gamma.sqrt(), 0.0);
        let h = Matrix::zeros(2, 2);
        let mut rho = Matrix::zeros(2, 2);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        let dt = 1e-3;
        for _ in 0..1000 {
            let k1 = lindblad_rhs(&rho, &h, &l);
            let k2 = lindblad_rhs(&(&rho + &k1 * C64::new(dt / 2.0, 0.0)), &h, &l);
            let k3 = lindblad_rhs(&(&rho + &k2 * C64::new(dt / 2.0, 0.0)), &h, &l);
            let k4 = lindblad_rhs(&(&rho + &k3 * C64::new(dt, 0.0)), &h, &l);
            rho += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        }
        assert!((rho[(1, 1)].re - (-gamma).exp()).abs() < 1e-12);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let b = enumerate_basis(4).unwrap();
        let p = EffectiveParams::new(4, 1.3, 0.6, -0.4, 0.1).unwrap();
        let l = build_jump(&p, &b);
        let h = build_hamiltonian(&l, 0.1);
        let rho = random_hermitian(b.dim(), 3);
        let d = lindblad_rhs(&rho, h.matrix(), l.matrix());
        assert!(d.trace().norm() < 1e-12);
        assert!(max_abs(&(&d - d.adjoint())) < 1e-12);
    }

    #[test]
    fn fast_kernel_matches_dense_reference() {
        let b = enumerate_basis(5).unwrap();
        let model = LiouvillianModel::new(b.clone(), 1.7, 0.1);
        let controls = Controls { mu: 0.43, chi: C64::new(-1.2, 0.8), raman_alpha: 0.37 };
        let p = EffectiveParams { atoms: 5, gamma_c: 1.7, mu: 0.43, chi: controls.chi, detuning_ratio: 0.1 };
        let l = build_jump(&p, &b);
        let h = build_hamiltonian(&l, 0.1).into_matrix() + model.raman_generator() * C64::new(0.37, 0.0);
        assert!(max_abs(&(model.jump(&controls) - l.matrix())) < 1e-12);
        assert!(max_abs(&(model.hamiltonian(&controls) - &h)) < 1e-10);
        let rho = random_hermitian(b.dim(), 11);
        let dense = lindblad_rhs(&rho, &h, l.matrix());
        let mut fast = Matrix::zeros(b.dim(), b.dim());
        let mut ws = Workspace::new(b.dim());
        model.generator(&controls).apply(&rho, &mut fast, &mut ws);
        assert!(max_abs(&(dense - fast)) < 1e-10);
    }

    #[test]
    fn raman_generator_is_hermitian() {
        let model = LiouvillianModel::new(enumerate_basis(3).unwrap(), 1.0, 0.1);
        let r = model.raman_generator();
        assert!(max_abs(&(r - r.adjoint())) < 1e-15);
    }
}
