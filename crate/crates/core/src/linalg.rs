//! Small dense linear-algebra helpers shared across modules.

use crate::error::{Error, Result};
use crate::{Matrix, StateVector, C64};

/// Residual norm below which a vector is treated as linearly dependent on
/// its predecessors.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Largest entry magnitude.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Fails with [`Error::RankDeficient`] when a residual norm drops below
/// [`RANK_TOLERANCE`] before normalization.
pub fn gram_schmidt(vectors: &[StateVector]) -> Result<Vec<StateVector>> {
    gram_schmidt_with_tolerance(vectors, RANK_TOLERANCE)
}

pub fn gram_schmidt_with_tolerance(vectors: &[StateVector], tolerance: f64) -> Result<Vec<StateVector>> {
    let mut out: Vec<StateVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w.axpy(-proj, q, C64::new(1.0, 0.0));
            }
        }
        let residual = w.norm();
        if residual < tolerance {
            return Err(Error::RankDeficient { index, residual });
        }
        w.unscale_mut(residual);
        out.push(w);
    }
    Ok(out)
}

/// Projects `v` onto the orthogonal complement of the orthonormal family `qs`.
pub fn orthogonal_residual(qs: &[StateVector], v: &StateVector) -> StateVector {
    let mut w = v.clone();
    for _pass in 0..2 {
        for q in qs {
            let proj = q.dotc(&w);
            w.axpy(-proj, q, C64::new(1.0, 0.0));
        }
    }
    w
}

/// `Σ |q⟩⟨q|` over an orthonormal family.
pub fn projector(qs: &[StateVector], dim: usize) -> Matrix {
    let mut p = Matrix::zeros(dim, dim);
    for q in qs {
        p += q * q.adjoint();
    }
    p
}

/// Columns stacked into a matrix.
pub fn stack_columns(vectors: &[StateVector]) -> Matrix {
    let dim = vectors.first().map_or(0, |v| v.len());
    Matrix::from_columns(&vectors.iter().map(|v| v.column(0)).collect::<Vec<_>>()).resize(
        dim,
        vectors.len(),
        C64::new(0.0, 0.0),
    )
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Ascending eigenpairs of a Hermitian matrix; eigenvectors are columns.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Matrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (vals, vecs)
}

/// Descending singular values.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Spectral norm.
pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `⟨v|A|v⟩`.
pub fn expectation(a: &Matrix, v: &StateVector) -> C64 {
    v.dotc(&(a * v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn orthonormal_input_is_unchanged() {
        let e0 = StateVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e1 = StateVector::from_vec(vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let out = gram_schmidt(&[e0.clone(), e1.clone()]).unwrap();
        assert!((&out[0] - &e0).norm() < 1e-12);
        assert!((&out[1] - &e1).norm() < 1e-12);
    }

    #[test]
    fn dependent_input_is_rejected() {
        let a = StateVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let b = &a * c(0.0, 3.0);
        match gram_schmidt(&[a, b]) {
            Err(Error::RankDeficient { index: 1, .. }) => {}
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn stacking_and_projector() {
        let a = StateVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = StateVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]);
        let m = stack_columns(&[a.clone(), b.clone()]);
        assert_eq!(m.shape(), (3, 2));
        assert_eq!(m.column(1), b.column(0));
        let q = gram_schmidt(&[a, b]).unwrap();
        let p = projector(&q, 3);
        assert!(max_abs(&(&p * &p - &p)) < 1e-12);
        assert!((p.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_helpers() {
        let m = Matrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        let vals = hermitian_eigenvalues(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let (vals2, vecs) = hermitian_eigen(&m);
        assert_eq!(vals, vals2);
        let v = vecs.column(1).into_owned();
        assert!((expectation(&m, &v).re - 3.0).abs() < 1e-12);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }
}
