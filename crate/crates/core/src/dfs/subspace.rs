//! Enumeration of the decoherence-free subspaces and orthonormal frames for
//! them.

use crate::dfs::eigenstates::{eigenstate_vector, EigenstateLabel};
use crate::error::{Error, Result};
use crate::fock::{OccupationVector, SymmetricBasis};
use crate::linalg::gram_schmidt;
use crate::{StateVector, C64};

fn check_charge(n: usize, c: i64) -> Result<()> {
    if c.unsigned_abs() as usize > n {
        return Err(Error::ChargeOutOfRange { c, n });
    }
    Ok(())
}

/// Eigenstate indices with `k₃ − k₁ = c`, ordered by increasing `min(k₁, k₃)`.
pub fn dfs_members(n: usize, c: i64) -> Result<Vec<OccupationVector>> {
    check_charge(n, c)?;
    let a = c.unsigned_abs() as usize;
    let members = (0..)
        .take_while(|j| 2 * j + a <= n)
        .map(|j| {
            let middle = n - 2 * j - a;
            if c >= 0 {
                OccupationVector::new(j, middle, j + a)
            } else {
                OccupationVector::new(j + a, middle, j)
            }
        })
        .collect();
    Ok(members)
}

/// `⌈(N + 1 − |C|)/2⌉`.
pub fn dfs_dimension(n: usize, c: i64) -> Result<usize> {
    check_charge(n, c)?;
    Ok((n + 2 - c.unsigned_abs() as usize) / 2)
}

/// Normalised (generally non-orthogonal) eigenstates spanning the DFS.
pub fn member_vectors(basis: &SymmetricBasis, c: i64, mu: f64) -> Result<Vec<StateVector>> {
    dfs_members(basis.atoms(), c)?.into_iter().map(|k| eigenstate_vector(basis, EigenstateLabel::new(k, mu))).collect()
}

/// Orthonormal basis of the DFS with index `c` at pump ratio `mu`.
///
/// The members become nearly parallel as `mu → 0`, so orthonormalising them
/// directly loses the subspace. Instead the span is written as
/// `S(μ)·DFS(c, 1)` with `S = diag(μ^{n₀+2n₊₁})`. A column-echelon basis of
/// the `mu = 1` span, pivoted on the lowest grade first, stays well
/// conditioned after the rescaling once each column is divided by its pivot
/// power.
pub fn dfs_frame(basis: &SymmetricBasis, c: i64, mu: f64) -> Result<Vec<StateVector>> {
    if mu == 0.0 {
        return Err(Error::NonDiagonalizable);
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::param("mu", format!("must be positive and finite, got {mu}")));
    }
    let unit = member_vectors(basis, c, 1.0)?;
    if mu == 1.0 {
        return Ok(unit);
    }
    let grading = basis.grading();
    let (columns, pivots) = graded_echelon(unit, &grading)?;
    let scaled: Vec<StateVector> =
        columns
            .into_iter()
            .zip(pivots)
            .map(|(col, pivot)| {
                let base = grading[pivot] as i32;
                StateVector::from_iterator(
                    col.len(),
                    col.iter().zip(&grading).map(|(z, &e)| {
                        if *z == C64::new(0.0, 0.0) {
                            *z
                        } else {
                            *z * mu.powi(e as i32 - base)
                        }
                    }),
                )
            })
            .collect();
    gram_schmidt(&scaled)
}

/// Column echelon form of `vectors` with rows visited in increasing grade.
/// Entries above each pivot (in visiting order) are exactly zero.
fn graded_echelon(mut cols: Vec<StateVector>, grading: &[u32]) -> Result<(Vec<StateVector>, Vec<usize>)> {
    const NEGLIGIBLE: f64 = 1e-12;
    let mut order: Vec<usize> = (0..grading.len()).collect();
    order.sort_by_key(|&i| (grading[i], i));
    let mut pivots: Vec<Option<usize>> = vec![None; cols.len()];
    let mut found = 0;
    for &row in &order {
        if found == cols.len() {
            break;
        }
        let best = (0..cols.len())
            .filter(|&j| pivots[j].is_none())
            .max_by(|&a, &b| cols[a][row].norm().total_cmp(&cols[b][row].norm()));
        let Some(p) = best else { break };
        if cols[p][row].norm() <= NEGLIGIBLE {
            for j in 0..cols.len() {
                if pivots[j].is_none() {
                    cols[j][row] = C64::new(0.0, 0.0);
                }
            }
            continue;
        }
        let lead = cols[p][row];
        cols[p] /= lead;
        let pivot_col = cols[p].clone();
        for j in 0..cols.len() {
            if j != p && pivots[j].is_none() {
                let f = cols[j][row];
                cols[j].axpy(-f, &pivot_col, C64::new(1.0, 0.0));
                cols[j][row] = C64::new(0.0, 0.0);
            }
        }
        pivots[p] = Some(row);
        found += 1;
    }
    let pivots: Vec<usize> = pivots
        .into_iter()
        .enumerate()
        .map(|(j, p)| p.ok_or(Error::RankDeficient { index: j, residual: 0.0 }))
        .collect::<Result<_>>()?;
    Ok((cols, pivots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;
    use crate::linalg::{max_abs, projector};

    fn ov(a: usize, b: usize, c: usize) -> OccupationVector {
        OccupationVector::new(a, b, c)
    }

    #[test]
    fn member_examples() {
        assert_eq!(dfs_members(5, 3).unwrap(), vec![ov(0, 2, 3), ov(1, 0, 4)]);
        assert_eq!(dfs_members(5, -5).unwrap(), vec![ov(5, 0, 0)]);
        assert_eq!(dfs_members(5, 0).unwrap(), vec![ov(0, 5, 0), ov(1, 3, 1), ov(2, 1, 2)]);
        assert!(matches!(dfs_members(5, 6), Err(Error::ChargeOutOfRange { c: 6, n: 5 })));
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dfs_dimension(5, 0).unwrap(), 3);
        assert_eq!(dfs_dimension(5, 5).unwrap(), 1);
        assert_eq!(dfs_dimension(5, -5).unwrap(), 1);
        assert_eq!(dfs_dimension(5, -3).unwrap(), 2);
        let bars: Vec<usize> = (-5..=5).map(|c| dfs_dimension(5, c).unwrap()).collect();
        assert_eq!(bars, vec![1, 1, 2, 2, 3, 3, 3, 2, 2, 1, 1]);
        assert!(dfs_dimension(2, -3).is_err());
    }

    #[test]
    fn dimensions_partition_the_sector() {
        for n in 1..=10 {
            let total: usize = (-(n as i64)..=n as i64).map(|c| dfs_dimension(n, c).unwrap()).sum();
            assert_eq!(total, (n + 2) * (n + 1) / 2);
        }
    }

    #[test]
    fn graded_frame_matches_direct_orthonormalisation() {
        let b = enumerate_basis(5).unwrap();
        for c in -5..=5 {
            for mu in [0.3, 0.5, 0.9] {
                let direct = gram_schmidt(&member_vectors(&b, c, mu).unwrap()).unwrap();
                let graded = dfs_frame(&b, c, mu).unwrap();
                let diff = projector(&direct, b.dim()) - projector(&graded, b.dim());
                assert!(max_abs(&diff) < 1e-9, "c = {c}, mu = {mu}");
            }
        }
    }

    #[test]
    fn graded_frame_survives_small_mu() {
        let b = enumerate_basis(5).unwrap();
        let frame = dfs_frame(&b, 0, 1e-3).unwrap();
        assert_eq!(frame.len(), 3);
        for (i, u) in frame.iter().enumerate() {
            for (j, w) in frame.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u.dotc(w) - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        // Every member still lies in the span.
        let p = projector(&frame, b.dim());
        for v in member_vectors(&b, 0, 1e-3).unwrap() {
            assert!((&p * &v - &v).norm() < 1e-8);
        }
    }
}
