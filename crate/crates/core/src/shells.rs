//! `J²` shell decomposition of the symmetric sector, the analytic final
//! state of quench and ramp runs, and quantum Fisher information.
//!
//! Shells are built by laddering down from the top state with `J₋` and
//! opening a new shell from the orthogonal residual of each `m` sector that
//! gains one dimension. The same construction with the rotated modes
//! `ĉᵢ` at `μ = 1` (`K₋ = ĉ₁†ĉ₂ + ĉ₂†ĉ₃`, `K_z = ĉ₃†ĉ₃ − ĉ₁†ĉ₁`) gives the
//! eigenbasis in which the DFS index equals `m`.

use std::collections::BTreeMap;

use crate::dfs::{dfs_members, eigenstate_vector, transform_matrices, EigenstateLabel};
use crate::error::{Error, Result};
use crate::fock::{collective_operators, enumerate_basis, quadratic_form, OccupationVector, SymmetricBasis};
use crate::linalg::{max_abs, orthogonal_residual};
use crate::{Matrix, StateVector, C64};

/// Largest eigen-residual or loss of orthogonality tolerated in a shell
/// basis.
const SHELL_TOLERANCE: f64 = 1e-8;

/// `(j, m)` with `J²` eigenvalue `j(j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShellLabel {
    pub j: usize,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShellGenerator {
    /// Bare modes with `J₋`; `m` is the `J_z` eigenvalue.
    Bare,
    /// Rotated modes at `μ = 1` with `K₋`; `m` is the DFS index `C`.
    Rotated,
}

#[derive(Clone, Debug)]
pub struct ShellBasis {
    pub generator: ShellGenerator,
    pub atoms: usize,
    vectors: BTreeMap<ShellLabel, StateVector>,
}

impl ShellBasis {
    pub fn get(&self, j: usize, m: i64) -> Option<&StateVector> {
        self.vectors.get(&ShellLabel { j, m })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ShellLabel, &StateVector)> {
        self.vectors.iter()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Distinct `j` values, largest first.
    pub fn shells(&self) -> Vec<usize> {
        let mut js: Vec<usize> = self.vectors.keys().map(|l| l.j).collect();
        js.dedup();
        js.sort_unstable_by(|a, b| b.cmp(a));
        js.dedup();
        js
    }
}

/// `j ∈ {N, N−2, …}` down to 0 or 1.
pub fn allowed_j(n: usize) -> Vec<usize> {
    (0..=n).rev().step_by(2).collect()
}

/// The three ladder ingredients for a generator: lowering operator, `z`
/// operator and a basis of each `m` sector.
struct Ladder {
    lowering: Matrix,
    z: Matrix,
    casimir: Matrix,
    sector: Box<dyn Fn(i64) -> Result<Vec<StateVector>>>,
}

fn ladder(basis: &SymmetricBasis, generator: ShellGenerator) -> Result<Ladder> {
    let n = basis.atoms();
    match generator {
        ShellGenerator::Bare => {
            let ops = collective_operators(basis);
            let b = basis.clone();
            Ok(Ladder {
                lowering: ops.j_minus.into_matrix(),
                z: ops.j_z.into_matrix(),
                casimir: ops.j_squared.into_matrix(),
                sector: Box::new(move |m| {
                    b.states().iter().filter(|k| k.charge() == m).map(|k| b.unit_vector(*k)).collect()
                }),
            })
        }
        ShellGenerator::Rotated => {
            let t = transform_matrices(1.0)?;
            let k_minus = quadratic_form(basis, &t.c_dagger_d(0, 1)).into_matrix()
                + quadratic_form(basis, &t.c_dagger_d(1, 2)).into_matrix();
            let k_plus = k_minus.adjoint();
            let k_z = &k_plus * &k_minus - &k_minus * &k_plus;
            let casimir = &k_minus * &k_plus + &k_plus * &k_minus + &k_z * &k_z;
            let b = basis.clone();
            Ok(Ladder {
                lowering: k_minus,
                z: k_z,
                casimir,
                sector: Box::new(move |m| {
                    dfs_members(n, m)?
                        .into_iter()
                        .map(|k| eigenstate_vector(&b, EigenstateLabel::new(k, 1.0)))
                        .collect()
                }),
            })
        }
    }
}

/// Makes the first component with magnitude above `1e-12` real positive.
fn fix_phase(v: StateVector) -> StateVector {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(lead) => {
            let phase = lead.conj() / lead.norm();
            v * phase
        }
        None => v,
    }
}

pub fn shell_basis(basis: &SymmetricBasis, generator: ShellGenerator) -> Result<ShellBasis> {
    let n = basis.atoms();
    let lad = ladder(basis, generator)?;
    let mut vectors: BTreeMap<ShellLabel, StateVector> = BTreeMap::new();
    for j in allowed_j(n) {
        let ji = j as i64;
        let existing: Vec<StateVector> = vectors.iter().filter(|(l, _)| l.m == ji).map(|(_, v)| v.clone()).collect();
        let top = (lad.sector)(ji)?
            .into_iter()
            .map(|v| orthogonal_residual(&existing, &v))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or_else(|| Error::Numerical(format!("empty m = {j} sector")))?;
        let norm = top.norm();
        if norm < 1e-6 {
            return Err(Error::RankDeficient { index: j, residual: norm });
        }
        let mut v = fix_phase(top.unscale(norm));
        for m in (-ji..=ji).rev() {
            vectors.insert(ShellLabel { j, m }, v.clone());
            if m > -ji {
                let jf = j as f64;
                let mf = m as f64;
                let scale = ((jf * (jf + 1.0) - mf * (mf - 1.0)) / 2.0).sqrt();
                v = (&lad.lowering * &v).unscale(scale);
            }
        }
    }
    let shells = ShellBasis { generator, atoms: n, vectors };
    verify(&shells, &lad)?;
    Ok(shells)
}

fn verify(shells: &ShellBasis, lad: &Ladder) -> Result<()> {
    let labelled: Vec<(&ShellLabel, &StateVector)> = shells.iter().collect();
    for (i, (label, v)) in labelled.iter().enumerate() {
        let jj = (label.j * (label.j + 1)) as f64;
        let r_casimir = (&lad.casimir * *v - *v * C64::new(jj, 0.0)).norm();
        let r_z = (&lad.z * *v - *v * C64::new(label.m as f64, 0.0)).norm();
        if r_casimir > SHELL_TOLERANCE || r_z > SHELL_TOLERANCE {
            return Err(Error::Numerical(format!("shell {label:?} eigen-residuals {r_casimir:e}, {r_z:e}")));
        }
        for (other, w) in &labelled[..i] {
            let expect = if *other == *label { 1.0 } else { 0.0 };
            let d = (w.dotc(v) - C64::new(expect, 0.0)).norm();
            if d > SHELL_TOLERANCE {
                return Err(Error::Numerical(format!("shells {other:?} and {label:?} overlap by {d:e}")));
            }
        }
        if (v.norm() - 1.0).abs() > SHELL_TOLERANCE {
            return Err(Error::Numerical(format!("shell {label:?} not normalised")));
        }
    }
    Ok(())
}

/// The `j = N`, `m = C` rotated shell state in the bare basis: the state a
/// quench or ramp into DFS `C` converges to, since both conserve `j = N`.
pub fn predict_final_state(n: usize, c: i64) -> Result<StateVector> {
    if c.unsigned_abs() as usize > n {
        return Err(Error::ChargeOutOfRange { c, n });
    }
    let basis = enumerate_basis(n)?;
    let shells = shell_basis(&basis, ShellGenerator::Rotated)?;
    Ok(shells.get(n, c).expect("top shell spans every m").clone())
}

/// `K_x^eff = (ĉ₁†ĉ₃ + ĉ₃†ĉ₁)/2` at `μ = 1`.
pub fn keff_x(basis: &SymmetricBasis) -> Result<Matrix> {
    let t = transform_matrices(1.0)?;
    let k = quadratic_form(basis, &(t.c_dagger_d(0, 2) + t.c_dagger_d(2, 0))).into_matrix();
    Ok(k * C64::new(0.5, 0.0))
}

/// `4(⟨K²⟩ − ⟨K⟩²)` for a pure state.
pub fn qfi(state: &StateVector, generator: &Matrix) -> f64 {
    let kv = generator * state;
    let mean = state.dotc(&kv).re;
    let second = kv.norm_squared();
    (4.0 * (second - mean * mean)).max(0.0)
}

/// Unit eigenstate `ψ_k(μ = 1)`.
pub fn unit_eigenstate(basis: &SymmetricBasis, k: OccupationVector) -> Result<StateVector> {
    eigenstate_vector(basis, EigenstateLabel::new(k, 1.0))
}

/// Largest entry of `A − A†`.
pub fn hermiticity_defect(a: &Matrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}
