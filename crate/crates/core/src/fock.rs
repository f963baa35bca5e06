//! The permutationally symmetric sector of `N` three-level atoms, represented
//! with three Schwinger bosons `b₋₁, b₀, b₊₁`.
//!
//! Basis states are occupation vectors `(n₋₁, n₀, n₊₁)` ordered
//! lexicographically descending, so index 0 is always `(N, 0, 0)`, the state
//! with every atom in `|−1_g⟩`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::{Matrix, StateVector, C64};

/// Integer triple labelling a symmetric-sector state or a jump-operator
/// eigenstate. Which modes the entries count (bare `b` or rotated `c`/`d`)
/// depends on context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector {
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
}

impl OccupationVector {
    pub const fn new(k1: usize, k2: usize, k3: usize) -> Self {
        Self { k1, k2, k3 }
    }

    pub const fn total(&self) -> usize {
        self.k1 + self.k2 + self.k3
    }

    pub const fn as_array(&self) -> [usize; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub const fn from_array(k: [usize; 3]) -> Self {
        Self::new(k[0], k[1], k[2])
    }

    /// `k₃ − k₁`, the DFS index carried by an eigenstate.
    pub const fn charge(&self) -> i64 {
        self.k3 as i64 - self.k1 as i64
    }

    /// Fails unless the components sum to `n`.
    pub fn check_total(&self, n: usize) -> Result<()> {
        if self.total() == n {
            Ok(())
        } else {
            Err(Error::InvalidOccupation { k: *self, n })
        }
    }

    /// `k₁! k₂! k₃!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.ln_factorial_product().exp()
    }

    pub fn ln_factorial_product(&self) -> f64 {
        ln_factorial(self.k1) + ln_factorial(self.k2) + ln_factorial(self.k3)
    }

    /// Moves one quantum from slot `from` to slot `to`, if possible.
    pub fn shifted(&self, from: usize, to: usize) -> Option<Self> {
        let mut k = self.as_array();
        if k[from] == 0 {
            return None;
        }
        k[from] -= 1;
        k[to] += 1;
        Some(Self::from_array(k))
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k1, self.k2, self.k3)
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// One of the three bare single-atom levels `|−1_g⟩, |0_g⟩, |+1_g⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Minus,
    Zero,
    Plus,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Minus, Mode::Zero, Mode::Plus];

    /// Slot of this mode inside an [`OccupationVector`].
    pub const fn slot(self) -> usize {
        match self {
            Mode::Minus => 0,
            Mode::Zero => 1,
            Mode::Plus => 2,
        }
    }

    pub const fn label(self) -> i32 {
        self.slot() as i32 - 1
    }
}

impl TryFrom<i32> for Mode {
    type Error = Error;

    fn try_from(label: i32) -> Result<Self> {
        match label {
            -1 => Ok(Mode::Minus),
            0 => Ok(Mode::Zero),
            1 => Ok(Mode::Plus),
            other => Err(Error::InvalidMode(other)),
        }
    }
}

/// The `(N+2)(N+1)/2` occupation vectors of `N` atoms, with a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricBasis {
    n: usize,
    states: Vec<OccupationVector>,
}

/// Enumerates the symmetric sector for `n` atoms in lexicographically
/// descending order.
pub fn enumerate_basis(n: usize) -> Result<SymmetricBasis> {
    SymmetricBasis::new(n)
}

impl SymmetricBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoAtoms);
        }
        let mut states = Vec::with_capacity(sector_dimension(n));
        for k1 in (0..=n).rev() {
            for k2 in (0..=n - k1).rev() {
                states.push(OccupationVector::new(k1, k2, n - k1 - k2));
            }
        }
        Ok(Self { n, states })
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, index: usize) -> OccupationVector {
        self.states[index]
    }

    /// Position of `k` in the ordering, or `None` if `k` is not in the sector.
    pub fn index_of(&self, k: OccupationVector) -> Option<usize> {
        if k.total() != self.n {
            return None;
        }
        let head = self.n - k.k1;
        Some(head * (head + 1) / 2 + (head - k.k2))
    }

    /// Unit vector on a single occupation state.
    pub fn unit_vector(&self, k: OccupationVector) -> Result<StateVector> {
        let i = self.index_of(k).ok_or(Error::InvalidOccupation { k, n: self.n })?;
        let mut v = StateVector::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// The initial coherent spin state `|−1_g⟩^⊗N`.
    pub fn ground_state(&self) -> StateVector {
        let mut v = StateVector::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Exponent `n₀ + 2n₊₁` of each basis state. Eigenstates at pump ratio
    /// `mu` are the `mu = 1` eigenstates rescaled by `mu` to this power.
    pub fn grading(&self) -> Vec<u32> {
        self.states.iter().map(|k| (k.k2 + 2 * k.k3) as u32).collect()
    }
}

/// `(N+2)(N+1)/2`.
pub const fn sector_dimension(n: usize) -> usize {
    (n + 2) * (n + 1) / 2
}

/// A dense complex matrix acting on the symmetric sector of `N` atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricOperator {
    atoms: usize,
    matrix: Matrix,
}

impl SymmetricOperator {
    pub fn from_matrix(basis: &SymmetricBasis, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::param(
                "matrix",
                format!("shape {}x{} does not match sector dimension {}", matrix.nrows(), matrix.ncols(), basis.dim()),
            ));
        }
        Ok(Self { atoms: basis.atoms(), matrix })
    }

    pub fn zeros(basis: &SymmetricBasis) -> Self {
        Self { atoms: basis.atoms(), matrix: Matrix::zeros(basis.dim(), basis.dim()) }
    }

    pub fn identity(basis: &SymmetricBasis) -> Self {
        Self { atoms: basis.atoms(), matrix: Matrix::identity(basis.dim(), basis.dim()) }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { atoms: self.atoms, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { atoms: self.atoms, matrix: &self.matrix * factor }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { atoms: self.atoms, matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix }
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        &self.matrix * v
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &StateVector) -> C64 {
        v.dotc(&(&self.matrix * v))
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

impl Add for &SymmetricOperator {
    type Output = SymmetricOperator;
    fn add(self, rhs: Self) -> SymmetricOperator {
        SymmetricOperator { atoms: self.atoms, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &SymmetricOperator {
    type Output = SymmetricOperator;
    fn sub(self, rhs: Self) -> SymmetricOperator {
        SymmetricOperator { atoms: self.atoms, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &SymmetricOperator {
    type Output = SymmetricOperator;
    fn mul(self, rhs: Self) -> SymmetricOperator {
        SymmetricOperator { atoms: self.atoms, matrix: &self.matrix * &rhs.matrix }
    }
}

/// Matrix of `b_i† b_j`: moves one quantum from mode `j` to mode `i` with
/// amplitude `√(k_j (k_i + 1))`.
pub fn bilinear_matrix(basis: &SymmetricBasis, i: Mode, j: Mode) -> SymmetricOperator {
    let mut m = Matrix::zeros(basis.dim(), basis.dim());
    for (col, k) in basis.states().iter().enumerate() {
        let occ = k.as_array();
        if i == j {
            m[(col, col)] = C64::new(occ[i.slot()] as f64, 0.0);
            continue;
        }
        if let Some(target) = k.shifted(j.slot(), i.slot()) {
            let amp = ((occ[j.slot()] * (occ[i.slot()] + 1)) as f64).sqrt();
            let row = basis.index_of(target).expect("shift stays in sector");
            m[(row, col)] = C64::new(amp, 0.0);
        }
    }
    SymmetricOperator { atoms: basis.atoms(), matrix: m }
}

/// `Σ_{ab} M_ab b_a† b_b` for a 3×3 single-particle matrix `M` indexed
/// `(−1, 0, +1)`.
pub fn quadratic_form(basis: &SymmetricBasis, single: &nalgebra::Matrix3<C64>) -> SymmetricOperator {
    let mut out = Matrix::zeros(basis.dim(), basis.dim());
    for a in Mode::ALL {
        for b in Mode::ALL {
            let coeff = single[(a.slot(), b.slot())];
            if coeff == C64::new(0.0, 0.0) {
                continue;
            }
            out += bilinear_matrix(basis, a, b).matrix * coeff;
        }
    }
    SymmetricOperator { atoms: basis.atoms(), matrix: out }
}

/// `J₋`, `J₊ = J₋†`, `J_z = [J₊, J₋]` and `J² = J₋J₊ + J₊J₋ + J_z²`.
#[derive(Clone, Debug)]
pub struct CollectiveOperators {
    pub j_minus: SymmetricOperator,
    pub j_plus: SymmetricOperator,
    pub j_z: SymmetricOperator,
    pub j_squared: SymmetricOperator,
}

pub fn collective_operators(basis: &SymmetricBasis) -> CollectiveOperators {
    let j_minus = &bilinear_matrix(basis, Mode::Minus, Mode::Zero) + &bilinear_matrix(basis, Mode::Zero, Mode::Plus);
    let j_plus = j_minus.adjoint();
    let j_z = j_plus.commutator(&j_minus);
    let j_squared = &(&(&j_minus * &j_plus) + &(&j_plus * &j_minus)) + &(&j_z * &j_z);
    CollectiveOperators { j_minus, j_plus, j_z, j_squared }
}
