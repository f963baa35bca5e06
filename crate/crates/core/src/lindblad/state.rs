use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, max_abs};
use crate::{Matrix, StateVector, C64};

/// Controls and constants defining the instantaneous Liouvillian.
///
/// `chi` is complex so the edge shortcut can shift the drive by an
/// imaginary-phase term; every other path keeps it real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub atoms: usize,
    pub gamma_c: f64,
    pub mu: f64,
    pub chi: C64,
    /// `Δ_c′/κ`.
    pub detuning_ratio: f64,
}

impl EffectiveParams {
    pub fn new(atoms: usize, gamma_c: f64, mu: f64, chi: f64, detuning_ratio: f64) -> Result<Self> {
        let p = Self { atoms, gamma_c, mu, chi: C64::new(chi, 0.0), detuning_ratio };
        p.validate()?;
        Ok(p)
    }

    /// Drive that makes the DFS with index `c` dark: `χ = √2 μ c`.
    pub fn dark(atoms: usize, gamma_c: f64, mu: f64, c: i64, detuning_ratio: f64) -> Result<Self> {
        Self::new(atoms, gamma_c, mu, std::f64::consts::SQRT_2 * mu * c as f64, detuning_ratio)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms == 0 {
            return Err(Error::NoAtoms);
        }
        if !(self.gamma_c.is_finite() && self.gamma_c > 0.0) {
            return Err(Error::param("gamma_c", format!("must be positive, got {}", self.gamma_c)));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::param("mu", format!("must be non-negative, got {}", self.mu)));
        }
        if !(self.chi.re.is_finite() && self.chi.im.is_finite()) {
            return Err(Error::param("chi", "must be finite"));
        }
        if !self.detuning_ratio.is_finite() {
            return Err(Error::param("detuning_ratio", "must be finite"));
        }
        Ok(())
    }
}

/// Hermiticity tolerance on a density matrix.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Trace tolerance on a density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-8;
/// Lowest admissible eigenvalue of a density matrix.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// A density matrix on the symmetric sector at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    pub matrix: Matrix,
    pub time: f64,
}

impl DensityState {
    pub fn new(matrix: Matrix, time: f64) -> Self {
        Self { matrix, time }
    }

    /// `|v⟩⟨v|` for a normalised copy of `v`.
    pub fn pure(v: &StateVector) -> Self {
        let u = v.normalize();
        Self { matrix: &u * u.adjoint(), time: 0.0 }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: Matrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0), time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or(0.0)
    }

    /// `⟨v|ρ|v⟩`.
    pub fn population(&self, v: &StateVector) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }

    /// Checks the density-matrix invariants at the given tolerances.
    pub fn check(&self, trace_tol: f64, positivity_tol: f64) -> Result<()> {
        let violation = |what: String| Error::InvariantViolation { time: self.time, what };
        let herm = self.hermiticity_defect();
        if !(herm <= HERMITIAN_TOLERANCE) {
            return Err(violation(format!("hermiticity defect {herm:e}")));
        }
        let drift = (self.trace() - C64::new(1.0, 0.0)).norm();
        if !(drift <= trace_tol) {
            return Err(violation(format!("trace drift {drift:e}")));
        }
        let lowest = self.min_eigenvalue();
        if !(lowest >= -positivity_tol) {
            return Err(violation(format!("eigenvalue {lowest:e}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check(TRACE_TOLERANCE, POSITIVITY_TOLERANCE)
    }
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityState) -> f64 {
    // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}
