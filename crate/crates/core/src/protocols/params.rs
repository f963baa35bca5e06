use log::warn;

use crate::error::{Error, Result};
use crate::lindblad::EffectiveParams;

/// Ratio treated as "much greater than" in the regime checks.
const DOMINANCE: f64 = 10.0;

/// Laboratory parameters of the cavity, the atoms and the drives, all in
/// one rate unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Cavity half-linewidth `κ`.
    pub kappa: f64,
    /// Vacuum Rabi frequency `g`.
    pub g: f64,
    pub omega1_amp: f64,
    pub omega2_amp: f64,
    /// Cavity pump amplitude `η`.
    pub eta: f64,
    /// Excited-state detuning `Δ_e`.
    pub delta_e: f64,
    /// Dressed cavity detuning `Δ_c′`.
    pub delta_c_prime: f64,
}

/// Whether the parameters sit inside the regime where the effective model
/// is derived. Violations are reported, never enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegimeReport {
    /// `|Δ_e| ≫ g, |Ω₁|, |Ω₂|`.
    pub far_detuned: bool,
    /// `κ ≫ √N g |Ω_i| / |Δ_e|` for both drives.
    pub cavity_fast: bool,
}

impl RegimeReport {
    pub fn ok(&self) -> bool {
        self.far_detuned && self.cavity_fast
    }
}

impl PhysicalParams {
    pub fn regime(&self, atoms: usize) -> RegimeReport {
        let de = self.delta_e.abs();
        let far_detuned = [self.g, self.omega1_amp, self.omega2_amp].iter().all(|x| de >= DOMINANCE * x.abs());
        let collective = (atoms as f64).sqrt() * self.g.abs() / de;
        let cavity_fast =
            [self.omega1_amp, self.omega2_amp].iter().all(|w| self.kappa >= DOMINANCE * collective * w.abs());
        RegimeReport { far_detuned, cavity_fast }
    }
}

/// `Γ_c = κg²|Ω₁|²/(2Δ_e²(Δ_c′² + κ²))`, `μ = √(|Ω₂|/|Ω₁|)`,
/// `χ = 2ηΔ_e/(g|Ω₁|)`.
pub fn map_physical_params(p: &PhysicalParams, atoms: usize) -> Result<EffectiveParams> {
    if !(p.omega1_amp > 0.0) {
        return Err(Error::param("omega1_amp", "must be positive"));
    }
    if !(p.kappa > 0.0) {
        return Err(Error::param("kappa", "must be positive"));
    }
    if p.delta_e == 0.0 || !p.delta_e.is_finite() {
        return Err(Error::param("delta_e", "must be non-zero and finite"));
    }
    if p.g == 0.0 {
        return Err(Error::param("g", "must be non-zero"));
    }
    if p.omega2_amp < 0.0 {
        return Err(Error::param("omega2_amp", "must be non-negative"));
    }
    let report = p.regime(atoms);
    if !report.far_detuned {
        warn!("|delta_e| does not dominate g and the drive amplitudes; effective model may be inaccurate");
    }
    if !report.cavity_fast {
        warn!("kappa does not dominate the collective coupling; cavity elimination may be inaccurate");
    }
    let gamma_c = p.kappa * p.g * p.g * p.omega1_amp * p.omega1_amp
        / (2.0 * p.delta_e * p.delta_e * (p.delta_c_prime * p.delta_c_prime + p.kappa * p.kappa));
    let mu = (p.omega2_amp / p.omega1_amp).sqrt();
    let chi = 2.0 * p.eta * p.delta_e / (p.g * p.omega1_amp);
    EffectiveParams::new(atoms, gamma_c, mu, chi, p.delta_c_prime / p.kappa)
}
