//! Control schedules for the preparation protocols.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::lindblad::{Controls, Drive, LiouvillianModel};
use crate::{Matrix, C64};

/// Relative slack on `βt = 1` when deciding whether a ramp is still running.
const RAMP_END_SLACK: f64 = 1e-12;

/// Which one-dimensional edge DFS an edge shortcut prepares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeTarget {
    /// `k = (N, 0, 0)`, DFS index `C = −N`.
    Negative,
    /// `k = (0, 0, N)`, DFS index `C = +N`.
    Positive,
}

impl EdgeTarget {
    /// Sign in front of the shortcut drive.
    pub const fn sign(self) -> f64 {
        match self {
            EdgeTarget::Negative => -1.0,
            EdgeTarget::Positive => 1.0,
        }
    }

    pub const fn charge(self, atoms: usize) -> i64 {
        match self {
            EdgeTarget::Negative => -(atoms as i64),
            EdgeTarget::Positive => atoms as i64,
        }
    }

    pub fn from_charge(c: i64, atoms: usize) -> Option<Self> {
        if c == -(atoms as i64) {
            Some(EdgeTarget::Negative)
        } else if c == atoms as i64 {
            Some(EdgeTarget::Positive)
        } else {
            None
        }
    }
}

/// Extra drive `χ_s = ±i 2√2 μ̇ / (Γ_c (Δ_c′/κ − i)(μ⁴ − 1))` that makes the
/// shifted cavity drive a shortcut into an edge DFS.
pub fn edge_shortcut_drive(target: EdgeTarget, mu: f64, mu_dot: f64, gamma_c: f64, detuning_ratio: f64) -> C64 {
    debug_assert!(mu != 1.0, "edge shortcut drive is singular at mu = 1");
    let numerator = C64::new(0.0, target.sign() * 2.0 * SQRT_2 * mu_dot);
    numerator / (C64::new(detuning_ratio, -1.0) * (gamma_c * (mu.powi(4) - 1.0)))
}

/// `α = 2μμ̇/(μ⁴ + 1)` for the term `iα(b₋₁†b₁ − b₁†b₋₁)`.
pub fn central_shortcut_strength(mu: f64, mu_dot: f64) -> f64 {
    2.0 * mu * mu_dot / (mu.powi(4) + 1.0)
}

/// The shortcut term of an edge shortcut written as an added Hamiltonian,
/// `(√Γ_c/2)[(Δ_c′/κ + i) χ_s* L + (Δ_c′/κ − i) χ_s L†]`, with `L` built
/// from the unshifted `controls`. Differs from shifting `χ → χ + χ_s` in
/// both `L` and `H` only by a constant energy.
pub fn edge_shortcut_hamiltonian(model: &LiouvillianModel, controls: &Controls, chi_s: C64) -> Matrix {
    let l = model.jump(controls);
    let d = model.detuning_ratio();
    let scale = 0.5 * model.gamma_c().sqrt();
    let a = C64::new(d, 1.0) * chi_s.conj() * scale;
    let b = C64::new(d, -1.0) * chi_s * scale;
    &l * a + l.adjoint() * b
}

/// A time-parameterised control law for one protocol. Times are in the unit
/// of `1/Γ_c` and `beta` is a rate in the same unit.
#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolSchedule {
    /// `μ = μ_q` and `χ = √2 μ_q C` for all `t ≥ 0`.
    Quench {
        mu_q: f64,
        charge: i64,
    },
    /// `μ = βt`, `χ = √2 μ C` until `μ = 1`.
    Ramp {
        beta: f64,
        charge: i64,
    },
    EdgeShortcut(EdgeShortcut),
    /// `μ = βt`, `χ = 0` plus `iα(b₋₁†b₁ − b₁†b₋₁)`.
    CentralShortcut {
        beta: f64,
    },
}

/// Linear ramp into an edge DFS with a shifted, clamped cavity drive.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeShortcut {
    pub beta: f64,
    pub target: EdgeTarget,
    pub atoms: usize,
    pub cutoff_factor: f64,
    pub detuning_ratio: f64,
    pub gamma_c: f64,
    /// `μ` at which `|χ + χ_s|` first reaches the cap.
    pub clamp_mu: f64,
    /// Total drive held from `clamp_mu` on.
    pub clamp_drive: C64,
}

pub fn quench_schedule(mu_q: f64, charge: i64) -> Result<ProtocolSchedule> {
    if !(0.0..1.0).contains(&mu_q) {
        return Err(Error::param("mu_q", format!("must lie in [0, 1), got {mu_q}")));
    }
    Ok(ProtocolSchedule::Quench { mu_q, charge })
}

pub fn ramp_schedule(beta: f64, charge: i64) -> Result<ProtocolSchedule> {
    check_beta(beta)?;
    Ok(ProtocolSchedule::Ramp { beta, charge })
}

pub fn central_shortcut_schedule(beta: f64) -> Result<ProtocolSchedule> {
    check_beta(beta)?;
    Ok(ProtocolSchedule::CentralShortcut { beta })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    Ok(())
}

pub fn edge_shortcut_schedule(
    beta: f64,
    target: EdgeTarget,
    atoms: usize,
    cutoff_factor: f64,
    detuning_ratio: f64,
    gamma_c: f64,
) -> Result<ProtocolSchedule> {
    check_beta(beta)?;
    if atoms == 0 {
        return Err(Error::NoAtoms);
    }
    if !(cutoff_factor > SQRT_2) || !cutoff_factor.is_finite() {
        return Err(Error::param("cutoff_factor", format!("must exceed sqrt(2), got {cutoff_factor}")));
    }
    if !(gamma_c > 0.0) {
        return Err(Error::param("gamma_c", "must be positive"));
    }
    let mut s = EdgeShortcut {
        beta,
        target,
        atoms,
        cutoff_factor,
        detuning_ratio,
        gamma_c,
        clamp_mu: 1.0,
        clamp_drive: C64::new(0.0, 0.0),
    };
    let cap = s.cap();
    let excess = |mu: f64| s.ideal_drive(mu).norm() - cap;
    // The drive magnitude grows monotonically towards the pole at μ = 1.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if excess(lo) >= 0.0 {
        hi = 0.0;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if excess(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let at_cap = s.ideal_drive(hi);
    s.clamp_mu = hi;
    s.clamp_drive = at_cap / at_cap.norm() * cap;
    Ok(ProtocolSchedule::EdgeShortcut(s))
}

impl EdgeShortcut {
    /// `cutoff_factor · √2 · N`.
    pub fn cap(&self) -> f64 {
        self.cutoff_factor * SQRT_2 * self.atoms as f64
    }

    pub fn charge(&self) -> i64 {
        self.target.charge(self.atoms)
    }

    /// Unclamped `χ + χ_s` at pump ratio `mu < 1`.
    pub fn ideal_drive(&self, mu: f64) -> C64 {
        let base = SQRT_2 * mu * self.charge() as f64;
        base + edge_shortcut_drive(self.target, mu, self.beta, self.gamma_c, self.detuning_ratio)
    }

    /// Time at which the clamp engages.
    pub fn clamp_time(&self) -> f64 {
        self.clamp_mu / self.beta
    }
}

impl ProtocolSchedule {
    /// Final time of the control ramp, if the protocol has one.
    pub fn ramp_time(&self) -> Option<f64> {
        match self {
            ProtocolSchedule::Quench { .. } => None,
            ProtocolSchedule::Ramp { beta, .. }
            | ProtocolSchedule::CentralShortcut { beta }
            | ProtocolSchedule::EdgeShortcut(EdgeShortcut { beta, .. }) => Some(1.0 / beta),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProtocolSchedule::Quench { .. } => "quench",
            ProtocolSchedule::Ramp { .. } => "ramp",
            ProtocolSchedule::EdgeShortcut(_) => "edge_shortcut",
            ProtocolSchedule::CentralShortcut { .. } => "central_shortcut",
        }
    }
}

/// `μ = βt` capped at 1.
fn ramp_mu(beta: f64, t: f64) -> f64 {
    (beta * t).clamp(0.0, 1.0)
}

impl Drive for ProtocolSchedule {
    fn controls(&self, t: f64) -> Controls {
        match self {
            ProtocolSchedule::Quench { mu_q, charge } => Controls::plain(*mu_q, SQRT_2 * mu_q * *charge as f64),
            ProtocolSchedule::Ramp { beta, charge } => {
                let mu = ramp_mu(*beta, t);
                Controls::plain(mu, SQRT_2 * mu * *charge as f64)
            }
            ProtocolSchedule::CentralShortcut { beta } => {
                let mu = ramp_mu(*beta, t);
                // Left-continuous at the ramp end so the last RK4 stage still
                // sees the drive; rounding in t_f must not switch it off.
                let rate = if beta * t <= 1.0 + RAMP_END_SLACK { *beta } else { 0.0 };
                Controls { mu, chi: C64::new(0.0, 0.0), raman_alpha: central_shortcut_strength(mu, rate) }
            }
            ProtocolSchedule::EdgeShortcut(s) => {
                let mu = ramp_mu(s.beta, t);
                let chi = if mu >= s.clamp_mu { s.clamp_drive } else { s.ideal_drive(mu) };
                Controls { mu, chi, raman_alpha: 0.0 }
            }
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, ProtocolSchedule::Quench { .. })
    }

    fn target_charge(&self) -> i64 {
        match self {
            ProtocolSchedule::Quench { charge, .. } | ProtocolSchedule::Ramp { charge, .. } => *charge,
            ProtocolSchedule::CentralShortcut { .. } => 0,
            ProtocolSchedule::EdgeShortcut(s) => s.charge(),
        }
    }
}
