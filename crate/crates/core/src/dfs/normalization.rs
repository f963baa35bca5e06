//! Closed-form normalisations and overlaps of the eigenstate families.
//!
//! The sums mix large factorials with small powers of `μ`, so every term is
//! evaluated as a log-magnitude with a sign and the terms are accumulated
//! relative to the largest one with compensated summation. The closed forms
//! hold for `0 < μ ≤ 1`; above that range the explicit vectors are used.

use std::f64::consts::{LN_2, SQRT_2};

use crate::dfs::eigenstates::{ln_binomial, raw_complementary, raw_eigenstate, EigenstateLabel};
use crate::error::{Error, Result};
use crate::fock::{ln_factorial, OccupationVector, SymmetricBasis};

/// A positive normalisation constant together with its logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationValue {
    pub value: f64,
    pub ln_value: f64,
}

impl NormalizationValue {
    fn from_ln(ln_value: f64, k: OccupationVector, mu: f64) -> Result<Self> {
        let value = ln_value.exp();
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Overflow { k, mu });
        }
        Ok(Self { value, ln_value })
    }
}

/// The creation modes made mutually orthogonal (as coefficient vectors):
/// `c_β = c₂ − a₁c₁` and `c_γ = c₃ − a₂c₁ − a₃c_β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalizedModes {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub c_beta: [f64; 3],
    pub c_gamma: [f64; 3],
}

pub fn orthogonalized_modes(mu: f64) -> OrthogonalizedModes {
    let m2 = mu * mu;
    let a1 = SQRT_2 * (1.0 - m2) / (1.0 + m2);
    let a2 = ((m2 - 1.0) / (m2 + 1.0)).powi(2);
    let beta = m2 / (m2 + 1.0);
    let gamma = 2.0 * mu.powi(3) / (m2 + 1.0).powi(2);
    OrthogonalizedModes {
        a1,
        a2,
        a3: a1,
        c_beta: [beta * SQRT_2 * mu, beta * (m2 - 1.0), -beta * SQRT_2 * mu],
        c_gamma: [gamma * m2, -gamma * SQRT_2 * mu, gamma],
    }
}

/// `⟨c₁|c₁⟩ = [ĉ₁, ĉ₁†] = μ²(1+μ²)²/4`.
pub fn first_mode_commutator(mu: f64) -> f64 {
    mu * mu * (1.0 + mu * mu).powi(2) / 4.0
}

/// Signed log-magnitude `(ln|x|, sign(x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSigned {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogSigned {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Adds `Σ sᵢ e^{lᵢ}` aligned to the largest exponent with Kahan summation.
fn log_sum(terms: &[(f64, f64)]) -> LogSigned {
    let peak = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return LogSigned { ln_abs: f64::NEG_INFINITY, sign: 0.0 };
    }
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for &(ln_abs, sign) in terms {
        let y = sign * (ln_abs - peak).exp() - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    if sum == 0.0 {
        return LogSigned { ln_abs: f64::NEG_INFINITY, sign: 0.0 };
    }
    LogSigned { ln_abs: peak + sum.abs().ln(), sign: sum.signum() }
}

/// Closed-form quadruple sum for the raw inner product of two unnormalised
/// eigenstates, valid for `0 < mu ≤ 1`. Binomials with out-of-range
/// arguments contribute zero.
pub fn raw_overlap_closed_form(kp: OccupationVector, k: OccupationVector, mu: f64) -> Result<LogSigned> {
    let n = k.total();
    kp.check_total(n)?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param("mu", format!("closed form requires 0 < mu <= 1, got {mu}")));
    }
    let (k2, k3) = (k.k2 as i64, k.k3 as i64);
    let (k2p, k3p) = (kp.k2 as i64, kp.k3 as i64);
    let ni = n as i64;
    let ln_mu = mu.ln();
    let ln_gap = (1.0 - mu * mu).abs().ln();
    let gap_sign = if mu < 1.0 { -1.0 } else { 1.0 };
    let ln_lift = (mu * mu + 1.0).ln();
    let lift_power = (2 * ni - k2 - k2p - 2 * k3 - 2 * k3p) as f64;
    let outer_sign = if (k2 + k2p) % 2 == 0 { 1.0 } else { -1.0 };

    let binom = |top: i64, r: i64| -> Option<f64> {
        (top >= 0 && r >= 0 && r <= top).then(|| ln_binomial(top as usize, r as usize))
    };
    let mut terms = Vec::new();
    for q in 0..=k2p {
        for s in 0..=k2 {
            let r1_lo = (s - q).max(0);
            let r1_hi = k3p.min(k3 + s - q);
            for r1 in r1_lo..=r1_hi {
                let r2_hi = (k3p - r1).min(k3 - q + s - r1);
                for r2 in 0..=r2_hi {
                    let rest = ni - q - r1 - r2;
                    let gap_power = k2 + k2p + 2 * k3 + 2 * k3p - 2 * q - 2 * r1 - 4 * r2;
                    if rest < 0 || gap_power < 0 {
                        continue;
                    }
                    let binomials = [
                        binom(k2p, q),
                        binom(k2, s),
                        binom(k3p, r1),
                        binom(k3p - r1, r2),
                        binom(k3, q - s + r1),
                        binom(k3 - q + s - r1, r2),
                    ];
                    if binomials.iter().any(Option::is_none) {
                        continue;
                    }
                    let gap_term = if gap_power == 0 {
                        0.0
                    } else if mu == 1.0 {
                        continue;
                    } else {
                        gap_power as f64 * ln_gap
                    };
                    let two_power = (-2 * ni) as f64 + 0.5 * (k2 + k2p) as f64 + (2 * q + 3 * r1 + 4 * r2 - s) as f64;
                    let ln_term = two_power * LN_2
                        + binomials.iter().flatten().sum::<f64>()
                        + ln_factorial(rest as usize)
                        + ln_factorial((q + r1) as usize)
                        + ln_factorial(r2 as usize)
                        + (2 * ni + 2 * q + 2 * r1 + 4 * r2) as f64 * ln_mu
                        + gap_term
                        + lift_power * ln_lift;
                    let sign = outer_sign * if gap_power % 2 == 0 { 1.0 } else { gap_sign };
                    terms.push((ln_term, sign));
                }
            }
        }
    }
    let sum = log_sum(&terms);
    if sum.ln_abs.is_nan() || sum.ln_abs == f64::INFINITY {
        return Err(Error::Overflow { k, mu });
    }
    Ok(sum)
}

fn brute_basis(n: usize) -> Result<SymmetricBasis> {
    SymmetricBasis::new(n)
}

/// `𝒩_k`, from the closed form for `mu ≤ 1` and from the explicit vector
/// otherwise.
pub fn eigenstate_normalization(label: EigenstateLabel) -> Result<NormalizationValue> {
    let EigenstateLabel { k, mu } = label;
    if mu == 0.0 {
        return Err(Error::NonDiagonalizable);
    }
    if mu <= 1.0 {
        let raw = raw_overlap_closed_form(k, k, mu)?;
        if raw.sign <= 0.0 {
            return Err(Error::Numerical(format!("non-positive norm sum for {k} at mu = {mu}")));
        }
        return NormalizationValue::from_ln(-0.5 * raw.ln_abs, k, mu);
    }
    let v = raw_eigenstate(&brute_basis(k.total())?, label)?;
    NormalizationValue::from_ln(-v.norm().ln(), k, mu)
}

/// `𝒩ⁿ⊥ = μ^{4N} 𝒩_n`.
pub fn complementary_normalization(label: EigenstateLabel) -> Result<NormalizationValue> {
    let EigenstateLabel { k, mu } = label;
    if mu > 1.0 {
        let v = raw_complementary(&brute_basis(k.total())?, label)?;
        return NormalizationValue::from_ln(-v.norm().ln(), k, mu);
    }
    let base = eigenstate_normalization(label)?;
    NormalizationValue::from_ln(4.0 * k.total() as f64 * mu.ln() + base.ln_value, k, mu)
}

/// `⟨ψ_{k′}|ψ_k⟩` between normalised eigenstates at the same `mu`.
pub fn eigenstate_overlap(kp: OccupationVector, k: OccupationVector, mu: f64, n: usize) -> Result<f64> {
    k.check_total(n)?;
    kp.check_total(n)?;
    if mu == 0.0 {
        return Err(Error::NonDiagonalizable);
    }
    if mu > 1.0 {
        let basis = brute_basis(n)?;
        let a = raw_eigenstate(&basis, EigenstateLabel::new(kp, mu))?;
        let b = raw_eigenstate(&basis, EigenstateLabel::new(k, mu))?;
        return Ok(a.dotc(&b).re / (a.norm() * b.norm()));
    }
    let raw = raw_overlap_closed_form(kp, k, mu)?;
    if raw.sign == 0.0 {
        return Ok(0.0);
    }
    let np = eigenstate_normalization(EigenstateLabel::new(kp, mu))?;
    let nk = eigenstate_normalization(EigenstateLabel::new(k, mu))?;
    Ok(raw.sign * (raw.ln_abs + np.ln_value + nk.ln_value).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::transform::transform_matrices;

    fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn orthogonalized_modes_match_projections() {
        for mu in [0.1, 0.45, 0.8, 1.0] {
            let t = transform_matrices(mu).unwrap();
            let (c1, c2, c3) = (t.creation_column(0), t.creation_column(1), t.creation_column(2));
            let m = orthogonalized_modes(mu);
            assert!((dot(c1, c1) - first_mode_commutator(mu)).abs() < 1e-14);
            assert!((m.a1 - dot(c1, c2) / dot(c1, c1)).abs() < 1e-12);
            assert!((m.a2 - dot(c1, c3) / dot(c1, c1)).abs() < 1e-12);
            assert!((m.a3 - dot(m.c_beta, c3) / dot(m.c_beta, m.c_beta)).abs() < 1e-10);
            for i in 0..3 {
                assert!((m.c_beta[i] - (c2[i] - m.a1 * c1[i])).abs() < 1e-12);
                let g = c3[i] - m.a2 * c1[i] - m.a3 * m.c_beta[i];
                assert!((m.c_gamma[i] - g).abs() < 1e-12);
            }
            assert!(dot(c1, m.c_beta).abs() < 1e-12);
            assert!(dot(c1, m.c_gamma).abs() < 1e-12);
            assert!(dot(m.c_beta, m.c_gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_mu_gives_standard_form() {
        for k in [OccupationVector::new(2, 1, 2), OccupationVector::new(0, 5, 0), OccupationVector::new(3, 0, 1)] {
            let v = eigenstate_normalization(EigenstateLabel::new(k, 1.0)).unwrap();
            let expect = 1.0 / k.factorial_product().sqrt();
            assert!((v.value - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn self_overlap_is_one() {
        let k = OccupationVector::new(1, 2, 1);
        for mu in [0.2, 0.6, 1.0, 1.3] {
            assert!((eigenstate_overlap(k, k, mu, 4).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distinct_states_orthogonal_at_unit_mu() {
        let a = OccupationVector::new(1, 2, 1);
        let b = OccupationVector::new(2, 0, 2);
        assert!(eigenstate_overlap(a, b, 1.0, 4).unwrap().abs() < 1e-14);
    }

    #[test]
    fn log_sum_cancels_exactly() {
        let s = log_sum(&[(1.0, 1.0), (1.0, -1.0)]);
        assert_eq!(s.sign, 0.0);
        let s = log_sum(&[(0.0, 1.0), (0.0, 1.0)]);
        assert!((s.value() - 2.0).abs() < 1e-15);
    }
}
