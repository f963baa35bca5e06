//! Success threshold and minimum-time searches over protocol families.

use log::{debug, info};
use rayon::prelude::*;

use crate::dfs::dfs_frame;
use crate::error::{Error, Result};
use crate::fock::SymmetricBasis;
use crate::linalg::{hermitian_eigen, stack_columns};
use crate::lindblad::{integrate, DensityState, IntegrationOptions, LiouvillianModel, TrajectoryRecord};
use crate::protocols::schedule::{
    central_shortcut_schedule, edge_shortcut_schedule, quench_schedule, ramp_schedule, EdgeTarget, ProtocolSchedule,
};
use crate::StateVector;

/// Bound on both final purity and final target-DFS overlap for a run to
/// count as a successful preparation.
pub const SUCCESS_THRESHOLD: f64 = 0.99;

/// True iff the final purity and final target overlap both reach
/// [`SUCCESS_THRESHOLD`].
pub fn meets_threshold(traj: &TrajectoryRecord) -> bool {
    traj.last().is_some_and(|s| passes(s.purity, s.overlap_target))
}

pub fn passes(purity: f64, overlap_target: f64) -> bool {
    purity >= SUCCESS_THRESHOLD && overlap_target >= SUCCESS_THRESHOLD
}

/// `|−1_g⟩^⊗N` as a density matrix.
pub fn initial_state(basis: &SymmetricBasis) -> DensityState {
    DensityState::pure(&basis.ground_state())
}

/// Which protocol a search varies the duration of.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProtocolFamily {
    /// With `mu_q = None` the quench ratio is chosen first as the smallest
    /// grid value whose long-time state has enough target overlap.
    Quench {
        mu_q: Option<f64>,
    },
    Ramp,
    EdgeShortcut {
        cutoff_factor: f64,
    },
    CentralShortcut,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchSettings {
    pub atoms: usize,
    pub charge: i64,
    pub gamma_c: f64,
    pub detuning_ratio: f64,
    /// Step for quench and ramp runs.
    pub dt: f64,
    /// Steps per shortcut run; the shortcut step scales with its duration.
    pub shortcut_steps: usize,
    /// Duration bracket `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    /// Required long-time target overlap when choosing a quench ratio.
    pub overlap_bound: f64,
    /// Stop once `(upper − lower)/upper` falls below this.
    pub rel_tol: f64,
    /// Grid spacing for the quench ratio.
    pub mu_step: f64,
}

impl SearchSettings {
    pub fn new(atoms: usize, charge: i64, lower: f64, upper: f64) -> Self {
        Self {
            atoms,
            charge,
            gamma_c: 1.0,
            detuning_ratio: 0.1,
            dt: 5e-3,
            shortcut_steps: 1000,
            lower,
            upper,
            overlap_bound: SUCCESS_THRESHOLD,
            rel_tol: 1e-2,
            mu_step: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Shortest duration meeting the threshold, in the time unit of `1/Γ_c`.
    pub t_final: f64,
    /// `μ_q` for quenches, `β = 1/t_f` otherwise.
    pub control: f64,
    pub evaluations: usize,
}

/// Builds the schedule of `family` for a run of duration `t_final`.
pub fn family_schedule(family: ProtocolFamily, settings: &SearchSettings, t_final: f64) -> Result<ProtocolSchedule> {
    match family {
        ProtocolFamily::Quench { mu_q } => {
            let mu_q = mu_q.ok_or_else(|| Error::param("mu_q", "quench ratio not chosen"))?;
            quench_schedule(mu_q, settings.charge)
        }
        ProtocolFamily::Ramp => ramp_schedule(1.0 / t_final, settings.charge),
        ProtocolFamily::CentralShortcut => central_shortcut_schedule(1.0 / t_final),
        ProtocolFamily::EdgeShortcut { cutoff_factor } => {
            let target = EdgeTarget::from_charge(settings.charge, settings.atoms).ok_or_else(|| {
                Error::param("charge", format!("edge shortcut needs C = ±N, got {}", settings.charge))
            })?;
            edge_shortcut_schedule(
                1.0 / t_final,
                target,
                settings.atoms,
                cutoff_factor,
                settings.detuning_ratio,
                settings.gamma_c,
            )
        }
    }
}

/// Step size used for a run of `family` lasting `t_final`.
pub fn family_step(family: ProtocolFamily, settings: &SearchSettings, t_final: f64) -> f64 {
    match family {
        ProtocolFamily::EdgeShortcut { .. } | ProtocolFamily::CentralShortcut => {
            t_final / settings.shortcut_steps.max(1) as f64
        }
        _ => settings.dt,
    }
}

/// Long-time target overlap of a quench to `mu_q`: the system settles into
/// the `j = N` dark state of the DFS at `mu_q`, found as the `J² = N(N+1)`
/// eigenvector inside that DFS.
pub fn quench_asymptotic_overlap(model: &LiouvillianModel, charge: i64, mu_q: f64) -> Result<f64> {
    let basis = model.basis();
    let n = basis.atoms() as f64;
    let settled: StateVector = if mu_q == 0.0 {
        basis.ground_state()
    } else {
        let frame = dfs_frame(basis, charge, mu_q)?;
        let q = stack_columns(&frame);
        let reduced = q.adjoint() * model.j_squared() * &q;
        let (vals, vecs) = hermitian_eigen(&reduced);
        let top = vals.len() - 1;
        if (vals[top] - n * (n + 1.0)).abs() > 1e-6 * n * (n + 1.0) {
            return Err(Error::Numerical(format!(
                "DFS C = {charge} at mu = {mu_q} holds no j = N state (largest J² = {})",
                vals[top]
            )));
        }
        (&q * vecs.column(top)).normalize()
    };
    let target = dfs_frame(basis, charge, 1.0)?;
    Ok(target.iter().map(|v| v.dotc(&settled).norm_sqr()).sum())
}

/// Smallest `μ_q` on the grid whose long-time target overlap reaches the
/// bound.
pub fn choose_quench_ratio(model: &LiouvillianModel, charge: i64, bound: f64, step: f64) -> Result<f64> {
    let count = (1.0 / step).round() as usize;
    for i in 0..count {
        let mu_q = i as f64 * step;
        if mu_q >= 1.0 {
            break;
        }
        if quench_asymptotic_overlap(model, charge, mu_q)? >= bound {
            return Ok(mu_q);
        }
    }
    Err(Error::NoBracket { lower: 0.0, upper: 1.0 })
}

/// Runs `family` for `t_final` from the ground state and reports success.
fn evaluate(model: &LiouvillianModel, family: ProtocolFamily, settings: &SearchSettings, t_final: f64) -> Result<bool> {
    let schedule = family_schedule(family, settings, t_final)?;
    let dt = family_step(family, settings, t_final);
    let opts = IntegrationOptions { t_final, dt, sample_every: usize::MAX / 2 };
    let traj = integrate(model, &initial_state(model.basis()), &schedule, &opts)?;
    let ok = meets_threshold(&traj);
    debug!("{family:?} t_f = {t_final:.4}: {ok}");
    Ok(ok)
}

/// Shortest duration meeting [`SUCCESS_THRESHOLD`] within `family`.
///
/// Ramps and shortcuts are searched by k-section on `t_f`, assuming success
/// is monotone in the duration. Each round probes one interior point per
/// worker thread (at most three), so a single worker bisects. A quench has
/// no duration parameter, so its time is the first passage of a single long
/// run.
pub fn search_min_time(family: ProtocolFamily, settings: &SearchSettings) -> Result<SearchOutcome> {
    if !(settings.lower > 0.0 && settings.upper > settings.lower) {
        return Err(Error::param(
            "bounds",
            format!("need 0 < lower < upper, got [{}, {}]", settings.lower, settings.upper),
        ));
    }
    let basis = SymmetricBasis::new(settings.atoms)?;
    let model = LiouvillianModel::new(basis, settings.gamma_c, settings.detuning_ratio);
    if let ProtocolFamily::Quench { mu_q } = family {
        return quench_first_passage(&model, mu_q, settings);
    }

    let ends: Vec<Result<bool>> =
        [settings.lower, settings.upper].par_iter().map(|&t| evaluate(&model, family, settings, t)).collect();
    let (at_lower, at_upper) = (ends[0].as_ref().map_err(clone_err)?, ends[1].as_ref().map_err(clone_err)?);
    if *at_lower || !*at_upper {
        return Err(Error::NoBracket { lower: settings.lower, upper: settings.upper });
    }
    let (mut lo, mut hi) = (settings.lower, settings.upper);
    let mut evaluations = 2;
    let k = rayon::current_num_threads().clamp(1, 3);
    while (hi - lo) / hi > settings.rel_tol {
        let probes: Vec<f64> = (1..=k).map(|i| lo + (hi - lo) * i as f64 / (k + 1) as f64).collect();
        let results: Vec<Result<bool>> = probes.par_iter().map(|&t| evaluate(&model, family, settings, t)).collect();
        evaluations += probes.len();
        let mut new_lo = lo;
        let mut new_hi = hi;
        for (t, r) in probes.iter().zip(results) {
            if r? {
                new_hi = new_hi.min(*t);
            } else if *t < new_hi {
                new_lo = new_lo.max(*t);
            }
        }
        // Non-monotone outcomes: keep the shortest success and the longest
        // failure below it.
        lo = new_lo.min(new_hi);
        hi = new_hi;
        info!("{family:?}: bracket [{lo:.4}, {hi:.4}]");
    }
    Ok(SearchOutcome { t_final: hi, control: 1.0 / hi, evaluations })
}

fn clone_err(e: &Error) -> Error {
    Error::Numerical(e.to_string())
}

fn quench_first_passage(
    model: &LiouvillianModel,
    mu_q: Option<f64>,
    settings: &SearchSettings,
) -> Result<SearchOutcome> {
    let mu_q = match mu_q {
        Some(m) => m,
        None => choose_quench_ratio(model, settings.charge, settings.overlap_bound, settings.mu_step)?,
    };
    let schedule = quench_schedule(mu_q, settings.charge)?;
    // Resolve the crossing far below the requested relative tolerance.
    let resolution = settings.lower * settings.rel_tol * 0.05;
    let stride = ((resolution / settings.dt).floor() as usize).max(1);
    let opts = IntegrationOptions { t_final: settings.upper, dt: settings.dt, sample_every: stride };
    let traj = integrate(model, &initial_state(model.basis()), &schedule, &opts)?;
    let first = traj.samples.iter().find(|s| passes(s.purity, s.overlap_target));
    match first {
        Some(s) => Ok(SearchOutcome { t_final: s.t_gamma / settings.gamma_c, control: mu_q, evaluations: 1 }),
        None => Err(Error::NoBracket { lower: settings.lower, upper: settings.upper }),
    }
}
