//! Fixed-step classical RK4 integration of the master equation with sampled
//! diagnostics.

use log::debug;

use crate::dfs::dfs_frame;
use crate::error::{Error, Result};
use crate::lindblad::operators::{Controls, Generator, LiouvillianModel, Workspace};
use crate::lindblad::state::{purity, DensityState};
use crate::{Matrix, StateVector, C64};

/// Trace drift or negative eigenvalue beyond which a run is aborted.
pub const RUN_INVARIANT_TOLERANCE: f64 = 1e-6;

/// A time-parameterised control law.
pub trait Drive {
    /// Controls at time `t`, in the same unit as `1/Γ_c`.
    fn controls(&self, t: f64) -> Controls;

    /// True when the controls never change, so operators are built once.
    fn is_constant(&self) -> bool {
        false
    }

    /// Index `C` of the DFS the protocol aims for.
    fn target_charge(&self) -> i64;
}

/// One row of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    /// Time in units of `1/Γ_c`.
    pub t_gamma: f64,
    pub purity: f64,
    /// Overlap with the DFS at the instantaneous `μ(t)`.
    pub overlap_current: f64,
    /// Overlap with the DFS at `μ = 1`.
    pub overlap_target: f64,
    /// `|χ + χ_s|`.
    pub drive_abs: f64,
    /// `|Tr ρ − 1|`.
    pub trace_drift: f64,
    /// `⟨J²⟩`.
    pub j_squared: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    pub final_state: DensityState,
    pub steps: usize,
    pub dt: f64,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record a sample every this many steps; the first and last steps are
    /// always recorded.
    pub sample_every: usize,
}

impl IntegrationOptions {
    /// Stride giving roughly `samples` rows over the run.
    pub fn with_samples(t_final: f64, dt: f64, samples: usize) -> Self {
        let steps = step_count(t_final, dt);
        Self { t_final, dt, sample_every: steps.div_ceil(samples.max(1)).max(1) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::param("t_final", format!("must be non-negative, got {}", self.t_final)));
        }
        if self.sample_every == 0 {
            return Err(Error::param("sample_every", "must be at least 1"));
        }
        Ok(())
    }
}

fn step_count(t_final: f64, dt: f64) -> usize {
    if t_final <= 0.0 {
        0
    } else {
        ((t_final / dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Orthonormal frames of the current and target DFS, cached by `μ`.
struct OverlapProbe<'a> {
    model: &'a LiouvillianModel,
    charge: i64,
    target: Vec<StateVector>,
    current_mu: f64,
    current: Vec<StateVector>,
}

impl<'a> OverlapProbe<'a> {
    fn new(model: &'a LiouvillianModel, charge: i64) -> Result<Self> {
        let target = dfs_frame(model.basis(), charge, 1.0)?;
        Ok(Self { model, charge, target, current_mu: f64::NAN, current: Vec::new() })
    }

    fn frame_at(&mut self, mu: f64) -> Result<&[StateVector]> {
        if mu != self.current_mu {
            self.current = if mu == 0.0 {
                // No eigenbasis at μ = 0; the ground state is the dark state there.
                vec![self.model.basis().ground_state()]
            } else {
                dfs_frame(self.model.basis(), self.charge, mu)?
            };
            self.current_mu = mu;
        }
        Ok(&self.current)
    }
}

fn frame_population(rho: &Matrix, frame: &[StateVector]) -> f64 {
    frame.iter().map(|v| v.dotc(&(rho * v)).re).sum()
}

/// Integrates `rho0` under `drive` with classical RK4.
///
/// The step is shrunk slightly if needed so that an integer number of steps
/// lands exactly on `t_final`. Trace drift and positivity are checked at
/// every sample; a violation beyond [`RUN_INVARIANT_TOLERANCE`] aborts with
/// [`Error::InvariantViolation`].
pub fn integrate(
    model: &LiouvillianModel,
    rho0: &DensityState,
    drive: &dyn Drive,
    opts: &IntegrationOptions,
) -> Result<TrajectoryRecord> {
    opts.validate()?;
    let dim = model.basis().dim();
    if rho0.dim() != dim {
        return Err(Error::param("rho0", format!("dimension {} does not match sector {dim}", rho0.dim())));
    }
    let steps = step_count(opts.t_final, opts.dt);
    let dt = if steps == 0 { opts.dt } else { opts.t_final / steps as f64 };
    debug!("integrating {steps} steps of {dt:e} up to t = {}", opts.t_final);

    let mut probe = OverlapProbe::new(model, drive.target_charge())?;
    let mut samples = Vec::with_capacity(steps / opts.sample_every + 2);
    let mut rho = rho0.matrix.clone();
    let t0 = rho0.time;

    let mut ws = Workspace::new(dim);
    let mut k = [Matrix::zeros(dim, dim), Matrix::zeros(dim, dim), Matrix::zeros(dim, dim), Matrix::zeros(dim, dim)];
    let mut stage = Matrix::zeros(dim, dim);
    let constant = drive.is_constant().then(|| model.generator(&drive.controls(t0)));
    let mut start_gen = constant.is_none().then(|| model.generator(&drive.controls(t0)));

    samples.push(sample(model, &rho, t0, drive, &mut probe)?);
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        let t_next = t0 + (step + 1) as f64 * dt;
        match &constant {
            Some(g) => rk4_step(&mut rho, dt, [g, g, g], &mut k, &mut stage, &mut ws),
            None => {
                let g0 = start_gen.take().expect("generator carried from previous step");
                let g_half = model.generator(&drive.controls(t + 0.5 * dt));
                let g1 = model.generator(&drive.controls(t_next));
                rk4_step(&mut rho, dt, [&g0, &g_half, &g1], &mut k, &mut stage, &mut ws);
                start_gen = Some(g1);
            }
        }
        if (step + 1) % opts.sample_every == 0 || step + 1 == steps {
            samples.push(sample(model, &rho, t_next, drive, &mut probe)?);
        }
    }
    let final_state = DensityState::new(rho, t0 + steps as f64 * dt);
    Ok(TrajectoryRecord { samples, final_state, steps, dt })
}

fn rk4_step(
    rho: &mut Matrix,
    dt: f64,
    gens: [&Generator; 3],
    k: &mut [Matrix; 4],
    stage: &mut Matrix,
    ws: &mut Workspace,
) {
    let half = C64::new(0.5 * dt, 0.0);
    gens[0].apply(rho, &mut k[0], ws);
    stage.copy_from(rho);
    add_scaled(stage, half, &k[0]);
    gens[1].apply(stage, &mut k[1], ws);
    stage.copy_from(rho);
    add_scaled(stage, half, &k[1]);
    gens[1].apply(stage, &mut k[2], ws);
    stage.copy_from(rho);
    add_scaled(stage, C64::new(dt, 0.0), &k[2]);
    gens[2].apply(stage, &mut k[3], ws);
    let w = C64::new(dt / 6.0, 0.0);
    add_scaled(rho, w, &k[0]);
    add_scaled(rho, w * 2.0, &k[1]);
    add_scaled(rho, w * 2.0, &k[2]);
    add_scaled(rho, w, &k[3]);
}

/// `dst += a · src`.
fn add_scaled(dst: &mut Matrix, a: C64, src: &Matrix) {
    for (d, s) in dst.as_mut_slice().iter_mut().zip(src.as_slice()) {
        *d += a * s;
    }
}

fn sample(
    model: &LiouvillianModel,
    rho: &Matrix,
    t: f64,
    drive: &dyn Drive,
    probe: &mut OverlapProbe<'_>,
) -> Result<Sample> {
    let state = DensityState::new(rho.clone(), t);
    state.check(RUN_INVARIANT_TOLERANCE, RUN_INVARIANT_TOLERANCE)?;
    let controls = drive.controls(t);
    let overlap_target = frame_population(rho, &probe.target);
    let overlap_current = frame_population(rho, probe.frame_at(controls.mu)?);
    let j_squared = (model.j_squared() * rho).trace().re;
    Ok(Sample {
        t_gamma: t * model.gamma_c(),
        purity: purity(&state),
        overlap_current,
        overlap_target,
        drive_abs: controls.chi.norm(),
        trace_drift: (state.trace() - C64::new(1.0, 0.0)).norm(),
        j_squared,
    })
}

/// Observables compared between successive step sizes in
/// [`integrate_converged`].
fn final_observables(traj: &TrajectoryRecord) -> [f64; 2] {
    traj.last().map_or([f64::NAN; 2], |s| [s.purity, s.overlap_target])
}

/// Runs [`integrate`] and keeps halving `dt` until the final purity and
/// target overlap change by less than `tol`. The sample stride is doubled
/// along with each halving so every run records the same times. Returns the
/// finest run.
pub fn integrate_converged(
    model: &LiouvillianModel,
    rho0: &DensityState,
    drive: &dyn Drive,
    opts: &IntegrationOptions,
    tol: f64,
    max_halvings: usize,
) -> Result<TrajectoryRecord> {
    let mut current = *opts;
    let mut previous = integrate(model, rho0, drive, &current)?;
    for _ in 0..max_halvings {
        current.dt *= 0.5;
        current.sample_every = current.sample_every.saturating_mul(2);
        let next = integrate(model, rho0, drive, &current)?;
        let (a, b) = (final_observables(&previous), final_observables(&next));
        let change = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        debug!("dt = {:e}: observables moved by {change:e}", current.dt);
        if change < tol {
            return Ok(next);
        }
        previous = next;
    }
    Err(Error::Numerical(format!(
        "observables not converged to {tol:e} after {max_halvings} halvings (dt = {:e})",
        current.dt
    )))
}
