//! Experiment orchestration: single runs, table presets, searches and DFS
//! structure listings.

use std::path::{Path, PathBuf};

use dfs_core::dfs::member_vectors;
use dfs_core::{
    central_shortcut_schedule, dfs_dimension, dfs_members, edge_shortcut_schedule, initial_state, integrate,
    lindblad::integrate_converged, map_physical_params, meets_threshold, quench_schedule, ramp_schedule,
    search_min_time, Drive, EdgeTarget, Error, IntegrationOptions, LiouvillianModel, PhysicalParams, ProtocolFamily,
    ProtocolSchedule, SearchSettings, SymmetricBasis, TrajectoryRecord,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{ConfigError, Convergence, ExperimentConfig, ProtocolKind};
use crate::output::{
    write_json, write_timeseries, DimensionEntry, FinalStateReport, MappedPoint, SearchReport, StructurePoint,
    StructureReport, SummaryRow, TableReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_THRESHOLD_UNMET: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Core { context: String, source: Error },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn core(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Core { source, .. } => match source {
                Error::NoBracket { .. } => EXIT_THRESHOLD_UNMET,
                Error::Numerical(_)
                | Error::InvariantViolation { .. }
                | Error::RankDeficient { .. }
                | Error::Overflow { .. } => EXIT_NUMERICAL,
                _ => EXIT_VALIDATION,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

/// Control schedule in the integrator's time unit (`1/Γ_c` scaled by the
/// configured `Γ_c`).
pub fn build_schedule(config: &ExperimentConfig) -> Result<ProtocolSchedule, CliError> {
    let gamma = config.gamma_c();
    let rate = config.beta.unwrap_or(0.0) * gamma;
    let context = format!("{} schedule", config.label());
    match config.protocol {
        ProtocolKind::Quench => quench_schedule(config.mu_q.unwrap_or(-1.0), config.charge),
        ProtocolKind::Ramp => ramp_schedule(rate, config.charge),
        ProtocolKind::CentralShortcut => central_shortcut_schedule(rate),
        ProtocolKind::EdgeShortcut => {
            let target = config.target.map(EdgeTarget::from).unwrap_or(EdgeTarget::Negative);
            edge_shortcut_schedule(
                rate,
                target,
                config.atoms,
                config.cutoff_factor.unwrap_or(0.0),
                config.detuning_ratio(),
                gamma,
            )
        }
    }
    .map_err(CliError::core(context))
}

/// Integrates the configured run without writing anything.
pub fn simulate(config: &ExperimentConfig) -> Result<(ProtocolSchedule, TrajectoryRecord), CliError> {
    config.validate()?;
    let gamma = config.gamma_c();
    let basis = SymmetricBasis::new(config.atoms).map_err(CliError::core("basis"))?;
    let model = LiouvillianModel::new(basis, gamma, config.detuning_ratio());
    let schedule = build_schedule(config)?;
    let t_final = config.t_final.ok_or_else(|| ConfigError::Invalid("t_final missing".into()))?;
    let dt = config.dt.ok_or_else(|| ConfigError::Invalid("dt missing".into()))?;
    let opts = IntegrationOptions::with_samples(t_final / gamma, dt / gamma, config.samples());
    let rho0 = initial_state(model.basis());
    let context = format!("run {}", config.label());
    let traj = match config.convergence {
        Some(Convergence { tol, max_halvings }) => {
            integrate_converged(&model, &rho0, &schedule, &opts, tol, max_halvings)
        }
        None => integrate(&model, &rho0, &schedule, &opts),
    }
    .map_err(CliError::core(context))?;
    Ok((schedule, traj))
}

/// Runs one experiment and writes its time series and final-state report.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<FinalStateReport, CliError> {
    let clock = std::time::Instant::now();
    let (schedule, traj) = simulate(config)?;
    let last = traj.last().ok_or_else(|| CliError::core("run")(Error::Numerical("no samples recorded".into())))?;
    let t_phys = config.t_final.unwrap_or_default() / config.gamma_c();
    let mu_final = schedule.controls(t_phys).mu;

    let basis = SymmetricBasis::new(config.atoms).map_err(CliError::core("basis"))?;
    let members = dfs_members(config.atoms, config.charge).map_err(CliError::core("members"))?;
    let populations = match member_vectors(&basis, config.charge, mu_final) {
        Ok(vectors) => {
            members.iter().zip(&vectors).map(|(k, v)| (k.to_string(), traj.final_state.population(v))).collect()
        }
        Err(e) => {
            warn!("no eigenstate populations at mu = {mu_final}: {e}");
            Default::default()
        }
    };
    let physical = config.physical.map(|p| {
        let params = PhysicalParams::from(p);
        let mapped = map_physical_params(&params, config.atoms).expect("validated on load");
        MappedPoint {
            gamma_c: mapped.gamma_c,
            mu: mapped.mu,
            chi: mapped.chi.re,
            detuning_ratio: mapped.detuning_ratio,
            regime_ok: params.regime(config.atoms).ok(),
        }
    });

    let paths = config.output_paths(out_dir);
    write_timeseries(&traj, &paths.timeseries).map_err(io_err(&paths.timeseries))?;
    let report = FinalStateReport {
        name: config.label(),
        atoms: config.atoms,
        charge: config.charge,
        summary: SummaryRow {
            protocol: config.protocol.to_string(),
            t_f: config.t_final.unwrap_or_default(),
            purity: last.purity,
            overlap_target: last.overlap_target,
            overlap_current: last.overlap_current,
            meets_threshold: meets_threshold(&traj),
        },
        mu_final,
        populations,
        steps: traj.steps,
        dt: traj.dt * config.gamma_c(),
        physical,
        timeseries: paths.timeseries.clone(),
    };
    write_json(&report, &paths.final_state).map_err(io_err(&paths.final_state))?;
    info!("{}: {} steps in {:.1} s", report.name, traj.steps, clock.elapsed().as_secs_f64());
    Ok(report)
}

fn preset(name: &str, atoms: usize, charge: i64, protocol: ProtocolKind, t_final: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(name.to_owned()),
        atoms,
        charge,
        protocol,
        mu_q: None,
        beta: None,
        cutoff_factor: None,
        target: None,
        detuning_ratio: None,
        gamma_c: None,
        t_final: Some(t_final),
        dt: None,
        samples: None,
        output: None,
        convergence: Some(Convergence::default()),
        search: None,
        physical: None,
    }
}

/// Applies defaults the same way a loaded file gets them.
fn finish(config: ExperimentConfig) -> ExperimentConfig {
    crate::config::parse_config(&crate::config::to_toml(&config)).expect("presets are valid")
}

/// The three runs of a result table, with defaults applied.
pub fn table_presets(table: u8) -> Option<Vec<ExperimentConfig>> {
    let atoms = 5;
    let configs = match table {
        1 => vec![
            ExperimentConfig { mu_q: Some(0.96), ..preset("table1_quench", atoms, -5, ProtocolKind::Quench, 318.0) },
            preset("table1_ramp", atoms, -5, ProtocolKind::Ramp, 137.0),
            ExperimentConfig {
                cutoff_factor: Some(5.0),
                ..preset("table1_edge_shortcut", atoms, -5, ProtocolKind::EdgeShortcut, 1.0)
            },
        ],
        2 => vec![
            ExperimentConfig { mu_q: Some(0.98), ..preset("table2_quench", atoms, 0, ProtocolKind::Quench, 396.0) },
            preset("table2_ramp", atoms, 0, ProtocolKind::Ramp, 330.0),
            preset("table2_central_shortcut", atoms, 0, ProtocolKind::CentralShortcut, 1.0),
        ],
        _ => return None,
    };
    Some(configs.into_iter().map(finish).collect())
}

/// Runs a table's presets in parallel, one output pair per run.
pub fn run_table(table: u8, out_dir: &Path) -> Result<TableReport, CliError> {
    let configs = table_presets(table).ok_or_else(|| ConfigError::Invalid(format!("no table {table}")))?;
    let reports: Vec<FinalStateReport> =
        configs.par_iter().map(|c| run_experiment(c, out_dir)).collect::<Result<_, _>>()?;
    let first = &configs[0];
    Ok(TableReport {
        table,
        atoms: first.atoms,
        charge: first.charge,
        detuning_ratio: first.detuning_ratio(),
        rows: reports.into_iter().map(|r| r.summary).collect(),
    })
}

/// Minimum duration meeting the success threshold for the configured
/// protocol family.
pub fn search(config: &ExperimentConfig) -> Result<SearchReport, CliError> {
    config.validate()?;
    let bounds = config.search.ok_or_else(|| ConfigError::Invalid("search needs a [search] table".into()))?;
    let gamma = config.gamma_c();
    let family = match config.protocol {
        ProtocolKind::Quench => ProtocolFamily::Quench { mu_q: config.mu_q },
        ProtocolKind::Ramp => ProtocolFamily::Ramp,
        ProtocolKind::CentralShortcut => ProtocolFamily::CentralShortcut,
        ProtocolKind::EdgeShortcut => {
            ProtocolFamily::EdgeShortcut { cutoff_factor: config.cutoff_factor.unwrap_or_default() }
        }
    };
    let mut settings = SearchSettings::new(config.atoms, config.charge, bounds.lower / gamma, bounds.upper / gamma);
    settings.gamma_c = gamma;
    settings.detuning_ratio = config.detuning_ratio();
    settings.dt = bounds.dt / gamma;
    settings.rel_tol = bounds.rel_tol;
    let outcome = search_min_time(family, &settings).map_err(CliError::core(format!("search {}", config.label())))?;
    let control = match config.protocol {
        ProtocolKind::Quench => outcome.control,
        _ => outcome.control / gamma,
    };
    Ok(SearchReport {
        name: config.label(),
        protocol: config.protocol.to_string(),
        atoms: config.atoms,
        charge: config.charge,
        t_f: outcome.t_final * gamma,
        control,
        evaluations: outcome.evaluations,
    })
}

/// Every symmetric occupation with its DFS index, and the DFS dimension
/// for each index.
pub fn dfs_structure(atoms: usize) -> Result<StructureReport, CliError> {
    let basis = SymmetricBasis::new(atoms).map_err(CliError::core("dfs-structure"))?;
    let points = basis
        .states()
        .iter()
        .map(|k| {
            let [k1, k2, k3] = k.as_array();
            StructurePoint { k1, k2, k3, charge: k.charge() }
        })
        .collect();
    let n = atoms as i64;
    let dimensions = (-n..=n)
        .map(|c| Ok(DimensionEntry { charge: c, dimension: dfs_dimension(atoms, c)? }))
        .collect::<Result<_, Error>>()
        .map_err(CliError::core("dfs-structure"))?;
    Ok(StructureReport { atoms, points, dimensions })
}
