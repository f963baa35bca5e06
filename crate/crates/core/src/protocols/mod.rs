//! Preparation protocols: quench, linear ramp and the two shortcut
//! schedules, the map from laboratory to effective parameters, and
//! threshold-based minimum-time searches.

mod params;
mod schedule;
mod search;

pub use params::{map_physical_params, PhysicalParams, RegimeReport};
pub use schedule::{
    central_shortcut_schedule, central_shortcut_strength, edge_shortcut_drive, edge_shortcut_hamiltonian,
    edge_shortcut_schedule, quench_schedule, ramp_schedule, EdgeShortcut, EdgeTarget, ProtocolSchedule,
};
pub use search::{
    choose_quench_ratio, family_schedule, family_step, initial_state, meets_threshold, passes,
    quench_asymptotic_overlap, search_min_time, ProtocolFamily, SearchOutcome, SearchSettings, SUCCESS_THRESHOLD,
};
