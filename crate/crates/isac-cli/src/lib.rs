//! Scenario ingestion, KPI reporting and feasibility evaluation on top
//! of the sensing model and the radar simulator.
//!
//! The `isac` binary is a thin shell over this library: [`load_scenario`]
//! and [`evaluate`] drive the `max-range` and `feasibility` subcommands,
//! [`report::kpi_table`] the `kpi` subcommand, and [`Scenario::sim_scene`]
//! feeds `simulate`.

pub mod report;
pub mod scenario;

pub use report::{kpi_table, ReportFormat};
pub use scenario::{
    evaluate, load_scenario, parse_scenario, KpiReport, Placement, Scenario, ScenarioError,
    Verdict, DEFAULT_DETECTION_SNR_DB,
};
