//! File formats, the planning pipeline and report writers on top of `ebess-core`.

pub mod demand;
pub mod output;
pub mod report;
pub mod scenario;

pub use demand::{parse_demand_csv, read_demand_csv, DemandCsvError};
pub use output::{write_dispatch_csv, write_outputs, write_schedule_csv, OutputError};
pub use report::{plan, Answers, IrrOutcome, Plan, PlanOptions, PlanningReport, PipelineError};
pub use scenario::{bundled_scenarios, load_scenario, parse_scenario, resolve_scenario, scenario_to_toml, ScenarioError};
