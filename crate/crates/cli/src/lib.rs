//! Command-line front end for `relstab-core`: requests, reference data,
//! reports, sweeps and the self-check battery.

pub mod analysis;
pub mod error;
pub mod expr;
pub mod presets;
pub mod reference;
pub mod report;
pub mod request;
pub mod sampling;
pub mod selfcheck;
pub mod simulate;
pub mod sweep;
pub mod table;

pub use analysis::{run_analysis, run_analysis_timed};
pub use error::{CliError, EXIT_CONSISTENCY, EXIT_INPUT, EXIT_OK};
pub use presets::{find_preset, preset_names, Preset, PRESETS};
pub use report::{StabilityReport, Status, REPORT_SCHEMA};
pub use request::{AnalysisRequest, PotentialRequest, Section, REQUEST_SCHEMA};
pub use selfcheck::{run_selfcheck, CheckResult, SelfcheckReport};
pub use sweep::{run_sweep, SweepReport};
