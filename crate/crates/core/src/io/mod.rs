//! Data ingestion, configuration and result persistence.

pub mod config;
pub mod estimate;
pub mod format;
pub mod participants;
pub mod results;

pub use config::{load_config, BaseSource, ConfigFile, LoadedConfig};
pub use estimate::{estimate_participants, write_estimate, EstimateReport, EstimateSummary};
pub use format::format_g17;
pub use participants::{load_participants, save_participants, ParticipantRecord, ParticipantTable};
pub use results::{write_calibration, write_edges, write_results, write_study};
