//! Venue-based HIV risk estimation over person-venue affiliation networks.
//!
//! The crate simulates sexual encounters as independent Poisson processes per
//! person and venue, links consecutive encounters at each venue into
//! partnerships, and runs per-encounter transmission from baseline-positive
//! partners. On top of the simulator it provides the venue-share risk
//! estimator, logistic-regression baselines, tie-aware AUC, person-time
//! incidence, venue misreporting scenarios and a replication harness.

pub mod encounters;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod network;
pub mod rng;
pub mod scenarios;
pub mod transmission;

pub use error::{Error, Result};
pub use estimator::{estimate_q, estimate_risk, SampleData};
pub use network::{AffiliationNetwork, EncounterLog, ParameterVector, PartnershipList, VenueGraph};
pub use rng::RngStream;
pub use scenarios::{ScenarioKind, ScenarioSpec};
pub mod harness;
pub mod io;
pub mod parallel;

pub use harness::{calibrate_pi, run_replication, run_study, ReplicationResult, StudyConfig, StudyOutput, StudySummary};
