//! Deterministic result files: JSON summaries and fixed-column CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::format::{format_g17, to_json_g17};
use crate::error::{Error, Result};
use crate::harness::{CalibrationPoint, Predictor, ReplicationResult, StudyOutput, StudySummary};
use crate::network::VenueGraph;
use crate::scenarios::ScenarioKind;

pub const SUMMARY_FILE: &str = "summary.json";
pub const REPLICATIONS_FILE: &str = "replications.csv";
pub const CALIBRATION_FILE: &str = "calibration.csv";
pub const EDGES_FILE: &str = "venue_edges.csv";

pub const REPLICATION_COLUMNS: [&str; 16] = [
    "scenario",
    "pi",
    "rep_index",
    "seed",
    "auc_multiple_lr_wave1",
    "auc_multiple_lr_wave2",
    "auc_simple_lr_wave1",
    "auc_simple_lr_wave2",
    "auc_venue_risk",
    "new_infections",
    "at_risk",
    "person_days_at_risk",
    "incidence",
    "encounter_q1",
    "encounter_median",
    "encounter_q3",
];

pub const CALIBRATION_COLUMNS: [&str; 4] = ["pi", "mean_rate", "std_error", "mean_new_infections"];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::input(format!("{}: {other:?}", path.display())),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let bytes = to_json_g17(value).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes a CSV of `header` plus pre-formatted rows.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    wtr.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        wtr.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

pub fn replication_row(scenario: ScenarioKind, r: &ReplicationResult) -> Vec<String> {
    let mut row = vec![
        scenario.name().to_string(),
        format_g17(r.pi),
        r.rep_index.to_string(),
        r.seed.to_string(),
    ];
    row.extend(Predictor::ALL.iter().map(|&p| r.auc_of(p).map(format_g17).unwrap_or_default()));
    row.extend([
        r.new_infections.to_string(),
        r.at_risk.to_string(),
        format_g17(r.person_days_at_risk),
        format_g17(r.incidence),
    ]);
    row.extend(r.encounter_quartiles.iter().map(|&q| format_g17(q)));
    row
}

pub fn write_replications(path: &Path, scenario: ScenarioKind, results: &[ReplicationResult]) -> Result<()> {
    write_table(path, &REPLICATION_COLUMNS, results.iter().map(|r| replication_row(scenario, r)))
}

/// Writes `summary.json` and `replications.csv` into `out_dir`, creating it
/// if needed, and returns the written paths.
pub fn write_results(summary: &StudySummary, raw: &[ReplicationResult], out_dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let summary_path = out_dir.join(SUMMARY_FILE);
    write_json(summary, &summary_path)?;
    let raw_path = out_dir.join(REPLICATIONS_FILE);
    write_replications(&raw_path, summary.scenario, raw)?;
    Ok(vec![summary_path, raw_path])
}

pub fn write_study(output: &StudyOutput, out_dir: &Path) -> Result<Vec<PathBuf>> {
    write_results(&output.summary, &output.replications, out_dir)
}

pub fn write_calibration(curve: &[CalibrationPoint], out_dir: &Path) -> Result<PathBuf> {
    create_dir(out_dir)?;
    let path = out_dir.join(CALIBRATION_FILE);
    let rows = curve.iter().map(|c| {
        vec![
            format_g17(c.pi),
            format_g17(c.mean_rate),
            format_g17(c.std_error),
            format_g17(c.mean_new_infections),
        ]
    });
    write_table(&path, &CALIBRATION_COLUMNS, rows)?;
    Ok(path)
}

/// Venue projection as `venue_a,venue_b,shared_count`, one row per pair of
/// venues sharing at least one person, in venue order.
pub fn write_edges(graph: &VenueGraph, venues: &[String], out_dir: &Path) -> Result<PathBuf> {
    create_dir(out_dir)?;
    let path = out_dir.join(EDGES_FILE);
    let rows = graph
        .edges
        .iter()
        .map(|(&(a, b), &w)| vec![venues[a].clone(), venues[b].clone(), w.to_string()]);
    write_table(&path, &["venue_a", "venue_b", "shared_count"], rows)?;
    Ok(path)
}
