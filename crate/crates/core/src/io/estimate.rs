//! Venue risk, logistic baselines and AUC on loaded participant data.

use std::path::{Path, PathBuf};

use ndarray::{Array2, Axis};
use serde::Serialize;

use super::format::format_g17;
use super::participants::ParticipantTable;
use super::results::{write_json, write_table};
use crate::error::{Error, Result};
use crate::estimator::{estimate_q, estimate_risk};
use crate::eval::{auc, fit_logistic, incidence_rate, predict_logistic};
use crate::harness::Predictor;

pub const ESTIMATE_FILE: &str = "estimate.json";
pub const RISK_FILE: &str = "risk.csv";
pub const VENUES_FILE: &str = "venues.csv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorAuc {
    pub id: u8,
    pub name: String,
    /// `None` when the evaluation set has a single outcome class or the
    /// predictor could not be fitted.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub infections: usize,
    pub person_days: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub pi: f64,
    pub persons: usize,
    pub venues: usize,
    pub prevalence: f64,
    /// Baseline negatives with a follow-up status.
    pub evaluated: usize,
    pub seroconversions: usize,
    pub predictors: Vec<PredictorAuc>,
    pub incidence: Option<IncidenceReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub summary: EstimateSummary,
    pub q_hat: Vec<Option<f64>>,
    pub venue_totals: Vec<f64>,
    /// Scores per predictor (ordered by id), one per participant; wave-2
    /// fits are `None` when follow-up outcomes are missing or constant.
    pub scores: [Option<Vec<f64>>; 5],
}

fn fit_scores(x: &Array2<f64>, rows: &[usize], outcome: &[bool]) -> Result<Option<Vec<f64>>> {
    if rows.is_empty() {
        return Ok(None);
    }
    let train = x.select(Axis(0), rows);
    let fit = fit_logistic(train.view(), outcome)?;
    if fit.degenerate {
        return Ok(None);
    }
    predict_logistic(&fit, x.view()).map(Some)
}

pub fn estimate_participants(table: &ParticipantTable, pi: f64) -> Result<EstimateReport> {
    let sample = table.sample_data()?;
    if sample.n_persons() == 0 {
        return Err(Error::input("participant file has no rows"));
    }
    let q_hat = estimate_q(&sample);
    let r_hat = estimate_risk(&sample, &q_hat, pi)?.r_hat;
    let z = &sample.z;
    let totals = z.sum_axis(Axis(1)).insert_axis(Axis(1));
    let venue_totals = z.sum_axis(Axis(0)).to_vec();

    let all: Vec<usize> = (0..sample.n_persons()).collect();
    let followed: Vec<usize> = all.iter().copied().filter(|&i| table.records[i].status_w2.is_some()).collect();
    let wave2: Vec<bool> = followed.iter().map(|&i| table.records[i].status_w2 == Some(true)).collect();

    let scores = [
        fit_scores(z, &all, &sample.baseline)?,
        fit_scores(z, &followed, &wave2)?,
        fit_scores(&totals, &all, &sample.baseline)?,
        fit_scores(&totals, &followed, &wave2)?,
        Some(r_hat),
    ];

    let eval_rows: Vec<usize> = followed.iter().copied().filter(|&i| !sample.baseline[i]).collect();
    let outcome: Vec<bool> = eval_rows.iter().map(|&i| table.records[i].status_w2 == Some(true)).collect();
    let seroconversions = outcome.iter().filter(|&&o| o).count();
    let two_classes = seroconversions > 0 && seroconversions < outcome.len();
    let predictors = Predictor::ALL
        .iter()
        .zip(&scores)
        .map(|(p, s)| {
            let value = match s {
                Some(s) if two_classes => {
                    let picked: Vec<f64> = eval_rows.iter().map(|&i| s[i]).collect();
                    Some(auc(&picked, &outcome)?)
                }
                _ => None,
            };
            Ok(PredictorAuc {
                id: p.id(),
                name: p.name().to_string(),
                auc: value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let incidence = incidence_rate(&table.follow_up()).ok().map(|inc| IncidenceReport {
        infections: inc.infections,
        person_days: inc.person_days,
        rate: inc.rate,
    });

    Ok(EstimateReport {
        summary: EstimateSummary {
            pi,
            persons: sample.n_persons(),
            venues: sample.n_venues(),
            prevalence: sample.prevalence(),
            evaluated: eval_rows.len(),
            seroconversions,
            predictors,
            incidence,
        },
        q_hat,
        venue_totals,
        scores,
    })
}

/// Writes `estimate.json`, `venues.csv` and `risk.csv` into `out_dir`.
pub fn write_estimate(report: &EstimateReport, table: &ParticipantTable, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let summary_path = out_dir.join(ESTIMATE_FILE);
    write_json(&report.summary, &summary_path)?;

    let venues_path = out_dir.join(VENUES_FILE);
    let venue_rows = table.venues.iter().enumerate().map(|(j, name)| {
        vec![
            name.clone(),
            format_g17(report.venue_totals[j]),
            report.q_hat[j].map(format_g17).unwrap_or_default(),
        ]
    });
    write_table(&venues_path, &["venue", "encounters", "q_hat"], venue_rows)?;

    let risk_path = out_dir.join(RISK_FILE);
    let mut header = vec!["person_id", "status_w1", "status_w2"];
    header.extend(Predictor::ALL.iter().map(|p| p.name()));
    let status = |s: bool| if s { "1" } else { "0" }.to_string();
    let risk_rows = table.records.iter().enumerate().map(|(i, r)| {
        let mut row = vec![
            r.person_id.clone(),
            status(r.status_w1),
            r.status_w2.map(status).unwrap_or_default(),
        ];
        row.extend(
            report
                .scores
                .iter()
                .map(|s| s.as_ref().map(|v| format_g17(v[i])).unwrap_or_default()),
        );
        row
    });
    write_table(&risk_path, &header, risk_rows)?;
    Ok(vec![summary_path, venues_path, risk_path])
}
