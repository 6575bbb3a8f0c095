use serde::{Deserialize, Serialize};

use super::{quantile, Predictor, ReplicationResult, StudyConfig};
use crate::error::Result;
use crate::eval::paired_comparison;
use crate::scenarios::ScenarioKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    /// Mean of (venue risk AUC - this predictor's AUC).
    pub mean_difference: f64,
    pub p_value: f64,
    pub degenerate: bool,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorSummary {
    pub id: u8,
    pub name: String,
    /// Replications contributing an AUC.
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// Paired test against the venue-risk predictor; absent for that
    /// predictor itself and when fewer than two replications are usable.
    pub vs_venue_risk: Option<ComparisonSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiSummary {
    pub pi: f64,
    pub replications: usize,
    pub flagged: usize,
    pub mean_incidence: f64,
    pub mean_new_infections: f64,
    pub encounter_quartile_means: [f64; 3],
    pub predictors: Vec<PredictorSummary>,
}

impl PiSummary {
    pub fn predictor(&self, p: Predictor) -> &PredictorSummary {
        &self.predictors[p.id() as usize - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub scenario: ScenarioKind,
    pub two_cluster: bool,
    pub master_seed: u64,
    pub replications: usize,
    pub sample_size: usize,
    pub by_pi: Vec<PiSummary>,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Aggregates replication results, grouped by `cfg.pi_values`. Flagged
/// replications are left out of every AUC statistic.
pub fn summarize(cfg: &StudyConfig, results: &[ReplicationResult]) -> Result<StudySummary> {
    let mut by_pi = Vec::with_capacity(cfg.pi_values.len());
    for &pi in &cfg.pi_values {
        let mut group: Vec<&ReplicationResult> = results.iter().filter(|r| r.pi == pi).collect();
        group.sort_by_key(|r| r.rep_index);
        let usable: Vec<&ReplicationResult> = group.iter().copied().filter(|r| !r.flagged()).collect();
        let aucs = |p: Predictor| -> Vec<f64> { usable.iter().filter_map(|r| r.auc_of(p)).collect() };
        let reference = aucs(Predictor::VenueRisk);

        let mut predictors = Vec::with_capacity(5);
        for p in Predictor::ALL {
            let values = aucs(p);
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let vs_venue_risk = if p != Predictor::VenueRisk && values.len() >= 2 {
                let c = paired_comparison(&values, &reference, cfg.significance)?;
                Some(ComparisonSummary {
                    mean_difference: c.mean_difference,
                    p_value: c.p_value,
                    degenerate: c.degenerate,
                    significant: c.significant(cfg.alpha),
                })
            } else {
                None
            };
            predictors.push(PredictorSummary {
                id: p.id(),
                name: p.name().to_string(),
                n: values.len(),
                mean: mean(&values),
                sd: sample_sd(&values),
                q1: quantile(&sorted, 0.25),
                median: quantile(&sorted, 0.5),
                q3: quantile(&sorted, 0.75),
                vs_venue_risk,
            });
        }

        let incidences: Vec<f64> = group.iter().map(|r| r.incidence).collect();
        let infections: Vec<f64> = group.iter().map(|r| r.new_infections as f64).collect();
        let mut quartile_means = [0.0; 3];
        for (k, q) in quartile_means.iter_mut().enumerate() {
            *q = mean(&group.iter().map(|r| r.encounter_quartiles[k]).collect::<Vec<_>>());
        }
        by_pi.push(PiSummary {
            pi,
            replications: group.len(),
            flagged: group.len() - usable.len(),
            mean_incidence: mean(&incidences),
            mean_new_infections: mean(&infections),
            encounter_quartile_means: quartile_means,
            predictors,
        });
    }
    Ok(StudySummary {
        scenario: cfg.scenario.kind,
        two_cluster: cfg.two_cluster.is_some(),
        master_seed: cfg.master_seed,
        replications: cfg.replications,
        sample_size: cfg.effective_sample_size(),
        by_pi,
    })
}
