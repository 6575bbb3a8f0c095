//! Replication protocol, study aggregation and the transmission-probability
//! calibration sweep.
//!
//! A replication draws a population of parameter vectors from the base data,
//! simulates a first window to obtain reported encounter counts, samples a
//! cohort, fits the five predictors on the (scenario-transformed) reported
//! data, simulates a second window with transmission from baseline
//! positives, and scores the predictors on the cohort's baseline negatives.

mod summary;
pub mod synthetic;

use std::fmt;

use ndarray::{Array2, Axis};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encounters::{pair_encounters, sample_encounter_counts_with, sample_encounter_times_with};
use crate::error::{Error, Result};
use crate::estimator::{estimate_q, estimate_risk, SampleData};
use crate::eval::{auc, fit_logistic, incidence_rate, predict_logistic, FollowUpRecord, SignificanceTest};
use crate::network::{ParameterVector, PartnershipList};
use crate::parallel::{map_indices, Execution};
use crate::rng::{replication_seed, RngStream};
use crate::scenarios::{apply_scenario_with, build_two_cluster, ScenarioSpec, TwoClusterSpec};
use crate::transmission::{simulate_transmission_with, TransmissionConfig};

pub use summary::{summarize, PiSummary, PredictorSummary, StudySummary};
pub use synthetic::SyntheticBase;

/// Days in the six-month window.
pub const SIX_MONTHS: f64 = 182.0;
/// Days in the nine-month window.
pub const NINE_MONTHS: f64 = 273.0;
pub const DEFAULT_PI_VALUES: [f64; 3] = [0.0062, 0.0110, 0.0143];

const STREAM_COHORT: u64 = 0;
const STREAM_SCENARIO: u64 = 1;
const STREAM_SECOND_WINDOW: u64 = 2;
const STREAM_FIRST_WINDOW_TRANSMISSION: u64 = 3;
const STREAM_SECOND_WINDOW_TRANSMISSION: u64 = 4;
const STREAM_TWO_CLUSTER: u64 = u64::MAX;

/// The five risk predictors, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predictor {
    MultipleWave1 = 1,
    MultipleWave2 = 2,
    SimpleWave1 = 3,
    SimpleWave2 = 4,
    VenueRisk = 5,
}

impl Predictor {
    pub const ALL: [Predictor; 5] = [
        Self::MultipleWave1,
        Self::MultipleWave2,
        Self::SimpleWave1,
        Self::SimpleWave2,
        Self::VenueRisk,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::MultipleWave1 => "multiple_lr_wave1",
            Self::MultipleWave2 => "multiple_lr_wave2",
            Self::SimpleWave1 => "simple_lr_wave1",
            Self::SimpleWave2 => "simple_lr_wave2",
            Self::VenueRisk => "venue_risk",
        }
    }

    fn index(self) -> usize {
        self as usize - 1
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoClusterConfig {
    pub renamed_count: usize,
    pub conversion_prob: f64,
    /// Cohort size used instead of `n_sample` when the augmentation is on.
    pub n_sample: usize,
}

impl Default for TwoClusterConfig {
    fn default() -> Self {
        let spec = TwoClusterSpec::default();
        Self {
            renamed_count: spec.renamed_count,
            conversion_prob: spec.conversion_prob,
            n_sample: 862,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub n_sample: usize,
    /// Population size is the base row count times this.
    pub population_multiplier: usize,
    pub pi_values: Vec<f64>,
    pub replications: usize,
    /// Window, in days, that the base data's encounter counts refer to.
    pub data_window: f64,
    pub first_window: f64,
    pub second_window: f64,
    pub scenario: ScenarioSpec,
    pub two_cluster: Option<TwoClusterConfig>,
    pub master_seed: u64,
    pub significance: SignificanceTest,
    pub alpha: f64,
    /// Also run transmission during the first window; the resulting statuses
    /// become the recorded baseline.
    pub transmit_in_first_window: bool,
    pub execution: Execution,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_sample: 466,
            population_multiplier: 5,
            pi_values: DEFAULT_PI_VALUES.to_vec(),
            replications: 1000,
            data_window: SIX_MONTHS,
            first_window: SIX_MONTHS,
            second_window: SIX_MONTHS,
            scenario: ScenarioSpec::default(),
            two_cluster: None,
            master_seed: 1,
            significance: SignificanceTest::Paired,
            alpha: 0.05,
            transmit_in_first_window: false,
            execution: Execution::Parallel,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        for w in [self.data_window, self.first_window, self.second_window] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::input(format!("window lengths must be positive, got {w}")));
            }
        }
        if self.pi_values.is_empty() {
            return Err(Error::input("at least one transmission probability is required"));
        }
        for &pi in &self.pi_values {
            TransmissionConfig::new(pi, self.second_window)?;
        }
        if self.population_multiplier == 0 {
            return Err(Error::input("population multiplier must be positive"));
        }
        if self.replications == 0 {
            return Err(Error::input("replications must be positive"));
        }
        Ok(())
    }

    pub fn effective_sample_size(&self) -> usize {
        self.two_cluster.map_or(self.n_sample, |tc| tc.n_sample)
    }

    /// The base actually resampled: the two-cluster augmentation of `base`
    /// when configured, otherwise `base` itself.
    pub fn prepare_base(&self, base: &SampleData) -> Result<SampleData> {
        match self.two_cluster {
            Some(tc) => build_two_cluster(
                base,
                tc.renamed_count,
                tc.conversion_prob,
                RngStream::new(self.master_seed, STREAM_TWO_CLUSTER),
            ),
            None => Ok(base.clone()),
        }
    }
}

/// Outcome of one replication at one transmission probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub rep_index: usize,
    pub seed: u64,
    pub pi: f64,
    /// AUC per predictor, ordered by predictor id; `None` when the cohort's
    /// baseline negatives had a single outcome class.
    pub auc: [Option<f64>; 5],
    /// Seroconversions among the cohort's baseline negatives.
    pub new_infections: usize,
    pub at_risk: usize,
    pub person_days_at_risk: f64,
    /// New infections per 100 person-years at risk.
    pub incidence: f64,
    /// Population quartiles of first-window total encounters.
    pub encounter_quartiles: [f64; 3],
}

impl ReplicationResult {
    pub fn flagged(&self) -> bool {
        self.auc.iter().any(Option::is_none)
    }

    pub fn auc_of(&self, p: Predictor) -> Option<f64> {
        self.auc[p.index()]
    }
}

/// Draws `n_pop` rows of `base` uniformly with replacement as parameter
/// vectors. `scale` converts the base's counts to the simulated window.
pub fn draw_population<R: Rng + ?Sized>(
    base: &SampleData,
    n_pop: usize,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<ParameterVector>> {
    if base.n_persons() == 0 {
        return Err(Error::input("cannot draw a population from an empty base"));
    }
    (0..n_pop)
        .map(|i| {
            let row = rng.random_range(0..base.n_persons());
            ParameterVector::new(
                i,
                base.z.row(row).iter().map(|x| x * scale).collect(),
                base.baseline[row],
            )
        })
        .collect()
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn rescale(params: &[ParameterVector], scale: f64) -> Vec<ParameterVector> {
    params
        .iter()
        .map(|p| ParameterVector {
            person_id: p.person_id,
            expected_counts: p.expected_counts.iter().map(|x| x * scale).collect(),
            baseline_status: p.baseline_status,
        })
        .collect()
}

/// Everything about a replication that does not depend on the transmission
/// probability.
struct Cohort {
    seed: u64,
    baseline: Vec<bool>,
    /// Cohort members, as population indices.
    members: Vec<usize>,
    reported: Array2<f64>,
    second_window_pairs: PartnershipList,
    second_window_stream: RngStream,
    encounter_quartiles: [f64; 3],
}

fn simulate_cohort(cfg: &StudyConfig, base: &SampleData, rep_index: usize, first_pi: Option<f64>) -> Result<Cohort> {
    let seed = replication_seed(cfg.master_seed, rep_index as u64);
    let root = RngStream::new(seed, STREAM_COHORT);
    let mut rng = root.rng();
    let n_pop = base.n_persons() * cfg.population_multiplier;
    let n_sample = cfg.effective_sample_size();
    if n_sample > n_pop {
        return Err(Error::input(format!(
            "sample size {n_sample} exceeds population size {n_pop}"
        )));
    }

    let population = draw_population(base, n_pop, 1.0, &mut rng)?;
    let first = rescale(&population, cfg.first_window / cfg.data_window);
    let counts = sample_encounter_counts_with(&first, &mut rng)?;
    let mut baseline: Vec<bool> = population.iter().map(|p| p.baseline_status).collect();

    if cfg.transmit_in_first_window {
        let pi = first_pi.unwrap_or(0.0);
        let log = sample_encounter_times_with(&counts, cfg.first_window, &mut rng)?;
        let pairs = pair_encounters(&log);
        let tcfg = TransmissionConfig::new(pi, cfg.first_window)?;
        let mut trng = root.substream(STREAM_FIRST_WINDOW_TRANSMISSION).rng();
        baseline = simulate_transmission_with(&pairs, &baseline, &tcfg, &mut trng)?.end_statuses;
    }

    let mut totals: Vec<f64> = counts.sum_axis(Axis(1)).iter().map(|&c| f64::from(c)).collect();
    totals.sort_by(f64::total_cmp);
    let encounter_quartiles = [quantile(&totals, 0.25), quantile(&totals, 0.5), quantile(&totals, 0.75)];

    let mut members = index::sample(&mut rng, n_pop, n_sample).into_vec();
    members.sort_unstable();
    let sample_z = counts.select(Axis(0), &members).mapv(f64::from);
    let mut scenario_rng = root.substream(STREAM_SCENARIO).rng();
    let reported = apply_scenario_with(sample_z.view(), &cfg.scenario, &mut scenario_rng)?.z;

    let second_stream = root.substream(STREAM_SECOND_WINDOW);
    let mut second_rng = second_stream.rng();
    let second = rescale(&population, cfg.second_window / cfg.data_window);
    let counts2 = sample_encounter_counts_with(&second, &mut second_rng)?;
    let log2 = sample_encounter_times_with(&counts2, cfg.second_window, &mut second_rng)?;
    let second_window_pairs = pair_encounters(&log2);

    Ok(Cohort {
        seed,
        baseline,
        members,
        reported,
        second_window_pairs,
        second_window_stream: root.substream(STREAM_SECOND_WINDOW_TRANSMISSION),
        encounter_quartiles,
    })
}

struct Wave2 {
    end_statuses: Vec<bool>,
    incidence: f64,
    person_days: f64,
    new_infections: usize,
    at_risk: usize,
}

fn second_window(cfg: &StudyConfig, cohort: &Cohort, pi: f64) -> Result<Wave2> {
    let tcfg = TransmissionConfig::new(pi, cfg.second_window)?;
    let mut rng = cohort.second_window_stream.rng();
    let outcome = simulate_transmission_with(&cohort.second_window_pairs, &cohort.baseline, &tcfg, &mut rng)?;
    let records: Vec<FollowUpRecord> = cohort
        .members
        .iter()
        .map(|&i| FollowUpRecord {
            person_id: i,
            status_w1: cohort.baseline[i],
            status_w2: Some(outcome.end_statuses[i]),
            days_between: cfg.second_window,
        })
        .collect();
    let at_risk = records.iter().filter(|r| !r.status_w1).count();
    let (incidence, person_days, new_infections) = if at_risk == 0 {
        (0.0, 0.0, 0)
    } else {
        let inc = incidence_rate(&records)?;
        (inc.rate, inc.person_days, inc.infections)
    };
    Ok(Wave2 {
        end_statuses: outcome.end_statuses,
        incidence,
        person_days,
        new_infections,
        at_risk,
    })
}

fn column(v: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((v.len(), 1), v.to_vec()).expect("column shape")
}

/// Runs replication `rep_index` once for every transmission probability in
/// `cfg.pi_values`. All probabilities share the population, both windows'
/// encounters and the transmission uniforms, so their results are coupled.
///
/// `base` is the already-prepared base (see [`StudyConfig::prepare_base`]).
pub fn run_replication(cfg: &StudyConfig, base: &SampleData, rep_index: usize) -> Result<Vec<ReplicationResult>> {
    if cfg.transmit_in_first_window {
        // first-window statuses depend on pi, so nothing is shared
        return cfg
            .pi_values
            .iter()
            .map(|&pi| {
                let cohort = simulate_cohort(cfg, base, rep_index, Some(pi))?;
                evaluate_cohort(cfg, &cohort, rep_index, &[pi]).map(|mut v| v.remove(0))
            })
            .collect();
    }
    let cohort = simulate_cohort(cfg, base, rep_index, None)?;
    evaluate_cohort(cfg, &cohort, rep_index, &cfg.pi_values)
}

fn evaluate_cohort(cfg: &StudyConfig, cohort: &Cohort, rep_index: usize, pis: &[f64]) -> Result<Vec<ReplicationResult>> {
    let z = &cohort.reported;
    let wave1: Vec<bool> = cohort.members.iter().map(|&i| cohort.baseline[i]).collect();
    let totals = column(&z.sum_axis(Axis(1)).to_vec());
    let sample = SampleData::new(z.clone(), wave1.clone())?;
    let q_hat = estimate_q(&sample);

    let multiple_w1 = predict_logistic(&fit_logistic(z.view(), &wave1)?, z.view())?;
    let simple_w1 = predict_logistic(&fit_logistic(totals.view(), &wave1)?, totals.view())?;
    let eval_rows: Vec<usize> = (0..wave1.len()).filter(|&k| !wave1[k]).collect();
    let pick = |scores: &[f64]| -> Vec<f64> { eval_rows.iter().map(|&k| scores[k]).collect() };

    pis.iter()
        .map(|&pi| {
            let w2 = second_window(cfg, cohort, pi)?;
            let wave2: Vec<bool> = cohort.members.iter().map(|&i| w2.end_statuses[i]).collect();
            let outcome: Vec<bool> = eval_rows.iter().map(|&k| wave2[k]).collect();
            let positives = outcome.iter().filter(|&&o| o).count();
            let auc_values = if positives == 0 || positives == outcome.len() {
                [None; 5]
            } else {
                let multiple_w2 = predict_logistic(&fit_logistic(z.view(), &wave2)?, z.view())?;
                let simple_w2 = predict_logistic(&fit_logistic(totals.view(), &wave2)?, totals.view())?;
                let venue_risk = estimate_risk(&sample, &q_hat, pi)?.r_hat;
                let mut out = [None; 5];
                for (p, scores) in Predictor::ALL
                    .iter()
                    .zip([&multiple_w1, &multiple_w2, &simple_w1, &simple_w2, &venue_risk])
                {
                    out[p.index()] = Some(auc(&pick(scores), &outcome)?);
                }
                out
            };
            Ok(ReplicationResult {
                rep_index,
                seed: cohort.seed,
                pi,
                auc: auc_values,
                new_infections: w2.new_infections,
                at_risk: w2.at_risk,
                person_days_at_risk: w2.person_days,
                incidence: w2.incidence,
                encounter_quartiles: cohort.encounter_quartiles,
            })
        })
        .collect()
}

/// Per-replication results of a study, grouped by transmission probability
/// in `cfg.pi_values` order and by replication index within each group.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub summary: StudySummary,
    pub replications: Vec<ReplicationResult>,
}

/// Runs every replication and aggregates. Fails with
/// [`Error::DegenerateStudy`] when more than half of the replications at some
/// transmission probability are flagged.
pub fn run_study(cfg: &StudyConfig, base: &SampleData) -> Result<StudyOutput> {
    cfg.validate()?;
    let prepared = cfg.prepare_base(base)?;
    let per_rep = map_indices(cfg.replications, cfg.execution, |rep| run_replication(cfg, &prepared, rep));
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let mut replications = Vec::with_capacity(cfg.replications * cfg.pi_values.len());
    for k in 0..cfg.pi_values.len() {
        replications.extend(per_rep.iter().map(|r| r[k].clone()));
    }
    let summary = summarize(cfg, &replications)?;
    for group in &summary.by_pi {
        if 2 * group.flagged > group.replications {
            return Err(Error::DegenerateStudy {
                flagged: group.flagged,
                total: group.replications,
            });
        }
    }
    Ok(StudyOutput { summary, replications })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub pi: f64,
    /// Mean new infections per 100 person-years at risk.
    pub mean_rate: f64,
    /// Monte-Carlo standard error of `mean_rate`.
    pub std_error: f64,
    pub mean_new_infections: f64,
}

/// Mean incidence over `replications` replications for each `pi` in
/// `pi_grid`, reported in grid order. Replications are shared across the grid.
pub fn calibrate_pi(
    base: &SampleData,
    pi_grid: &[f64],
    replications: usize,
    cfg: &StudyConfig,
) -> Result<Vec<CalibrationPoint>> {
    if pi_grid.is_empty() {
        return Err(Error::input("calibration grid is empty"));
    }
    let mut cfg = cfg.clone();
    cfg.pi_values = pi_grid.to_vec();
    cfg.replications = replications;
    cfg.validate()?;
    let prepared = cfg.prepare_base(base)?;
    let per_rep = map_indices(replications, cfg.execution, |rep| -> Result<Vec<(f64, usize)>> {
        let cohort = simulate_cohort(&cfg, &prepared, rep, None)?;
        pi_grid
            .iter()
            .map(|&pi| second_window(&cfg, &cohort, pi).map(|w| (w.incidence, w.new_infections)))
            .collect()
    });
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pi_grid
        .iter()
        .enumerate()
        .map(|(k, &pi)| {
            let rates: Vec<f64> = per_rep.iter().map(|r| r[k].0).collect();
            let n = rates.len() as f64;
            let mean = rates.iter().sum::<f64>() / n;
            let var = if rates.len() > 1 {
                rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            CalibrationPoint {
                pi,
                mean_rate: mean,
                std_error: (var / n).sqrt(),
                mean_new_infections: per_rep.iter().map(|r| r[k].1 as f64).sum::<f64>() / n,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests;
