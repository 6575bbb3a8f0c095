//! Synthetic base datasets for running studies without survey data.
//!
//! Rows mimic partner-limited survey data: a heavy-tailed total encounter
//! count per person, spread over a few venues chosen by venue popularity, and
//! a baseline status whose odds grow with the person's encounter volume.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Exp1, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::SampleData;
use crate::rng::RngStream;

/// Partners met per venue category in a 15-venue survey, most popular first.
pub const SURVEY_VENUE_POPULARITY: [f64; 15] = [
    265.0, 190.0, 163.0, 72.0, 56.0, 41.0, 41.0, 38.0, 30.0, 13.0, 10.0, 10.0, 9.0, 7.0, 5.0,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticBase {
    pub persons: usize,
    pub venues: usize,
    /// Target share of baseline positives.
    pub prevalence: f64,
    /// Median of the per-person total encounter count.
    pub median_encounters: f64,
    /// Log-scale spread of the total encounter count.
    pub encounter_sigma: f64,
    /// Mean number of venues per person beyond the first.
    pub extra_venues: f64,
    /// Log-odds of baseline positivity per unit of log total encounters.
    pub volume_log_odds: f64,
}

impl Default for SyntheticBase {
    fn default() -> Self {
        Self {
            persons: 466,
            venues: 15,
            prevalence: 0.382,
            median_encounters: 16.0,
            encounter_sigma: 0.95,
            extra_venues: 1.5,
            volume_log_odds: 0.8,
        }
    }
}

impl SyntheticBase {
    fn popularity(&self) -> Vec<f64> {
        if self.venues == SURVEY_VENUE_POPULARITY.len() {
            SURVEY_VENUE_POPULARITY.to_vec()
        } else {
            (0..self.venues).map(|j| 0.8f64.powi(j as i32)).collect()
        }
    }

    pub fn generate(&self, stream: RngStream) -> Result<SampleData> {
        if self.persons == 0 || self.venues == 0 {
            return Err(Error::input("synthetic base needs at least one person and one venue"));
        }
        if !(0.0..1.0).contains(&self.prevalence) {
            return Err(Error::input(format!("prevalence {} outside [0, 1)", self.prevalence)));
        }
        let mut rng = stream.rng();
        let volume = LogNormal::new(self.median_encounters.ln(), self.encounter_sigma)
            .map_err(|e| Error::input(e.to_string()))?;
        let popularity = self.popularity();
        let mut z = Array2::<f64>::zeros((self.persons, self.venues));
        let mut totals = Vec::with_capacity(self.persons);

        for i in 0..self.persons {
            let total: f64 = volume.sample(&mut rng);
            let extra = if self.extra_venues > 0.0 {
                Poisson::new(self.extra_venues)
                    .map_err(|e| Error::input(e.to_string()))?
                    .sample(&mut rng) as usize
            } else {
                0
            };
            let k = (1 + extra).min(self.venues);
            let chosen = weighted_without_replacement(&popularity, k, &mut rng);
            let weights: Vec<f64> = chosen.iter().map(|_| Exp1.sample(&mut rng)).collect();
            let norm: f64 = weights.iter().sum();
            for (&j, w) in chosen.iter().zip(&weights) {
                z[[i, j]] = total * w / norm;
            }
            totals.push(total);
        }

        // Intercept chosen so the expected prevalence hits the target.
        let scores: Vec<f64> = totals.iter().map(|t| self.volume_log_odds * t.ln()).collect();
        let intercept = solve_intercept(&scores, self.prevalence);
        let baseline = scores
            .iter()
            .map(|s| rng.random::<f64>() < logistic(intercept + s))
            .collect();
        SampleData::new(z, baseline)
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn solve_intercept(scores: &[f64], target: f64) -> f64 {
    let mean_at = |a: f64| scores.iter().map(|s| logistic(a + s)).sum::<f64>() / scores.len() as f64;
    let (mut lo, mut hi) = (-50.0, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn weighted_without_replacement<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let mut remaining: Vec<(usize, f64)> = weights.iter().copied().enumerate().collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = remaining.iter().map(|(_, w)| w).sum();
        let mut u = rng.random::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (idx, (_, w)) in remaining.iter().enumerate() {
            if u < *w {
                pick = idx;
                break;
            }
            u -= w;
        }
        out.push(remaining.swap_remove(pick).0);
    }
    out.sort_unstable();
    out
}
