//! Sample-based venue risk estimator and survey-data preparation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::transmission::{check_probability, risk_from_shares};

/// Reported encounters of `n` sampled persons at `m` venues plus their
/// baseline statuses. Counts may be fractional after survey scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleData {
    pub z: Array2<f64>,
    pub baseline: Vec<bool>,
}

impl SampleData {
    pub fn new(z: Array2<f64>, baseline: Vec<bool>) -> Result<Self> {
        if z.nrows() != baseline.len() {
            return Err(Error::input(format!(
                "{} rows of counts but {} statuses",
                z.nrows(),
                baseline.len()
            )));
        }
        if let Some(bad) = z.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::input(format!("encounter count {bad} is negative or non-finite")));
        }
        Ok(Self { z, baseline })
    }

    pub fn n_persons(&self) -> usize {
        self.z.nrows()
    }

    pub fn n_venues(&self) -> usize {
        self.z.ncols()
    }

    pub fn prevalence(&self) -> f64 {
        if self.baseline.is_empty() {
            return 0.0;
        }
        self.baseline.iter().filter(|&&s| s).count() as f64 / self.baseline.len() as f64
    }

    /// Row sums of `z`.
    pub fn totals(&self) -> Vec<f64> {
        self.z.rows().into_iter().map(|r| r.sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskScores {
    pub r_hat: Vec<f64>,
    pub q_hat: Vec<Option<f64>>,
}

/// Estimated share of each venue's encounters that involve a baseline-positive
/// person; `None` where the sample reports no encounters at the venue.
pub fn estimate_q(sample: &SampleData) -> Vec<Option<f64>> {
    sample
        .z
        .columns()
        .into_iter()
        .map(|col| {
            let total: f64 = col.sum();
            let positive: f64 = col
                .iter()
                .zip(&sample.baseline)
                .filter(|(_, &s)| s)
                .map(|(&z, _)| z)
                .sum();
            (total > 0.0).then(|| positive / total)
        })
        .collect()
}

/// `R_i = 1 - prod_j (1 - pi * q_j)^z_ij` for every sampled person.
pub fn estimate_risk(sample: &SampleData, q_hat: &[Option<f64>], pi: f64) -> Result<RiskScores> {
    check_probability(pi)?;
    if q_hat.len() != sample.n_venues() {
        return Err(Error::input(format!(
            "{} venue shares for {} venues",
            q_hat.len(),
            sample.n_venues()
        )));
    }
    let r_hat = sample
        .z
        .rows()
        .into_iter()
        .enumerate()
        .map(|(person, row)| {
            risk_from_shares(row.iter().copied(), q_hat, pi)
                .map_err(|venue| Error::MissingShare { person, venue })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskScores {
        r_hat,
        q_hat: q_hat.to_vec(),
    })
}

/// Scales a partner-limited tally up to the person's reported partner total.
///
/// `per_partner_counts` maps a venue to the encounter counts of each detailed
/// partner met there.
pub fn scale_survey_counts(
    per_partner_counts: &BTreeMap<usize, Vec<f64>>,
    n_venues: usize,
    reported_total_partners: u32,
    partners_in_data: u32,
) -> Result<Vec<f64>> {
    if partners_in_data == 0 {
        return Err(Error::input("partners_in_data must be at least 1"));
    }
    if reported_total_partners < partners_in_data {
        return Err(Error::input(format!(
            "reported partner total {reported_total_partners} is below the {partners_in_data} partners in the data"
        )));
    }
    let factor = f64::from(reported_total_partners) / f64::from(partners_in_data);
    let mut z = vec![0.0; n_venues];
    for (&venue, counts) in per_partner_counts {
        let slot = z
            .get_mut(venue)
            .ok_or_else(|| Error::input(format!("venue {venue} out of range")))?;
        *slot = counts.iter().sum::<f64>() * factor;
    }
    Ok(z)
}

/// Categorical visit-frequency answers, most to least frequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrequencyResponse {
    EveryDay,
    SeveralTimesAWeek,
    OnceAWeek,
    OnceEveryTwoWeeks,
    OnceAMonth,
    CoupleOfTimesAYear,
    OnceAYear,
    LessThanOnceAYear,
    Never,
}

/// Length in days of the window the recoding table refers to.
pub const RECODE_WINDOW_DAYS: f64 = 273.0;

impl FrequencyResponse {
    pub const ALL: [FrequencyResponse; 9] = [
        Self::EveryDay,
        Self::SeveralTimesAWeek,
        Self::OnceAWeek,
        Self::OnceEveryTwoWeeks,
        Self::OnceAMonth,
        Self::CoupleOfTimesAYear,
        Self::OnceAYear,
        Self::LessThanOnceAYear,
        Self::Never,
    ];

    /// Visits over a nine-month window.
    pub fn nine_month_count(self) -> u32 {
        match self {
            Self::EveryDay => 270,
            Self::SeveralTimesAWeek => 116,
            Self::OnceAWeek => 39,
            Self::OnceEveryTwoWeeks => 19,
            Self::OnceAMonth => 9,
            Self::CoupleOfTimesAYear => 4,
            Self::OnceAYear => 1,
            Self::LessThanOnceAYear | Self::Never => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::EveryDay => "Every day",
            Self::SeveralTimesAWeek => "Several times a week",
            Self::OnceAWeek => "Once a week",
            Self::OnceEveryTwoWeeks => "Once every two weeks",
            Self::OnceAMonth => "Once a month",
            Self::CoupleOfTimesAYear => "A couple of times a year",
            Self::OnceAYear => "Once a year",
            Self::LessThanOnceAYear => "Less than once a year",
            Self::Never => "Never",
        }
    }
}

impl fmt::Display for FrequencyResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FrequencyResponse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        Self::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| Error::input(format!("unknown frequency response `{s}`")))
    }
}

/// Converts a frequency answer to an encounter count over `window_days`,
/// scaling the nine-month table proportionally (ties round to even).
pub fn recode_frequency(category: FrequencyResponse, window_days: f64) -> Result<u32> {
    if !(window_days > 0.0 && window_days.is_finite()) {
        return Err(Error::input(format!("window must be positive, got {window_days}")));
    }
    let base = f64::from(category.nine_month_count());
    if window_days == RECODE_WINDOW_DAYS {
        return Ok(category.nine_month_count());
    }
    Ok((base * window_days / RECODE_WINDOW_DAYS).round_ties_even() as u32)
}
