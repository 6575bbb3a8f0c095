//! Per-encounter transmission over a partnership list and the exact model
//! risk quantities.

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{AffiliationNetwork, PartnershipList};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionConfig {
    /// Per-encounter transmission probability.
    pub pi: f64,
    /// Window length in days.
    pub window: f64,
}

impl TransmissionConfig {
    pub fn new(pi: f64, window: f64) -> Result<Self> {
        check_probability(pi)?;
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::input(format!("window must be positive, got {window}")));
        }
        Ok(Self { pi, window })
    }
}

pub(crate) fn check_probability(pi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pi) {
        Ok(())
    } else {
        Err(Error::input(format!("probability {pi} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfectionOutcome {
    pub end_statuses: Vec<bool>,
    /// Newly infected persons, ascending.
    pub new_infections: Vec<usize>,
}

/// Runs one window of transmission. Only baseline-positive partners transmit;
/// persons infected during the window stay non-infectious until it ends.
///
/// One uniform is drawn per discordant pair whatever the outcome, so runs that
/// share a stream but differ in `pi` are coupled: raising `pi` can only add
/// infections.
pub fn simulate_transmission(
    pairs: &PartnershipList,
    baseline: &[bool],
    cfg: &TransmissionConfig,
    stream: RngStream,
) -> Result<InfectionOutcome> {
    simulate_transmission_with(pairs, baseline, cfg, &mut stream.rng())
}

pub fn simulate_transmission_with<R: Rng + ?Sized>(
    pairs: &PartnershipList,
    baseline: &[bool],
    cfg: &TransmissionConfig,
    rng: &mut R,
) -> Result<InfectionOutcome> {
    check_probability(cfg.pi)?;
    let n = baseline.len();
    let mut end_statuses = baseline.to_vec();
    for p in &pairs.pairs {
        if p.person_a >= n || p.person_b >= n {
            return Err(Error::input(format!(
                "pair ({}, {}) out of range for {n} persons",
                p.person_a, p.person_b
            )));
        }
        let target = match (baseline[p.person_a], baseline[p.person_b]) {
            (true, false) => p.person_b,
            (false, true) => p.person_a,
            _ => continue,
        };
        let u: f64 = rng.random();
        if u < cfg.pi {
            end_statuses[target] = true;
        }
    }
    let new_infections = (0..n).filter(|&i| end_statuses[i] && !baseline[i]).collect();
    Ok(InfectionOutcome {
        end_statuses,
        new_infections,
    })
}

/// Share of each venue's encounters that belong to baseline-positive persons.
/// Venues without encounters have no defined share.
pub fn venue_positive_share(net: &AffiliationNetwork) -> Vec<Option<f64>> {
    net.weights
        .columns()
        .into_iter()
        .map(|col| {
            let mut total = 0u64;
            let mut positive = 0u64;
            for (&w, &s) in col.iter().zip(&net.statuses) {
                total += u64::from(w);
                if s {
                    positive += u64::from(w);
                }
            }
            (total > 0).then(|| positive as f64 / total as f64)
        })
        .collect()
}

/// `1 - prod_j (1 - pi * q_j)^row_j`, evaluated in log space.
///
/// Venues with zero exposure contribute a factor of one even when their share
/// is undefined.
pub fn true_risk(row: &[u32], q: &[Option<f64>], pi: f64) -> Result<f64> {
    check_probability(pi)?;
    risk_from_shares(row.iter().map(|&x| f64::from(x)), q, pi).map_err(|venue| Error::MissingShare {
        person: 0,
        venue,
    })
}

/// Shared kernel; returns the offending venue when a share is missing.
pub(crate) fn risk_from_shares(
    exposures: impl Iterator<Item = f64>,
    q: &[Option<f64>],
    pi: f64,
) -> std::result::Result<f64, usize> {
    let mut log_escape = 0.0;
    for (j, x) in exposures.enumerate() {
        if x <= 0.0 {
            continue;
        }
        let share = q.get(j).copied().flatten().ok_or(j)?;
        log_escape += x * (-pi * share).ln_1p();
    }
    Ok(-log_escape.exp_m1())
}
