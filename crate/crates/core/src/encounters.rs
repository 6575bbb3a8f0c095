//! Poisson encounter generation and the consecutive-pairing rule.

use ndarray::Array2;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::network::{sort_events, Encounter, EncounterLog, ParameterVector, Partnership, PartnershipList};
use crate::rng::RngStream;

/// Draws `X[i][j] ~ Poisson(expected_counts[i][j])`, all independent.
pub fn sample_encounter_counts(params: &[ParameterVector], stream: RngStream) -> Result<Array2<u32>> {
    sample_encounter_counts_with(params, &mut stream.rng())
}

pub fn sample_encounter_counts_with<R: Rng + ?Sized>(
    params: &[ParameterVector],
    rng: &mut R,
) -> Result<Array2<u32>> {
    let m = params.first().map_or(0, ParameterVector::n_venues);
    let mut counts = Array2::<u32>::zeros((params.len(), m));
    for (i, p) in params.iter().enumerate() {
        if p.n_venues() != m {
            return Err(Error::input(format!(
                "person {} has {} venues, expected {m}",
                p.person_id,
                p.n_venues()
            )));
        }
        for (j, &mean) in p.expected_counts.iter().enumerate() {
            counts[[i, j]] = poisson_draw(mean, rng)?;
        }
    }
    Ok(counts)
}

pub(crate) fn poisson_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u32> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::input(format!("Poisson mean {mean} is negative or non-finite")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::input(format!("Poisson({mean}): {e}")))?;
    Ok(dist.sample(rng) as u32)
}

/// Places each counted encounter at an independent Uniform(0, window) time.
pub fn sample_encounter_times(counts: &Array2<u32>, window: f64, stream: RngStream) -> Result<EncounterLog> {
    sample_encounter_times_with(counts, window, &mut stream.rng())
}

pub fn sample_encounter_times_with<R: Rng + ?Sized>(
    counts: &Array2<u32>,
    window: f64,
    rng: &mut R,
) -> Result<EncounterLog> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::input(format!("window must be positive, got {window}")));
    }
    let total: usize = counts.iter().map(|&c| c as usize).sum();
    let mut events = Vec::with_capacity(total);
    for ((person, venue), &c) in counts.indexed_iter() {
        for _ in 0..c {
            let u: f64 = rng.sample(Open01);
            events.push(Encounter {
                person,
                venue,
                time: u * window,
            });
        }
    }
    sort_events(&mut events);
    Ok(EncounterLog::from_sorted(events, counts.ncols(), window))
}

/// Links the 1st and 2nd encounters at each venue, the 3rd and 4th, and so
/// on. An odd final encounter is discarded.
pub fn pair_encounters(log: &EncounterLog) -> PartnershipList {
    let mut pairs = Vec::with_capacity(log.len() / 2);
    let mut discarded_by_venue = Vec::with_capacity(log.n_venues());
    for venue_events in log.by_venue() {
        let chunks = venue_events.chunks_exact(2);
        discarded_by_venue.push(chunks.remainder().len());
        pairs.extend(chunks.map(|c| Partnership {
            venue: c[0].venue,
            person_a: c[0].person,
            person_b: c[1].person,
            time_a: c[0].time,
            time_b: c[1].time,
        }));
    }
    PartnershipList {
        pairs,
        discarded_by_venue,
    }
}

/// Probability that an encounter of `person` at `venue` is immediately
/// followed, at that venue, by another encounter of the same person.
pub fn self_pair_probability(params: &[ParameterVector], person: usize, venue: usize) -> Result<f64> {
    let own = params
        .get(person)
        .ok_or_else(|| Error::input(format!("person {person} out of range")))?
        .expected_counts
        .get(venue)
        .copied()
        .ok_or_else(|| Error::input(format!("venue {venue} out of range")))?;
    let total: f64 = params
        .iter()
        .map(|p| p.expected_counts.get(venue).copied().unwrap_or(0.0))
        .sum();
    if total <= 0.0 {
        return Err(Error::UndefinedRatio { venue });
    }
    Ok(own / total)
}
