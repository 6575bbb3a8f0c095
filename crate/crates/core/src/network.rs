//! Shared domain types and the person-venue affiliation network.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Per-person expected encounter counts for one window, one entry per venue,
/// together with the person's baseline serostatus.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    pub person_id: usize,
    pub expected_counts: Vec<f64>,
    pub baseline_status: bool,
}

impl ParameterVector {
    pub fn new(person_id: usize, expected_counts: Vec<f64>, baseline_status: bool) -> Result<Self> {
        if let Some(bad) = expected_counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::input(format!(
                "person {person_id}: expected count {bad} is negative or non-finite"
            )));
        }
        Ok(Self {
            person_id,
            expected_counts,
            baseline_status,
        })
    }

    pub fn n_venues(&self) -> usize {
        self.expected_counts.len()
    }
}

/// A single encounter of `person` at `venue` at `time` days into the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encounter {
    pub person: usize,
    pub venue: usize,
    pub time: f64,
}

/// Time-stamped encounters within one window, sorted by `(venue, time, person)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncounterLog {
    events: Vec<Encounter>,
    n_venues: usize,
    window: f64,
}

impl EncounterLog {
    /// Builds a log from arbitrary events, sorting them into canonical order.
    pub fn new(mut events: Vec<Encounter>, n_venues: usize, window: f64) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::input(format!("window must be positive, got {window}")));
        }
        for e in &events {
            if e.venue >= n_venues {
                return Err(Error::input(format!(
                    "venue id {} out of range (m = {n_venues})",
                    e.venue
                )));
            }
            if !(0.0..=window).contains(&e.time) {
                return Err(Error::input(format!(
                    "event time {} outside [0, {window}]",
                    e.time
                )));
            }
        }
        sort_events(&mut events);
        Ok(Self {
            events,
            n_venues,
            window,
        })
    }

    /// Caller guarantees canonical order and in-range values.
    pub(crate) fn from_sorted(events: Vec<Encounter>, n_venues: usize, window: f64) -> Self {
        debug_assert!(events.windows(2).all(|w| event_key_cmp(&w[0], &w[1]).is_le()));
        Self {
            events,
            n_venues,
            window,
        }
    }

    pub fn events(&self) -> &[Encounter] {
        &self.events
    }

    pub fn n_venues(&self) -> usize {
        self.n_venues
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events at each venue, as contiguous slices of the sorted log.
    pub fn by_venue(&self) -> Vec<&[Encounter]> {
        let mut out = Vec::with_capacity(self.n_venues);
        let mut start = 0;
        for v in 0..self.n_venues {
            let end = start + self.events[start..].partition_point(|e| e.venue == v);
            out.push(&self.events[start..end]);
            start = end;
        }
        out
    }
}

fn event_key_cmp(a: &Encounter, b: &Encounter) -> std::cmp::Ordering {
    a.venue
        .cmp(&b.venue)
        .then(a.time.total_cmp(&b.time))
        .then(a.person.cmp(&b.person))
}

pub(crate) fn sort_events(events: &mut [Encounter]) {
    events.sort_unstable_by(event_key_cmp);
}

/// One partnership formed by linking two consecutive encounters at a venue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partnership {
    pub venue: usize,
    pub person_a: usize,
    pub person_b: usize,
    pub time_a: f64,
    pub time_b: f64,
}

impl Partnership {
    pub fn is_self_pair(&self) -> bool {
        self.person_a == self.person_b
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartnershipList {
    pub pairs: Vec<Partnership>,
    /// Orphaned final encounter per venue (0 or 1 each).
    pub discarded_by_venue: Vec<usize>,
}

impl PartnershipList {
    pub fn discarded(&self) -> usize {
        self.discarded_by_venue.iter().sum()
    }
}

/// Weighted bipartite person-venue graph: `weights[[i, j]]` counts person
/// `i`'s encounters at venue `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffiliationNetwork {
    pub weights: Array2<u32>,
    pub statuses: Vec<bool>,
}

impl AffiliationNetwork {
    pub fn n_persons(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_venues(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights_f64(&self) -> Array2<f64> {
        self.weights.mapv(f64::from)
    }
}

/// Tallies an encounter log into the affiliation network.
pub fn build_affiliation_network(
    log: &EncounterLog,
    n: usize,
    m: usize,
    statuses: &[bool],
) -> Result<AffiliationNetwork> {
    if statuses.len() != n {
        return Err(Error::input(format!(
            "status vector has length {}, expected {n}",
            statuses.len()
        )));
    }
    let mut weights = Array2::<u32>::zeros((n, m));
    for e in log.events() {
        if e.person >= n || e.venue >= m {
            return Err(Error::input(format!(
                "event ({}, {}) out of range for {n} persons and {m} venues",
                e.person, e.venue
            )));
        }
        weights[[e.person, e.venue]] += 1;
    }
    Ok(AffiliationNetwork {
        weights,
        statuses: statuses.to_vec(),
    })
}

/// Number of encounters person `person` has across all venues.
pub fn total_encounters(net: &AffiliationNetwork, person: usize) -> Result<u64> {
    if person >= net.n_persons() {
        return Err(Error::input(format!("person {person} out of range")));
    }
    Ok(net.weights.row(person).iter().map(|&w| u64::from(w)).sum())
}

/// One-mode venue projection: venues `a < b` are joined when at least one
/// person has encounters at both, weighted by the number of such persons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VenueGraph {
    pub n_venues: usize,
    pub edges: BTreeMap<(usize, usize), usize>,
}

impl VenueGraph {
    pub fn weight(&self, a: usize, b: usize) -> usize {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied().unwrap_or(0)
    }
}

pub fn project_venue_graph(net: &AffiliationNetwork) -> VenueGraph {
    project_presence(net.weights.mapv(|w| w >= 1).view())
}

/// Projection of a real-valued weight matrix; a person attends venue `j` when
/// their weight there is positive.
pub fn project_weights(z: ArrayView2<'_, f64>) -> VenueGraph {
    project_presence(z.mapv(|w| w > 0.0).view())
}

fn project_presence(present: ArrayView2<'_, bool>) -> VenueGraph {
    let m = present.ncols();
    let mut edges = BTreeMap::new();
    let mut attended = Vec::with_capacity(m);
    for row in present.rows() {
        attended.clear();
        attended.extend(row.iter().enumerate().filter(|(_, &p)| p).map(|(j, _)| j));
        for (k, &a) in attended.iter().enumerate() {
            for &b in &attended[k + 1..] {
                *edges.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    VenueGraph { n_venues: m, edges }
}
