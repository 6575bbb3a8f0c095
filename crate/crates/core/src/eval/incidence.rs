use crate::error::{Error, Result};

pub const DAYS_PER_YEAR: f64 = 365.25;

/// Follow-up between the baseline and follow-up interviews.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowUpRecord {
    pub person_id: usize,
    pub status_w1: bool,
    pub status_w2: Option<bool>,
    pub days_between: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub infections: usize,
    pub person_days: f64,
    /// New infections per 100 person-years at risk.
    pub rate: f64,
}

/// Person-time incidence among baseline negatives with a follow-up status.
/// Seroconverters contribute half of their interval; others contribute all
/// of it. Records without follow-up or positive at baseline are skipped.
pub fn incidence_rate(records: &[FollowUpRecord]) -> Result<Incidence> {
    let mut infections = 0;
    let mut person_days = 0.0;
    for r in records {
        let Some(w2) = r.status_w2 else { continue };
        if r.status_w1 {
            continue;
        }
        if !(r.days_between > 0.0 && r.days_between.is_finite()) {
            return Err(Error::input(format!(
                "person {}: days between interviews must be positive, got {}",
                r.person_id, r.days_between
            )));
        }
        if w2 {
            infections += 1;
            person_days += r.days_between / 2.0;
        } else {
            person_days += r.days_between;
        }
    }
    if person_days <= 0.0 {
        return Err(Error::input("no person-time at risk"));
    }
    Ok(Incidence {
        infections,
        person_days,
        rate: infections as f64 / person_days * DAYS_PER_YEAR * 100.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, w2: Option<bool>, days: f64) -> FollowUpRecord {
        FollowUpRecord {
            person_id: id,
            status_w1: false,
            status_w2: w2,
            days_between: days,
        }
    }

    #[test]
    fn no_conversions() {
        let r = incidence_rate(&[rec(0, Some(false), 100.0), rec(1, Some(false), 300.0)]).unwrap();
        assert_eq!(r.rate, 0.0);
        assert_eq!(r.person_days, 400.0);
    }

    #[test]
    fn hand_computed_rates() {
        let r = incidence_rate(&[
            rec(0, Some(false), 365.0),
            rec(1, Some(false), 365.0),
            rec(2, Some(true), 200.0),
        ])
        .unwrap();
        assert_eq!(r.person_days, 830.0);
        assert!((r.rate - 36525.0 / 830.0).abs() < 1e-9);
        assert!((r.rate - 44.006_024_096_385_54).abs() < 1e-9);

        let r = incidence_rate(&[rec(0, Some(true), 100.0)]).unwrap();
        assert_eq!(r.person_days, 50.0);
        assert!((r.rate - 730.5).abs() < 1e-9);
    }

    #[test]
    fn skips_positives_and_missing() {
        let mut pos = rec(3, Some(true), 50.0);
        pos.status_w1 = true;
        let r = incidence_rate(&[rec(0, Some(false), 100.0), rec(1, None, 0.0), pos]).unwrap();
        assert_eq!((r.infections, r.person_days), (0, 100.0));
    }

    #[test]
    fn errors() {
        assert!(incidence_rate(&[]).is_err());
        assert!(incidence_rate(&[rec(0, Some(false), 0.0)]).is_err());
    }

    #[test]
    fn order_invariant() {
        let mut recs = vec![rec(0, Some(true), 120.0), rec(1, Some(false), 200.0), rec(2, Some(false), 91.5)];
        let a = incidence_rate(&recs).unwrap();
        recs.reverse();
        assert_eq!(a, incidence_rate(&recs).unwrap());
    }
}
