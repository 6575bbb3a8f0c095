//! Participant CSV ingestion and export.
//!
//! Header: `person_id,status_w1,status_w2,days_between,total_partners,
//! partners_in_data` followed by one `venue:<name>` column per venue. The
//! optional fields may be left empty; `status_w2` empty means no follow-up.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::format::format_g17;
use crate::error::{Error, Result};
use crate::estimator::{scale_survey_counts, SampleData};
use crate::eval::FollowUpRecord;

pub const VENUE_PREFIX: &str = "venue:";
pub const FIXED_COLUMNS: [&str; 6] = [
    "person_id",
    "status_w1",
    "status_w2",
    "days_between",
    "total_partners",
    "partners_in_data",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantRecord {
    pub person_id: String,
    /// Reported counts, aligned with [`ParticipantTable::venues`].
    pub venue_counts: Vec<f64>,
    pub status_w1: bool,
    pub status_w2: Option<bool>,
    pub days_between: Option<f64>,
    pub total_partners: Option<u32>,
    pub partners_in_data: Option<u32>,
}

impl ParticipantRecord {
    /// Counts scaled up to the reported partner total when both partner
    /// fields are present, otherwise the raw counts.
    pub fn scaled_counts(&self) -> Result<Vec<f64>> {
        match (self.total_partners, self.partners_in_data) {
            (Some(total), Some(in_data)) => {
                let per_venue: BTreeMap<usize, Vec<f64>> = self
                    .venue_counts
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| (j, vec![c]))
                    .collect();
                scale_survey_counts(&per_venue, self.venue_counts.len(), total, in_data)
                    .map_err(|e| Error::input(format!("person {}: {e}", self.person_id)))
            }
            _ => Ok(self.venue_counts.clone()),
        }
    }
}

/// Participants in file order, with venues in first-appearance order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParticipantTable {
    pub venues: Vec<String>,
    pub records: Vec<ParticipantRecord>,
}

impl ParticipantTable {
    pub fn n_persons(&self) -> usize {
        self.records.len()
    }

    pub fn person_ids(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.person_id.as_str()).collect()
    }

    /// Dense estimator input; row `i` is `records[i]`, column `j` is
    /// `venues[j]`.
    pub fn sample_data(&self) -> Result<SampleData> {
        let m = self.venues.len();
        let mut z = Array2::zeros((self.records.len(), m));
        for (i, rec) in self.records.iter().enumerate() {
            for (j, c) in rec.scaled_counts()?.into_iter().enumerate() {
                z[[i, j]] = c;
            }
        }
        SampleData::new(z, self.records.iter().map(|r| r.status_w1).collect())
    }

    /// Follow-up records of persons with a recorded interval; `person_id` is
    /// the row index.
    pub fn follow_up(&self) -> Vec<FollowUpRecord> {
        self.records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.days_between.map(|days| FollowUpRecord {
                    person_id: i,
                    status_w1: r.status_w1,
                    status_w2: r.status_w2,
                    days_between: days,
                })
            })
            .collect()
    }
}

pub fn load_participants(path: impl AsRef<Path>) -> Result<ParticipantTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_participants(file, path)
}

/// Parses participant CSV from `reader`; `path` only labels errors.
pub fn read_participants<R: Read>(reader: R, path: &Path) -> Result<ParticipantTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, column: &str, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        column: column.to_string(),
        message,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, "", e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(parse_err(1, "", "missing header".into()));
    }

    let mut fixed = [None; 6];
    let mut venue_cols = Vec::new();
    let mut venues = Vec::new();
    let mut seen = HashSet::new();
    for (k, name) in headers.iter().enumerate() {
        if let Some(venue) = name.strip_prefix(VENUE_PREFIX) {
            if venue.is_empty() {
                return Err(parse_err(1, name, "venue name is empty".into()));
            }
            if !seen.insert(venue.to_string()) {
                return Err(parse_err(1, name, "duplicate venue column".into()));
            }
            venues.push(venue.to_string());
            venue_cols.push(k);
        } else if let Some(f) = FIXED_COLUMNS.iter().position(|c| *c == name) {
            if fixed[f].is_some() {
                return Err(parse_err(1, name, "duplicate column".into()));
            }
            fixed[f] = Some(k);
        } else {
            return Err(parse_err(1, name, "unknown column".into()));
        }
    }
    for required in [0, 1] {
        if fixed[required].is_none() {
            return Err(parse_err(1, FIXED_COLUMNS[required], "required column is missing".into()));
        }
    }

    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, "", e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |k: usize| row.get(k).unwrap_or("");
        let named = |f: usize| fixed[f].map(field).unwrap_or("");

        let person_id = named(0).to_string();
        if person_id.is_empty() {
            return Err(parse_err(line, "person_id", "empty person id".into()));
        }
        if !ids.insert(person_id.clone()) {
            return Err(parse_err(line, "person_id", format!("duplicate person id `{person_id}`")));
        }
        let status_w1 = parse_status(named(1))
            .ok_or_else(|| parse_err(line, "status_w1", format!("expected 0 or 1, got `{}`", named(1))))?;
        let status_w2 = optional(named(2), parse_status)
            .map_err(|raw| parse_err(line, "status_w2", format!("expected 0, 1 or empty, got `{raw}`")))?;
        let days_between = optional(named(3), |s| s.parse::<f64>().ok().filter(|d| d.is_finite() && *d > 0.0))
            .map_err(|raw| parse_err(line, "days_between", format!("expected a positive number, got `{raw}`")))?;
        let total_partners = optional(named(4), |s| s.parse::<u32>().ok())
            .map_err(|raw| parse_err(line, "total_partners", format!("expected a count, got `{raw}`")))?;
        let partners_in_data = optional(named(5), |s| s.parse::<u32>().ok())
            .map_err(|raw| parse_err(line, "partners_in_data", format!("expected a count, got `{raw}`")))?;

        let mut venue_counts = Vec::with_capacity(venue_cols.len());
        for &k in &venue_cols {
            let raw = field(k);
            let value = if raw.is_empty() {
                0.0
            } else {
                raw.parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite() && *c >= 0.0)
                    .ok_or_else(|| {
                        parse_err(line, &headers[k], format!("expected a non-negative count, got `{raw}`"))
                    })?
            };
            venue_counts.push(value);
        }
        let rec = ParticipantRecord {
            person_id,
            venue_counts,
            status_w1,
            status_w2,
            days_between,
            total_partners,
            partners_in_data,
        };
        rec.scaled_counts().map_err(|e| {
            let column = if rec.partners_in_data == Some(0) {
                "partners_in_data"
            } else {
                "total_partners"
            };
            parse_err(line, column, e.to_string())
        })?;
        records.push(rec);
    }
    Ok(ParticipantTable { venues, records })
}

fn parse_status(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

fn optional<T>(raw: &str, parse: impl Fn(&str) -> Option<T>) -> std::result::Result<Option<T>, String> {
    if raw.is_empty() {
        return Ok(None);
    }
    parse(raw).map(Some).ok_or_else(|| raw.to_string())
}

pub fn write_participants<W: Write>(table: &ParticipantTable, writer: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let header: Vec<String> = FIXED_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(table.venues.iter().map(|v| format!("{VENUE_PREFIX}{v}")))
        .collect();
    wtr.write_record(&header)?;
    let status = |s: bool| if s { "1" } else { "0" };
    for r in &table.records {
        let mut row = vec![
            r.person_id.clone(),
            status(r.status_w1).to_string(),
            r.status_w2.map(status).unwrap_or("").to_string(),
            r.days_between.map(format_g17).unwrap_or_default(),
            r.total_partners.map(|v| v.to_string()).unwrap_or_default(),
            r.partners_in_data.map(|v| v.to_string()).unwrap_or_default(),
        ];
        row.extend(r.venue_counts.iter().map(|&c| format_g17(c)));
        wtr.write_record(&row)?;
    }
    wtr.flush()
}

pub fn save_participants(table: &ParticipantTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_participants(table, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<ParticipantTable> {
        read_participants(text.as_bytes(), Path::new("fixture.csv"))
    }

    const HEADER: &str = "person_id,status_w1,status_w2,days_between,total_partners,partners_in_data,venue:bar,venue:app,venue:park\n";

    #[test]
    fn header_only_gives_empty_sample() {
        let t = read(HEADER).unwrap();
        assert_eq!(t.venues, vec!["bar", "app", "park"]);
        let s = t.sample_data().unwrap();
        assert_eq!(s.n_persons(), 0);
        assert_eq!(s.n_venues(), 3);
    }

    #[test]
    fn three_row_fixture_matches_transcription() {
        let text = format!(
            "{HEADER}a17,1,1,270,,,4,0,1\nb02,0,,,,,0,2.5,0\nc9,0,1,250,6,2,1,1,0\n"
        );
        let t = read(&text).unwrap();
        assert_eq!(t.person_ids(), vec!["a17", "b02", "c9"]);
        let s = t.sample_data().unwrap();
        let expected = ndarray::array![[4.0, 0.0, 1.0], [0.0, 2.5, 0.0], [3.0, 3.0, 0.0]];
        assert_eq!(s.z, expected);
        assert_eq!(s.baseline, vec![true, false, false]);
        assert_eq!(t.records[1].status_w2, None);
        assert_eq!(t.records[2].status_w2, Some(true));
        let fu = t.follow_up();
        assert_eq!(fu.len(), 2);
        assert_eq!(fu[1].person_id, 2);
        assert_eq!(fu[1].days_between, 250.0);
    }

    #[test]
    fn duplicate_person_is_an_error() {
        let err = read(&format!("{HEADER}a,0,,,,,1,0,0\na,1,,,,,0,1,0\n")).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "person_id");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_cell_names_line_and_column() {
        let err = read(&format!("{HEADER}a,0,,,,,1,0,0\nb,0,,,,,1,-2,0\n")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("venue:app"), "{msg}");
        let err = read(&format!("{HEADER}a,yes,,,,,1,0,0\n")).unwrap_err();
        assert!(err.to_string().contains("status_w1"), "{err}");
        let err = read(&format!("{HEADER}a,0,,,5,0,1,0,0\n")).unwrap_err();
        assert!(err.to_string().contains("partners_in_data"), "{err}");
    }

    #[test]
    fn header_problems_are_reported() {
        assert!(read("person_id,status_w1,venue:a,venue:a\n").is_err());
        assert!(read("person_id,venue:a\n").is_err());
        assert!(read("person_id,status_w1,colour\n").is_err());
        assert!(read("").is_err());
    }

    #[test]
    fn optional_columns_may_be_absent() {
        let t = read("person_id,status_w1,venue:x\np,1,3\n").unwrap();
        assert_eq!(t.records[0].status_w2, None);
        assert_eq!(t.sample_data().unwrap().z[[0, 0]], 3.0);
    }

    #[test]
    fn write_then_load_round_trips() {
        let table = ParticipantTable {
            venues: vec!["bar".into(), "sauna".into()],
            records: vec![
                ParticipantRecord {
                    person_id: "p1".into(),
                    venue_counts: vec![0.1, 1.0 / 3.0],
                    status_w1: false,
                    status_w2: Some(true),
                    days_between: Some(273.5),
                    total_partners: Some(9),
                    partners_in_data: Some(3),
                },
                ParticipantRecord {
                    person_id: "p2".into(),
                    venue_counts: vec![12.0, 0.0],
                    status_w1: true,
                    status_w2: None,
                    days_between: None,
                    total_partners: None,
                    partners_in_data: None,
                },
            ],
        };
        let mut buf = Vec::new();
        write_participants(&table, &mut buf).unwrap();
        let back = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.venues, table.venues);
        for (a, b) in back.records.iter().zip(&table.records) {
            for (x, y) in a.venue_counts.iter().zip(&b.venue_counts) {
                assert!((x - y).abs() <= 1e-12);
            }
            assert_eq!(a.person_id, b.person_id);
            assert_eq!(a.status_w2, b.status_w2);
            assert_eq!(a.days_between, b.days_between);
            assert_eq!(a.total_partners, b.total_partners);
        }
    }
}
