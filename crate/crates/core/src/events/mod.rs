//! Coded utterance events, study records, and their vocabularies.

mod csvio;
mod study;
mod vocab;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csvio::{
    parse_event_log, parse_students, parse_team_scores, read_event_log, read_students, read_team_scores,
    write_event_log, write_students, write_team_scores, EVENT_HEADER, SCORE_HEADER, STUDENT_HEADER,
};
pub use study::{median_split, validate_dataset, Finding, MedianSplit, Performance, ValidationReport};
pub use vocab::{CodingScheme, LocationTaxonomy, Tier};

/// One coded turn of talk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceEvent {
    pub team_id: String,
    pub student_id: String,
    pub location: String,
    /// Behavior codes carried by the utterance; non-empty, no duplicates.
    pub codes: Vec<String>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub phase: Option<u8>,
}

impl UtteranceEvent {
    /// Checks the event against the vocabularies and its own invariants.
    pub fn validate(&self, scheme: &CodingScheme, taxonomy: &LocationTaxonomy) -> Result<()> {
        taxonomy.resolve(&self.location)?;
        if self.codes.is_empty() {
            return Err(Error::InvalidInput("utterance carries no behavior codes".into()));
        }
        for (i, code) in self.codes.iter().enumerate() {
            scheme.resolve(code)?;
            if self.codes[..i].contains(code) {
                return Err(Error::InvalidInput(format!("duplicate code `{code}` in utterance")));
            }
        }
        if let (Some(start), Some(end)) = (self.t_start, self.t_end) {
            if end < start {
                return Err(Error::InvalidInput(format!("t_end {end} precedes t_start {start}")));
            }
        }
        if let Some(phase) = self.phase {
            if !(1..=4).contains(&phase) {
                return Err(Error::InvalidInput(format!("phase {phase} outside 1-4")));
            }
        }
        Ok(())
    }
}

/// A student producing a behavior while in a location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triad {
    pub student: String,
    pub location: String,
    pub code: String,
}

impl Triad {
    pub fn new(student: impl Into<String>, location: impl Into<String>, code: impl Into<String>) -> Self {
        Self {
            student: student.into(),
            location: location.into(),
            code: code.into(),
        }
    }
}

/// One triad per code carried by the event.
pub fn extract_triads(event: &UtteranceEvent) -> Vec<Triad> {
    event
        .codes
        .iter()
        .map(|code| Triad::new(&event.student_id, &event.location, code))
        .collect()
}

/// Triads of a whole event log, in event order.
pub fn triads_of<'a>(events: impl IntoIterator<Item = &'a UtteranceEvent>) -> Vec<Triad> {
    events.into_iter().flat_map(extract_triads).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentRecord {
    pub student_id: String,
    pub team_id: String,
    /// Satisfaction with team collaboration on a 1-7 scale.
    pub satisfaction: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamScore {
    pub team_id: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub performance_label: Option<Performance>,
}

impl TeamScore {
    pub fn new(team_id: impl Into<String>, score: f64) -> Self {
        Self {
            team_id: team_id.into(),
            score,
            performance_label: None,
        }
    }
}

/// Events plus the optional per-student and per-team records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub events: Vec<UtteranceEvent>,
    pub students: Vec<StudentRecord>,
    pub scores: Vec<TeamScore>,
}

impl Dataset {
    pub fn triads(&self) -> Vec<Triad> {
        triads_of(&self.events)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_dataset(&self.events, &self.students, &self.scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(student: &str, location: &str, codes: &[&str]) -> UtteranceEvent {
        UtteranceEvent {
            team_id: "T01".into(),
            student_id: student.into(),
            location: location.into(),
            codes: codes.iter().map(|c| c.to_string()).collect(),
            t_start: None,
            t_end: None,
            phase: None,
        }
    }

    #[test]
    fn one_triad_per_code() {
        let e = event("S1", "bed 4", &["information sharing", "agreement"]);
        assert_eq!(
            extract_triads(&e),
            vec![
                Triad::new("S1", "bed 4", "information sharing"),
                Triad::new("S1", "bed 4", "agreement"),
            ]
        );
        let e = event("S2", "phone", &["escalation"]);
        assert_eq!(extract_triads(&e), vec![Triad::new("S2", "phone", "escalation")]);
    }

    #[test]
    fn validate_rejects_reversed_timestamps_and_duplicates() {
        let scheme = CodingScheme::healthcare();
        let ward = LocationTaxonomy::simulation_ward();
        let mut e = event("S1", "bed 4", &["planning"]);
        e.t_start = Some(10.0);
        e.t_end = Some(5.0);
        assert!(e.validate(&scheme, &ward).is_err());
        let e = event("S1", "bed 4", &["planning", "planning"]);
        assert!(e.validate(&scheme, &ward).is_err());
        let e = event("S1", "bed 9", &["planning"]);
        assert!(matches!(
            e.validate(&scheme, &ward),
            Err(Error::Vocabulary { kind: "location", .. })
        ));
    }
}
