use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{StudentRecord, TeamScore, UtteranceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Performance {
    High,
    Low,
}

impl fmt::Display for Performance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Performance::High => "high",
            Performance::Low => "low",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianSplit {
    pub median: f64,
    /// Input scores, in input order, with `performance_label` set.
    pub scores: Vec<TeamScore>,
    pub warnings: Vec<String>,
}

impl MedianSplit {
    pub fn label_of(&self, team_id: &str) -> Option<Performance> {
        self.scores
            .iter()
            .find(|s| s.team_id == team_id)
            .and_then(|s| s.performance_label)
    }
}

/// Labels teams `high` when their score is at or above the median of all
/// scores (midpoint of the two central values for even counts).
pub fn median_split(scores: &[TeamScore]) -> Result<MedianSplit> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("median split of an empty score list".into()));
    }
    let mut sorted: Vec<f64> = scores.iter().map(|s| s.score).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let labeled: Vec<TeamScore> = scores
        .iter()
        .map(|s| TeamScore {
            performance_label: Some(if s.score >= median {
                Performance::High
            } else {
                Performance::Low
            }),
            ..s.clone()
        })
        .collect();
    let mut warnings = Vec::new();
    if labeled.iter().all(|s| s.performance_label == Some(Performance::High)) {
        let msg = format!("median split is degenerate: all {n} teams score at or above {median}");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(MedianSplit {
        median,
        scores: labeled,
        warnings,
    })
}

/// A referential problem in a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// An event cites a student with no student record.
    UnknownStudent { event_index: usize, student_id: String },
    /// A student record cites a team with no score.
    UnknownTeam { student_id: String, team_id: String },
    /// An event's team disagrees with its student's record.
    TeamMismatch {
        event_index: usize,
        student_id: String,
        event_team: String,
        record_team: String,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::UnknownStudent {
                event_index,
                student_id,
            } => write!(f, "event {event_index} cites unknown student `{student_id}`"),
            Finding::UnknownTeam { student_id, team_id } => {
                write!(f, "student `{student_id}` cites unknown team `{team_id}`")
            }
            Finding::TeamMismatch {
                event_index,
                student_id,
                event_team,
                record_team,
            } => write!(
                f,
                "event {event_index} places `{student_id}` in team `{event_team}`, record says `{record_team}`"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Cross-checks events, student records and team scores. Problems are
/// collected, never raised.
pub fn validate_dataset(
    events: &[UtteranceEvent],
    students: &[StudentRecord],
    scores: &[TeamScore],
) -> ValidationReport {
    let team_of: HashMap<&str, &str> = students
        .iter()
        .map(|s| (s.student_id.as_str(), s.team_id.as_str()))
        .collect();
    let teams: HashSet<&str> = scores.iter().map(|s| s.team_id.as_str()).collect();
    let mut findings = Vec::new();
    for (event_index, e) in events.iter().enumerate() {
        match team_of.get(e.student_id.as_str()) {
            None => findings.push(Finding::UnknownStudent {
                event_index,
                student_id: e.student_id.clone(),
            }),
            Some(team) if *team != e.team_id => findings.push(Finding::TeamMismatch {
                event_index,
                student_id: e.student_id.clone(),
                event_team: e.team_id.clone(),
                record_team: team.to_string(),
            }),
            Some(_) => {}
        }
    }
    for s in students {
        if !teams.contains(s.team_id.as_str()) {
            findings.push(Finding::UnknownTeam {
                student_id: s.student_id.clone(),
                team_id: s.team_id.clone(),
            });
        }
    }
    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn team_scores(values: &[f64]) -> Vec<TeamScore> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| TeamScore::new(format!("T{i:02}"), v))
            .collect()
    }

    fn highs(split: &MedianSplit) -> Vec<f64> {
        split
            .scores
            .iter()
            .filter(|s| s.performance_label == Some(Performance::High))
            .map(|s| s.score)
            .collect()
    }

    #[test]
    fn odd_length_median() {
        let split = median_split(&team_scores(&[1., 2., 3., 4., 5., 6., 7.])).unwrap();
        assert_eq!(split.median, 4.0);
        assert_eq!(highs(&split), [4., 5., 6., 7.]);
        assert!(split.warnings.is_empty());
    }

    #[test]
    fn fifteen_distinct_scores_split_eight_seven() {
        let values: Vec<f64> = (0..15).map(|i| 10.0 + i as f64 * 0.5).collect();
        let split = median_split(&team_scores(&values)).unwrap();
        assert_eq!(highs(&split).len(), 8);
    }

    #[test]
    fn even_length_uses_midpoint() {
        let split = median_split(&team_scores(&[1., 2., 3., 4.])).unwrap();
        assert_eq!(split.median, 2.5);
        assert_eq!(highs(&split), [3., 4.]);
    }

    #[test]
    fn equal_scores_all_high_with_warning() {
        let split = median_split(&team_scores(&[5.; 6])).unwrap();
        assert_eq!(highs(&split).len(), 6);
        assert_eq!(split.warnings.len(), 1);
    }

    #[test]
    fn empty_scores_rejected() {
        assert!(median_split(&[]).is_err());
    }

    proptest! {
        #[test]
        fn median_split_permutation_invariant(
            values in proptest::collection::vec(1u8..=21, 1..20),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let scores = team_scores(&values.iter().map(|&v| v as f64).collect::<Vec<_>>());
            let mut shuffled = scores.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = median_split(&scores).unwrap();
            let b = median_split(&shuffled).unwrap();
            prop_assert_eq!(a.median, b.median);
            for s in &scores {
                prop_assert_eq!(a.label_of(&s.team_id), b.label_of(&s.team_id));
            }
        }
    }

    fn fixture() -> (Vec<UtteranceEvent>, Vec<StudentRecord>, Vec<TeamScore>) {
        let events = vec![UtteranceEvent {
            team_id: "T01".into(),
            student_id: "S1".into(),
            location: "bed 4".into(),
            codes: vec!["planning".into()],
            t_start: None,
            t_end: None,
            phase: Some(3),
        }];
        let students = vec![StudentRecord {
            student_id: "S1".into(),
            team_id: "T01".into(),
            satisfaction: Some(5),
        }];
        (
            events,
            students,
            team_scores(&[3.0])
                .into_iter()
                .map(|mut s| {
                    s.team_id = "T01".into();
                    s
                })
                .collect(),
        )
    }

    #[test]
    fn consistent_dataset_has_empty_report() {
        let (e, s, t) = fixture();
        assert!(validate_dataset(&e, &s, &t).is_empty());
    }

    #[test]
    fn unknown_student_and_team_reported() {
        let (mut e, s, t) = fixture();
        e[0].student_id = "S7".into();
        let report = validate_dataset(&e, &s, &t);
        assert_eq!(report.findings.len(), 1);
        assert!(matches!(report.findings[0], Finding::UnknownStudent { .. }));

        let (e, mut s, t) = fixture();
        s.push(StudentRecord {
            student_id: "S2".into(),
            team_id: "T09".into(),
            satisfaction: None,
        });
        let report = validate_dataset(&e, &s, &t);
        assert_eq!(
            report.findings,
            [Finding::UnknownTeam {
                student_id: "S2".into(),
                team_id: "T09".into()
            }]
        );
    }
}
