//! CSV ingestion and emission for events, students and team scores.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{CodingScheme, LocationTaxonomy, StudentRecord, TeamScore, UtteranceEvent};

pub const EVENT_HEADER: [&str; 7] = [
    "team_id",
    "student_id",
    "location",
    "codes",
    "t_start",
    "t_end",
    "phase",
];
pub const STUDENT_HEADER: [&str; 3] = ["student_id", "team_id", "satisfaction"];
pub const SCORE_HEADER: [&str; 2] = ["team_id", "score"];

fn reader<R: Read>(raw: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(raw)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| Error::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    if header.is_empty() {
        // An empty stream has no header and no rows.
        return Ok(());
    }
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn row_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_opt<T: std::str::FromStr>(field: &str, name: &str, row: u64) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::Parse {
        row,
        message: format!("`{field}` is not a valid {name}"),
    })
}

fn records<R: Read>(rdr: &mut csv::Reader<R>, width: usize) -> impl Iterator<Item = Result<csv::StringRecord>> + '_ {
    rdr.records().map(move |rec| {
        let rec = rec.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if rec.len() != width {
            return Err(Error::Parse {
                row: row_of(&rec),
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        Ok(rec)
    })
}

/// Parses an event log in the seven-column schema, keeping file order.
///
/// Events whose phase is not in `phase_filter` (including events with no
/// phase) are dropped when a filter is given.
pub fn parse_event_log<R: Read>(
    raw: R,
    scheme: &CodingScheme,
    taxonomy: &LocationTaxonomy,
    phase_filter: Option<&BTreeSet<u8>>,
) -> Result<Vec<UtteranceEvent>> {
    let mut rdr = reader(raw);
    check_header(&mut rdr, &EVENT_HEADER)?;
    let mut events = Vec::new();
    for rec in records(&mut rdr, EVENT_HEADER.len()) {
        let rec = rec?;
        let row = row_of(&rec);
        let parse_err = |message: String| Error::Parse { row, message };

        let team_id = rec[0].to_string();
        let student_id = rec[1].to_string();
        if team_id.is_empty() || student_id.is_empty() {
            return Err(parse_err("team_id and student_id are required".into()));
        }
        let location = taxonomy.resolve(&rec[2])?.to_string();
        let mut codes: Vec<String> = Vec::new();
        for code in rec[3].split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let code = scheme.resolve(code)?;
            if codes.iter().any(|c| c == code) {
                return Err(parse_err(format!("duplicate code `{code}`")));
            }
            codes.push(code.to_string());
        }
        if codes.is_empty() {
            return Err(parse_err("no behavior codes".into()));
        }
        let t_start: Option<f64> = parse_opt(&rec[4], "timestamp", row)?;
        let t_end: Option<f64> = parse_opt(&rec[5], "timestamp", row)?;
        let phase: Option<u8> = parse_opt(&rec[6], "phase", row)?;
        let event = UtteranceEvent {
            team_id,
            student_id,
            location,
            codes,
            t_start,
            t_end,
            phase,
        };
        event.validate(scheme, taxonomy).map_err(|e| match e {
            Error::InvalidInput(message) => Error::Parse { row, message },
            other => other,
        })?;
        if let Some(filter) = phase_filter {
            if !event.phase.is_some_and(|p| filter.contains(&p)) {
                continue;
            }
        }
        events.push(event);
    }
    Ok(events)
}

pub fn parse_students<R: Read>(raw: R) -> Result<Vec<StudentRecord>> {
    let mut rdr = reader(raw);
    check_header(&mut rdr, &STUDENT_HEADER)?;
    let mut out = Vec::new();
    for rec in records(&mut rdr, STUDENT_HEADER.len()) {
        let rec = rec?;
        let row = row_of(&rec);
        let satisfaction: Option<u8> = parse_opt(&rec[2], "satisfaction score", row)?;
        if let Some(s) = satisfaction {
            if !(1..=7).contains(&s) {
                return Err(Error::Parse {
                    row,
                    message: format!("satisfaction {s} outside 1-7"),
                });
            }
        }
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::Parse {
                row,
                message: "student_id and team_id are required".into(),
            });
        }
        out.push(StudentRecord {
            student_id: rec[0].to_string(),
            team_id: rec[1].to_string(),
            satisfaction,
        });
    }
    Ok(out)
}

pub fn parse_team_scores<R: Read>(raw: R) -> Result<Vec<TeamScore>> {
    let mut rdr = reader(raw);
    check_header(&mut rdr, &SCORE_HEADER)?;
    let mut out = Vec::new();
    for rec in records(&mut rdr, SCORE_HEADER.len()) {
        let rec = rec?;
        let row = row_of(&rec);
        let score: f64 = parse_opt(&rec[1], "score", row)?.ok_or_else(|| Error::Parse {
            row,
            message: "missing score".into(),
        })?;
        if !score.is_finite() {
            return Err(Error::Parse {
                row,
                message: "score must be finite".into(),
            });
        }
        out.push(TeamScore::new(&rec[0], score));
    }
    Ok(out)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn read_event_log(
    path: impl AsRef<Path>,
    scheme: &CodingScheme,
    taxonomy: &LocationTaxonomy,
    phase_filter: Option<&BTreeSet<u8>>,
) -> Result<Vec<UtteranceEvent>> {
    parse_event_log(open(path.as_ref())?, scheme, taxonomy, phase_filter)
}

pub fn read_students(path: impl AsRef<Path>) -> Result<Vec<StudentRecord>> {
    parse_students(open(path.as_ref())?)
}

pub fn read_team_scores(path: impl AsRef<Path>) -> Result<Vec<TeamScore>> {
    parse_team_scores(open(path.as_ref())?)
}

fn push_field(line: &mut String, field: &str, force_quote: bool) {
    if force_quote || field.contains([',', '"', '\n', '\r']) {
        line.push('"');
        line.push_str(&field.replace('"', "\"\""));
        line.push('"');
    } else {
        line.push_str(field);
    }
}

fn opt_to_string<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes events in the seven-column schema. The `codes` field is always
/// quoted.
pub fn write_event_log<W: Write>(mut out: W, events: &[UtteranceEvent]) -> std::io::Result<()> {
    writeln!(out, "{}", EVENT_HEADER.join(","))?;
    let mut line = String::new();
    for e in events {
        line.clear();
        push_field(&mut line, &e.team_id, false);
        line.push(',');
        push_field(&mut line, &e.student_id, false);
        line.push(',');
        push_field(&mut line, &e.location, false);
        line.push(',');
        push_field(&mut line, &e.codes.join(";"), true);
        let _ = write!(
            line,
            ",{},{},{}",
            opt_to_string(e.t_start),
            opt_to_string(e.t_end),
            opt_to_string(e.phase)
        );
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_students<W: Write>(mut out: W, students: &[StudentRecord]) -> std::io::Result<()> {
    writeln!(out, "{}", STUDENT_HEADER.join(","))?;
    let mut line = String::new();
    for s in students {
        line.clear();
        push_field(&mut line, &s.student_id, false);
        line.push(',');
        push_field(&mut line, &s.team_id, false);
        let _ = write!(line, ",{}", opt_to_string(s.satisfaction));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_team_scores<W: Write>(mut out: W, scores: &[TeamScore]) -> std::io::Result<()> {
    writeln!(out, "{}", SCORE_HEADER.join(","))?;
    let mut line = String::new();
    for s in scores {
        line.clear();
        push_field(&mut line, &s.team_id, false);
        let _ = write!(line, ",{}", s.score);
        writeln!(out, "{line}")?;
    }
    Ok(())
}
