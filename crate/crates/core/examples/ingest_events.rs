//! Parse an event log and its companion tables, cross-check them, and
//! split teams at the median score.
//!
//! Run with `cargo run --example ingest_events`.

use engagenet::events::{
    median_split, parse_event_log, parse_students, parse_team_scores, CodingScheme, LocationTaxonomy, Tier,
};

const EVENTS: &str = "\
team_id,student_id,location,codes,t_start,t_end,phase
T01,S01,bed 4,\"situation assessment;information sharing\",12.0,15.5,1
T01,S02,phone,\"escalation\",16.0,18.2,1
T01,S01,bed 4,\"task allocation\",20.1,22.0,2
T02,S03,IV cabinet red,\"information requesting\",5.0,7.5,1
T02,S04,IV cabinet red,\"responding to request;agreement\",7.6,9.0,3
";

const STUDENTS: &str = "\
student_id,team_id,satisfaction
S01,T01,6
S02,T01,5
S03,T02,3
S04,T02,4
S05,T03,
";

const SCORES: &str = "\
team_id,score
T01,82.5
T02,61.0
";

fn main() -> engagenet::Result<()> {
    let scheme = CodingScheme::healthcare();
    let taxonomy = LocationTaxonomy::simulation_ward();

    let events = parse_event_log(EVENTS.as_bytes(), &scheme, &taxonomy, None)?;
    let students = parse_students(STUDENTS.as_bytes())?;
    let scores = parse_team_scores(SCORES.as_bytes())?;
    println!(
        "{} events, {} students, {} teams",
        events.len(),
        students.len(),
        scores.len()
    );

    for e in &events {
        let tier = taxonomy.tier_of(&e.location).unwrap_or(Tier::Other);
        let constructs: Vec<&str> = e.codes.iter().filter_map(|c| scheme.construct_of(c)).collect();
        println!(
            "  {} at {} ({tier}): {:?} -> {:?}",
            e.student_id, e.location, e.codes, constructs
        );
    }

    let report = engagenet::events::validate_dataset(&events, &students, &scores);
    for finding in &report.findings {
        println!("finding: {finding}");
    }

    let split = median_split(&scores)?;
    for s in &split.scores {
        println!(
            "team {} scored {} -> {}",
            s.team_id,
            s.score,
            s.performance_label.expect("labelled")
        );
    }

    // An unknown behaviour label is rejected with its row number.
    let bad = "team_id,student_id,location,codes,t_start,t_end,phase\nT01,S01,bed 4,\"gossip\",,,\n";
    if let Err(e) = parse_event_log(bad.as_bytes(), &scheme, &taxonomy, None) {
        println!("rejected: {e}");
    }
    Ok(())
}
