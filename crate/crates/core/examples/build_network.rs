//! Aggregate triads into the tripartite network and derive its
//! projections.
//!
//! Run with `cargo run --example build_network`.

use engagenet::events::{extract_triads, UtteranceEvent};
use engagenet::hetnet::{build_tripartite, Side};

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

fn main() -> engagenet::Result<()> {
    let events = [
        event("S01", "bed 4", &["situation assessment", "information sharing"]),
        event("S01", "bed 4", &["information sharing"]),
        event("S02", "phone", &["escalation"]),
        event("S02", "bed 4", &["agreement"]),
        event("S03", "bed 2", &["information requesting"]),
    ];
    // A two-code utterance yields two triads.
    println!("first event -> {:?}", extract_triads(&events[0]));

    let triads: Vec<_> = events.iter().flat_map(extract_triads).collect();
    let net = build_tripartite(&triads);
    println!(
        "{} students, {} locations, {} codes, {} triads (total weight {})",
        net.students().len(),
        net.locations().len(),
        net.codes().len(),
        net.tensor().len(),
        net.total_weight()
    );
    for (s, c, w) in net.student_code_edges() {
        println!("  student-code  {s} - {c}: {w}");
    }
    for (c, l, w) in net.code_location_edges() {
        println!("  code-location {c} - {l}: {w}");
    }

    let pairs = net.project_student_pair();
    println!(
        "student x (location|code): {} x {}",
        pairs.left_len(),
        pairs.right_len()
    );
    for (s, p, w) in pairs.edges() {
        println!("  {s} - {p}: {w}");
    }

    // Location x code graph of a subset of students, and a location's degree.
    let lc = net.project_students_lc(["S01", "S02"])?;
    for l in ["bed 4", "phone"] {
        println!("k({l}) over S01, S02 = {}", lc.weighted_degree(Side::Left, l)?);
    }
    Ok(())
}
