//! Generate a study-sized synthetic cohort and write it as input CSVs.
//!
//! Run with `cargo run --example simulate_study [output-dir]`.

use std::fs::File;
use std::path::PathBuf;

use engagenet::events::{write_event_log, write_students, write_team_scores};
use engagenet::synth::{code_proportions, generate_dataset, SynthConfig, HEALTHCARE_CODE_FREQUENCIES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("engagenet-sim"), PathBuf::from);
    let cfg = SynthConfig::study_scale(42);
    let data = generate_dataset(&cfg)?;
    let ds = &data.dataset;

    let occurrences: usize = ds.events.iter().map(|e| e.codes.len()).sum();
    println!(
        "{} students, {} teams, {} events, {occurrences} code occurrences",
        ds.students.len(),
        ds.scores.len(),
        ds.events.len()
    );

    let total: u64 = HEALTHCARE_CODE_FREQUENCIES.iter().sum();
    let got = code_proportions(&ds.events, &cfg.codes);
    let mut l1 = 0.0;
    for ((code, &f), p) in cfg.codes.iter().zip(&HEALTHCARE_CODE_FREQUENCIES).zip(&got) {
        let target = f as f64 / total as f64;
        l1 += (p - target).abs();
        println!("  {code:<36} {:5.1}%  (reference {:5.1}%)", 100.0 * p, 100.0 * target);
    }
    println!("L1 distance to reference: {l1:.3}");

    std::fs::create_dir_all(&out)?;
    write_event_log(File::create(out.join("events.csv"))?, &ds.events)?;
    write_students(File::create(out.join("students.csv"))?, &ds.students)?;
    write_team_scores(File::create(out.join("scores.csv"))?, &ds.scores)?;
    data.planted.write_csv(File::create(out.join("planted.csv"))?)?;
    println!("wrote {}", out.display());
    Ok(())
}
