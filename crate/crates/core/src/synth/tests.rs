use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::events::{write_event_log, write_students, write_team_scores};

fn csv_bytes(out: &SynthOutput) -> Vec<u8> {
    let mut buf = Vec::new();
    write_event_log(&mut buf, &out.dataset.events).unwrap();
    write_students(&mut buf, &out.dataset.students).unwrap();
    write_team_scores(&mut buf, &out.dataset.scores).unwrap();
    out.planted.write_csv(&mut buf).unwrap();
    buf
}

fn occurrences_by_student(events: &[UtteranceEvent]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for e in events {
        *m.entry(e.student_id.as_str()).or_default() += e.codes.len();
    }
    m
}

#[test]
fn deterministic_per_seed() {
    let cfg = SynthConfig::study_scale(11);
    let a = generate_dataset(&cfg).unwrap();
    let b = generate_dataset(&cfg).unwrap();
    assert_eq!(csv_bytes(&a), csv_bytes(&b));
    let c = generate_dataset(&SynthConfig::study_scale(12)).unwrap();
    assert_ne!(csv_bytes(&a), csv_bytes(&c));
}

#[test]
fn disjoint_profiles_stay_in_support() {
    let cfg = SynthConfig::planted(60, 40, 0.0, 3);
    let out = generate_dataset(&cfg).unwrap();
    let n_codes = cfg.codes.len();
    for e in &out.dataset.events {
        let profile = out.planted.labels[&e.student_id] as usize;
        let l = cfg.locations.iter().position(|x| *x == e.location).unwrap();
        for code in &e.codes {
            let c = cfg.codes.iter().position(|x| x == code).unwrap();
            assert!(cfg.profiles[profile][l * n_codes + c] > 0.0);
        }
    }
    for n in occurrences_by_student(&out.dataset.events).values() {
        assert_eq!(*n, 40);
    }
}

#[test]
fn study_scale_shape() {
    let cfg = SynthConfig::study_scale(5);
    let out = generate_dataset(&cfg).unwrap();
    let ds = &out.dataset;
    assert_eq!(ds.students.len(), 58);
    assert_eq!(ds.scores.len(), 15);
    assert_eq!(ds.events.iter().map(|e| e.codes.len()).sum::<usize>(), 2641);
    assert!(ds.events.iter().any(|e| e.codes.len() == 2));
    assert!(ds.validate().is_empty());
    let scheme = CodingScheme::healthcare();
    let taxonomy = LocationTaxonomy::simulation_ward();
    for e in &ds.events {
        e.validate(&scheme, &taxonomy).unwrap();
    }
}

#[test]
fn study_scale_code_marginals_track_reference() {
    let total: u64 = HEALTHCARE_CODE_FREQUENCIES.iter().sum();
    let target: Vec<f64> = HEALTHCARE_CODE_FREQUENCIES
        .iter()
        .map(|&f| f as f64 / total as f64)
        .collect();
    let mut close = 0;
    for seed in 0..20 {
        let cfg = SynthConfig::study_scale(seed);
        let out = generate_dataset(&cfg).unwrap();
        let got = code_proportions(&out.dataset.events, &cfg.codes);
        let l1: f64 = got.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum();
        close += usize::from(l1 <= 0.1);
    }
    assert!(close >= 18, "{close}/20 seeds within L1 0.1");
}

#[test]
fn fixed_event_counts() {
    let mut cfg = SynthConfig::planted(10, 1, 0.3, 9);
    cfg.volume = Volume::EventsPerStudent(17);
    cfg.multi_code_prob = 0.4;
    let out = generate_dataset(&cfg).unwrap();
    let mut per: HashMap<&str, usize> = HashMap::new();
    for e in &out.dataset.events {
        *per.entry(e.student_id.as_str()).or_default() += 1;
        assert!(e.codes.len() <= 2);
        assert!(e.codes.len() == 1 || e.codes[0] != e.codes[1]);
        assert!(e.t_end.unwrap() >= e.t_start.unwrap());
    }
    assert_eq!(per.len(), 10);
    assert!(per.values().all(|&n| n == 17));
}

#[test]
fn invalid_configs_rejected() {
    let base = SynthConfig::planted(6, 5, 0.0, 0);
    let mut c = base.clone();
    c.profiles[0][0] += 0.01;
    assert!(generate_dataset(&c).is_err());
    let mut c = base.clone();
    c.profile_mix = vec![0.7, 0.7];
    assert!(generate_dataset(&c).is_err());
    let mut c = base.clone();
    c.profiles[1].pop();
    assert!(generate_dataset(&c).is_err());
    let mut c = base.clone();
    c.multi_code_prob = 1.0;
    assert!(generate_dataset(&c).is_err());
    let mut c = base.clone();
    c.overlap = 1.5;
    assert!(generate_dataset(&c).is_err());
    let mut c = base;
    c.volume = Volume::TotalOccurrences(0);
    assert!(generate_dataset(&c).is_err());
}

#[test]
fn planted_labels_csv_round_trip() {
    let out = generate_dataset(&SynthConfig::planted(12, 4, 0.0, 1)).unwrap();
    let mut buf = Vec::new();
    out.planted.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"student_id,profile\n"));
    assert_eq!(PlantedLabels::read_csv(buf.as_slice()).unwrap(), out.planted);
}

#[test]
fn full_overlap_erases_profiles() {
    let cfg = SynthConfig::planted(4, 3, 1.0, 2);
    let out = generate_dataset(&cfg).unwrap();
    assert_eq!(out.dataset.events.iter().map(|e| e.codes.len()).sum::<usize>(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_data_is_consistent(
        students in 1usize..30,
        teams in 1usize..6,
        per in 1usize..20,
        overlap in 0.0f64..=1.0,
        multi in 0.0f64..0.9,
        seed in any::<u64>(),
    ) {
        let mut cfg = SynthConfig::planted(students, per, overlap, seed);
        cfg.num_teams = teams;
        cfg.multi_code_prob = multi;
        let out = generate_dataset(&cfg).unwrap();
        prop_assert!(out.dataset.validate().is_empty());
        prop_assert_eq!(out.planted.labels.len(), students);
        let occ = occurrences_by_student(&out.dataset.events);
        prop_assert_eq!(occ.len(), students);
        prop_assert!(occ.values().all(|&n| n == per));
    }
}
