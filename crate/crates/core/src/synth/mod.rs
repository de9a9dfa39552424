//! Planted-profile generator of coded utterance streams, and recovery
//! scoring.
//!
//! A profile is a probability vector over every `(location, code)` pair,
//! stored location-major. Each student draws one profile; each of their
//! events draws a pair from that profile after it is interpolated toward
//! the population mixture by `overlap`.

mod ari;

use std::io::{Read, Write};

use indexmap::IndexMap;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{CodingScheme, Dataset, LocationTaxonomy, StudentRecord, TeamScore, Tier, UtteranceEvent};

pub use ari::{adjusted_rand_index, ari_from_labels};

/// Code frequencies of the healthcare scheme's reference corpus, in scheme
/// order (2641 occurrences).
pub const HEALTHCARE_CODE_FREQUENCIES: [u64; 11] = [336, 65, 80, 60, 40, 488, 556, 312, 636, 29, 39];

const PROB_TOLERANCE: f64 = 1e-12;

/// How much each student says.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Volume {
    /// Exactly this many events per student.
    EventsPerStudent(usize),
    /// Exactly this many code occurrences per student.
    OccurrencesPerStudent(usize),
    /// This many occurrences overall, split as evenly as possible with the
    /// remainder going to the first students.
    TotalOccurrences(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub locations: Vec<String>,
    pub codes: Vec<String>,
    pub num_teams: usize,
    /// Students per team when `num_students` is unset.
    pub team_size: usize,
    /// Overrides `num_teams * team_size`; students are dealt to teams in
    /// turn.
    pub num_students: Option<usize>,
    /// Location-major probability vectors of length
    /// `locations.len() * codes.len()`.
    pub profiles: Vec<Vec<f64>>,
    pub profile_mix: Vec<f64>,
    pub volume: Volume,
    /// Chance that an event carries a second code at the same location.
    pub multi_code_prob: f64,
    /// 0 keeps profiles as given, 1 replaces each by the population mixture.
    pub overlap: f64,
    /// Log-odds slope of a team's high-performance chance in the team's
    /// share of profile-0 members (centred at one half).
    pub score_log_odds: f64,
    /// Mean satisfaction gap between the first and last profile.
    pub satisfaction_shift: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Two profiles with disjoint supports: one on the primary working areas
    /// and unlisted areas, one on the secondary areas. Codes follow the
    /// reference frequencies within each location.
    pub fn planted(num_students: usize, occurrences_per_student: usize, overlap: f64, seed: u64) -> Self {
        let taxonomy = LocationTaxonomy::simulation_ward();
        let a: Vec<f64> = taxonomy
            .areas()
            .map(|l| f64::from(u8::from(taxonomy.tier_of(l) != Some(Tier::Secondary))))
            .collect();
        let b: Vec<f64> = a.iter().map(|w| 1.0 - w).collect();
        Self::healthcare(
            &[a, b],
            num_students,
            Volume::OccurrencesPerStudent(occurrences_per_student),
            overlap,
            seed,
        )
    }

    /// One shared profile: the even mixture of the two study-scale profiles.
    pub fn null(num_students: usize, occurrences_per_student: usize, seed: u64) -> Self {
        let mut cfg = Self::study_scale(seed);
        let mixed: Vec<f64> = cfg.profiles[0]
            .iter()
            .zip(&cfg.profiles[1])
            .map(|(x, y)| (x + y) / 2.0)
            .collect();
        cfg.profiles = vec![mixed];
        cfg.profile_mix = vec![1.0];
        cfg.num_students = Some(num_students);
        cfg.volume = Volume::OccurrencesPerStudent(occurrences_per_student);
        cfg
    }

    /// 58 students in 15 teams producing 2641 code occurrences. The two
    /// profiles put three quarters of their mass on primary or on secondary
    /// areas respectively.
    pub fn study_scale(seed: u64) -> Self {
        let taxonomy = LocationTaxonomy::simulation_ward();
        let emphasis = |tier: Tier| -> Vec<f64> {
            let hits = taxonomy.areas().filter(|l| taxonomy.tier_of(l) == Some(tier)).count() as f64;
            let rest = taxonomy.len() as f64 - hits;
            taxonomy
                .areas()
                .map(|l| {
                    if taxonomy.tier_of(l) == Some(tier) {
                        0.75 / hits
                    } else {
                        0.25 / rest
                    }
                })
                .collect()
        };
        let mut cfg = Self::healthcare(
            &[emphasis(Tier::Primary), emphasis(Tier::Secondary)],
            58,
            Volume::TotalOccurrences(2641),
            0.0,
            seed,
        );
        cfg.multi_code_prob = 0.1;
        cfg
    }

    /// Profiles on the default vocabularies from per-location weights, with
    /// codes drawn at the reference frequencies.
    fn healthcare(location_weights: &[Vec<f64>], num_students: usize, volume: Volume, overlap: f64, seed: u64) -> Self {
        let scheme = CodingScheme::healthcare();
        let taxonomy = LocationTaxonomy::simulation_ward();
        let total: u64 = HEALTHCARE_CODE_FREQUENCIES.iter().sum();
        let code_p: Vec<f64> = HEALTHCARE_CODE_FREQUENCIES
            .iter()
            .map(|&f| f as f64 / total as f64)
            .collect();
        let profiles = location_weights
            .iter()
            .map(|lw| {
                let norm: f64 = lw.iter().sum();
                lw.iter()
                    .flat_map(|w| code_p.iter().map(move |p| w / norm * p))
                    .collect()
            })
            .collect();
        let k = location_weights.len();
        Self {
            locations: taxonomy.areas().map(str::to_string).collect(),
            codes: scheme.behaviors().map(str::to_string).collect(),
            num_teams: 15,
            team_size: 4,
            num_students: Some(num_students),
            profiles,
            profile_mix: vec![1.0 / k as f64; k],
            volume,
            multi_code_prob: 0.0,
            overlap,
            score_log_odds: 2.0,
            satisfaction_shift: 1.0,
            seed,
        }
    }

    pub fn num_pairs(&self) -> usize {
        self.locations.len() * self.codes.len()
    }

    pub fn total_students(&self) -> usize {
        self.num_students.unwrap_or(self.num_teams * self.team_size)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        for (kind, labels) in [("location", &self.locations), ("code", &self.codes)] {
            if labels.is_empty() {
                return bad(format!("no {kind}s configured"));
            }
            let unique: std::collections::HashSet<&String> = labels.iter().collect();
            if unique.len() != labels.len() {
                return bad(format!("duplicate {kind} labels"));
            }
        }
        if self.num_teams == 0 || self.total_students() == 0 {
            return bad("need at least one team and one student".into());
        }
        if self.profiles.is_empty() {
            return bad("need at least one profile".into());
        }
        for (k, p) in self.profiles.iter().enumerate() {
            if p.len() != self.num_pairs() {
                return bad(format!(
                    "profile {k} has {} entries, expected {}",
                    p.len(),
                    self.num_pairs()
                ));
            }
            check_probabilities(p, &format!("profile {k}"))?;
        }
        if self.profile_mix.len() != self.profiles.len() {
            return bad("profile_mix must have one entry per profile".into());
        }
        check_probabilities(&self.profile_mix, "profile_mix")?;
        if !(0.0..1.0).contains(&self.multi_code_prob) {
            return bad(format!("multi_code_prob {} outside [0, 1)", self.multi_code_prob));
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            return bad(format!("overlap {} outside [0, 1]", self.overlap));
        }
        let volume = match self.volume {
            Volume::EventsPerStudent(n) | Volume::OccurrencesPerStudent(n) | Volume::TotalOccurrences(n) => n,
        };
        if volume == 0 {
            return bad("volume must be positive".into());
        }
        if !self.score_log_odds.is_finite() || !self.satisfaction_shift.is_finite() {
            return bad("score_log_odds and satisfaction_shift must be finite".into());
        }
        Ok(())
    }
}

fn check_probabilities(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidInput(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

/// Student → index of the profile that generated them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedLabels {
    pub labels: IndexMap<String, u32>,
}

pub const PLANTED_HEADER: &str = "student_id,profile";

impl PlantedLabels {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{PLANTED_HEADER}")?;
        for (s, p) in &self.labels {
            writeln!(out, "{s},{p}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(raw: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(raw);
        let mut labels = IndexMap::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let parse_err = |m: String| Error::Parse {
                row: i as u64 + 2,
                message: m,
            };
            let student = row.get(0).ok_or_else(|| parse_err("missing student_id".into()))?;
            let profile = row
                .get(1)
                .ok_or_else(|| parse_err("missing profile".into()))?
                .parse()
                .map_err(|e| parse_err(format!("bad profile: {e}")))?;
            labels.insert(student.to_string(), profile);
        }
        Ok(Self { labels })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub dataset: Dataset,
    pub planted: PlantedLabels,
}

fn zero_padded(prefix: &str, i: usize, count: usize) -> String {
    let width = count.to_string().len().max(2);
    format!("{prefix}{:0width$}", i + 1)
}

/// Generates events, students, team scores and planted labels.
///
/// Output depends only on `cfg`.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_students = cfg.total_students();
    let n_codes = cfg.codes.len();
    let k = cfg.profiles.len();

    let mixture: Vec<f64> = (0..cfg.num_pairs())
        .map(|i| cfg.profiles.iter().zip(&cfg.profile_mix).map(|(p, w)| w * p[i]).sum())
        .collect();
    let effective: Vec<Vec<f64>> = cfg
        .profiles
        .iter()
        .map(|p| {
            p.iter()
                .zip(&mixture)
                .map(|(x, m)| (1.0 - cfg.overlap) * x + cfg.overlap * m)
                .collect()
        })
        .collect();
    let pair_dists: Vec<WeightedIndex<f64>> = effective
        .iter()
        .map(|p| WeightedIndex::new(p).map_err(|e| Error::InvalidInput(format!("profile: {e}"))))
        .collect::<Result<_>>()?;
    let mix = WeightedIndex::new(&cfg.profile_mix).map_err(|e| Error::InvalidInput(format!("profile_mix: {e}")))?;

    let team_of = |i: usize| {
        if cfg.num_students.is_some() {
            i % cfg.num_teams
        } else {
            i / cfg.team_size
        }
    };
    let team_ids: Vec<String> = (0..cfg.num_teams).map(|t| zero_padded("T", t, cfg.num_teams)).collect();
    let student_ids: Vec<String> = (0..n_students).map(|i| zero_padded("S", i, n_students)).collect();
    let profile_of: Vec<usize> = (0..n_students).map(|_| mix.sample(&mut rng)).collect();

    let mut events = Vec::new();
    for (i, sid) in student_ids.iter().enumerate() {
        let profile = &effective[profile_of[i]];
        let (quota, counts_events) = match cfg.volume {
            Volume::EventsPerStudent(n) => (n, true),
            Volume::OccurrencesPerStudent(n) => (n, false),
            Volume::TotalOccurrences(n) => (n / n_students + usize::from(i < n % n_students), false),
        };
        let mut used = 0;
        let mut clock = 0.0f64;
        while used < quota {
            let pair = pair_dists[profile_of[i]].sample(&mut rng);
            let (loc, code) = (pair / n_codes, pair % n_codes);
            let mut codes = vec![cfg.codes[code].clone()];
            let room = counts_events || quota - used >= 2;
            if room && cfg.multi_code_prob > 0.0 && rng.random_bool(cfg.multi_code_prob) {
                let row = &profile[loc * n_codes..(loc + 1) * n_codes];
                let weights: Vec<f64> = row
                    .iter()
                    .enumerate()
                    .map(|(c, &w)| if c == code { 0.0 } else { w })
                    .collect();
                if let Ok(extra) = WeightedIndex::new(&weights) {
                    codes.push(cfg.codes[extra.sample(&mut rng)].clone());
                }
            }
            let phase = 1 + (4 * used / quota).min(3) as u8;
            used += if counts_events { 1 } else { codes.len() };
            let start = clock + (rng.random::<f64>() * 30.0).round() / 10.0;
            let end = start + 1.0 + (rng.random::<f64>() * 40.0).round() / 10.0;
            clock = end;
            events.push(UtteranceEvent {
                team_id: team_ids[team_of(i)].clone(),
                student_id: sid.clone(),
                location: cfg.locations[loc].clone(),
                codes,
                t_start: Some(start),
                t_end: Some(end),
                phase: Some(phase),
            });
        }
    }

    let satisfaction = Normal::new(0.0, 1.0).expect("unit normal");
    let students: Vec<StudentRecord> = student_ids
        .iter()
        .enumerate()
        .map(|(i, sid)| {
            let centre = if k > 1 {
                0.5 - profile_of[i] as f64 / (k - 1) as f64
            } else {
                0.0
            };
            let draw = 4.0 + cfg.satisfaction_shift * centre + satisfaction.sample(&mut rng);
            StudentRecord {
                student_id: sid.clone(),
                team_id: team_ids[team_of(i)].clone(),
                satisfaction: Some(draw.round().clamp(1.0, 7.0) as u8),
            }
        })
        .collect();

    let mut scores = Vec::new();
    for (t, tid) in team_ids.iter().enumerate() {
        let members: Vec<usize> = (0..n_students).filter(|&i| team_of(i) == t).collect();
        if members.is_empty() {
            continue;
        }
        let share = members.iter().filter(|&&i| profile_of[i] == 0).count() as f64 / members.len() as f64;
        let logit = cfg.score_log_odds * (2.0 * share - 1.0);
        let high = rng.random_bool(1.0 / (1.0 + (-logit).exp()));
        let base = if high { 70.0 } else { 40.0 };
        scores.push(TeamScore::new(
            tid.clone(),
            base + (rng.random::<f64>() * 250.0).round() / 10.0,
        ));
    }

    let planted = PlantedLabels {
        labels: student_ids
            .iter()
            .cloned()
            .zip(profile_of.iter().map(|&p| p as u32))
            .collect(),
    };
    Ok(SynthOutput {
        dataset: Dataset {
            events,
            students,
            scores,
        },
        planted,
    })
}

/// Share of code occurrences per code, in `codes` order.
pub fn code_proportions<'a>(events: impl IntoIterator<Item = &'a UtteranceEvent>, codes: &[String]) -> Vec<f64> {
    let mut counts = vec![0u64; codes.len()];
    for e in events {
        for c in &e.codes {
            if let Some(i) = codes.iter().position(|x| x == c) {
                counts[i] += 1;
            }
        }
    }
    let total = counts.iter().sum::<u64>().max(1) as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

#[cfg(test)]
mod tests;
