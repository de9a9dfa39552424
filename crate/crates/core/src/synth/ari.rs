use std::collections::HashMap;
use std::hash::Hash;

use indexmap::IndexMap;

use crate::error::{Error, Result};

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index of two labelings given position by position.
///
/// Two labelings that are identical up to renaming score 1, including the
/// degenerate cases where the chance-corrected formula is 0/0.
pub fn ari_from_labels<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "labelings have different lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut joint: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&n| pairs(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| pairs(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| pairs(n)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Adjusted Rand index of two labelings keyed by node label.
pub fn adjusted_rand_index(a: &IndexMap<String, u32>, b: &IndexMap<String, u32>) -> Result<f64> {
    if a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
        return Err(Error::InvalidInput("labelings cover different node sets".into()));
    }
    let left: Vec<u32> = a.values().copied().collect();
    let right: Vec<u32> = a.keys().map(|k| b[k]).collect();
    ari_from_labels(&left, &right)
}
