use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    /// Rater A categories by row, rater B by column.
    pub confusion: Vec<Vec<u64>>,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub kappa: f64,
}

/// Cohen's kappa for two raters over the same categories.
pub fn cohens_kappa(confusion: &[Vec<u64>]) -> Result<KappaReport> {
    let k = confusion.len();
    if k == 0 || confusion.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidInput(
            "confusion matrix must be square and non-empty".into(),
        ));
    }
    let total: u64 = confusion.iter().flatten().sum();
    if total == 0 {
        return Err(Error::InvalidInput("confusion matrix has no observations".into()));
    }
    let n = total as f64;
    let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let p_o = trace as f64 / n;
    let p_e: f64 = (0..k)
        .map(|i| {
            let row: u64 = confusion[i].iter().sum();
            let col: u64 = confusion.iter().map(|r| r[i]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::InvalidInput(
            "expected agreement is 1; kappa is undefined for single-category data".into(),
        ));
    }
    Ok(KappaReport {
        confusion: confusion.to_vec(),
        observed_agreement: p_o,
        expected_agreement: p_e,
        kappa: (p_o - p_e) / (1.0 - p_e),
    })
}
