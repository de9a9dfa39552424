use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{normal_quantile, Alternative};
use crate::error::{Error, Result};

/// `[[a, b], [c, d]]`, rows first.
pub type Table2x2 = [[u64; 2]; 2];

/// Relative slack when collecting tables "no more probable" than observed.
const TWO_TAILED_SLACK: f64 = 1.0 + 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsRatioCi {
    pub odds_ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_level: f64,
    /// 0.5 was added to every cell because at least one was zero.
    pub corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub table: Table2x2,
    pub alternative: Alternative,
    /// Tail in the requested direction; for a two-sided request, the tail
    /// in the direction of the observed association.
    pub p_one_tailed: f64,
    pub p_two_tailed: f64,
    pub odds_ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_level: f64,
    pub corrected: bool,
}

impl FisherReport {
    /// p-value for the requested alternative.
    pub fn p_value(&self) -> f64 {
        match self.alternative {
            Alternative::TwoSided => self.p_two_tailed,
            _ => self.p_one_tailed,
        }
    }
}

fn check(table: &Table2x2) -> Result<()> {
    if table.iter().flatten().sum::<u64>() == 0 {
        return Err(Error::InvalidInput("2x2 table has no observations".into()));
    }
    Ok(())
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Hypergeometric support and log-pmf of the first cell given the margins.
struct Margins {
    row1: u64,
    row2: u64,
    col1: u64,
    total: u64,
}

impl Margins {
    fn of(t: &Table2x2) -> Self {
        let row1 = t[0][0] + t[0][1];
        let row2 = t[1][0] + t[1][1];
        Self {
            row1,
            row2,
            col1: t[0][0] + t[1][0],
            total: row1 + row2,
        }
    }

    fn support(&self) -> std::ops::RangeInclusive<u64> {
        self.col1.saturating_sub(self.row2)..=self.row1.min(self.col1)
    }

    fn ln_pmf(&self, a: u64) -> f64 {
        ln_choose(self.row1, a) + ln_choose(self.row2, self.col1 - a) - ln_choose(self.total, self.col1)
    }
}

/// Fisher's exact test on the first cell, conditioned on both margins.
///
/// `Greater` sums tables whose first cell is at least the observed one.
/// Odds ratio and interval come from [`odds_ratio_woolf_ci`] at 95%.
pub fn fisher_exact(table: &Table2x2, alternative: Alternative) -> Result<FisherReport> {
    check(table)?;
    let m = Margins::of(table);
    let obs = table[0][0];
    let pmf: Vec<(u64, f64)> = m.support().map(|a| (a, m.ln_pmf(a).exp())).collect();
    let greater: f64 = pmf.iter().filter(|(a, _)| *a >= obs).map(|p| p.1).sum();
    let less: f64 = pmf.iter().filter(|(a, _)| *a <= obs).map(|p| p.1).sum();
    let p_obs = m.ln_pmf(obs).exp();
    let two: f64 = pmf
        .iter()
        .filter(|(_, p)| *p <= p_obs * TWO_TAILED_SLACK)
        .map(|p| p.1)
        .sum();
    let ci = odds_ratio_woolf_ci(table, 0.95)?;
    let p_one = match alternative {
        Alternative::Greater => greater,
        Alternative::Less => less,
        Alternative::TwoSided if ci.odds_ratio >= 1.0 => greater,
        Alternative::TwoSided => less,
    };
    Ok(FisherReport {
        table: *table,
        alternative,
        p_one_tailed: p_one.min(1.0),
        p_two_tailed: two.min(1.0),
        odds_ratio: ci.odds_ratio,
        ci_low: ci.ci_low,
        ci_high: ci.ci_high,
        ci_level: ci.ci_level,
        corrected: ci.corrected,
    })
}

/// Odds ratio with Woolf's log-normal interval at `level`.
pub fn odds_ratio_woolf_ci(table: &Table2x2, level: f64) -> Result<OddsRatioCi> {
    check(table)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("confidence level {level} outside (0, 1)")));
    }
    let corrected = table.iter().flatten().any(|&c| c == 0);
    let shift = if corrected { 0.5 } else { 0.0 };
    let [[a, b], [c, d]] = table.map(|row| row.map(|x| x as f64 + shift));
    let ln_or = (a * d).ln() - (b * c).ln();
    let se = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
    let z = normal_quantile(0.5 + level / 2.0);
    Ok(OddsRatioCi {
        odds_ratio: ln_or.exp(),
        ci_low: (ln_or - z * se).exp(),
        ci_high: (ln_or + z * se).exp(),
        ci_level: level,
        corrected,
    })
}
