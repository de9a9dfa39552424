use serde::{Deserialize, Serialize};

use super::{normal_sf, Alternative};
use crate::error::{Error, Result};

/// Largest sample size, per group, for which `Auto` uses the exact test.
pub const EXACT_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MwuMethod {
    /// Exact when both samples have at most 8 values.
    Auto,
    /// Permutation distribution of the (mid)rank sum, ties included.
    Exact,
    /// Normal approximation with tie-corrected variance and a 0.5
    /// continuity correction.
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwuReport {
    /// Statistic for `x`: pairs with `x > y`, plus half the ties.
    #[serde(rename = "U")]
    pub u: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    /// `1 - 2U / (n1 n2)`; positive when `x` tends to be smaller.
    pub rank_biserial: f64,
    /// `U / (n1 n2)`, the probability that a random `x` beats a random `y`.
    pub common_language: f64,
    pub n1: usize,
    pub n2: usize,
    /// `Exact` or `NormalApprox`, never `Auto`.
    pub method: MwuMethod,
}

pub fn mann_whitney_u(x: &[f64], y: &[f64], alternative: Alternative) -> Result<MwuReport> {
    mann_whitney_u_with(x, y, alternative, MwuMethod::Auto)
}

pub fn mann_whitney_u_with(x: &[f64], y: &[f64], alternative: Alternative, method: MwuMethod) -> Result<MwuReport> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidInput("Mann-Whitney U needs two non-empty samples".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("samples contain NaN".into()));
    }
    let (n1, n2) = (x.len(), y.len());
    let ranks = doubled_midranks(x, y);
    let rank_sum_x: u64 = ranks[..n1].iter().sum();
    // 2U = 2 R_x - n1 (n1 + 1)
    let twice_u = rank_sum_x - (n1 * (n1 + 1)) as u64;
    let u = twice_u as f64 / 2.0;
    let method = match method {
        MwuMethod::Auto if n1 <= EXACT_MAX_N && n2 <= EXACT_MAX_N => MwuMethod::Exact,
        MwuMethod::Auto => MwuMethod::NormalApprox,
        m => m,
    };
    let p_value = match method {
        MwuMethod::Exact => exact_p(&ranks, n1, rank_sum_x, alternative),
        _ => normal_p(&ranks, n1, n2, u, alternative),
    };
    let nn = (n1 * n2) as f64;
    Ok(MwuReport {
        u,
        p_value,
        alternative,
        rank_biserial: 1.0 - 2.0 * u / nn,
        common_language: u / nn,
        n1,
        n2,
        method,
    })
}

/// Twice the midranks of the pooled sample (`x` first, then `y`), so tied
/// ranks stay integral.
fn doubled_midranks(x: &[f64], y: &[f64]) -> Vec<u64> {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share rank ((i+1) + (j+1)) / 2.
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

fn exact_p(ranks: &[u64], n1: usize, observed: u64, alternative: Alternative) -> f64 {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // counts[c * width + s]: subsets of size c with doubled rank sum s.
    let mut counts = vec![0f64; (n1 + 1) * width];
    counts[0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for c in (1..=n1).rev() {
            let (lower, upper) = counts.split_at_mut(c * width);
            let prev = &lower[(c - 1) * width..];
            let cur = &mut upper[..width];
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let dist = &counts[n1 * width..];
    let total: f64 = dist.iter().sum();
    let obs = observed as usize;
    let upper: f64 = dist[obs..].iter().sum::<f64>() / total;
    let lower: f64 = dist[..=obs].iter().sum::<f64>() / total;
    match alternative {
        Alternative::Greater => upper,
        Alternative::Less => lower,
        Alternative::TwoSided => (2.0 * upper.min(lower)).min(1.0),
    }
}

fn normal_p(ranks: &[u64], n1: usize, n2: usize, u: f64, alternative: Alternative) -> f64 {
    let n = (n1 + n2) as f64;
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    let mut tie_sum = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_sum += t * t * t - t;
    }
    let nn = (n1 * n2) as f64;
    let mean = nn / 2.0;
    let var = nn / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    match alternative {
        Alternative::Greater => normal_sf((u - mean - 0.5) / sd),
        Alternative::Less => normal_sf((mean - u - 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((u - mean).abs() - 0.5) / sd;
            (2.0 * normal_sf(z)).min(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u_direct(x: &[f64], y: &[f64]) -> f64 {
        let mut u = 0.0;
        for a in x {
            for b in y {
                u += if a > b {
                    1.0
                } else if a == b {
                    0.5
                } else {
                    0.0
                };
            }
        }
        u
    }

    // p-value by enumerating every split of the pooled sample.
    fn permutation_p(x: &[f64], y: &[f64], alt: Alternative) -> f64 {
        let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
        let (n, n1) = (pooled.len(), x.len());
        let u_obs = u_direct(x, y);
        let (mut ge, mut le, mut total) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n1 {
                continue;
            }
            let in_x = |i: &usize| mask & (1 << i) != 0;
            let a: Vec<f64> = (0..n).filter(in_x).map(|i| pooled[i]).collect();
            let b: Vec<f64> = (0..n).filter(|i| !in_x(i)).map(|i| pooled[i]).collect();
            let u = u_direct(&a, &b);
            total += 1;
            ge += u64::from(u >= u_obs);
            le += u64::from(u <= u_obs);
        }
        let (up, lo) = (ge as f64 / total as f64, le as f64 / total as f64);
        match alt {
            Alternative::Greater => up,
            Alternative::Less => lo,
            Alternative::TwoSided => (2.0 * up.min(lo)).min(1.0),
        }
    }

    #[test]
    fn separated_samples() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::TwoSided).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, MwuMethod::Exact);
        assert!((r.p_value - 0.1).abs() < 1e-15);
        assert_eq!(r.rank_biserial, 1.0);
        assert_eq!(r.common_language, 0.0);
        let g = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Greater).unwrap();
        assert!((g.p_value - 1.0).abs() < 1e-15);
        let l = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less).unwrap();
        assert!((l.p_value - 0.05).abs() < 1e-15);
    }

    #[test]
    fn study_scale_effect_sizes() {
        // With U = 539 and groups of 31 and 27 the common-language effect
        // size is 539 / 837.
        let nn = 31.0 * 27.0;
        let report = MwuReport {
            u: 539.0,
            p_value: 0.025,
            alternative: Alternative::TwoSided,
            rank_biserial: 1.0 - 2.0 * 539.0 / nn,
            common_language: 539.0 / nn,
            n1: 31,
            n2: 27,
            method: MwuMethod::NormalApprox,
        };
        assert!((report.common_language - 0.644).abs() < 5e-4);
        assert!((report.rank_biserial.abs() - 0.288).abs() < 5e-4);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["U"], 539.0);
        assert_eq!(json["method"], "normal-approx");
    }

    #[test]
    fn normal_approx_with_ties_matches_hand_computation() {
        // x: 31 values, y: 27 values on a 1..7 scale.
        let x: Vec<f64> = (0..31).map(|i| (i % 7 + 1) as f64).collect();
        let y: Vec<f64> = (0..27).map(|i| ((i * 3) % 5 + 2) as f64).collect();
        let r = mann_whitney_u(&x, &y, Alternative::TwoSided).unwrap();
        assert_eq!(r.method, MwuMethod::NormalApprox);
        assert_eq!(r.u, u_direct(&x, &y));
        let mut all: Vec<f64> = x.iter().chain(&y).copied().collect();
        all.sort_by(f64::total_cmp);
        let n = all.len() as f64;
        let ties: f64 = all
            .chunk_by(|a, b| a == b)
            .map(|g| (g.len() as f64).powi(3) - g.len() as f64)
            .sum();
        let var = 31.0 * 27.0 / 12.0 * (n + 1.0 - ties / (n * (n - 1.0)));
        let z = ((r.u - 31.0 * 27.0 / 2.0).abs() - 0.5) / var.sqrt();
        let p = 2.0 * normal_sf(z);
        assert!((r.p_value - p.min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_data_is_uninformative() {
        let r = mann_whitney_u_with(&[3.0; 12], &[3.0; 10], Alternative::TwoSided, MwuMethod::NormalApprox).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.u, 60.0);
        let e = mann_whitney_u(&[3.0; 4], &[3.0; 4], Alternative::Greater).unwrap();
        assert_eq!(e.p_value, 1.0);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(mann_whitney_u(&[], &[1.0], Alternative::TwoSided).is_err());
        assert!(mann_whitney_u(&[1.0], &[], Alternative::TwoSided).is_err());
        assert!(mann_whitney_u(&[f64::NAN], &[1.0], Alternative::TwoSided).is_err());
    }

    fn small_sample(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1u8..=5, 1..=max).prop_map(|v| v.into_iter().map(f64::from).collect())
    }

    fn alternative() -> impl Strategy<Value = Alternative> {
        prop_oneof![
            Just(Alternative::TwoSided),
            Just(Alternative::Less),
            Just(Alternative::Greater)
        ]
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(x in small_sample(7), y in small_sample(7), alt in alternative()) {
            let r = mann_whitney_u_with(&x, &y, alt, MwuMethod::Exact).unwrap();
            prop_assert_eq!(r.u, u_direct(&x, &y));
            prop_assert!((r.p_value - permutation_p(&x, &y, alt)).abs() < 1e-12);
        }

        #[test]
        fn u_statistics_sum_to_product(x in small_sample(20), y in small_sample(20)) {
            let a = mann_whitney_u(&x, &y, Alternative::TwoSided).unwrap();
            let b = mann_whitney_u(&y, &x, Alternative::TwoSided).unwrap();
            prop_assert_eq!(a.u + b.u, (x.len() * y.len()) as f64);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
            prop_assert!((-1.0..=1.0).contains(&a.rank_biserial));
            prop_assert!((a.common_language - a.u / (x.len() * y.len()) as f64).abs() < 1e-15);
        }
    }
}
