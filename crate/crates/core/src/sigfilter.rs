//! Degree-preserving binomial null model for location × behavior graphs.
//!
//! Under the null, the `k_l` edges of location `l` fall uniformly at random
//! on the behavior codes, so each edge weight is `Binomial(k_l, p)` with
//! `p = 1 / |codes|`. An edge is kept when its weight reaches the smallest
//! value whose upper tail is at most `alpha`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hetnet::{BipartiteGraph, NodeType};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub alpha: f64,
    /// Per-code success probability; `None` means `1 / |codes|` of the graph.
    pub success_prob: Option<f64>,
    /// Divide `alpha` by the number of candidate (location, code) cells.
    pub bonferroni: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            success_prob: None,
            bonferroni: false,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if let Some(p) = self.success_prob {
            check_prob(p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetainedEdge {
    pub location: String,
    pub code: String,
    pub weight: u64,
    pub degree: u64,
    pub threshold: u64,
    /// `P(X >= weight)` under the null.
    pub survival_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub cluster_id: Option<u32>,
    pub alpha: f64,
    pub success_prob: f64,
    pub retained: Vec<RetainedEdge>,
    /// Threshold per location, in graph order.
    pub thresholds: BTreeMap<String, u64>,
    pub degrees: BTreeMap<String, u64>,
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("success probability {p} outside (0, 1)")))
    }
}

fn ln_binom_pmf(k: u64, j: u64, ln_p: f64, ln_q: f64) -> f64 {
    let (kf, jf) = (k as f64, j as f64);
    ln_gamma(kf + 1.0) - ln_gamma(jf + 1.0) - ln_gamma(kf - jf + 1.0) + jf * ln_p + (kf - jf) * ln_q
}

/// Exact upper tail `P(X >= w)` for `X ~ Binomial(k, p)`.
///
/// Terms are summed from the far tail inward so small tails keep full
/// relative precision. Negative `w` returns 1.
pub fn binomial_sf(k: u64, p: f64, w: i64) -> Result<f64> {
    check_prob(p)?;
    if w <= 0 {
        return Ok(1.0);
    }
    let w = w as u64;
    if w > k {
        return Ok(0.0);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut tail = 0.0;
    for j in (w..=k).rev() {
        tail += ln_binom_pmf(k, j, ln_p, ln_q).exp();
    }
    Ok(tail.min(1.0))
}

/// Smallest integer `t` with `P(X >= t) <= alpha`.
///
/// `alpha >= 1` gives 0; `k = 0` gives 1, so no realizable weight passes.
pub fn significance_threshold(k: u64, p: f64, alpha: f64) -> Result<u64> {
    check_prob(p)?;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidInput(format!("alpha {alpha} must be positive")));
    }
    if alpha >= 1.0 {
        return Ok(0);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    // Accumulate tail(j) = P(X >= j) from j = k downward until it exceeds alpha.
    let mut tail = 0.0;
    let mut t = k + 1;
    for j in (0..=k).rev() {
        let next = tail + ln_binom_pmf(k, j, ln_p, ln_q).exp();
        if next > alpha {
            break;
        }
        tail = next;
        t = j;
    }
    Ok(t)
}

/// Keeps the edges of a location × code graph whose weight reaches the
/// location's null-model threshold.
pub fn filter_significant(g: &BipartiteGraph, cfg: &FilterConfig) -> Result<SignificanceResult> {
    cfg.validate()?;
    if g.left_type() != NodeType::Location || g.right_type() != NodeType::Code {
        return Err(Error::InvalidInput(format!(
            "expected a location x code graph, got {} x {}",
            g.left_type(),
            g.right_type()
        )));
    }
    if g.right_len() == 0 {
        return Err(Error::InvalidInput("graph has no code nodes".into()));
    }
    let p = cfg.success_prob.unwrap_or(1.0 / g.right_len() as f64);
    check_prob(p)?;
    let alpha = if cfg.bonferroni {
        cfg.alpha / (g.left_len() * g.right_len()).max(1) as f64
    } else {
        cfg.alpha
    };
    let degrees = g.left_degrees();
    let mut thresholds_by_index = Vec::with_capacity(g.left_len());
    let mut thresholds = BTreeMap::new();
    let mut degree_map = BTreeMap::new();
    for (l, &k) in degrees.iter().enumerate() {
        let t = significance_threshold(k, p, alpha)?;
        thresholds_by_index.push(t);
        thresholds.insert(g.left_label(l).to_string(), t);
        degree_map.insert(g.left_label(l).to_string(), k);
    }
    let mut retained = Vec::new();
    for (l, c, w) in g.edges_indexed() {
        let (k, t) = (degrees[l], thresholds_by_index[l]);
        if w >= t {
            retained.push(RetainedEdge {
                location: g.left_label(l).to_string(),
                code: g.right_label(c).to_string(),
                weight: w,
                degree: k,
                threshold: t,
                survival_prob: binomial_sf(k, p, w as i64)?,
            });
        }
    }
    Ok(SignificanceResult {
        cluster_id: None,
        alpha,
        success_prob: p,
        retained,
        thresholds,
        degrees: degree_map,
    })
}

pub const SIGNIFICANT_EDGE_HEADER: &str = "cluster,location,code,weight,degree_k,threshold,survival_prob";

/// Writes retained edges in the plot-ready CSV layout.
pub fn write_significant_edges<W: std::io::Write>(mut out: W, result: &SignificanceResult) -> std::io::Result<()> {
    writeln!(out, "{SIGNIFICANT_EDGE_HEADER}")?;
    let cluster = result.cluster_id.map(|c| c.to_string()).unwrap_or_default();
    for e in &result.retained {
        writeln!(
            out,
            "{},{},{},{},{},{},{:e}",
            cluster,
            csv_field(&e.location),
            csv_field(&e.code),
            e.weight,
            e.degree,
            e.threshold,
            e.survival_prob
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P11: f64 = 1.0 / 11.0;

    #[test]
    fn sf_basics() {
        assert_eq!(binomial_sf(7, 0.3, 0).unwrap(), 1.0);
        assert_eq!(binomial_sf(7, 0.3, -3).unwrap(), 1.0);
        assert!((binomial_sf(2, 0.5, 2).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(binomial_sf(2, 0.5, 3).unwrap(), 0.0);
        assert!(binomial_sf(2, 1.0, 1).is_err());
        assert!(binomial_sf(2, 0.0, 1).is_err());
    }

    #[test]
    fn sf_matches_pmf_summation() {
        // sum_{j=4}^{10} C(10,j) (1/11)^j (10/11)^(10-j), computed exactly as
        // sum_j C(10,j) 10^(10-j) / 11^10.
        let num: u64 = (4..=10u32).map(|j| binom(10, j) * 10u64.pow(10 - j)).sum();
        let expected = num as f64 / 11f64.powi(10);
        let got = binomial_sf(10, P11, 4).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.0092).abs() < 5e-5);
    }

    fn binom(n: u64, k: u32) -> u64 {
        (0..k as u64).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(significance_threshold(10, P11, 0.05).unwrap(), 4);
        assert!(binomial_sf(10, P11, 3).unwrap() > 0.05);
        assert_eq!(significance_threshold(25, P11, 1.0).unwrap(), 0);
        assert_eq!(significance_threshold(0, P11, 0.05).unwrap(), 1);
        assert_eq!(significance_threshold(110, P11, 0.05).unwrap(), 16);
        assert!(significance_threshold(50, P11, 0.05).unwrap() <= 50);
    }

    #[test]
    fn sf_monotone_in_w() {
        for k in [0u64, 1, 5, 40, 300] {
            let mut prev = 1.0;
            for w in 0..=(k as i64 + 1) {
                let s = binomial_sf(k, P11, w).unwrap();
                assert!(s <= prev + 1e-15 && (0.0..=1.0).contains(&s));
                prev = s;
            }
        }
    }

    fn location_graph(rows: &[(&str, &[(usize, u64)])]) -> BipartiteGraph {
        let mut g = BipartiteGraph::new(NodeType::Location, NodeType::Code);
        for c in 0..11 {
            g.add_right(format!("c{c}"));
        }
        for (loc, edges) in rows {
            let l = g.add_left(*loc);
            for &(c, w) in *edges {
                g.add_weight_at(l, c, w);
            }
        }
        g
    }

    #[test]
    fn concentrated_location_retained_even_location_dropped() {
        let even: Vec<(usize, u64)> = (0..11).map(|c| (c, 10)).collect();
        let g = location_graph(&[("focused", &[(3, 50)]), ("spread", &even)]);
        let r = filter_significant(&g, &FilterConfig::default()).unwrap();
        assert_eq!(r.retained.len(), 1);
        assert_eq!(r.retained[0].location, "focused");
        assert_eq!(r.retained[0].code, "c3");
        assert_eq!(r.thresholds["spread"], 16);
        assert!((r.success_prob - P11).abs() < 1e-15);
        for e in &r.retained {
            assert!(e.weight >= r.thresholds[&e.location]);
        }
    }

    #[test]
    fn lowering_alpha_never_adds_edges() {
        let g = location_graph(&[
            ("a", &[(0, 9), (1, 3), (2, 2), (5, 1)]),
            ("b", &[(0, 30), (4, 12), (7, 12)]),
        ]);
        let mut prev: Option<Vec<(String, String)>> = None;
        for alpha in [0.5, 0.2, 0.05, 0.01, 0.001] {
            let r = filter_significant(
                &g,
                &FilterConfig {
                    alpha,
                    ..Default::default()
                },
            )
            .unwrap();
            let kept: Vec<_> = r
                .retained
                .iter()
                .map(|e| (e.location.clone(), e.code.clone()))
                .collect();
            if let Some(prev) = &prev {
                assert!(kept.iter().all(|e| prev.contains(e)));
            }
            prev = Some(kept);
        }
    }

    #[test]
    fn rejects_bad_config_and_graph_kind() {
        let g = location_graph(&[("a", &[(0, 3)])]);
        assert!(filter_significant(
            &g,
            &FilterConfig {
                alpha: 0.0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(filter_significant(
            &g,
            &FilterConfig {
                alpha: 1.0,
                ..Default::default()
            }
        )
        .is_err());
        let wrong = BipartiteGraph::new(NodeType::Student, NodeType::Pair);
        assert!(filter_significant(&wrong, &FilterConfig::default()).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = location_graph(&[("bed 4", &[(2, 20)])]);
        let mut r = filter_significant(&g, &FilterConfig::default()).unwrap();
        r.cluster_id = Some(0);
        let mut buf = Vec::new();
        write_significant_edges(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SIGNIFICANT_EDGE_HEADER));
        assert!(lines.next().unwrap().starts_with("0,bed 4,c2,20,20,"));
    }
}
