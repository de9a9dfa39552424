//! Nonparametric degree-corrected bipartite stochastic blockmodel.
//!
//! The number of blocks and the assignment are both chosen by minimising a
//! description length. Integer edge weights are multiplicities. Blocks
//! never mix the two sides of the graph: left and right nodes start in
//! disjoint blocks and moves and merges stay on one side.
//!
//! # Description length
//!
//! For a bipartite multigraph with `E` edges, `N_L` + `N_R` nodes, degrees
//! `k_i` and multiplicities `A_ij`, and a side-respecting partition with
//! `B_L` + `B_R` non-empty blocks, block sizes `n_r`, block degrees `e_r`,
//! block edge counts `e_rs` and block degree histograms `n_k^r`, the
//! description length in nats is `S = S_e + S_b + S_k + S_A`:
//!
//! ```text
//! S_e = ln C(B_L B_R + E - 1, E)
//! S_b = sum_side [ ln N + ln C(N - 1, B - 1) + ln N! - sum_r ln n_r! ]
//! S_k = sum_r [ ln q(e_r, n_r) + ln n_r! - sum_k ln n_k^r! ]
//! S_A = sum_r ln e_r! - sum_rs ln e_rs! - sum_i ln k_i! + sum_ij ln A_ij!
//! ```
//!
//! `q(m, n)` counts partitions of `m` into at most `n` parts; it is exact
//! from a table for moderate arguments and asymptotic beyond. `S_e` is a
//! uniform prior over block edge-count matrices, `S_b` picks the block
//! count, then sizes, then labels, `S_k` encodes degrees through block
//! degree histograms, and `S_A` is the microcanonical likelihood of the
//! multigraph given degrees and block edge counts. Every term is minus the
//! log of a normalised probability, so `S >= 0`.

mod dl;
mod infer;
mod partitions;
mod state;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hetnet::BipartiteGraph;

use dl::SbmGraph;

/// Block id per node label, for each side of a bipartite graph.
///
/// Ids are shared across sides only if they mean the same block, which a
/// valid assignment never does.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub left: IndexMap<String, u32>,
    pub right: IndexMap<String, u32>,
}

impl Assignment {
    /// Every node of `g` in one block per side (left 0, right 1).
    pub fn trivial(g: &BipartiteGraph) -> Self {
        Self {
            left: g.left_nodes().map(|n| (n.to_string(), 0)).collect(),
            right: g.right_nodes().map(|n| (n.to_string(), 1)).collect(),
        }
    }

    /// Block ids per node in graph order (left then right), remapped so
    /// left blocks lie in `0..n_left` and right blocks in
    /// `n_left..n_left + n_right`.
    fn dense(&self, g: &BipartiteGraph) -> Result<Vec<u32>> {
        let missing = |side: &str, n: &str| Error::InvalidAssignment(format!("{side} node `{n}` has no block"));
        let left: Vec<u32> = g
            .left_nodes()
            .map(|n| self.left.get(n).copied().ok_or_else(|| missing("left", n)))
            .collect::<Result<_>>()?;
        let right: Vec<u32> = g
            .right_nodes()
            .map(|n| self.right.get(n).copied().ok_or_else(|| missing("right", n)))
            .collect::<Result<_>>()?;
        if self.left.len() != left.len() || self.right.len() != right.len() {
            return Err(Error::InvalidAssignment(
                "assignment names nodes that are not in the graph".into(),
            ));
        }
        let lset: std::collections::BTreeSet<u32> = left.iter().copied().collect();
        if let Some(shared) = right.iter().find(|b| lset.contains(b)) {
            return Err(Error::InvalidAssignment(format!(
                "block {shared} mixes left and right nodes"
            )));
        }
        let n_left = left.len() as u32;
        let mut dense = Vec::with_capacity(left.len() + right.len());
        dense.extend(relabel(&left, 0));
        dense.extend(relabel(&right, n_left));
        Ok(dense)
    }
}

fn relabel(ids: &[u32], offset: u32) -> Vec<u32> {
    let mut map = BTreeMap::new();
    ids.iter()
        .map(|&b| {
            let next = offset + map.len() as u32;
            *map.entry(b).or_insert(next)
        })
        .collect()
}

/// Description length, in nats, of `assignment` on `g`.
pub fn description_length(g: &BipartiteGraph, assignment: &Assignment) -> Result<f64> {
    let dense = assignment.dense(g)?;
    Ok(SbmGraph::new(g).description_length(&dense))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SbmConfig {
    pub restarts: u32,
    /// Upper bound on node-move sweeps after each merge.
    pub sweeps_per_level: u32,
    pub seed: u64,
    /// Whether a single block on the left side may be returned.
    pub allow_trivial: bool,
    /// Run restarts on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for SbmConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            sweeps_per_level: 2,
            seed: 0,
            allow_trivial: true,
            parallel: true,
        }
    }
}

impl SbmConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Inferred block structure with reproducibility metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub assignment: Assignment,
    pub num_blocks: u32,
    pub description_length: f64,
    pub seed: u64,
    pub restarts_run: u32,
    pub per_restart_dl: Vec<f64>,
}

impl PartitionResult {
    /// Left-side labels in block `block`, in assignment order.
    pub fn left_members(&self, block: u32) -> Vec<&str> {
        self.assignment
            .left
            .iter()
            .filter(|(_, &b)| b == block)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Distinct left-side block ids, ascending.
    pub fn left_blocks(&self) -> Vec<u32> {
        distinct(self.assignment.left.values())
    }

    pub fn right_blocks(&self) -> Vec<u32> {
        distinct(self.assignment.right.values())
    }

    pub fn block_of_left(&self, label: &str) -> Option<u32> {
        self.assignment.left.get(label).copied()
    }
}

fn distinct<'a>(ids: impl Iterator<Item = &'a u32>) -> Vec<u32> {
    let mut v: Vec<u32> = ids.copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Finds the side-respecting partition of `g` with the lowest description
/// length across `cfg.restarts` independent restarts.
///
/// Ties between restarts go to the lowest restart index; results depend
/// only on the graph and the configuration.
pub fn infer_partition(g: &BipartiteGraph, cfg: &SbmConfig) -> Result<PartitionResult> {
    if g.is_empty() {
        return Err(Error::InvalidInput("cannot partition a graph with no edges".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let sg = SbmGraph::new(g);
    let outcomes = infer::run_restarts(&sg, cfg);
    let per_restart_dl: Vec<f64> = outcomes.iter().map(|o| o.dl).collect();
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.dl.total_cmp(&b.dl).then(i.cmp(j)))
        .map(|(_, o)| o)
        .expect("at least one restart");
    let n_left = g.left_len();
    let assignment = Assignment {
        left: g
            .left_nodes()
            .zip(&best.blocks[..n_left])
            .map(|(n, &b)| (n.to_string(), b))
            .collect(),
        right: g
            .right_nodes()
            .zip(&best.blocks[n_left..])
            .map(|(n, &b)| (n.to_string(), b))
            .collect(),
    };
    let result = PartitionResult {
        num_blocks: distinct(assignment.left.values()).len() as u32 + distinct(assignment.right.values()).len() as u32,
        description_length: sg.description_length(&best.blocks),
        assignment,
        seed: cfg.seed,
        restarts_run: cfg.restarts,
        per_restart_dl,
    };
    Ok(canonicalize(&result))
}

/// Renumbers blocks: left blocks `0..B_L` by descending size (ties by the
/// smallest member label), then right blocks `B_L..B` the same way.
pub fn canonicalize(p: &PartitionResult) -> PartitionResult {
    let left = canonical_ids(&p.assignment.left, 0);
    let right = canonical_ids(&p.assignment.right, distinct(p.assignment.left.values()).len() as u32);
    PartitionResult {
        assignment: Assignment { left, right },
        ..p.clone()
    }
}

fn canonical_ids(side: &IndexMap<String, u32>, offset: u32) -> IndexMap<String, u32> {
    let mut groups: BTreeMap<u32, (usize, &str)> = BTreeMap::new();
    for (label, &b) in side {
        let e = groups.entry(b).or_insert((0, label.as_str()));
        e.0 += 1;
        if label.as_str() < e.1 {
            e.1 = label.as_str();
        }
    }
    let mut order: Vec<(u32, usize, &str)> = groups.iter().map(|(&b, &(n, m))| (b, n, m)).collect();
    order.sort_by(|a, b| match b.1.cmp(&a.1) {
        Ordering::Equal => a.2.cmp(b.2),
        other => other,
    });
    let map: BTreeMap<u32, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &(b, _, _))| (b, offset + i as u32))
        .collect();
    side.iter().map(|(l, b)| (l.clone(), map[b])).collect()
}

#[cfg(test)]
mod tests;
