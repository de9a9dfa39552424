//! Description length of the bipartite degree-corrected microcanonical SBM.
//!
//! For a bipartite multigraph with `E` edges, `N_L` + `N_R` nodes, degrees
//! `k_i` and multiplicities `A_ij`, and a side-respecting partition with
//! `B_L` + `B_R` non-empty blocks, block sizes `n_r`, block degrees `e_r`,
//! block edge counts `e_rs` and block degree histograms `n_k^r`, the
//! description length in nats is `S = S_e + S_b + S_k + S_A` with
//!
//! ```text
//! S_e = ln C(B_L B_R + E - 1, E)                                 edge counts
//! S_b = sum_side [ ln N + ln C(N - 1, B - 1) + ln N! - sum_r ln n_r! ]
//! S_k = sum_r [ ln q(e_r, n_r) + ln n_r! - sum_k ln n_k^r! ]        degrees
//! S_A = sum_r ln e_r! - sum_rs ln e_rs! - sum_i ln k_i! + sum_ij ln A_ij!
//! ```
//!
//! where `q(m, n)` counts partitions of `m` into at most `n` parts. `S_A` is
//! minus the log-probability of the graph under uniform half-edge pairing
//! given the degrees and block edge counts. Every term is minus the log of
//! a normalised probability, so `S >= 0`.
//!
//! For computation the terms are regrouped into per-block, per-cell,
//! block-count and constant parts. The `ln n_r!` terms of `S_b` and `S_k`
//! cancel.

use std::collections::BTreeMap;

use statrs::function::gamma::ln_gamma;

use super::partitions::LogPartitions;
use crate::hetnet::BipartiteGraph;

/// Adjacency view of a bipartite graph used by the optimizer.
///
/// Nodes are numbered globally: left nodes `0..n_left`, right nodes
/// `n_left..n_left + n_right`.
#[derive(Debug, Clone)]
pub(crate) struct SbmGraph {
    pub n_left: usize,
    pub n_right: usize,
    pub adj: Vec<Vec<(u32, u64)>>,
    pub degree: Vec<u64>,
    pub edges: u64,
    ln_fact: Vec<f64>,
    ln_q: LogPartitions,
    constant: f64,
}

const MAX_LN_FACT_TABLE: usize = 1 << 22;

impl SbmGraph {
    pub fn new(g: &BipartiteGraph) -> Self {
        let n_left = g.left_len();
        let n_right = g.right_len();
        let n = n_left + n_right;
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0u64; n];
        let mut edges = 0u64;
        for (l, r, w) in g.edges_indexed() {
            let rr = n_left + r;
            adj[l].push((rr as u32, w));
            adj[rr].push((l as u32, w));
            degree[l] += w;
            degree[rr] += w;
            edges += w;
        }
        let cells = (n_left.max(1)) * (n_right.max(1));
        let table_len = (edges as usize + cells + n + 2).min(MAX_LN_FACT_TABLE);
        let mut ln_fact = Vec::with_capacity(table_len);
        ln_fact.push(0.0);
        for i in 1..table_len {
            let prev = ln_fact[i - 1];
            ln_fact.push(prev + (i as f64).ln());
        }
        let ln_q = LogPartitions::new(edges as usize, n_left.max(n_right));
        let mut s = Self {
            n_left,
            n_right,
            adj,
            degree,
            edges,
            ln_fact,
            ln_q,
            constant: 0.0,
        };
        let mut constant = 0.0;
        for side_n in [n_left, n_right] {
            if side_n > 0 {
                constant += (side_n as f64).ln() + s.lnf(side_n as u64);
            }
        }
        for &k in &s.degree {
            constant -= s.lnf(k);
        }
        for (_, _, w) in g.edges_indexed() {
            constant += s.lnf(w);
        }
        s.constant = constant;
        s
    }

    pub fn n_nodes(&self) -> usize {
        self.n_left + self.n_right
    }

    #[inline]
    pub fn lnf(&self, n: u64) -> f64 {
        match self.ln_fact.get(n as usize) {
            Some(&v) => v,
            None => ln_gamma(n as f64 + 1.0),
        }
    }

    fn ln_binom(&self, n: u64, k: u64) -> f64 {
        debug_assert!(k <= n);
        self.lnf(n) - self.lnf(k) - self.lnf(n - k)
    }

    #[inline]
    pub fn ln_q(&self, m: u64, n: u64) -> f64 {
        self.ln_q.ln_q(m, n)
    }

    /// Terms that depend only on the number of non-empty blocks per side.
    pub fn block_count_term(&self, b_left: u64, b_right: u64) -> f64 {
        let mut s = 0.0;
        if self.edges > 0 {
            let cells = (b_left * b_right).max(1);
            s += self.ln_binom(cells + self.edges - 1, self.edges);
        }
        for (n, b) in [(self.n_left as u64, b_left), (self.n_right as u64, b_right)] {
            if n > 0 && b > 0 {
                s += self.ln_binom(n - 1, b - 1);
            }
        }
        s
    }

    /// Contribution of one block: `ln e_r! + ln q(e_r, n_r) - sum_k ln n_k^r!`.
    /// `hist_term` is `sum_k ln n_k^r!`.
    #[inline]
    pub fn block_term(&self, e_r: u64, n_r: u64, hist_term: f64) -> f64 {
        if n_r == 0 {
            return 0.0;
        }
        self.lnf(e_r) + self.ln_q(e_r, n_r) - hist_term
    }

    /// Description length of a block assignment given per node (block ids
    /// arbitrary; left and right ids must not coincide).
    pub fn description_length(&self, blocks: &[u32]) -> f64 {
        debug_assert_eq!(blocks.len(), self.n_nodes());
        #[derive(Default)]
        struct Block {
            size: u64,
            degree: u64,
            hist: BTreeMap<u64, u64>,
        }
        let mut stats: BTreeMap<u32, Block> = BTreeMap::new();
        for (v, &b) in blocks.iter().enumerate() {
            let blk = stats.entry(b).or_default();
            blk.size += 1;
            blk.degree += self.degree[v];
            *blk.hist.entry(self.degree[v]).or_insert(0) += 1;
        }
        let mut cells: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for l in 0..self.n_left {
            for &(r, w) in &self.adj[l] {
                *cells.entry((blocks[l], blocks[r as usize])).or_insert(0) += w;
            }
        }
        let b_left = count_distinct(&blocks[..self.n_left]);
        let b_right = count_distinct(&blocks[self.n_left..]);
        let mut s = self.constant + self.block_count_term(b_left, b_right);
        for blk in stats.values() {
            let hist: f64 = blk.hist.values().map(|&c| self.lnf(c)).sum();
            s += self.block_term(blk.degree, blk.size, hist);
        }
        for &e in cells.values() {
            s -= self.lnf(e);
        }
        s
    }
}

fn count_distinct(ids: &[u32]) -> u64 {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len() as u64
}
