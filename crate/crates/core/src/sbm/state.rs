//! Incrementally maintained block state for the agglomerative optimizer.

use super::dl::SbmGraph;

#[derive(Debug, Clone)]
pub(crate) struct BlockState<'g> {
    g: &'g SbmGraph,
    /// Node to block. Left blocks use ids `0..n_left`, right blocks
    /// `n_left..n_left + n_right`, so sides never share a block.
    blocks: Vec<u32>,
    size: Vec<u64>,
    degree: Vec<u64>,
    /// Per-block degree histogram, sorted by degree.
    hist: Vec<Vec<(u64, u64)>>,
    /// `sum_k ln n_k^r!` per block.
    hist_term: Vec<f64>,
    /// Dense `n_left x n_right` block edge counts.
    cells: Vec<u64>,
    active: [Vec<u32>; 2],
    dl: f64,
    // Neighbor block weights of the node under consideration.
    scratch: Vec<u64>,
    touched: Vec<u32>,
}

/// Side index: 0 for left, 1 for right.
#[inline]
fn side_of(g: &SbmGraph, block_or_node: usize) -> usize {
    usize::from(block_or_node >= g.n_left)
}

impl<'g> BlockState<'g> {
    /// Every node in its own block.
    pub fn singletons(g: &'g SbmGraph) -> Self {
        let blocks: Vec<u32> = (0..g.n_nodes() as u32).collect();
        Self::from_blocks(g, &blocks)
    }

    /// State for an assignment that already uses the side-specific id ranges.
    pub fn from_blocks(g: &'g SbmGraph, blocks: &[u32]) -> Self {
        let n = g.n_nodes();
        assert_eq!(blocks.len(), n);
        let mut s = Self {
            g,
            blocks: blocks.to_vec(),
            size: vec![0; n],
            degree: vec![0; n],
            hist: vec![Vec::new(); n],
            hist_term: vec![0.0; n],
            cells: vec![0; g.n_left * g.n_right],
            active: [Vec::new(), Vec::new()],
            dl: 0.0,
            scratch: vec![0; n],
            touched: Vec::new(),
        };
        for (v, &b) in blocks.iter().enumerate() {
            let b = b as usize;
            assert_eq!(side_of(g, b), side_of(g, v), "block id on the wrong side");
            s.size[b] += 1;
            s.degree[b] += g.degree[v];
            hist_add(&mut s.hist[b], g.degree[v], 1);
        }
        for l in 0..g.n_left {
            for &(r, w) in &g.adj[l] {
                let idx = s.cell_index(blocks[l] as usize, blocks[r as usize] as usize);
                s.cells[idx] += w;
            }
        }
        for b in 0..n {
            if s.size[b] > 0 {
                s.hist_term[b] = s.hist[b].iter().map(|&(_, c)| g.lnf(c)).sum();
                s.active[side_of(g, b)].push(b as u32);
            }
        }
        s.dl = g.description_length(&s.blocks);
        s
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn n_left(&self) -> usize {
        self.g.n_left
    }

    #[cfg(test)]
    pub fn dl(&self) -> f64 {
        self.dl
    }

    /// Replaces the running total with a from-scratch evaluation.
    pub fn resync(&mut self) -> f64 {
        self.dl = self.g.description_length(&self.blocks);
        self.dl
    }

    pub fn block_count(&self, side: usize) -> usize {
        self.active[side].len()
    }

    pub fn active(&self, side: usize) -> &[u32] {
        &self.active[side]
    }

    #[inline]
    fn cell_index(&self, left_block: usize, right_block: usize) -> usize {
        left_block * self.g.n_right + (right_block - self.g.n_left)
    }

    /// Edge count between block `x` and a block `t` on the other side.
    #[inline]
    fn cell(&self, x: usize, t: usize) -> u64 {
        if x < self.g.n_left {
            self.cells[self.cell_index(x, t)]
        } else {
            self.cells[self.cell_index(t, x)]
        }
    }

    #[inline]
    fn cell_mut(&mut self, x: usize, t: usize) -> &mut u64 {
        let idx = if x < self.g.n_left {
            self.cell_index(x, t)
        } else {
            self.cell_index(t, x)
        };
        &mut self.cells[idx]
    }

    fn counts_term(&self, side: usize, delta: i64) -> f64 {
        let mut b = [self.active[0].len() as u64, self.active[1].len() as u64];
        b[side] = (b[side] as i64 + delta) as u64;
        self.g.block_count_term(b[0], b[1])
    }

    fn block_term(&self, b: usize) -> f64 {
        self.g.block_term(self.degree[b], self.size[b], self.hist_term[b])
    }

    /// Loads the neighbor block weights of `v` into the scratch buffer.
    pub fn load_neighbors(&mut self, v: usize) {
        for &t in &self.touched {
            self.scratch[t as usize] = 0;
        }
        self.touched.clear();
        for &(u, w) in &self.g.adj[v] {
            let t = self.blocks[u as usize];
            if self.scratch[t as usize] == 0 {
                self.touched.push(t);
            }
            self.scratch[t as usize] += w;
        }
    }

    /// DL change of moving `v` into the non-empty block `to`. Requires
    /// [`load_neighbors`](Self::load_neighbors) for `v`.
    pub fn move_delta(&self, v: usize, to: usize) -> f64 {
        let g = self.g;
        let from = self.blocks[v] as usize;
        if from == to {
            return 0.0;
        }
        debug_assert!(self.size[to] > 0);
        let k = g.degree[v];
        let mut d = 0.0;
        for &t in &self.touched {
            let t = t as usize;
            let m = self.scratch[t];
            let e_from = self.cell(from, t);
            let e_to = self.cell(to, t);
            d += g.lnf(e_from) - g.lnf(e_from - m) + g.lnf(e_to) - g.lnf(e_to + m);
        }
        let c_from = hist_get(&self.hist[from], k);
        let c_to = hist_get(&self.hist[to], k);
        d += g.block_term(
            self.degree[from] - k,
            self.size[from] - 1,
            self.hist_term[from] - (c_from as f64).ln(),
        ) - self.block_term(from);
        d += g.block_term(
            self.degree[to] + k,
            self.size[to] + 1,
            self.hist_term[to] + ((c_to + 1) as f64).ln(),
        ) - self.block_term(to);
        if self.size[from] == 1 {
            let side = side_of(g, v);
            d += self.counts_term(side, -1) - self.counts_term(side, 0);
        }
        d
    }

    /// Moves `v` into block `to`. Requires loaded neighbors for `v`.
    pub fn apply_move(&mut self, v: usize, to: usize, delta: f64) {
        let g = self.g;
        let from = self.blocks[v] as usize;
        if from == to {
            return;
        }
        let k = g.degree[v];
        for i in 0..self.touched.len() {
            let t = self.touched[i] as usize;
            let m = self.scratch[t];
            *self.cell_mut(from, t) -= m;
            *self.cell_mut(to, t) += m;
        }
        let c_from = hist_get(&self.hist[from], k);
        self.hist_term[from] -= (c_from as f64).ln();
        hist_add(&mut self.hist[from], k, -1);
        let c_to = hist_get(&self.hist[to], k);
        self.hist_term[to] += ((c_to + 1) as f64).ln();
        hist_add(&mut self.hist[to], k, 1);
        self.size[from] -= 1;
        self.size[to] += 1;
        self.degree[from] -= k;
        self.degree[to] += k;
        self.blocks[v] = to as u32;
        if self.size[from] == 0 {
            self.hist_term[from] = 0.0;
            let side = side_of(g, from);
            self.active[side].retain(|&b| b as usize != from);
        }
        self.dl += delta;
    }

    /// DL change of merging block `b` into block `a` (same side, both
    /// non-empty, distinct).
    pub fn merge_delta(&self, a: usize, b: usize) -> f64 {
        let g = self.g;
        let side = side_of(g, a);
        debug_assert_eq!(side, side_of(g, b));
        let mut d = 0.0;
        for &t in &self.active[1 - side] {
            let t = t as usize;
            let (x, y) = (self.cell(a, t), self.cell(b, t));
            if x > 0 && y > 0 {
                d += g.lnf(x) + g.lnf(y) - g.lnf(x + y);
            }
        }
        let merged_hist = merged_hist_term(g, &self.hist[a], &self.hist[b]);
        d += g.block_term(
            self.degree[a] + self.degree[b],
            self.size[a] + self.size[b],
            merged_hist,
        ) - self.block_term(a)
            - self.block_term(b);
        d += self.counts_term(side, -1) - self.counts_term(side, 0);
        d
    }

    pub fn apply_merge(&mut self, a: usize, b: usize, delta: f64) {
        let g = self.g;
        let side = side_of(g, a);
        for v in 0..self.blocks.len() {
            if self.blocks[v] as usize == b {
                self.blocks[v] = a as u32;
            }
        }
        for i in 0..self.active[1 - side].len() {
            let t = self.active[1 - side][i] as usize;
            let y = std::mem::take(self.cell_mut(b, t));
            *self.cell_mut(a, t) += y;
        }
        let hb = std::mem::take(&mut self.hist[b]);
        for (k, c) in hb {
            hist_add(&mut self.hist[a], k, c as i64);
        }
        self.hist_term[a] = self.hist[a].iter().map(|&(_, c)| g.lnf(c)).sum();
        self.hist_term[b] = 0.0;
        self.size[a] += std::mem::take(&mut self.size[b]);
        self.degree[a] += std::mem::take(&mut self.degree[b]);
        self.active[side].retain(|&x| x as usize != b);
        self.dl += delta;
    }
}

fn hist_get(hist: &[(u64, u64)], k: u64) -> u64 {
    match hist.binary_search_by_key(&k, |&(d, _)| d) {
        Ok(i) => hist[i].1,
        Err(_) => 0,
    }
}

fn hist_add(hist: &mut Vec<(u64, u64)>, k: u64, delta: i64) {
    match hist.binary_search_by_key(&k, |&(d, _)| d) {
        Ok(i) => {
            let c = (hist[i].1 as i64 + delta) as u64;
            if c == 0 {
                hist.remove(i);
            } else {
                hist[i].1 = c;
            }
        }
        Err(i) => {
            debug_assert!(delta > 0);
            hist.insert(i, (k, delta as u64));
        }
    }
}

fn merged_hist_term(g: &SbmGraph, a: &[(u64, u64)], b: &[(u64, u64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    while i < a.len() || j < b.len() {
        let c = match (a.get(i), b.get(j)) {
            (Some(&(ka, ca)), Some(&(kb, cb))) if ka == kb => {
                i += 1;
                j += 1;
                ca + cb
            }
            (Some(&(ka, ca)), Some(&(kb, _))) if ka < kb => {
                i += 1;
                ca
            }
            (Some(&(_, ca)), None) => {
                i += 1;
                ca
            }
            (_, Some(&(_, cb))) => {
                j += 1;
                cb
            }
            (None, None) => unreachable!(),
        };
        s += g.lnf(c);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetnet::{BipartiteGraph, NodeType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, nl: usize, nr: usize) -> BipartiteGraph {
        let mut g = BipartiteGraph::new(NodeType::Student, NodeType::Pair);
        for i in 0..nl {
            g.add_left(format!("s{i}"));
        }
        for j in 0..nr {
            g.add_right(format!("p{j}"));
        }
        for i in 0..nl {
            for j in 0..nr {
                if rng.random_bool(0.4) {
                    g.add_weight_at(i, j, rng.random_range(1..6));
                }
            }
        }
        g
    }

    #[test]
    fn incremental_deltas_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let bg = random_graph(&mut rng, 9, 7);
            let g = SbmGraph::new(&bg);
            let mut st = BlockState::singletons(&g);
            for _ in 0..60 {
                let v = rng.random_range(0..g.n_nodes());
                let side = side_of(&g, v);
                let act = st.active(side).to_vec();
                if rng.random_bool(0.5) && act.len() > 1 {
                    let a = act[rng.random_range(0..act.len())] as usize;
                    let b = act[rng.random_range(0..act.len())] as usize;
                    if a == b {
                        continue;
                    }
                    let d = st.merge_delta(a, b);
                    let before = st.dl();
                    st.apply_merge(a, b, d);
                    let fresh = g.description_length(st.blocks());
                    assert!((before + d - fresh).abs() < 1e-8, "merge delta mismatch");
                } else {
                    let to = act[rng.random_range(0..act.len())] as usize;
                    st.load_neighbors(v);
                    let d = st.move_delta(v, to);
                    let before = st.dl();
                    st.apply_move(v, to, d);
                    let fresh = g.description_length(st.blocks());
                    assert!((before + d - fresh).abs() < 1e-8, "move delta mismatch");
                }
                st.resync();
            }
        }
    }
}
