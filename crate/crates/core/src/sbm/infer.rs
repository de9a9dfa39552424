//! Agglomerative description-length minimisation.
//!
//! Each restart starts from one block per node and repeatedly applies the
//! same-side merge with the smallest DL change, followed by greedy
//! single-node sweeps, until both sides are a single block. The lowest-DL
//! state seen along the way is the restart's answer, so the single-block
//! partition is always among the candidates.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dl::SbmGraph;
use super::state::BlockState;
use super::SbmConfig;

const IMPROVEMENT_EPS: f64 = 1e-9;
/// Gumbel scale (nats) applied to merge deltas on restarts after the first.
const MERGE_NOISE: f64 = 1.0;

#[derive(Debug, Clone)]
pub(crate) struct RestartOutcome {
    pub blocks: Vec<u32>,
    pub dl: f64,
}

/// RNG stream for restart `restart` under the root `seed`.
pub(crate) fn restart_rng(seed: u64, restart: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

pub(crate) fn run_restarts(g: &SbmGraph, cfg: &SbmConfig) -> Vec<RestartOutcome> {
    let run = |r: u32| single_restart(g, cfg, r, &mut restart_rng(cfg.seed, r));
    if cfg.parallel {
        (0..cfg.restarts).into_par_iter().map(run).collect()
    } else {
        (0..cfg.restarts).map(run).collect()
    }
}

fn admissible(g: &SbmGraph, st: &BlockState<'_>, cfg: &SbmConfig) -> bool {
    cfg.allow_trivial || g.n_left < 2 || st.block_count(0) >= 2
}

fn single_restart(g: &SbmGraph, cfg: &SbmConfig, restart: u32, rng: &mut ChaCha8Rng) -> RestartOutcome {
    let mut st = BlockState::singletons(g);
    let noisy = restart > 0;
    let mut best: Option<RestartOutcome> = None;
    let consider = |st: &mut BlockState<'_>, best: &mut Option<RestartOutcome>| {
        if !admissible(g, st, cfg) {
            return;
        }
        let dl = st.resync();
        if best.as_ref().is_none_or(|b| dl < b.dl - IMPROVEMENT_EPS) {
            *best = Some(RestartOutcome {
                blocks: st.blocks().to_vec(),
                dl,
            });
        }
    };
    consider(&mut st, &mut best);
    let mut order: Vec<usize> = (0..g.n_nodes()).collect();
    while st.block_count(0) > 1 || st.block_count(1) > 1 {
        let Some((a, b, delta)) = best_merge(&st, noisy, rng) else {
            break;
        };
        st.apply_merge(a, b, delta);
        sweep(&mut st, cfg.sweeps_per_level, &mut order, rng);
        consider(&mut st, &mut best);
    }
    consider(&mut st, &mut best);
    best.expect("the starting partition is admissible when trivial partitions are")
}

/// The same-side merge with the lowest (optionally perturbed) DL change.
fn best_merge(st: &BlockState<'_>, noisy: bool, rng: &mut ChaCha8Rng) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64, f64)> = None;
    for side in 0..2 {
        let act = st.active(side);
        for (i, &a) in act.iter().enumerate() {
            for &b in &act[i + 1..] {
                let (a, b) = (a as usize, b as usize);
                let delta = st.merge_delta(a, b);
                let score = if noisy {
                    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                    delta - MERGE_NOISE * (-(u.ln())).ln()
                } else {
                    delta
                };
                if best.is_none_or(|(_, _, _, s)| score < s) {
                    best = Some((a, b, delta, score));
                }
            }
        }
    }
    best.map(|(a, b, d, _)| (a, b, d))
}

/// Greedy single-node moves between existing blocks, in random order.
fn sweep(st: &mut BlockState<'_>, max_sweeps: u32, order: &mut [usize], rng: &mut ChaCha8Rng) {
    for _ in 0..max_sweeps {
        order.shuffle(rng);
        let mut moved = false;
        for &v in order.iter() {
            let side = usize::from(v >= st.n_left());
            if st.block_count(side) < 2 {
                continue;
            }
            st.load_neighbors(v);
            let from = st.blocks()[v] as usize;
            let mut best: Option<(usize, f64)> = None;
            for &t in st.active(side) {
                let t = t as usize;
                if t == from {
                    continue;
                }
                let d = st.move_delta(v, t);
                if d < -IMPROVEMENT_EPS && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((t, d));
                }
            }
            if let Some((t, d)) = best {
                st.apply_move(v, t, d);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}
