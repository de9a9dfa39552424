use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::hetnet::NodeType;

fn graph(matrix: &[&[u64]]) -> BipartiteGraph {
    let mut g = BipartiteGraph::new(NodeType::Student, NodeType::Pair);
    for i in 0..matrix.len() {
        g.add_left(format!("s{i}"));
    }
    for j in 0..matrix[0].len() {
        g.add_right(format!("p{j}"));
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            g.add_weight_at(i, j, w);
        }
    }
    g
}

fn assignment(g: &BipartiteGraph, left: &[u32], right: &[u32]) -> Assignment {
    Assignment {
        left: g.left_nodes().map(String::from).zip(left.iter().copied()).collect(),
        right: g.right_nodes().map(String::from).zip(right.iter().copied()).collect(),
    }
}

// ---- independent oracle: the closed form term by term ----

fn ln_fact(n: u64) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

fn ln_binom(n: u64, k: u64) -> f64 {
    ln_fact(n) - ln_fact(k) - ln_fact(n - k)
}

fn partitions_at_most(m: u64, n: u64, max_part: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    (1..=max_part.min(m)).map(|p| partitions_at_most(m - p, n - 1, p)).sum()
}

fn oracle_dl(a: &[Vec<u64>], left: &[u32], right: &[u32]) -> f64 {
    let (nl, nr) = (a.len(), a[0].len());
    let e: u64 = a.iter().flatten().sum();
    let k_left: Vec<u64> = a.iter().map(|r| r.iter().sum()).collect();
    let k_right: Vec<u64> = (0..nr).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let bl: BTreeSet<u32> = left.iter().copied().collect();
    let br: BTreeSet<u32> = right.iter().copied().collect();

    let s_e = ln_binom(bl.len() as u64 * br.len() as u64 + e - 1, e);

    let mut s_b = 0.0;
    for (labels, n, b) in [(left, nl, &bl), (right, nr, &br)] {
        s_b += (n as f64).ln() + ln_binom(n as u64 - 1, b.len() as u64 - 1) + ln_fact(n as u64);
        for blk in b {
            s_b -= ln_fact(labels.iter().filter(|&&x| x == *blk).count() as u64);
        }
    }

    let mut s_k = 0.0;
    let mut s_a = 0.0;
    for (labels, degs, b) in [(left, &k_left, &bl), (right, &k_right, &br)] {
        for blk in b {
            let members: Vec<u64> = labels
                .iter()
                .zip(degs.iter())
                .filter(|(x, _)| **x == *blk)
                .map(|(_, &k)| k)
                .collect();
            let e_r: u64 = members.iter().sum();
            let n_r = members.len() as u64;
            s_k += (partitions_at_most(e_r, n_r, e_r) as f64).ln() + ln_fact(n_r);
            let mut hist = BTreeMap::new();
            for k in &members {
                *hist.entry(*k).or_insert(0u64) += 1;
            }
            for c in hist.values() {
                s_k -= ln_fact(*c);
            }
            s_a += ln_fact(e_r);
        }
        for &k in degs.iter() {
            s_a -= ln_fact(k);
        }
    }
    for r in &bl {
        for s in &br {
            let mut e_rs = 0;
            for i in 0..nl {
                for j in 0..nr {
                    if left[i] == *r && right[j] == *s {
                        e_rs += a[i][j];
                    }
                }
            }
            s_a -= ln_fact(e_rs);
        }
    }
    for row in a {
        for &w in row {
            s_a += ln_fact(w);
        }
    }
    s_e + s_b + s_k + s_a
}

/// All set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            rec(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    rec(1, n, &mut cur, 0, &mut out);
    out
}

fn offset(ids: &[u32], by: u32) -> Vec<u32> {
    ids.iter().map(|b| b + by).collect()
}

// ---- tests ----

#[test]
fn tiny_graph_matches_oracle() {
    let a: Vec<Vec<u64>> = vec![vec![2, 0], vec![0, 1], vec![1, 0]];
    let m: Vec<&[u64]> = a.iter().map(Vec::as_slice).collect();
    let g = graph(&m);
    assert_eq!(g.edge_count(), 3);
    for (left, right) in [
        (vec![0, 0, 0], vec![1, 1]),
        (vec![0, 1, 0], vec![2, 3]),
        (vec![0, 1, 2], vec![3, 3]),
        (vec![5, 5, 7], vec![9, 8]),
    ] {
        let dl = description_length(&g, &assignment(&g, &left, &right)).unwrap();
        let expected = oracle_dl(&a, &left, &right);
        assert!((dl - expected).abs() < 1e-10, "{left:?}/{right:?}: {dl} vs {expected}");
    }
    // Frozen from the oracle for the single-block partition.
    let single = description_length(&g, &Assignment::trivial(&g)).unwrap();
    assert!((single - 7.454_719_949_364_001).abs() < 1e-9, "{single}");
}

#[test]
fn dl_invariant_under_relabeling() {
    let g = graph(&[&[3, 1, 0, 0], &[2, 2, 0, 1], &[0, 0, 4, 2], &[0, 1, 3, 3]]);
    let a = description_length(&g, &assignment(&g, &[0, 0, 1, 1], &[2, 2, 3, 3])).unwrap();
    let b = description_length(&g, &assignment(&g, &[7, 7, 4, 4], &[1, 1, 0, 0])).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn planted_split_beats_single_block() {
    // Two groups of three students with disjoint pair neighborhoods,
    // 12 edges per group.
    let a: Vec<Vec<u64>> = vec![
        vec![2, 2, 0, 0],
        vec![2, 2, 0, 0],
        vec![1, 3, 0, 0],
        vec![0, 0, 2, 2],
        vec![0, 0, 3, 1],
        vec![0, 0, 2, 2],
    ];
    let m: Vec<&[u64]> = a.iter().map(Vec::as_slice).collect();
    let g = graph(&m);
    let planted = (vec![0, 0, 0, 1, 1, 1], vec![2, 2, 3, 3]);
    let single = (vec![0; 6], vec![1; 4]);
    let dl_planted = oracle_dl(&a, &planted.0, &planted.1);
    let dl_single = oracle_dl(&a, &single.0, &single.1);
    assert!(dl_planted < dl_single, "{dl_planted} vs {dl_single}");
    let impl_planted = description_length(&g, &assignment(&g, &planted.0, &planted.1)).unwrap();
    assert!((impl_planted - dl_planted).abs() < 1e-10);
}

#[test]
fn identical_neighborhoods_collapse_to_one_block() {
    let row: &[u64] = &[3, 2, 1, 2];
    let g = graph(&[row; 6]);
    let a: Vec<Vec<u64>> = vec![row.to_vec(); 6];
    // Exhaustive over student-side partitions, for every pair-side partition.
    let mut best = (f64::INFINITY, 0usize);
    for right in set_partitions(4) {
        for left in set_partitions(6) {
            let dl = oracle_dl(&a, &left, &offset(&right, 10));
            if dl < best.0 {
                best = (dl, left.iter().collect::<BTreeSet<_>>().len());
            }
        }
    }
    assert_eq!(best.1, 1, "exhaustive minimum uses one student block");
    let p = infer_partition(&g, &SbmConfig::with_seed(3)).unwrap();
    assert_eq!(p.left_blocks().len(), 1);
    assert!((p.description_length - best.0).abs() < 1e-9);
}

#[test]
fn recovers_two_planted_groups() {
    let a: Vec<Vec<u64>> = (0..10)
        .map(|i| {
            if i < 5 {
                vec![4, 3, 5, 0, 0, 0]
            } else {
                vec![0, 0, 0, 3, 5, 4]
            }
        })
        .collect();
    let m: Vec<&[u64]> = a.iter().map(Vec::as_slice).collect();
    let g = graph(&m);
    let p = infer_partition(&g, &SbmConfig::with_seed(1)).unwrap();
    assert_eq!(p.left_blocks().len(), 2);
    let b0 = p.block_of_left("s0").unwrap();
    for i in 0..10 {
        let same = p.block_of_left(&format!("s{i}")).unwrap() == b0;
        assert_eq!(same, i < 5);
    }
}

#[test]
fn deterministic_for_fixed_config() {
    let g = graph(&[
        &[3, 1, 0, 2],
        &[2, 2, 0, 1],
        &[0, 0, 4, 2],
        &[0, 1, 3, 3],
        &[1, 1, 1, 1],
    ]);
    let cfg = SbmConfig::with_seed(42);
    let a = infer_partition(&g, &cfg).unwrap();
    let b = infer_partition(&g, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.description_length.to_bits(), b.description_length.to_bits());
    let serial = infer_partition(
        &g,
        &SbmConfig {
            parallel: false,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(a, serial);
    assert_eq!(a.restarts_run, 10);
    assert_eq!(a.per_restart_dl.len(), 10);
}

#[test]
fn errors() {
    let empty = BipartiteGraph::new(NodeType::Student, NodeType::Pair);
    assert!(infer_partition(&empty, &SbmConfig::default()).is_err());
    let g = graph(&[&[1, 2], &[0, 3]]);
    let mut a = Assignment::trivial(&g);
    a.left.shift_remove("s1");
    assert!(matches!(description_length(&g, &a), Err(Error::InvalidAssignment(_))));
    let mixed = assignment(&g, &[0, 1], &[1, 2]);
    assert!(matches!(
        description_length(&g, &mixed),
        Err(Error::InvalidAssignment(_))
    ));
    let cfg = SbmConfig {
        restarts: 0,
        ..SbmConfig::default()
    };
    assert!(infer_partition(&g, &cfg).is_err());
}

#[test]
fn disallowing_trivial_forces_two_student_blocks() {
    let row: &[u64] = &[3, 2, 1, 2];
    let g = graph(&[row; 5]);
    let cfg = SbmConfig {
        allow_trivial: false,
        ..SbmConfig::with_seed(0)
    };
    let p = infer_partition(&g, &cfg).unwrap();
    assert!(p.left_blocks().len() >= 2);
}

fn partition_with(left: &[(&str, u32)], right: &[(&str, u32)]) -> PartitionResult {
    PartitionResult {
        assignment: Assignment {
            left: left.iter().map(|&(n, b)| (n.to_string(), b)).collect(),
            right: right.iter().map(|&(n, b)| (n.to_string(), b)).collect(),
        },
        num_blocks: 0,
        description_length: 0.0,
        seed: 0,
        restarts_run: 1,
        per_restart_dl: vec![],
    }
}

#[test]
fn canonicalize_orders_by_size() {
    let mut left: Vec<(String, u32)> = (0..5).map(|i| (format!("a{i}"), 7)).collect();
    left.extend((0..7).map(|i| (format!("b{i}"), 3)));
    let left_ref: Vec<(&str, u32)> = left.iter().map(|(n, b)| (n.as_str(), *b)).collect();
    let p = canonicalize(&partition_with(&left_ref, &[("x", 9)]));
    assert_eq!(p.block_of_left("b0"), Some(0));
    assert_eq!(p.block_of_left("a0"), Some(1));
    assert_eq!(p.assignment.right["x"], 2);
    assert_eq!(canonicalize(&p), p);
}

#[test]
fn canonicalize_ties_by_smallest_label() {
    let p = canonicalize(&partition_with(
        &[("s3", 0), ("s9", 0), ("s1", 5), ("s8", 5)],
        &[("p", 6)],
    ));
    assert_eq!(p.block_of_left("s1"), Some(0));
    assert_eq!(p.block_of_left("s3"), Some(1));
}

fn arb_matrix() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (2usize..6, 2usize..5)
        .prop_flat_map(|(nl, nr)| proptest::collection::vec(proptest::collection::vec(0u64..4, nr), nl))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn implementation_matches_oracle_on_random_partitions(
        a in arb_matrix(),
        seed in any::<u64>(),
    ) {
        prop_assume!(a.iter().flatten().any(|&w| w > 0));
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m: Vec<&[u64]> = a.iter().map(Vec::as_slice).collect();
        let g = graph(&m);
        let left: Vec<u32> = (0..a.len()).map(|_| rng.random_range(0..3)).collect();
        let right: Vec<u32> = (0..a[0].len()).map(|_| rng.random_range(10..12)).collect();
        let dl = description_length(&g, &assignment(&g, &left, &right)).unwrap();
        let expected = oracle_dl(&a, &left, &right);
        prop_assert!(dl >= 0.0);
        prop_assert!((dl - expected).abs() < 1e-9 * expected.max(1.0));
    }

    #[test]
    fn inferred_dl_self_consistent_and_no_worse_than_trivial(a in arb_matrix(), seed in 0u64..1000) {
        prop_assume!(a.iter().flatten().any(|&w| w > 0));
        let m: Vec<&[u64]> = a.iter().map(Vec::as_slice).collect();
        let g = graph(&m);
        let cfg = SbmConfig { restarts: 3, ..SbmConfig::with_seed(seed) };
        let p = infer_partition(&g, &cfg).unwrap();
        let recomputed = description_length(&g, &p.assignment).unwrap();
        prop_assert!((p.description_length - recomputed).abs() <= 1e-9 * recomputed.abs());
        let trivial = description_length(&g, &Assignment::trivial(&g)).unwrap();
        prop_assert!(p.description_length <= trivial + 1e-9);
        let lb = p.left_blocks();
        let rb = p.right_blocks();
        prop_assert!(lb.iter().all(|b| !rb.contains(b)));
        prop_assert_eq!(p.num_blocks as usize, lb.len() + rb.len());
    }
}
