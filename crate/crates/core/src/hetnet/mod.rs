//! The tripartite student/location/behavior network and its bipartite
//! projections.
//!
//! The triad tensor `w(s, l, c)` is the only stored data; the three
//! pairwise edge sets are computed from it as marginal sums when the
//! network is built, so they always agree with the tensor.

mod bipartite;

use std::collections::BTreeMap;

use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Result};
use crate::events::Triad;
use crate::sbm::PartitionResult;

pub use bipartite::{BipartiteGraph, NodeType, Side};

/// Separator between the location and behavior in pair-node labels.
pub const PAIR_SEPARATOR: char = '|';

pub fn pair_label(location: &str, code: &str) -> String {
    format!("{location}{PAIR_SEPARATOR}{code}")
}

/// Splits a `location|code` label. Locations may not contain `|`; the code
/// is everything after the first separator.
pub fn split_pair_label(label: &str) -> Option<(&str, &str)> {
    label.split_once(PAIR_SEPARATOR)
}

/// Sparse triad counts keyed by `(student, location, code)` node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriadTensor {
    counts: IndexMap<(u32, u32, u32), u64>,
}

impl TriadTensor {
    pub fn get(&self, student: usize, location: usize, code: usize) -> u64 {
        self.counts
            .get(&(student as u32, location as u32, code as u32))
            .copied()
            .unwrap_or(0)
    }

    /// Entries in first-seen order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), u64)> + '_ {
        self.counts
            .iter()
            .map(|(&(s, l, c), &w)| ((s as usize, l as usize, c as usize), w))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    fn add(&mut self, key: (u32, u32, u32), weight: u64) {
        if weight > 0 {
            *self.counts.entry(key).or_insert(0) += weight;
        }
    }
}

/// Heterogeneous network over students, behavior codes and locations.
#[derive(Debug, Clone, Default)]
pub struct TripartiteNetwork {
    students: IndexSet<String>,
    codes: IndexSet<String>,
    locations: IndexSet<String>,
    triads: TriadTensor,
    student_code: BTreeMap<(u32, u32), u64>,
    student_location: BTreeMap<(u32, u32), u64>,
    code_location: BTreeMap<(u32, u32), u64>,
}

impl PartialEq for TripartiteNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.students.iter().eq(other.students.iter())
            && self.codes.iter().eq(other.codes.iter())
            && self.locations.iter().eq(other.locations.iter())
            && self.triads == other.triads
    }
}

impl Eq for TripartiteNetwork {}

/// Aggregates triads into a network; node order is first appearance.
pub fn build_tripartite<'a>(triads: impl IntoIterator<Item = &'a Triad>) -> TripartiteNetwork {
    let mut net = TripartiteNetwork::default();
    for t in triads {
        net.add_triad(&t.student, &t.location, &t.code, 1);
    }
    net.rebuild_marginals();
    net
}

impl TripartiteNetwork {
    /// Builds a network with fixed node lists (isolated nodes allowed) and
    /// weighted triads given by label.
    pub fn from_parts<S, L, C>(
        students: S,
        locations: L,
        codes: C,
        triads: impl IntoIterator<Item = (String, String, String, u64)>,
    ) -> Result<Self>
    where
        S: IntoIterator<Item = String>,
        L: IntoIterator<Item = String>,
        C: IntoIterator<Item = String>,
    {
        let mut net = TripartiteNetwork::default();
        for (set, items, what) in [
            (&mut net.students, students.into_iter().collect::<Vec<_>>(), "student"),
            (&mut net.locations, locations.into_iter().collect(), "location"),
            (&mut net.codes, codes.into_iter().collect(), "code"),
        ] {
            for item in items {
                if !set.insert(item.clone()) {
                    return Err(Error::InvalidInput(format!("duplicate {what} node `{item}`")));
                }
            }
        }
        for (s, l, c, w) in triads {
            let key = (
                net.students.get_index_of(&s).ok_or(Error::UnknownNode(s))? as u32,
                net.locations.get_index_of(&l).ok_or(Error::UnknownNode(l))? as u32,
                net.codes.get_index_of(&c).ok_or(Error::UnknownNode(c))? as u32,
            );
            if w == 0 {
                return Err(Error::InvalidInput("triad weights must be positive".into()));
            }
            net.triads.add(key, w);
        }
        net.rebuild_marginals();
        Ok(net)
    }

    fn add_triad(&mut self, student: &str, location: &str, code: &str, weight: u64) {
        let s = insert(&mut self.students, student);
        let l = insert(&mut self.locations, location);
        let c = insert(&mut self.codes, code);
        self.triads.add((s, l, c), weight);
    }

    fn rebuild_marginals(&mut self) {
        self.student_code.clear();
        self.student_location.clear();
        self.code_location.clear();
        for (&(s, l, c), &w) in &self.triads.counts {
            *self.student_code.entry((s, c)).or_insert(0) += w;
            *self.student_location.entry((s, l)).or_insert(0) += w;
            *self.code_location.entry((c, l)).or_insert(0) += w;
        }
    }

    pub fn students(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.students.iter().map(String::as_str)
    }

    pub fn codes(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.codes.iter().map(String::as_str)
    }

    pub fn locations(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.locations.iter().map(String::as_str)
    }

    pub fn student_index(&self, label: &str) -> Option<usize> {
        self.students.get_index_of(label)
    }

    pub fn location_index(&self, label: &str) -> Option<usize> {
        self.locations.get_index_of(label)
    }

    pub fn code_index(&self, label: &str) -> Option<usize> {
        self.codes.get_index_of(label)
    }

    pub fn tensor(&self) -> &TriadTensor {
        &self.triads
    }

    /// Triads with labels: `(student, location, code, weight)`.
    pub fn triads(&self) -> impl Iterator<Item = (&str, &str, &str, u64)> + '_ {
        self.triads.iter().map(|((s, l, c), w)| {
            (
                self.students[s].as_str(),
                self.locations[l].as_str(),
                self.codes[c].as_str(),
                w,
            )
        })
    }

    pub fn triad_weight(&self, student: &str, location: &str, code: &str) -> u64 {
        match (
            self.student_index(student),
            self.location_index(location),
            self.code_index(code),
        ) {
            (Some(s), Some(l), Some(c)) => self.triads.get(s, l, c),
            _ => 0,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.triads.total()
    }

    pub fn is_empty(&self) -> bool {
        self.students.is_empty() && self.codes.is_empty() && self.locations.is_empty()
    }

    /// `E_SC` edges as `(student, code, weight)`.
    pub fn student_code_edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.student_code
            .iter()
            .map(|(&(s, c), &w)| (self.students[s as usize].as_str(), self.codes[c as usize].as_str(), w))
    }

    /// `E_SL` edges as `(student, location, weight)`.
    pub fn student_location_edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.student_location.iter().map(|(&(s, l), &w)| {
            (
                self.students[s as usize].as_str(),
                self.locations[l as usize].as_str(),
                w,
            )
        })
    }

    /// `E_CL` edges as `(code, location, weight)`.
    pub fn code_location_edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.code_location
            .iter()
            .map(|(&(c, l), &w)| (self.codes[c as usize].as_str(), self.locations[l as usize].as_str(), w))
    }

    pub fn student_code_weight(&self, student: &str, code: &str) -> u64 {
        lookup(&self.student_code, self.student_index(student), self.code_index(code))
    }

    pub fn student_location_weight(&self, student: &str, location: &str) -> u64 {
        lookup(
            &self.student_location,
            self.student_index(student),
            self.location_index(location),
        )
    }

    pub fn code_location_weight(&self, code: &str, location: &str) -> u64 {
        lookup(
            &self.code_location,
            self.code_index(code),
            self.location_index(location),
        )
    }

    /// Students × `(location, code)` pairs, weighted by triad counts.
    ///
    /// Pair nodes are ordered by location then code, and only pairs with a
    /// non-zero triad appear.
    pub fn project_student_pair(&self) -> BipartiteGraph {
        let mut g = BipartiteGraph::new(NodeType::Student, NodeType::Pair);
        for s in self.students() {
            g.add_left(s);
        }
        let mut pairs: Vec<(u32, u32)> = self.triads.counts.keys().map(|&(_, l, c)| (l, c)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut pair_index = BTreeMap::new();
        for (l, c) in pairs {
            let idx = g.add_right(pair_label(&self.locations[l as usize], &self.codes[c as usize]));
            pair_index.insert((l, c), idx);
        }
        for (&(s, l, c), &w) in &self.triads.counts {
            g.add_weight_at(s as usize, pair_index[&(l, c)], w);
        }
        g
    }

    /// Locations × codes restricted to the given students: the weight of
    /// `(l, c)` is the sum of `w(s, l, c)` over those students. All
    /// locations and codes of the network are present as nodes.
    pub fn project_students_lc<'a>(&self, students: impl IntoIterator<Item = &'a str>) -> Result<BipartiteGraph> {
        let mut members = vec![false; self.students.len()];
        for s in students {
            let idx = self.student_index(s).ok_or_else(|| Error::UnknownNode(s.to_string()))?;
            members[idx] = true;
        }
        let mut g = BipartiteGraph::new(NodeType::Location, NodeType::Code);
        for l in self.locations() {
            g.add_left(l);
        }
        for c in self.codes() {
            g.add_right(c);
        }
        for (&(s, l, c), &w) in &self.triads.counts {
            if members[s as usize] {
                g.add_weight_at(l as usize, c as usize, w);
            }
        }
        Ok(g)
    }

    /// Location × code projection of one student cluster of `partition`.
    pub fn project_cluster_lc(&self, partition: &PartitionResult, cluster_id: u32) -> Result<BipartiteGraph> {
        let members = partition.left_members(cluster_id);
        if members.is_empty() {
            return Err(Error::UnknownCluster(cluster_id));
        }
        self.project_students_lc(members)
    }
}

/// Free-function form of [`TripartiteNetwork::project_cluster_lc`].
pub fn project_cluster_lc(
    net: &TripartiteNetwork,
    partition: &PartitionResult,
    cluster_id: u32,
) -> Result<BipartiteGraph> {
    net.project_cluster_lc(partition, cluster_id)
}

/// Free-function form of [`TripartiteNetwork::project_student_pair`].
pub fn project_student_pair(net: &TripartiteNetwork) -> BipartiteGraph {
    net.project_student_pair()
}

/// Free-function form of [`BipartiteGraph::weighted_degree`].
pub fn weighted_degree(g: &BipartiteGraph, side: Side, node: &str) -> Result<u64> {
    g.weighted_degree(side, node)
}

fn insert(set: &mut IndexSet<String>, label: &str) -> u32 {
    match set.get_index_of(label) {
        Some(i) => i as u32,
        None => set.insert_full(label.to_string()).0 as u32,
    }
}

fn lookup(map: &BTreeMap<(u32, u32), u64>, a: Option<usize>, b: Option<usize>) -> u64 {
    match (a, b) {
        (Some(a), Some(b)) => map.get(&(a as u32, b as u32)).copied().unwrap_or(0),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, l: &str, c: &str) -> Triad {
        Triad::new(s, l, c)
    }

    #[test]
    fn empty_network() {
        let net = build_tripartite(&[]);
        assert!(net.is_empty());
        assert_eq!(net.total_weight(), 0);
        assert_eq!(net.student_code_edges().count(), 0);
        assert!(net.project_student_pair().is_empty());
    }

    #[test]
    fn single_triad_gives_unit_edges() {
        let net = build_tripartite(&[t("s1", "l1", "c1")]);
        for edges in [
            net.student_code_edges().collect::<Vec<_>>(),
            net.student_location_edges().collect(),
            net.code_location_edges().collect(),
        ] {
            assert_eq!(edges.len(), 1);
            assert_eq!(edges[0].2, 1);
        }
    }

    #[test]
    fn marginal_sums() {
        let triads = [t("s1", "l1", "c1"), t("s1", "l1", "c1"), t("s1", "l1", "c2")];
        let net = build_tripartite(&triads);
        assert_eq!(net.student_location_weight("s1", "l1"), 3);
        assert_eq!(net.student_code_weight("s1", "c1"), 2);
        assert_eq!(net.code_location_weight("c2", "l1"), 1);
    }

    #[test]
    fn student_pair_projection() {
        let triads = vec![t("s1", "l1", "c1"); 3];
        let g = build_tripartite(&triads).project_student_pair();
        assert_eq!(g.edges().collect::<Vec<_>>(), [("s1", "l1|c1", 3)]);
        assert_eq!(g.right_type(), NodeType::Pair);
    }

    #[test]
    fn cluster_projection_sums_members() {
        let mut triads = vec![t("s1", "l", "c"); 2];
        triads.extend(vec![t("s2", "l", "c"); 3]);
        triads.push(t("s3", "l", "d"));
        let net = build_tripartite(&triads);
        let g = net.project_students_lc(["s1", "s2"]).unwrap();
        assert_eq!(g.weight("l", "c"), 5);
        assert_eq!(g.weight("l", "d"), 0);
        assert_eq!(g.edge_count(), 1);
        let single = net.project_students_lc(["s3"]).unwrap();
        assert_eq!(single.edges().collect::<Vec<_>>(), [("l", "d", 1)]);
        assert!(net.project_students_lc(["s9"]).is_err());
    }

    #[test]
    fn from_parts_keeps_isolated_nodes() {
        let net = TripartiteNetwork::from_parts(
            ["a".to_string(), "b".to_string()],
            ["x".to_string()],
            ["p".to_string(), "q".to_string()],
            [("a".to_string(), "x".to_string(), "q".to_string(), 4)],
        )
        .unwrap();
        assert_eq!(net.students().count(), 2);
        assert_eq!(net.code_location_weight("q", "x"), 4);
        assert_eq!(net.code_location_weight("p", "x"), 0);
    }
}
