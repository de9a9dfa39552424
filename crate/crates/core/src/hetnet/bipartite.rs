use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of node, used as the type tag in graph exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeType {
    Student,
    Code,
    Location,
    /// A `location|code` pair.
    Pair,
}

impl NodeType {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::Student => "student",
            NodeType::Code => "code",
            NodeType::Location => "location",
            NodeType::Pair => "pair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "student" => Some(NodeType::Student),
            "code" => Some(NodeType::Code),
            "location" => Some(NodeType::Location),
            "pair" => Some(NodeType::Pair),
            _ => None,
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A weighted two-sided graph with integer edge multiplicities.
///
/// Node order is insertion order; edges iterate in `(left, right)` index
/// order.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    left_type: NodeType,
    right_type: NodeType,
    left: IndexSet<String>,
    right: IndexSet<String>,
    weights: BTreeMap<(u32, u32), u64>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.left_type == other.left_type
            && self.right_type == other.right_type
            && self.left.iter().eq(other.left.iter())
            && self.right.iter().eq(other.right.iter())
            && self.weights == other.weights
    }
}

impl Eq for BipartiteGraph {}

impl BipartiteGraph {
    pub fn new(left_type: NodeType, right_type: NodeType) -> Self {
        Self {
            left_type,
            right_type,
            left: IndexSet::new(),
            right: IndexSet::new(),
            weights: BTreeMap::new(),
        }
    }

    pub fn left_type(&self) -> NodeType {
        self.left_type
    }

    pub fn right_type(&self) -> NodeType {
        self.right_type
    }

    /// Adds a left node if absent and returns its index.
    pub fn add_left(&mut self, label: impl Into<String>) -> usize {
        self.left.insert_full(label.into()).0
    }

    pub fn add_right(&mut self, label: impl Into<String>) -> usize {
        self.right.insert_full(label.into()).0
    }

    /// Adds `weight` to the edge between two existing nodes. Zero weights
    /// are ignored so that no zero-weight edge is ever stored.
    pub fn add_weight_at(&mut self, left: usize, right: usize, weight: u64) {
        assert!(
            left < self.left.len() && right < self.right.len(),
            "node index out of range"
        );
        if weight > 0 {
            *self.weights.entry((left as u32, right as u32)).or_insert(0) += weight;
        }
    }

    /// Adds `weight` to the edge between two labels, creating nodes as needed.
    pub fn add_weight(&mut self, left: &str, right: &str, weight: u64) {
        let l = self.add_left(left);
        let r = self.add_right(right);
        self.add_weight_at(l, r, weight);
    }

    pub fn left_nodes(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.left.iter().map(String::as_str)
    }

    pub fn right_nodes(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.right.iter().map(String::as_str)
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn left_label(&self, index: usize) -> &str {
        &self.left[index]
    }

    pub fn right_label(&self, index: usize) -> &str {
        &self.right[index]
    }

    pub fn left_index(&self, label: &str) -> Option<usize> {
        self.left.get_index_of(label)
    }

    pub fn right_index(&self, label: &str) -> Option<usize> {
        self.right.get_index_of(label)
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Edges as `(left index, right index, weight)`.
    pub fn edges_indexed(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.weights.iter().map(|(&(l, r), &w)| (l as usize, r as usize, w))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.edges_indexed()
            .map(|(l, r, w)| (self.left[l].as_str(), self.right[r].as_str(), w))
    }

    pub fn weight(&self, left: &str, right: &str) -> u64 {
        match (self.left_index(left), self.right_index(right)) {
            (Some(l), Some(r)) => self.weights.get(&(l as u32, r as u32)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn left_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0; self.left.len()];
        for (l, _, w) in self.edges_indexed() {
            deg[l] += w;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0; self.right.len()];
        for (_, r, w) in self.edges_indexed() {
            deg[r] += w;
        }
        deg
    }

    /// Sum of weights incident to `node` on the given side.
    pub fn weighted_degree(&self, side: Side, node: &str) -> Result<u64> {
        let unknown = || Error::UnknownNode(node.to_string());
        Ok(match side {
            Side::Left => {
                let l = self.left_index(node).ok_or_else(unknown)? as u32;
                self.weights.range((l, 0)..=(l, u32::MAX)).map(|(_, &w)| w).sum()
            }
            Side::Right => {
                let r = self.right_index(node).ok_or_else(unknown)? as u32;
                self.weights
                    .iter()
                    .filter(|(&(_, rr), _)| rr == r)
                    .map(|(_, &w)| w)
                    .sum()
            }
        })
    }

    /// Left nodes adjacent to right node `right`, with weights.
    pub fn neighbors_of_left(&self, left: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let l = left as u32;
        self.weights
            .range((l, 0)..=(l, u32::MAX))
            .map(|(&(_, r), &w)| (r as usize, w))
    }
}
