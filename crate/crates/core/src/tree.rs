//! Append-only growing trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::degree_index::DegreeClassIndex;
use crate::error::{Error, Result};

/// Dense node identifier equal to the node's birth order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

const ROOT: u32 = u32::MAX;

/// A tree grown by attaching one leaf at a time.
///
/// Node 0 is the root; every later node `i` has `parent(i) < i`.
#[derive(Debug, Clone)]
pub struct GrowingTree {
    parent: Vec<u32>,
    adjacency: Vec<Vec<NodeId>>,
    degree: Vec<u32>,
    index: DegreeClassIndex,
}

impl GrowingTree {
    /// Two nodes joined by a single edge.
    pub fn new_seed() -> Self {
        Self::with_capacity(2)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        let mut parent = Vec::with_capacity(capacity);
        let mut adjacency = Vec::with_capacity(capacity);
        let mut degree = Vec::with_capacity(capacity);
        parent.extend([ROOT, 0]);
        adjacency.extend([vec![NodeId(1)], vec![NodeId(0)]]);
        degree.extend([1, 1]);
        let index = DegreeClassIndex::from_degrees(&degree);
        GrowingTree {
            parent,
            adjacency,
            degree,
            index,
        }
    }

    /// Rebuild a tree from the parents of nodes `1..n` (node 0 is the root).
    pub fn from_parents(parents: &[u32]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::Domain("a tree needs at least two nodes".into()));
        }
        let mut tree = Self::with_capacity(parents.len() + 1);
        if parents[0] != 0 {
            return Err(Error::InvalidNode {
                node: u64::from(parents[0]),
                n: 1,
            });
        }
        for &p in &parents[1..] {
            tree.add_leaf(NodeId(p))?;
        }
        Ok(tree)
    }

    /// A path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        assert!(n >= 2);
        let parents: Vec<u32> = (0..n as u32 - 1).collect();
        Self::from_parents(&parents).unwrap()
    }

    /// A star centred on node 0 with `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        assert!(n >= 2);
        Self::from_parents(&vec![0; n - 1]).unwrap()
    }

    /// Attach a new leaf to `attach_to` and return the new node's id.
    pub fn add_leaf(&mut self, attach_to: NodeId) -> Result<NodeId> {
        let target = attach_to.index();
        if target >= self.len() {
            return Err(Error::InvalidNode {
                node: u64::from(attach_to.0),
                n: self.len(),
            });
        }
        let new = NodeId::new(self.len());
        self.parent.push(attach_to.0);
        self.adjacency.push(vec![attach_to]);
        self.adjacency[target].push(new);
        self.degree.push(1);
        let old = self.degree[target];
        self.degree[target] = old + 1;
        self.index.promote(attach_to, old);
        self.index.insert(new, 1);
        Ok(new)
    }

    pub fn len(&self) -> usize {
        self.degree.len()
    }

    /// Always false: a tree has at least its two seed nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self, node: NodeId) -> u32 {
        self.degree[node.index()]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node.index()]
    }

    /// Parent of `node`, or `None` for the root.
    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        match self.parent[node.index()] {
            ROOT => None,
            p => Some(NodeId(p)),
        }
    }

    /// Parents of nodes `1..n` in id order.
    pub fn parents(&self) -> &[u32] {
        &self.parent[1..]
    }

    pub fn degree_index(&self) -> &DegreeClassIndex {
        &self.index
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.len() as u32).map(NodeId)
    }

    /// Edges as `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent[1..]
            .iter()
            .enumerate()
            .map(|(i, &p)| (NodeId(p), NodeId::new(i + 1)))
    }

    /// Full structural audit; used by tests and the validation suite.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.len();
        let degree_sum: u64 = self.degree.iter().map(|&d| u64::from(d)).sum();
        if degree_sum != 2 * (n as u64 - 1) {
            return Err(format!("degree sum {degree_sum} != 2(n-1) for n = {n}"));
        }
        for i in 0..n {
            if self.adjacency[i].len() != self.degree[i] as usize {
                return Err(format!("node {i}: adjacency length differs from degree"));
            }
            if i >= 1 && self.parent[i] as usize >= i {
                return Err(format!("node {i}: parent {} is not older", self.parent[i]));
            }
        }
        if !self.index.is_consistent_with(&self.degree) {
            return Err("degree index out of sync with degrees".into());
        }
        let rebuilt = DegreeClassIndex::from_degrees(&self.degree);
        if rebuilt.canonical() != self.index.canonical() {
            return Err("degree index differs from a full rebuild".into());
        }
        Ok(())
    }
}

impl PartialEq for GrowingTree {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent
    }
}

impl Eq for GrowingTree {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_single_edge() {
        let t = GrowingTree::new_seed();
        assert_eq!(t.len(), 2);
        assert_eq!(t.degrees(), &[1, 1]);
        assert_eq!(t.degrees().iter().sum::<u32>(), 2);
        assert_eq!(
            t.degree_index().canonical(),
            vec![(1, vec![NodeId(0), NodeId(1)])]
        );
        assert_eq!(t.parent(NodeId(0)), None);
        assert_eq!(t.parent(NodeId(1)), Some(NodeId(0)));
        t.check_invariants().unwrap();
    }

    #[test]
    fn add_leaf_updates_degrees() {
        let mut t = GrowingTree::new_seed();
        let new = t.add_leaf(NodeId(0)).unwrap();
        assert_eq!(new, NodeId(2));
        assert_eq!(t.degrees(), &[2, 1, 1]);
        assert_eq!(t.parent(new), Some(NodeId(0)));
        t.check_invariants().unwrap();
    }

    #[test]
    fn path_center_becomes_star() {
        let mut t = GrowingTree::path(3);
        t.add_leaf(NodeId(1)).unwrap();
        assert_eq!(t.degrees(), &[1, 3, 1, 1]);
        let star = GrowingTree::star(4);
        assert_eq!(star.degrees(), &[3, 1, 1, 1]);
    }

    #[test]
    fn repeated_attachment_to_root() {
        let mut t = GrowingTree::new_seed();
        for _ in 0..7 {
            t.add_leaf(NodeId(0)).unwrap();
        }
        assert_eq!(t.degree(NodeId(0)), 8);
        t.check_invariants().unwrap();
    }

    #[test]
    fn out_of_range_attachment_fails() {
        let mut t = GrowingTree::new_seed();
        assert!(matches!(
            t.add_leaf(NodeId(2)),
            Err(Error::InvalidNode { node: 2, n: 2 })
        ));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn from_parents_validates() {
        assert!(GrowingTree::from_parents(&[]).is_err());
        assert!(GrowingTree::from_parents(&[1]).is_err());
        assert!(GrowingTree::from_parents(&[0, 2]).is_err());
        let t = GrowingTree::from_parents(&[0, 0, 1, 1]).unwrap();
        assert_eq!(t.parents(), &[0, 0, 1, 1]);
        assert_eq!(t.degrees(), &[2, 3, 1, 1, 1]);
    }
}
