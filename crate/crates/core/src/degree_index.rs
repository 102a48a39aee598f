//! Nodes grouped by their current degree.

use std::collections::BTreeSet;

use crate::tree::NodeId;

/// Per-degree buckets of node ids with O(1) moves between buckets.
///
/// Each bucket is a compact array; `pos[i]` records where node `i` sits in
/// the bucket for its degree, so removal is a swap with the last member.
#[derive(Debug, Clone, Default)]
pub struct DegreeClassIndex {
    buckets: Vec<Vec<NodeId>>,
    pos: Vec<u32>,
    occupied: BTreeSet<u32>,
}

impl DegreeClassIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuild from a degree array, inserting nodes in id order.
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let mut index = Self::new();
        for (i, &d) in degrees.iter().enumerate() {
            index.insert(NodeId::new(i), d);
        }
        index
    }

    /// Number of indexed nodes.
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// Add the next node (its id must equal the current node count).
    pub fn insert(&mut self, node: NodeId, degree: u32) {
        assert_eq!(node.index(), self.pos.len(), "nodes must be inserted in id order");
        self.pos.push(0);
        self.push_into(node, degree);
    }

    /// Move `node` from bucket `from` to bucket `from + 1`.
    pub fn promote(&mut self, node: NodeId, from: u32) {
        self.remove_from(node, from);
        self.push_into(node, from + 1);
    }

    fn push_into(&mut self, node: NodeId, degree: u32) {
        let d = degree as usize;
        if self.buckets.len() <= d {
            self.buckets.resize_with(d + 1, Vec::new);
        }
        let bucket = &mut self.buckets[d];
        if bucket.is_empty() {
            self.occupied.insert(degree);
        }
        self.pos[node.index()] = bucket.len() as u32;
        bucket.push(node);
    }

    fn remove_from(&mut self, node: NodeId, degree: u32) {
        let bucket = &mut self.buckets[degree as usize];
        let at = self.pos[node.index()] as usize;
        debug_assert_eq!(bucket[at], node, "node is not in bucket {degree}");
        let last = *bucket.last().expect("bucket cannot be empty");
        bucket.swap_remove(at);
        if last != node {
            self.pos[last.index()] = at as u32;
        }
        if bucket.is_empty() {
            self.occupied.remove(&degree);
        }
    }

    /// Number of nodes with degree `d`.
    pub fn count(&self, d: u32) -> usize {
        self.buckets.get(d as usize).map_or(0, Vec::len)
    }

    /// The `k`-th member of bucket `d` (bucket order is arbitrary but deterministic).
    pub fn member(&self, d: u32, k: usize) -> NodeId {
        self.buckets[d as usize][k]
    }

    pub fn bucket(&self, d: u32) -> &[NodeId] {
        self.buckets.get(d as usize).map_or(&[], Vec::as_slice)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.occupied.first().copied()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.occupied.last().copied()
    }

    /// Occupied degree values in ascending order.
    pub fn occupied(&self) -> impl DoubleEndedIterator<Item = u32> + '_ {
        self.occupied.iter().copied()
    }

    pub fn num_occupied(&self) -> usize {
        self.occupied.len()
    }

    /// Occupied buckets as `(degree, sorted members)`, independent of insertion history.
    pub fn canonical(&self) -> Vec<(u32, Vec<NodeId>)> {
        self.occupied
            .iter()
            .map(|&d| {
                let mut members = self.buckets[d as usize].clone();
                members.sort_unstable();
                (d, members)
            })
            .collect()
    }

    /// Check every node sits at its recorded position in the bucket for `degrees[i]`.
    pub fn is_consistent_with(&self, degrees: &[u32]) -> bool {
        if degrees.len() != self.len() {
            return false;
        }
        let total: usize = self.occupied.iter().map(|&d| self.count(d)).sum();
        if total != degrees.len() {
            return false;
        }
        degrees.iter().enumerate().all(|(i, &d)| {
            self.buckets
                .get(d as usize)
                .and_then(|b| b.get(self.pos[i] as usize))
                .is_some_and(|&m| m.index() == i)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promote_moves_between_buckets() {
        let mut idx = DegreeClassIndex::from_degrees(&[1, 1, 1]);
        assert_eq!(idx.count(1), 3);
        idx.promote(NodeId::new(0), 1);
        assert_eq!(idx.count(1), 2);
        assert_eq!(idx.count(2), 1);
        assert_eq!(idx.member(2, 0), NodeId::new(0));
        assert_eq!(idx.min_degree(), Some(1));
        assert_eq!(idx.max_degree(), Some(2));
        assert!(idx.is_consistent_with(&[2, 1, 1]));
        idx.promote(NodeId::new(1), 1);
        idx.promote(NodeId::new(2), 1);
        assert_eq!(idx.min_degree(), Some(2));
        assert_eq!(idx.occupied().collect::<Vec<_>>(), vec![2]);
        assert!(idx.is_consistent_with(&[2, 2, 2]));
    }

    #[test]
    fn empty_index() {
        let idx = DegreeClassIndex::new();
        assert!(idx.is_empty());
        assert_eq!(idx.max_degree(), None);
        assert_eq!(idx.count(7), 0);
        assert!(idx.bucket(3).is_empty());
    }
}
