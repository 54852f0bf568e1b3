use serde::{Deserialize, Serialize};

use super::NodeId;
use crate::error::{Error, Result};

/// A sorted set of distinct node ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn from_unsorted(mut members: Vec<NodeId>) -> Self {
        members.sort_unstable();
        members.dedup();
        NodeSet(members)
    }

    /// All ids `0..n`.
    pub fn full(n: usize) -> Self {
        NodeSet((0..n).collect())
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        NodeSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Assignment of every node to exactly one cluster.
///
/// Cluster ids are always normalised: contiguous from 0 and numbered in order
/// of the first node carrying them. Two partitions are equal iff they induce
/// the same equivalence relation on nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    num_clusters: usize,
}

impl Partition {
    /// Normalises arbitrary cluster labels.
    pub fn from_assignment<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            num_clusters: ids.len(),
        }
    }

    /// Builds a partition of `0..n` from disjoint clusters that must cover every node.
    pub fn from_clusters(n: usize, clusters: &[NodeSet]) -> Result<Self> {
        const UNSET: usize = usize::MAX;
        let mut labels = vec![UNSET; n];
        for (c, members) in clusters.iter().enumerate() {
            for v in members.iter() {
                if v >= n {
                    return Err(Error::domain(format!("node {v} outside 0..{n}")));
                }
                if labels[v] != UNSET {
                    return Err(Error::domain(format!("node {v} is in two clusters")));
                }
                labels[v] = c;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == UNSET) {
            return Err(Error::domain(format!("node {v} is not in any cluster")));
        }
        Ok(Self::from_assignment(&labels))
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            num_clusters: n,
        }
    }

    pub fn one_block(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            num_clusters: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn cluster_of(&self, v: NodeId) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Members of every cluster, indexed by cluster id.
    pub fn clusters(&self) -> Vec<NodeSet> {
        let mut members = vec![Vec::new(); self.num_clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            members[c].push(v);
        }
        // pushed in increasing v, already sorted
        members.into_iter().map(NodeSet).collect()
    }

    /// True if every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut parent = vec![usize::MAX; self.num_clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            let p = coarser.assignment[v];
            if parent[c] == usize::MAX {
                parent[c] = p;
            } else if parent[c] != p {
                return false;
            }
        }
        true
    }

    /// Restriction to the nodes in `keep` (sorted ids of `self`), renumbered
    /// `0..keep.len()` in that order.
    pub fn restrict(&self, keep: &NodeSet) -> Partition {
        let labels: Vec<usize> = keep.iter().map(|v| self.assignment[v]).collect();
        Partition::from_assignment(&labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_is_first_appearance() {
        let p = Partition::from_assignment(&["x", "y", "x", "z"]);
        assert_eq!(p.assignment(), &[0, 1, 0, 2]);
        assert_eq!(p.num_clusters(), 3);
        let q = Partition::from_assignment(&[7, 3, 7, 1]);
        assert_eq!(p, q);
    }

    #[test]
    fn from_clusters_rejects_overlap_and_gaps() {
        let a = NodeSet::from_unsorted(vec![0, 1]);
        let b = NodeSet::from_unsorted(vec![1, 2]);
        assert!(Partition::from_clusters(3, &[a.clone(), b]).is_err());
        assert!(Partition::from_clusters(3, std::slice::from_ref(&a)).is_err());
        let c = NodeSet::from_unsorted(vec![2]);
        let p = Partition::from_clusters(3, &[c, a]).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1]);
    }

    #[test]
    fn refinement() {
        let coarse = Partition::from_assignment(&[0, 0, 1, 1]);
        let fine = Partition::from_assignment(&[0, 1, 2, 2]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(coarse.refines(&coarse));
    }

    #[test]
    fn restrict_renumbers() {
        let p = Partition::from_assignment(&[5, 5, 6, 7]);
        let r = p.restrict(&NodeSet::from_unsorted(vec![1, 3]));
        assert_eq!(r.assignment(), &[0, 1]);
    }
}
