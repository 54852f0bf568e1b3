//! Undirected simple graphs with external labels, node sets, partitions,
//! connected components and induced subgraphs.

mod io;
mod partition;

use std::collections::HashMap;

pub use io::{load_edgelist, parse_edgelist, write_edgelist};
pub use partition::{NodeSet, Partition};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// An undirected, unweighted, simple graph.
///
/// Nodes are dense ids `0..num_nodes`; every node carries the label it was
/// read under. Adjacency lists are sorted and symmetric, without loops or
/// parallel edges. The graph is immutable once built, apart from
/// [`Graph::add_isolated`] used while loading clustering files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    num_edges: usize,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl Graph {
    /// Builds a graph on `num_nodes` nodes labelled `"0".."n-1"`. Self-loops and
    /// repeated edges are dropped.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let labels = (0..num_nodes).map(|v| v.to_string()).collect();
        Self::from_labelled_edges(labels, edges)
    }

    pub(crate) fn from_labelled_edges<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice_edges = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice_edges += list.len();
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect::<HashMap<_, _>>();
        if index.len() != n {
            return Err(Error::domain("node labels are not unique"));
        }
        Ok(Graph {
            adjacency,
            num_edges: twice_edges / 2,
            labels,
            index,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Each edge once, as `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Appends an isolated node for `label`, or returns the existing id.
    pub fn add_isolated(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.adjacency.len();
        self.adjacency.push(Vec::new());
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    fn check_nodes(&self, nodes: &NodeSet) -> Result<()> {
        match nodes.as_slice().last() {
            Some(&max) if max >= self.num_nodes() => Err(Error::domain(format!(
                "node {max} is outside the graph (0..{})",
                self.num_nodes()
            ))),
            _ => Ok(()),
        }
    }

    /// Connected components of the subgraph induced by `nodes`, each sorted,
    /// ordered by smallest member.
    pub fn connected_components(&self, nodes: &NodeSet) -> Result<Vec<NodeSet>> {
        self.check_nodes(nodes)?;
        let mut inside = vec![false; self.num_nodes()];
        for &v in nodes.as_slice() {
            inside[v] = true;
        }
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for &start in nodes.as_slice() {
            if !inside[start] {
                continue;
            }
            inside[start] = false;
            stack.push(start);
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &w in &self.adjacency[u] {
                    if inside[w] {
                        inside[w] = false;
                        stack.push(w);
                    }
                }
            }
            components.push(NodeSet::from_unsorted(members));
        }
        Ok(components)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_nodes() <= 1 {
            return true;
        }
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.num_nodes()
    }

    /// Subgraph on `nodes`, keeping exactly the edges with both endpoints inside.
    /// Local node `i` corresponds to `nodes[i]` in `self` and keeps its label.
    pub fn induced_subgraph(&self, nodes: &NodeSet) -> Result<Subgraph> {
        self.check_nodes(nodes)?;
        let members = nodes.as_slice();
        let mut local = HashMap::with_capacity(members.len());
        for (i, &v) in members.iter().enumerate() {
            local.insert(v, i);
        }
        let adjacency: Vec<Vec<NodeId>> = members
            .iter()
            .map(|&v| {
                // parent lists are sorted and `members` is sorted, so the
                // mapped list stays sorted
                self.adjacency[v]
                    .iter()
                    .filter_map(|w| local.get(w).copied())
                    .collect()
            })
            .collect();
        let num_edges = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        let labels: Vec<String> = members.iter().map(|&v| self.labels[v].clone()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(Subgraph {
            graph: Graph {
                adjacency,
                num_edges,
                labels,
                index,
            },
            parent_ids: members.to_vec(),
        })
    }

    /// Induced subgraph over `members` (sorted, in range) without labels, for
    /// hot internal loops. Local node `i` is `members[i]`.
    pub(crate) fn induced_unlabelled(&self, members: &[NodeId], scratch: &mut HashMap<NodeId, NodeId>) -> Graph {
        scratch.clear();
        scratch.extend(members.iter().enumerate().map(|(i, &v)| (v, i)));
        let adjacency: Vec<Vec<NodeId>> = members
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|w| scratch.get(w).copied())
                    .collect()
            })
            .collect();
        let num_edges = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            adjacency,
            num_edges,
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Number of edges with both endpoints in `nodes`.
    pub fn internal_edges(&self, nodes: &NodeSet) -> Result<usize> {
        self.check_nodes(nodes)?;
        let twice: usize = nodes
            .as_slice()
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter(|w| nodes.contains(**w))
                    .count()
            })
            .sum();
        Ok(twice / 2)
    }
}

/// An induced subgraph together with the map back to parent node ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub parent_ids: Vec<NodeId>,
}

impl Subgraph {
    pub fn to_parent(&self, local: NodeId) -> NodeId {
        self.parent_ids[local]
    }
}
