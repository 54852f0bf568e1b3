//! Exact global minimum edge cuts.
//!
//! [`global_min_cut`] runs Stoer–Wagner contraction. Every cut-of-the-phase
//! whose value equals the running minimum is a candidate; among those the
//! most balanced one (largest smaller side) wins, then the lexicographically
//! smallest `side_a`. `side_a` is always the side holding the smallest node
//! id, except for [`degree_one_shortcut`] where it is the isolated leaf.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};

/// Largest graph accepted by [`min_cut_value_bruteforce`].
pub const BRUTEFORCE_MAX_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub cut_size: usize,
    pub side_a: NodeSet,
    pub side_b: NodeSet,
}

impl CutResult {
    fn from_side(n: usize, side: Vec<NodeId>, cut_size: usize) -> Self {
        let side = NodeSet::from_unsorted(side);
        let rest: NodeSet = (0..n).filter(|&v| !side.contains(v)).collect();
        let (side_a, side_b) = if side.as_slice().first() == Some(&0) {
            (side, rest)
        } else {
            (rest, side)
        };
        CutResult {
            cut_size,
            side_a,
            side_b,
        }
    }

    /// Size of the smaller side.
    pub fn balance(&self) -> usize {
        self.side_a.len().min(self.side_b.len())
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.num_nodes() < 2 {
        return Err(Error::contract(format!(
            "minimum cut needs at least 2 nodes, got {}",
            g.num_nodes()
        )));
    }
    if !g.is_connected() {
        return Err(Error::contract(
            "minimum cut input is disconnected; split components first",
        ));
    }
    Ok(())
}

/// Cut isolating the smallest-id node of degree 1, if there is one.
///
/// In a connected graph with at least two nodes such a cut is always a
/// minimum cut.
pub fn degree_one_shortcut(g: &Graph) -> Result<Option<CutResult>> {
    require_connected(g)?;
    Ok(leaf_cut(g))
}

pub(crate) fn leaf_cut(g: &Graph) -> Option<CutResult> {
    let n = g.num_nodes();
    (0..n).find(|&v| g.degree(v) == 1).map(|leaf| CutResult {
        cut_size: 1,
        side_a: NodeSet::from_unsorted(vec![leaf]),
        side_b: (0..n).filter(|&v| v != leaf).collect(),
    })
}

/// Exact global minimum cut of a connected graph.
pub fn global_min_cut(g: &Graph) -> Result<CutResult> {
    require_connected(g)?;
    Ok(stoer_wagner(g.num_nodes(), g.edges()))
}

/// Exact minimum cut if its value is at most `limit`, `None` if the graph is
/// more than `limit`-edge-connected.
///
/// Runs on a Nagamochi–Ibaraki certificate (union of `limit + 1` successive
/// maximal spanning forests), which keeps every cut of value `<= limit` intact
/// and has at most `(limit + 1) * (n - 1)` edges.
pub fn min_cut_within(g: &Graph, limit: usize) -> Result<Option<CutResult>> {
    require_connected(g)?;
    let certificate = sparse_certificate(g, limit + 1);
    let cut = stoer_wagner(g.num_nodes(), certificate.into_iter());
    Ok((cut.cut_size <= limit).then_some(cut))
}

/// Exhaustive minimum over all proper bipartitions. Test oracle, `n <= 20`.
pub fn min_cut_value_bruteforce(g: &Graph) -> Result<usize> {
    let n = g.num_nodes();
    if n > BRUTEFORCE_MAX_NODES {
        return Err(Error::domain(format!(
            "brute-force min cut refused for {n} nodes (limit {BRUTEFORCE_MAX_NODES})"
        )));
    }
    if n < 2 {
        return Err(Error::contract("minimum cut needs at least 2 nodes"));
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let all = (1u32 << n) - 1;
    // node n-1 always on the complement side
    let mut best = usize::MAX;
    for s in 1u32..(1 << (n - 1)) {
        let outside = all & !s;
        let mut cut = 0usize;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            cut += (masks[v] & outside).count_ones() as usize;
            bits &= bits - 1;
        }
        best = best.min(cut);
    }
    Ok(best)
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn sparse_certificate(g: &Graph, forests: usize) -> Vec<(NodeId, NodeId)> {
    let mut remaining: Vec<(NodeId, NodeId)> = g.edges().collect();
    let mut kept = Vec::new();
    for _ in 0..forests {
        if remaining.is_empty() {
            break;
        }
        let mut dsu = DisjointSet::new(g.num_nodes());
        let mut rest = Vec::with_capacity(remaining.len());
        for (u, v) in remaining {
            if dsu.union(u, v) {
                kept.push((u, v));
            } else {
                rest.push((u, v));
            }
        }
        remaining = rest;
    }
    kept
}

/// Stoer–Wagner on a connected multigraph given as an edge list over `0..n`.
fn stoer_wagner<I>(n: usize, edges: I) -> CutResult
where
    I: Iterator<Item = (NodeId, NodeId)>,
{
    debug_assert!(n >= 2);
    let mut adj: Vec<HashMap<usize, u64>> = vec![HashMap::new(); n];
    for (u, v) in edges {
        *adj[u].entry(v).or_insert(0) += 1;
        *adj[v].entry(u).or_insert(0) += 1;
    }
    let mut members: Vec<Vec<NodeId>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();

    let mut best: Option<CutResult> = None;
    let mut in_order = vec![false; n];
    let mut key = vec![0u64; n];
    let mut heap = BinaryHeap::new();

    while alive.len() > 1 {
        for &v in &alive {
            in_order[v] = false;
            key[v] = 0;
        }
        heap.clear();
        let start = alive[0];
        heap.push((0u64, Reverse(start)));
        let mut prev = start;
        let mut last = start;
        let mut last_key = 0;
        let mut added = 0;
        while let Some((k, Reverse(v))) = heap.pop() {
            if in_order[v] || k != key[v] {
                continue;
            }
            in_order[v] = true;
            added += 1;
            prev = last;
            last = v;
            last_key = k;
            for (&w, &weight) in &adj[v] {
                if !in_order[w] {
                    key[w] += weight;
                    heap.push((key[w], Reverse(w)));
                }
            }
            if added == alive.len() {
                break;
            }
        }
        debug_assert_eq!(added, alive.len(), "contracted graph lost connectivity");

        let value = last_key as usize;
        let better = match &best {
            None => true,
            Some(b) if value < b.cut_size => true,
            Some(b) if value == b.cut_size => {
                let side = members[last].len();
                let balance = side.min(n - side);
                balance > b.balance() || (balance == b.balance() && {
                    let cand = CutResult::from_side(n, members[last].clone(), value);
                    cand.side_a < b.side_a
                })
            }
            _ => false,
        };
        if better {
            best = Some(CutResult::from_side(n, members[last].clone(), value));
        }

        // contract `last` into `prev`
        let (s, t) = (prev, last);
        let t_adj = std::mem::take(&mut adj[t]);
        for (w, weight) in t_adj {
            if w == s {
                continue;
            }
            adj[w].remove(&t);
            *adj[w].entry(s).or_insert(0) += weight;
            *adj[s].entry(w).or_insert(0) += weight;
        }
        adj[s].remove(&t);
        let moved = std::mem::take(&mut members[t]);
        members[s].extend(moved);
        alive.retain(|&v| v != t);
    }
    best.expect("at least one phase runs for n >= 2")
}
