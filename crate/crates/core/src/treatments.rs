//! Connectivity post-processing of clusterings.
//!
//! * CC replaces every cluster by its connected components.
//! * WCC additionally splits connected clusters along a minimum cut until each
//!   cluster of `n` nodes has a minimum cut strictly above the threshold
//!   (`log10(n)` by default).
//!
//! Clusters are processed independently (in parallel on the current rayon
//! pool); the result does not depend on scheduling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet, Partition};
use crate::mincut::{self, CutResult};

/// Well-connectedness threshold as a function of cluster size.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThresholdRule {
    #[default]
    Log10,
    Constant(f64),
    /// Threshold 0: any connected cluster passes.
    None,
}

impl ThresholdRule {
    pub fn constant(c: f64) -> Result<Self> {
        if c.is_finite() && c >= 0.0 {
            Ok(ThresholdRule::Constant(c))
        } else {
            Err(Error::domain(format!("threshold constant must be >= 0, got {c}")))
        }
    }

    pub fn threshold(&self, n: usize) -> f64 {
        match *self {
            ThresholdRule::Log10 => (n as f64).log10(),
            ThresholdRule::Constant(c) => c,
            ThresholdRule::None => 0.0,
        }
    }

    pub fn is_well_connected(&self, min_cut: usize, n: usize) -> bool {
        min_cut as f64 > self.threshold(n)
    }

    /// Largest cut value that still fails for a cluster of `n` nodes.
    fn max_failing_cut(&self, n: usize) -> usize {
        self.threshold(n).floor().max(0.0) as usize
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Log10 => f.write_str("log10"),
            ThresholdRule::Constant(c) => write!(f, "{c}"),
            ThresholdRule::None => f.write_str("none"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "log10" => Ok(ThresholdRule::Log10),
            "none" => Ok(ThresholdRule::None),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("unknown threshold rule {other:?}")))
                .and_then(ThresholdRule::constant),
        }
    }
}

impl Serialize for ThresholdRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterClass {
    Singleton,
    Disconnected,
    PoorlyConnected,
    WellConnected,
}

fn check_coverage(g: &Graph, p: &Partition) -> Result<()> {
    if p.len() != g.num_nodes() {
        return Err(Error::domain(format!(
            "partition assigns {} nodes but the graph has {}",
            p.len(),
            g.num_nodes()
        )));
    }
    Ok(())
}

/// Replaces every cluster by the connected components of its induced subgraph.
pub fn treat_cc(g: &Graph, p: &Partition) -> Result<Partition> {
    check_coverage(g, p)?;
    let n = g.num_nodes();
    const UNSET: usize = usize::MAX;
    let mut component = vec![UNSET; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if component[start] != UNSET {
            continue;
        }
        let cluster = p.cluster_of(start);
        component[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if component[w] == UNSET && p.cluster_of(w) == cluster {
                    component[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    Ok(Partition::from_assignment(&component))
}

/// What WCC did to one input cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitRecord {
    pub cluster: usize,
    pub size: usize,
    pub pieces: usize,
    pub component_splits: usize,
    pub cut_splits: usize,
}

pub fn treat_wcc(g: &Graph, p: &Partition, rule: ThresholdRule) -> Result<Partition> {
    treat_wcc_traced(g, p, rule).map(|(partition, _)| partition)
}

/// [`treat_wcc`] plus one [`SplitRecord`] per input cluster.
pub fn treat_wcc_traced(
    g: &Graph,
    p: &Partition,
    rule: ThresholdRule,
) -> Result<(Partition, Vec<SplitRecord>)> {
    check_coverage(g, p)?;
    let clusters = p.clusters();
    let results: Vec<(Vec<NodeSet>, SplitRecord)> = clusters
        .par_iter()
        .enumerate()
        .map(|(id, members)| wcc_cluster(g, id, members, rule))
        .collect::<Result<_>>()?;
    let mut pieces = Vec::with_capacity(results.len());
    let mut records = Vec::with_capacity(results.len());
    for (parts, record) in results {
        pieces.extend(parts);
        records.push(record);
    }
    Ok((Partition::from_clusters(g.num_nodes(), &pieces)?, records))
}

fn wcc_cluster(
    g: &Graph,
    id: usize,
    members: &NodeSet,
    rule: ThresholdRule,
) -> Result<(Vec<NodeSet>, SplitRecord)> {
    let mut record = SplitRecord {
        cluster: id,
        size: members.len(),
        pieces: 0,
        component_splits: 0,
        cut_splits: 0,
    };
    let mut done = Vec::new();
    let mut work: Vec<Vec<NodeId>> = vec![members.as_slice().to_vec()];
    let mut scratch = HashMap::new();
    while let Some(nodes) = work.pop() {
        let n = nodes.len();
        if n == 1 {
            done.push(NodeSet::from_unsorted(nodes));
            continue;
        }
        let sub = g.induced_unlabelled(&nodes, &mut scratch);
        let components = sub.connected_components(&NodeSet::full(n))?;
        if components.len() > 1 {
            record.component_splits += 1;
            for c in components.into_iter().rev() {
                work.push(c.iter().map(|v| nodes[v]).collect());
            }
            continue;
        }
        match failing_cut(&sub, n, rule)? {
            None => done.push(NodeSet::from_unsorted(nodes)),
            Some(cut) => {
                record.cut_splits += 1;
                work.push(cut.side_b.iter().map(|v| nodes[v]).collect());
                work.push(cut.side_a.iter().map(|v| nodes[v]).collect());
            }
        }
    }
    record.pieces = done.len();
    Ok((done, record))
}

/// A minimum cut of the connected graph `sub` if it fails the threshold.
fn failing_cut(sub: &Graph, n: usize, rule: ThresholdRule) -> Result<Option<CutResult>> {
    let t = rule.threshold(n);
    if t < 1.0 {
        return Ok(None);
    }
    if let Some(cut) = mincut::leaf_cut(sub) {
        return Ok(Some(cut));
    }
    mincut::min_cut_within(sub, rule.max_failing_cut(n))
}

/// Class and (for connected non-singletons) exact minimum cut of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assessment {
    pub class: ClusterClass,
    pub min_cut: Option<usize>,
}

pub fn assess_cluster(g: &Graph, members: &NodeSet, rule: ThresholdRule) -> Result<Assessment> {
    if members.is_empty() {
        return Err(Error::domain("cannot classify an empty cluster"));
    }
    let n = members.len();
    if n == 1 {
        g.connected_components(members)?;
        return Ok(Assessment {
            class: ClusterClass::Singleton,
            min_cut: None,
        });
    }
    let sub = g.induced_subgraph(members)?.graph;
    if !sub.is_connected() {
        return Ok(Assessment {
            class: ClusterClass::Disconnected,
            min_cut: None,
        });
    }
    let cut = match mincut::leaf_cut(&sub) {
        Some(cut) => cut.cut_size,
        None => mincut::global_min_cut(&sub)?.cut_size,
    };
    let class = if rule.is_well_connected(cut, n) {
        ClusterClass::WellConnected
    } else {
        ClusterClass::PoorlyConnected
    };
    Ok(Assessment {
        class,
        min_cut: Some(cut),
    })
}

pub fn classify_cluster(g: &Graph, members: &NodeSet, rule: ThresholdRule) -> Result<ClusterClass> {
    assess_cluster(g, members, rule).map(|a| a.class)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub size: usize,
    pub class: ClusterClass,
    pub min_cut: Option<usize>,
}

/// Shares of non-singleton clusters per class, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassPercentages {
    pub disconnected: f64,
    pub poorly_connected: f64,
    pub well_connected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityProfile {
    pub threshold_rule: ThresholdRule,
    pub num_clusters: usize,
    pub num_singletons: usize,
    pub num_disconnected: usize,
    pub num_poorly_connected: usize,
    pub num_well_connected: usize,
    /// `None` when every cluster is a singleton.
    pub percentages: Option<ClassPercentages>,
    pub clusters: Vec<ClusterProfile>,
}

pub fn profile(g: &Graph, p: &Partition, rule: ThresholdRule) -> Result<ConnectivityProfile> {
    check_coverage(g, p)?;
    let clusters: Vec<ClusterProfile> = p
        .clusters()
        .into_par_iter()
        .enumerate()
        .map(|(id, members)| {
            assess_cluster(g, &members, rule).map(|a| ClusterProfile {
                cluster: id,
                size: members.len(),
                class: a.class,
                min_cut: a.min_cut,
            })
        })
        .collect::<Result<_>>()?;
    let count = |class| clusters.iter().filter(|c| c.class == class).count();
    let num_singletons = count(ClusterClass::Singleton);
    let num_disconnected = count(ClusterClass::Disconnected);
    let num_poorly_connected = count(ClusterClass::PoorlyConnected);
    let num_well_connected = count(ClusterClass::WellConnected);
    let non_singleton = clusters.len() - num_singletons;
    let percentages = (non_singleton > 0).then(|| {
        let pct = |k: usize| 100.0 * k as f64 / non_singleton as f64;
        ClassPercentages {
            disconnected: pct(num_disconnected),
            poorly_connected: pct(num_poorly_connected),
            well_connected: pct(num_well_connected),
        }
    });
    Ok(ConnectivityProfile {
        threshold_rule: rule,
        num_clusters: clusters.len(),
        num_singletons,
        num_disconnected,
        num_poorly_connected,
        num_well_connected,
        percentages,
        clusters,
    })
}
