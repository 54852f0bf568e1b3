//! `node<TAB>cluster` files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use sbmconn_core::{Error, Graph, NodeId, Partition};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct ClusteringFile {
    pub path: PathBuf,
    /// `(node label, cluster label)` in file order.
    pub entries: Vec<(String, String)>,
}

impl ClusteringFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut entries = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| CliError::Io {
                path: path.to_owned(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_error = |message: String| CliError::input(path, Error::Parse { line: i + 1, message });
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(parse_error(format!(
                    "expected `node<TAB>cluster`, found {} fields",
                    tokens.len()
                )));
            }
            if let Some(first) = seen.insert(tokens[0].to_owned(), i + 1) {
                return Err(parse_error(format!(
                    "node {} already assigned on line {first}",
                    tokens[0]
                )));
            }
            entries.push((tokens[0].to_owned(), tokens[1].to_owned()));
        }
        Ok(ClusteringFile {
            path: path.to_owned(),
            entries,
        })
    }

    /// Adds nodes that only appear in this file to `g` as isolated nodes.
    pub fn extend_graph(&self, g: &mut Graph) -> usize {
        let before = g.num_nodes();
        for (node, _) in &self.entries {
            g.add_isolated(node);
        }
        let added = g.num_nodes() - before;
        if added > 0 {
            log::info!("{}: {added} nodes absent from the edge list added as isolated nodes", self.path.display());
        }
        added
    }

    /// Builds the partition over every node of `g`. Nodes missing from the
    /// file become singletons.
    pub fn to_partition(&self, g: &Graph) -> CliResult<Clustering> {
        let mut cluster_ids: HashMap<&str, usize> = HashMap::new();
        let mut cluster_labels: Vec<Option<String>> = Vec::new();
        let mut assignment: Vec<Option<usize>> = vec![None; g.num_nodes()];
        for (node, cluster) in &self.entries {
            let v = g.node_id(node).ok_or_else(|| {
                CliError::input(&self.path, Error::Domain(format!("node {node} is not in the graph")))
            })?;
            let next = cluster_labels.len();
            let id = *cluster_ids.entry(cluster.as_str()).or_insert_with(|| {
                cluster_labels.push(Some(cluster.clone()));
                next
            });
            assignment[v] = Some(id);
        }
        let mut missing = 0;
        let raw: Vec<usize> = assignment
            .into_iter()
            .map(|a| {
                a.unwrap_or_else(|| {
                    missing += 1;
                    cluster_labels.push(None);
                    cluster_labels.len() - 1
                })
            })
            .collect();
        if missing > 0 {
            log::warn!(
                "{}: {missing} nodes of the edge list have no cluster and are treated as singletons",
                self.path.display()
            );
        }
        let partition = Partition::from_assignment(&raw);
        let mut original = vec![None; partition.num_clusters()];
        for (v, &c) in raw.iter().enumerate() {
            original[partition.cluster_of(v)] = cluster_labels[c].clone();
        }
        let string_labels = self.entries.iter().any(|(_, c)| c.parse::<i64>().is_err());
        let mut listed = vec![false; g.num_nodes()];
        let mut order: Vec<NodeId> = Vec::with_capacity(g.num_nodes());
        for (node, _) in &self.entries {
            let v = g.node_id(node).expect("checked above");
            listed[v] = true;
            order.push(v);
        }
        order.extend((0..g.num_nodes()).filter(|&v| !listed[v]));
        Ok(Clustering {
            partition,
            original,
            order,
            string_labels,
        })
    }
}

/// A loaded clustering with dense ids and the input label behind each id.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub partition: Partition,
    /// Input cluster label per dense cluster id; `None` for filled-in singletons.
    pub original: Vec<Option<String>>,
    /// Node order of the input file, unlisted nodes last.
    pub order: Vec<NodeId>,
    pub string_labels: bool,
}

/// Cluster ids renumbered by first appearance along `order`.
pub fn renumber(p: &Partition, order: &[NodeId]) -> Vec<usize> {
    let mut new_id = vec![usize::MAX; p.num_clusters()];
    let mut next = 0;
    for &v in order {
        let c = p.cluster_of(v);
        if new_id[c] == usize::MAX {
            new_id[c] = next;
            next += 1;
        }
    }
    new_id
}

/// One `node<TAB>cluster` line per node in `order`, clusters numbered by
/// first appearance.
pub fn write_clustering<W: Write + ?Sized>(g: &Graph, p: &Partition, order: &[NodeId], out: &mut W) -> std::io::Result<()> {
    let ids = renumber(p, order);
    for &v in order {
        writeln!(out, "{}\t{}", g.label(v), ids[p.cluster_of(v)])?;
    }
    Ok(())
}

/// `cluster<TAB>input cluster label` for each output cluster, given the input
/// cluster every output cluster came from.
pub fn write_label_map<W: Write + ?Sized>(sources: &[Option<String>], out: &mut W) -> std::io::Result<()> {
    for (c, label) in sources.iter().enumerate() {
        writeln!(out, "{c}\t{}", label.as_deref().unwrap_or("-"))?;
    }
    Ok(())
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".clusters.tsv");
    PathBuf::from(name)
}
