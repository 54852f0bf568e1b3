//! Partition similarity (ARI, NMI, AMI, pair precision/recall) and
//! density-filtered evaluation against a ground truth.
//!
//! NMI and AMI normalise by the arithmetic mean of the two entropies.

use rayon::prelude::*;
use serde::Serialize;

use crate::dl::ln_factorial;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet, Partition};

/// Sparse contingency table between a ground truth (rows) and an estimate (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// Nonzero cells `(row, column, count)`, sorted.
    pub cells: Vec<(usize, usize, u64)>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn new(gt: &Partition, est: &Partition) -> Result<Self> {
        if gt.len() != est.len() {
            return Err(Error::domain(format!(
                "partitions cover different universes ({} vs {} nodes)",
                gt.len(),
                est.len()
            )));
        }
        let mut pairs: Vec<(usize, usize)> = gt
            .assignment()
            .iter()
            .copied()
            .zip(est.assignment().iter().copied())
            .collect();
        pairs.sort_unstable();
        let mut cells: Vec<(usize, usize, u64)> = Vec::new();
        for (i, j) in pairs {
            match cells.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += 1,
                _ => cells.push((i, j, 1)),
            }
        }
        let mut row_sums = vec![0; gt.num_clusters()];
        let mut col_sums = vec![0; est.num_clusters()];
        for &(i, j, c) in &cells {
            row_sums[i] += c;
            col_sums[j] += c;
        }
        Ok(ContingencyTable {
            cells,
            row_sums,
            col_sums,
            total: gt.len() as u64,
        })
    }
}

fn pairs_of(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn nonempty(gt: &Partition, est: &Partition) -> Result<ContingencyTable> {
    let table = ContingencyTable::new(gt, est)?;
    if table.total == 0 {
        return Err(Error::domain("metrics are undefined on an empty universe"));
    }
    Ok(table)
}

pub fn ari(gt: &Partition, est: &Partition) -> Result<f64> {
    let t = nonempty(gt, est)?;
    let index: f64 = t.cells.iter().map(|c| pairs_of(c.2) as f64).sum();
    let a: f64 = t.row_sums.iter().map(|&n| pairs_of(n) as f64).sum();
    let b: f64 = t.col_sums.iter().map(|&n| pairs_of(n) as f64).sum();
    let all = pairs_of(t.total) as f64;
    let expected = if all > 0.0 { a * b / all } else { 0.0 };
    let max = 0.5 * (a + b);
    if max == expected {
        // only reachable when both are all-singletons or both one block
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

fn entropy(sizes: &[u64], total: u64) -> f64 {
    let n = total as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total as f64;
    let mi: f64 = t
        .cells
        .iter()
        .map(|&(i, j, c)| {
            let c = c as f64;
            c / n * (n * c / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln()
        })
        .sum();
    mi.max(0.0)
}

pub fn nmi(gt: &Partition, est: &Partition) -> Result<f64> {
    let t = nonempty(gt, est)?;
    let (h_gt, h_est) = (entropy(&t.row_sums, t.total), entropy(&t.col_sums, t.total));
    if h_gt == 0.0 && h_est == 0.0 {
        return Ok(1.0);
    }
    let mi = mutual_information(&t);
    Ok((mi / (0.5 * (h_gt + h_est))).clamp(0.0, 1.0))
}

/// Expected mutual information under the hypergeometric permutation model.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total;
    let nf = n as f64;
    let ln_n_fact = ln_factorial(n);
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            // terms shared by every n_ij of this cell
            let fixed = ln_factorial(a) + ln_factorial(b) + ln_factorial(n - a) + ln_factorial(n - b) - ln_n_fact;
            for nij in lo..=hi {
                let x = nij as f64;
                let log_p = fixed
                    - ln_factorial(nij)
                    - ln_factorial(a - nij)
                    - ln_factorial(b - nij)
                    - ln_factorial(n + nij - a - b);
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

pub fn ami(gt: &Partition, est: &Partition) -> Result<f64> {
    let t = nonempty(gt, est)?;
    if gt == est {
        return Ok(1.0);
    }
    let mi = mutual_information(&t);
    let emi = expected_mutual_information(&t);
    let mean_h = 0.5 * (entropy(&t.row_sums, t.total) + entropy(&t.col_sums, t.total));
    let denominator = mean_h - emi;
    if denominator.abs() < 1e-15 {
        return Ok(0.0);
    }
    Ok((mi - emi) / denominator)
}

/// Counts of unordered node pairs by co-membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairConfusion {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl PairConfusion {
    /// `TP / (TP + FP)`, 1.0 when the estimate pairs nothing.
    pub fn precision(&self) -> f64 {
        let predicted = self.true_positives + self.false_positives;
        if predicted == 0 {
            1.0
        } else {
            self.true_positives as f64 / predicted as f64
        }
    }

    /// `TP / (TP + FN)`, 1.0 when the ground truth pairs nothing.
    pub fn recall(&self) -> f64 {
        let actual = self.true_positives + self.false_negatives;
        if actual == 0 {
            1.0
        } else {
            self.true_positives as f64 / actual as f64
        }
    }
}

pub fn pair_confusion(gt: &Partition, est: &Partition) -> Result<PairConfusion> {
    let t = ContingencyTable::new(gt, est)?;
    let tp: u64 = t.cells.iter().map(|c| pairs_of(c.2)).sum();
    let same_gt: u64 = t.row_sums.iter().map(|&n| pairs_of(n)).sum();
    let same_est: u64 = t.col_sums.iter().map(|&n| pairs_of(n)).sum();
    let fp = same_est - tp;
    let fn_ = same_gt - tp;
    Ok(PairConfusion {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        true_negatives: pairs_of(t.total) - tp - fp - fn_,
    })
}

/// Internal edges over `C(n, 2)`; singletons have density 0.
pub fn density(g: &Graph, members: &NodeSet) -> Result<f64> {
    match members.len() {
        0 => Err(Error::domain("density of an empty cluster")),
        1 => {
            g.internal_edges(members)?;
            Ok(0.0)
        }
        n => Ok(g.internal_edges(members)? as f64 / pairs_of(n as u64) as f64),
    }
}

/// All metrics for one density threshold. Metric fields are `None` when no
/// ground-truth cluster survives the filter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub retained_nodes: usize,
    pub retained_clusters: usize,
    pub ari: Option<f64>,
    pub nmi: Option<f64>,
    pub ami: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scores {
    pub ari: f64,
    pub nmi: f64,
    pub ami: f64,
    pub precision: f64,
    pub recall: f64,
}

pub fn scores(gt: &Partition, est: &Partition) -> Result<Scores> {
    let pairs = pair_confusion(gt, est)?;
    Ok(Scores {
        ari: ari(gt, est)?,
        nmi: nmi(gt, est)?,
        ami: ami(gt, est)?,
        precision: pairs.precision(),
        recall: pairs.recall(),
    })
}

/// Evaluates `est` on the nodes of ground-truth clusters whose density is
/// strictly above each threshold. Threshold 0 keeps every cluster, singletons
/// included. `est` is restricted by intersection with the retained nodes.
pub fn filtered_eval(g: &Graph, gt: &Partition, est: &Partition, thresholds: &[f64]) -> Result<Vec<ThresholdRow>> {
    if gt.len() != est.len() || gt.len() != g.num_nodes() {
        return Err(Error::domain(format!(
            "universe mismatch: graph {} nodes, ground truth {}, estimate {}",
            g.num_nodes(),
            gt.len(),
            est.len()
        )));
    }
    if thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::domain("density thresholds must lie in [0, 1]"));
    }
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("density thresholds must be sorted ascending"));
    }
    let clusters = gt.clusters();
    let densities: Vec<f64> = clusters.iter().map(|c| density(g, c)).collect::<Result<_>>()?;
    thresholds
        .par_iter()
        .map(|&t| {
            let kept: Vec<usize> = (0..clusters.len()).filter(|&c| t == 0.0 || densities[c] > t).collect();
            let universe: NodeSet = kept.iter().flat_map(|&c| clusters[c].iter()).collect();
            let mut row = ThresholdRow {
                threshold: t,
                retained_nodes: universe.len(),
                retained_clusters: kept.len(),
                ari: None,
                nmi: None,
                ami: None,
                precision: None,
                recall: None,
            };
            if !universe.is_empty() {
                let s = scores(&gt.restrict(&universe), &est.restrict(&universe))?;
                row.ari = Some(s.ari);
                row.nmi = Some(s.nmi);
                row.ami = Some(s.ami);
                row.precision = Some(s.precision);
                row.recall = Some(s.recall);
            }
            Ok(row)
        })
        .collect()
}
