//! Description length of a graph under a flat microcanonical SBM.
//!
//! ```text
//! DL = likelihood + beta * (degree_prior + partition_prior + edge_matrix_prior)
//! ```
//!
//! All terms are in nats. The degree prior only exists for the
//! degree-corrected model and the edge-matrix prior can be switched off.
//!
//! Closed forms used (simple graphs, uniform priors):
//!
//! * DC likelihood: `sum_r ln e_r! - sum_{r<s} ln e_rs! - sum_r ln e_rr!! - sum_i ln k_i!`
//! * NDC likelihood: `sum_{r<s} ln C(n_r n_s, e_rs) + sum_r ln C(C(n_r, 2), e_rr / 2)`
//! * degree prior: `sum_r ln C(n_r + e_r - 1, e_r)`
//! * partition prior: `ln N + ln C(N - 1, B - 1) + ln N! - sum_r ln n_r!`
//! * edge-matrix prior: `ln C(B(B + 1)/2 + E - 1, E)`

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0)
}

/// `ln x! - (x ln x - x + ln(2 pi x) / 2)` for `x >= 10`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln C(n, k)`; zero outside `0 <= k <= n`.
///
/// Large arguments go through Stirling differences instead of subtracting
/// three big log-gammas, which keeps the absolute error near 1e-12.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k == 0 || k >= n {
        return 0.0;
    }
    let small = k.min(n - k);
    if n < 20 {
        return ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    }
    let (a, b, nf) = (small as f64, (n - small) as f64, n as f64);
    // n ln n - b ln b - n + b = a ln n - b ln(1 - a/n) - a
    let shared = -b * (-a / nf).ln_1p() + 0.5 * (nf / b).ln() + stirling_tail(nf) - stirling_tail(b);
    if small < 10 {
        a * nf.ln() - a + shared - ln_factorial(small)
    } else {
        a * (nf / a).ln() + shared - 0.5 * (2.0 * std::f64::consts::PI * a).ln() - stirling_tail(a)
    }
}

/// `ln (2m)!! = m ln 2 + ln m!` for even arguments.
fn ln_even_double_factorial(two_m: u64) -> f64 {
    let m = two_m / 2;
    m as f64 * std::f64::consts::LN_2 + ln_factorial(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Degree-corrected.
    #[default]
    Dc,
    /// Non-degree-corrected.
    Ndc,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Dc => "dc",
            Model::Ndc => "ndc",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dc" => Ok(Model::Dc),
            "ndc" | "non-dc" => Ok(Model::Ndc),
            other => Err(Error::domain(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlConfig {
    pub model: Model,
    pub beta: f64,
    pub edges_dl: bool,
}

impl Default for DlConfig {
    fn default() -> Self {
        DlConfig {
            model: Model::Dc,
            beta: 1.0,
            edges_dl: true,
        }
    }
}

impl DlConfig {
    pub fn new(model: Model, beta: f64, edges_dl: bool) -> Result<Self> {
        let cfg = DlConfig {
            model,
            beta,
            edges_dl,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::domain(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        Ok(())
    }
}

/// Block-level aggregates of a (graph, partition) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStats {
    pub num_nodes: u64,
    pub num_edges: u64,
    /// `n_r`
    pub sizes: Vec<u64>,
    /// `k_i`
    pub degrees: Vec<u64>,
    /// `e_r = sum_s e_rs`
    pub block_degrees: Vec<u64>,
    /// `e_rr`, twice the number of internal edges of block `r`.
    pub internal: Vec<u64>,
    /// `e_rs` for `r < s`, nonzero entries only.
    pub between: BTreeMap<(usize, usize), u64>,
}

impl BlockStats {
    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Symmetric lookup of `e_rs` (diagonal counts internal edges twice).
    pub fn edge_count(&self, r: usize, s: usize) -> u64 {
        if r == s {
            self.internal[r]
        } else {
            let key = (r.min(s), r.max(s));
            self.between.get(&key).copied().unwrap_or(0)
        }
    }
}

pub fn block_stats(g: &Graph, p: &Partition) -> Result<BlockStats> {
    if p.len() != g.num_nodes() {
        return Err(Error::domain(format!(
            "partition assigns {} nodes but the graph has {}",
            p.len(),
            g.num_nodes()
        )));
    }
    let blocks = p.num_clusters();
    let mut sizes = vec![0u64; blocks];
    let mut block_degrees = vec![0u64; blocks];
    let mut internal = vec![0u64; blocks];
    let mut between = BTreeMap::new();
    let degrees: Vec<u64> = (0..g.num_nodes()).map(|v| g.degree(v) as u64).collect();
    for (v, &k) in degrees.iter().enumerate() {
        let r = p.cluster_of(v);
        sizes[r] += 1;
        block_degrees[r] += k;
    }
    for (u, v) in g.edges() {
        let (r, s) = (p.cluster_of(u), p.cluster_of(v));
        if r == s {
            internal[r] += 2;
        } else {
            *between.entry((r.min(s), r.max(s))).or_insert(0) += 1;
        }
    }
    Ok(BlockStats {
        num_nodes: g.num_nodes() as u64,
        num_edges: g.num_edges() as u64,
        sizes,
        degrees,
        block_degrees,
        internal,
        between,
    })
}

/// `ln C(B(B+1)/2 + E - 1, E)`: uniform prior over symmetric edge-count matrices.
pub fn edge_matrix_prior(num_blocks: u64, num_edges: u64) -> f64 {
    if num_edges == 0 {
        return 0.0;
    }
    let pairs = num_blocks * (num_blocks + 1) / 2;
    ln_binomial(pairs + num_edges - 1, num_edges)
}

pub fn partition_prior(num_nodes: u64, sizes: &[u64]) -> f64 {
    if num_nodes == 0 {
        return 0.0;
    }
    let blocks = sizes.len() as u64;
    let multinomial = ln_factorial(num_nodes) - sizes.iter().map(|&n| ln_factorial(n)).sum::<f64>();
    (num_nodes as f64).ln() + ln_binomial(num_nodes - 1, blocks.saturating_sub(1)) + multinomial
}

pub fn degree_prior(stats: &BlockStats) -> f64 {
    stats
        .sizes
        .iter()
        .zip(&stats.block_degrees)
        .map(|(&n, &e)| if n == 0 { 0.0 } else { ln_binomial(n + e - 1, e) })
        .sum()
}

pub fn likelihood_dc(stats: &BlockStats) -> Result<f64> {
    let mut s = 0.0;
    for (r, &err) in stats.internal.iter().enumerate() {
        if err % 2 != 0 {
            return Err(Error::Internal(format!("odd diagonal edge count e_rr = {err} in block {r}")));
        }
        s += ln_factorial(stats.block_degrees[r]) - ln_even_double_factorial(err);
    }
    s -= stats.between.values().map(|&e| ln_factorial(e)).sum::<f64>();
    s -= stats.degrees.iter().map(|&k| ln_factorial(k)).sum::<f64>();
    Ok(s)
}

pub fn likelihood_ndc(stats: &BlockStats) -> Result<f64> {
    let mut s = 0.0;
    for (&(r, t), &e) in &stats.between {
        let capacity = stats.sizes[r] * stats.sizes[t];
        if e > capacity {
            return Err(Error::Infeasible(format!(
                "e_rs = {e} exceeds n_r * n_s = {capacity} for blocks ({r}, {t})"
            )));
        }
        s += ln_binomial(capacity, e);
    }
    for (r, &err) in stats.internal.iter().enumerate() {
        let n = stats.sizes[r];
        let capacity = n * n.saturating_sub(1) / 2;
        let edges = err / 2;
        if err % 2 != 0 || edges > capacity {
            return Err(Error::Infeasible(format!(
                "{edges} internal edges exceed C(n_r, 2) = {capacity} in block {r}"
            )));
        }
        s += ln_binomial(capacity, edges);
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlReport {
    pub model: Model,
    pub beta: f64,
    pub edges_dl: bool,
    pub num_nodes: u64,
    pub num_edges: u64,
    pub num_blocks: u64,
    pub likelihood: f64,
    pub degree_prior: f64,
    pub partition_prior: f64,
    pub edge_matrix_prior: f64,
    pub total: f64,
}

pub fn dl_from_stats(stats: &BlockStats, cfg: &DlConfig) -> Result<DlReport> {
    cfg.validate()?;
    let (likelihood, degree) = match cfg.model {
        Model::Dc => (likelihood_dc(stats)?, degree_prior(stats)),
        Model::Ndc => (likelihood_ndc(stats)?, 0.0),
    };
    let blocks = stats.num_blocks() as u64;
    let partition = partition_prior(stats.num_nodes, &stats.sizes);
    let edges = edge_matrix_prior(blocks, stats.num_edges);
    let priors = degree + partition + if cfg.edges_dl { edges } else { 0.0 };
    Ok(DlReport {
        model: cfg.model,
        beta: cfg.beta,
        edges_dl: cfg.edges_dl,
        num_nodes: stats.num_nodes,
        num_edges: stats.num_edges,
        num_blocks: blocks,
        likelihood,
        degree_prior: degree,
        partition_prior: partition,
        edge_matrix_prior: edges,
        total: likelihood + cfg.beta * priors,
    })
}

pub fn compute_dl(g: &Graph, p: &Partition, cfg: &DlConfig) -> Result<DlReport> {
    dl_from_stats(&block_stats(g, p)?, cfg)
}
