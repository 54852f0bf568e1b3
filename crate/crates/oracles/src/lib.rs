//! Exhaustive and closed-form reference computations for tests.
//!
//! Nothing here calls into the algorithms it is used to check; only the
//! `Graph` / `Partition` data types are shared.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbmconn_core::synthgen::{gen_cliques, gen_planted, CliqueFixtureSpec, PlantedSpec};
use sbmconn_core::{Graph, Partition};

/// Every set partition of `0..n` as a restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for label in 0..=limit {
            prefix.push(label);
            rec(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

/// All unordered node pairs of `0..n` in lexicographic order.
pub fn node_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Every simple graph on `0..n`, as edge lists, indexed by bitmask over [`node_pairs`].
pub fn all_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs = node_pairs(n);
    (0u64..1 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// Block edge-count signature: sorted `((r, s), count)` with `r <= s`, each edge once.
pub fn block_signature(edges: &[(usize, usize)], labels: &[usize]) -> Vec<((usize, usize), usize)> {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v) in edges {
        let (r, s) = (labels[u], labels[v]);
        *counts.entry((r.min(s), r.max(s))).or_insert(0) += 1;
    }
    let mut sig: Vec<_> = counts.into_iter().collect();
    sig.sort_unstable();
    sig
}

/// Number of simple graphs on `labels.len()` nodes with the same block
/// edge-count signature as `edges`.
pub fn count_consistent_simple_graphs(edges: &[(usize, usize)], labels: &[usize]) -> u64 {
    let target = block_signature(edges, labels);
    all_graphs(labels.len())
        .iter()
        .filter(|candidate| block_signature(candidate, labels) == target)
        .count() as u64
}

/// Half-edge pairing counts for the degree-corrected likelihood:
/// `(pairings reproducing the graph, pairings reproducing its block edge counts)`.
pub fn pairing_counts(edges: &[(usize, usize)], labels: &[usize]) -> (u64, u64) {
    let stubs: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut target_edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    target_edges.sort_unstable();
    let target_sig = block_signature(edges, labels);

    let mut realizing = 0;
    let mut consistent = 0;
    let mut used = vec![false; stubs.len()];
    let mut formed = Vec::with_capacity(edges.len());

    #[allow(clippy::too_many_arguments)]
    fn rec(
        stubs: &[usize],
        used: &mut [bool],
        formed: &mut Vec<(usize, usize)>,
        labels: &[usize],
        target_edges: &[(usize, usize)],
        target_sig: &[((usize, usize), usize)],
        realizing: &mut u64,
        consistent: &mut u64,
    ) {
        let Some(first) = used.iter().position(|&u| !u) else {
            if block_signature(formed, labels) == target_sig {
                *consistent += 1;
                let mut sorted: Vec<_> = formed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
                sorted.sort_unstable();
                if sorted == target_edges {
                    *realizing += 1;
                }
            }
            return;
        };
        used[first] = true;
        for other in first + 1..stubs.len() {
            if used[other] {
                continue;
            }
            used[other] = true;
            formed.push((stubs[first], stubs[other]));
            rec(stubs, used, formed, labels, target_edges, target_sig, realizing, consistent);
            formed.pop();
            used[other] = false;
        }
        used[first] = false;
    }

    rec(
        &stubs,
        &mut used,
        &mut formed,
        labels,
        &target_edges,
        &target_sig,
        &mut realizing,
        &mut consistent,
    );
    (realizing, consistent)
}

/// `ln C(n, k)` as a sum of `min(k, n - k)` log ratios.
pub fn ln_binomial_by_sum(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let m = k.min(n - k);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 1..=m {
        // Kahan summation
        let term = ((n - m + i) as f64 / i as f64).ln() - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    sum
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Minimum cut by enumerating every proper bipartition with plain loops.
pub fn min_cut_exhaustive(g: &Graph) -> usize {
    let n = g.num_nodes();
    assert!((2..=20).contains(&n));
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut best = usize::MAX;
    for mask in 1u32..(1 << n) - 1 {
        let crossing = edges
            .iter()
            .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
            .count();
        best = best.min(crossing);
    }
    best
}

/// Random graph on `n` nodes, made connected by adding a random spanning path
/// over nodes that are not yet connected.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges: Vec<(usize, usize)> = node_pairs(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let probe = Graph::from_edges(n, edges.clone()).unwrap();
    if !probe.is_connected() {
        for w in order.windows(2) {
            edges.push((w[0], w[1]));
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_labels<R: Rng>(rng: &mut R, n: usize, max_clusters: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..max_clusters)).collect()
}

/// Pair counts `(both, gt only, est only, neither)` by looping over all pairs.
pub fn pair_counts(gt: &Partition, est: &Partition) -> (u64, u64, u64, u64) {
    let n = gt.len();
    let (mut both, mut gt_only, mut est_only, mut neither) = (0, 0, 0, 0);
    for u in 0..n {
        for v in u + 1..n {
            let a = gt.cluster_of(u) == gt.cluster_of(v);
            let b = est.cluster_of(u) == est.cluster_of(v);
            match (a, b) {
                (true, true) => both += 1,
                (true, false) => gt_only += 1,
                (false, true) => est_only += 1,
                (false, false) => neither += 1,
            }
        }
    }
    (both, gt_only, est_only, neither)
}

/// ARI from pair counts (Hubert–Arabie in pair-count form).
pub fn ari_by_pairs(gt: &Partition, est: &Partition) -> f64 {
    let (n11, n10, n01, n00) = pair_counts(gt, est);
    let (n11, n10, n01, n00) = (n11 as f64, n10 as f64, n01 as f64, n00 as f64);
    let denom = (n11 + n01) * (n01 + n00) + (n11 + n10) * (n10 + n00);
    if denom == 0.0 {
        return 1.0;
    }
    2.0 * (n11 * n00 - n01 * n10) / denom
}

fn dense_table(gt: &Partition, est: &Partition) -> Vec<Vec<u64>> {
    let mut table = vec![vec![0u64; est.num_clusters()]; gt.num_clusters()];
    for v in 0..gt.len() {
        table[gt.cluster_of(v)][est.cluster_of(v)] += 1;
    }
    table
}

/// `(MI, H(gt), H(est))` from a dense contingency table.
pub fn information(gt: &Partition, est: &Partition) -> (f64, f64, f64) {
    let table = dense_table(gt, est);
    let n = gt.len() as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..est.num_clusters())
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let h = |xs: &[f64]| -> f64 { xs.iter().map(|&x| x / n).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum() };
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let pij = c as f64 / n;
                mi += pij * (pij / ((rows[i] / n) * (cols[j] / n))).ln();
            }
        }
    }
    (mi, h(&rows), h(&cols))
}

/// Expected MI under random relabelling, with exact integer hypergeometric weights.
pub fn expected_mi_exact(gt: &Partition, est: &Partition) -> f64 {
    let n = gt.len() as u64;
    let rows: Vec<u64> = gt.sizes().iter().map(|&s| s as u64).collect();
    let cols: Vec<u64> = est.sizes().iter().map(|&s| s as u64).collect();
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &rows {
        for &b in &cols {
            let denom = binomial(n, b) as f64;
            for nij in 1..=a.min(b) {
                if b - nij > n - a {
                    continue;
                }
                let weight = (binomial(a, nij) * binomial(n - a, b - nij)) as f64 / denom;
                let x = nij as f64;
                emi += weight * x / nf * (nf * x / (a as f64 * b as f64)).ln();
            }
        }
    }
    emi
}

pub fn nmi_reference(gt: &Partition, est: &Partition) -> f64 {
    let (mi, h1, h2) = information(gt, est);
    if h1 == 0.0 && h2 == 0.0 {
        return 1.0;
    }
    mi / (0.5 * (h1 + h2))
}

pub fn ami_reference(gt: &Partition, est: &Partition) -> f64 {
    if gt == est {
        return 1.0;
    }
    let (mi, h1, h2) = information(gt, est);
    let emi = expected_mi_exact(gt, est);
    let denom = 0.5 * (h1 + h2) - emi;
    if denom.abs() < 1e-15 {
        return 0.0;
    }
    (mi - emi) / denom
}

/// A generated graph with its planted clustering and a clustering to post-process.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    pub truth: Partition,
    pub input: Partition,
}

/// Coarsens `p` by grouping its clusters into at most `groups` random unions.
pub fn coarsen<R: Rng>(rng: &mut R, p: &Partition, groups: usize) -> Partition {
    let group_of: Vec<usize> = (0..p.num_clusters()).map(|_| rng.gen_range(0..groups.max(1))).collect();
    let labels: Vec<usize> = p.assignment().iter().map(|&c| group_of[c]).collect();
    Partition::from_assignment(&labels)
}

/// Mixed planted-partition and bridged-clique fixtures, mostly small, every
/// tenth one large (up to 2000 nodes). The input clustering cycles through
/// the planted truth, random coarsenings of it, and uniformly random labels.
pub fn treatment_fixtures(count: usize, seed: u64) -> Vec<Fixture> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let large = i % 10 == 9;
            let (kind, (graph, truth)) = if i % 2 == 0 {
                let spec = if large {
                    PlantedSpec {
                        blocks: (0..10).map(|_| rng.gen_range(150..=200)).collect(),
                        p_in: rng.gen_range(0.03..0.1),
                        p_out: rng.gen_range(0.0..0.001),
                        seed: rng.gen(),
                    }
                } else {
                    PlantedSpec {
                        blocks: (0..rng.gen_range(2..=8)).map(|_| rng.gen_range(3..=40)).collect(),
                        p_in: rng.gen_range(0.15..0.9),
                        p_out: rng.gen_range(0.0..0.04),
                        seed: rng.gen(),
                    }
                };
                ("planted", gen_planted(&spec).unwrap())
            } else {
                let spec = if large {
                    CliqueFixtureSpec {
                        num_cliques: 250,
                        clique_size: 8,
                        bridges: rng.gen_range(100..=400),
                        seed: rng.gen(),
                    }
                } else {
                    let m = rng.gen_range(2..=12);
                    CliqueFixtureSpec {
                        num_cliques: m,
                        clique_size: rng.gen_range(3..=8),
                        bridges: rng.gen_range(0..=2 * m),
                        seed: rng.gen(),
                    }
                };
                ("cliques", gen_cliques(&spec).unwrap())
            };
            let n = graph.num_nodes();
            let (how, input) = match (i / 2) % 3 {
                0 => ("truth", truth.clone()),
                1 => {
                    let groups = (truth.num_clusters() / 2).max(1);
                    ("coarsened", coarsen(&mut rng, &truth, groups))
                }
                _ => {
                    let k = rng.gen_range(1..=(n / 4).max(1));
                    ("random", Partition::from_assignment(&random_labels(&mut rng, n, k)))
                }
            };
            Fixture {
                name: format!("{i}:{kind}/{how} n={n} m={}", graph.num_edges()),
                graph,
                truth,
                input,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(all_partitions(n).len(), b);
        }
    }

    #[test]
    fn triangle_pairings() {
        // 15 matchings of 6 half-edges, 8 of them realise the triangle
        let (realizing, consistent) = pairing_counts(&[(0, 1), (1, 2), (0, 2)], &[0, 0, 0]);
        assert_eq!((realizing, consistent), (8, 15));
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial(15, 10), 3003);
        assert!((ln_binomial_by_sum(15, 10) - 3003f64.ln()).abs() < 1e-12);
        assert_eq!(ln_binomial_by_sum(0, 0), 0.0);
    }
}
