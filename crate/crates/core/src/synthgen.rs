//! Seeded fixture generators with ground truth: clique assemblies and
//! planted-partition graphs.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueFixtureSpec {
    pub num_cliques: usize,
    pub clique_size: usize,
    /// Random inter-clique edges, drawn without replacement.
    pub bridges: usize,
    pub seed: u64,
}

/// `num_cliques` disjoint cliques on consecutive ids, plus `bridges` distinct
/// random edges between different cliques. Ground truth is one cluster per clique.
pub fn gen_cliques(spec: &CliqueFixtureSpec) -> Result<(Graph, Partition)> {
    let (m, c) = (spec.num_cliques, spec.clique_size);
    if m < 1 || c < 2 {
        return Err(Error::domain(format!(
            "need at least one clique of size >= 2, got {m} cliques of size {c}"
        )));
    }
    let n = m * c;
    let within = m * c * (c - 1) / 2;
    let available = n * (n - 1) / 2 - within;
    if spec.bridges > available {
        return Err(Error::domain(format!(
            "{} bridges requested but only {available} inter-clique pairs exist",
            spec.bridges
        )));
    }
    let mut edges = Vec::with_capacity(within + spec.bridges);
    for k in 0..m {
        let base = k * c;
        for u in base..base + c {
            for v in u + 1..base + c {
                edges.push((u, v));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clique = |v: NodeId| v / c;
    if spec.bridges * 2 <= available {
        let mut chosen = HashSet::with_capacity(spec.bridges);
        let mut picked = Vec::with_capacity(spec.bridges);
        while picked.len() < spec.bridges {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if clique(u) == clique(v) {
                continue;
            }
            let pair = (u.min(v), u.max(v));
            if chosen.insert(pair) {
                picked.push(pair);
            }
        }
        edges.extend(picked);
    } else {
        let pairs: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| clique(u) != clique(v))
            .collect();
        edges.extend(index::sample(&mut rng, pairs.len(), spec.bridges).into_iter().map(|i| pairs[i]));
    }

    let truth: Vec<usize> = (0..n).map(clique).collect();
    Ok((Graph::from_edges(n, edges)?, Partition::from_assignment(&truth)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub blocks: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl PlantedSpec {
    fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.p_in)
            && (0.0..=1.0).contains(&self.p_out)
            && self.p_out <= self.p_in;
        if !ok {
            return Err(Error::domain(format!(
                "need 0 <= p_out <= p_in <= 1, got p_in = {}, p_out = {}",
                self.p_in, self.p_out
            )));
        }
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::domain("planted blocks must be nonempty"));
        }
        Ok(())
    }
}

/// Calls `hit` with the indices in `0..count` selected by independent
/// Bernoulli(p) trials, in increasing order (geometric skipping).
fn bernoulli_indices<R: Rng>(rng: &mut R, count: u64, p: f64, mut hit: impl FnMut(u64)) {
    if count == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..count).for_each(hit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut next: u64 = 0;
    loop {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (count - next) as f64 {
            return;
        }
        next += skip as u64;
        hit(next);
        next += 1;
        if next >= count {
            return;
        }
    }
}

/// Independent edges with probability `p_in` inside blocks and `p_out`
/// between blocks. Nodes are numbered block by block.
pub fn gen_planted(spec: &PlantedSpec) -> Result<(Graph, Partition)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut offsets = Vec::with_capacity(spec.blocks.len());
    let mut n = 0;
    for &size in &spec.blocks {
        offsets.push(n);
        n += size;
    }
    let mut edges = Vec::new();
    for (r, &size_r) in spec.blocks.iter().enumerate() {
        let base = offsets[r];
        // row-major walk over pairs (i, j), i < j, inside the block
        let pairs = (size_r * size_r.saturating_sub(1) / 2) as u64;
        let mut row = 0usize;
        let mut row_start = 0u64;
        bernoulli_indices(&mut rng, pairs, spec.p_in, |k| {
            while k - row_start >= (size_r - 1 - row) as u64 {
                row_start += (size_r - 1 - row) as u64;
                row += 1;
            }
            let col = row + 1 + (k - row_start) as usize;
            edges.push((base + row, base + col));
        });
        for (s, &size_s) in spec.blocks.iter().enumerate().skip(r + 1) {
            let other = offsets[s];
            bernoulli_indices(&mut rng, (size_r * size_s) as u64, spec.p_out, |k| {
                let (i, j) = ((k / size_s as u64) as usize, (k % size_s as u64) as usize);
                edges.push((base + i, other + j));
            });
        }
    }
    let truth: Vec<usize> = spec
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(r, &size)| std::iter::repeat_n(r, size))
        .collect();
    Ok((Graph::from_edges(n, edges)?, Partition::from_assignment(&truth)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cliques(m: usize, c: usize, bridges: usize, seed: u64) -> (Graph, Partition) {
        gen_cliques(&CliqueFixtureSpec {
            num_cliques: m,
            clique_size: c,
            bridges,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn two_triangles() {
        let (g, truth) = cliques(2, 3, 0, 1);
        assert_eq!((g.num_nodes(), g.num_edges()), (6, 6));
        assert_eq!(g.connected_components(&crate::NodeSet::full(6)).unwrap().len(), 2);
        assert_eq!(truth.num_clusters(), 2);
    }

    #[test]
    fn sixty_four_eight_cliques() {
        let (g, truth) = cliques(64, 8, 0, 0);
        assert_eq!(g.num_nodes(), 512);
        assert_eq!(g.num_edges(), 64 * 28);
        assert_eq!(truth.sizes(), vec![8; 64]);
    }

    #[test]
    fn bridged_k5s_are_connected_and_split_by_wcc() {
        let (g, truth) = cliques(2, 5, 1, 3);
        assert_eq!(g.num_edges(), 21);
        assert!(g.is_connected());
        let out = crate::treatments::treat_wcc(
            &g,
            &Partition::one_block(10),
            crate::treatments::ThresholdRule::Log10,
        )
        .unwrap();
        assert_eq!(out, truth);
    }

    #[test]
    fn too_many_bridges() {
        let spec = CliqueFixtureSpec {
            num_cliques: 2,
            clique_size: 2,
            bridges: 5,
            seed: 0,
        };
        assert!(gen_cliques(&spec).is_err());
        // all 4 inter-clique pairs: dense branch
        let (g, _) = cliques(2, 2, 4, 0);
        assert_eq!(g.num_edges(), 6);
    }

    #[test]
    fn clique_generation_is_seeded() {
        assert_eq!(cliques(5, 4, 7, 11).0, cliques(5, 4, 7, 11).0);
        assert_ne!(cliques(5, 4, 7, 11).0, cliques(5, 4, 7, 12).0);
    }

    #[test]
    fn planted_extremes() {
        let full = gen_planted(&PlantedSpec {
            blocks: vec![3, 3],
            p_in: 1.0,
            p_out: 0.0,
            seed: 4,
        })
        .unwrap();
        assert_eq!(full, cliques(2, 3, 0, 0));

        let (empty, truth) = gen_planted(&PlantedSpec {
            blocks: vec![4, 2],
            p_in: 0.0,
            p_out: 0.0,
            seed: 4,
        })
        .unwrap();
        assert_eq!(empty.num_edges(), 0);
        assert_eq!(truth.sizes(), vec![4, 2]);
    }

    #[test]
    fn planted_validation() {
        let bad = PlantedSpec {
            blocks: vec![3],
            p_in: 0.1,
            p_out: 0.2,
            seed: 0,
        };
        assert!(gen_planted(&bad).is_err());
    }

    #[test]
    fn planted_within_block_edges_match_binomial_mean() {
        // 20 seeds x 2 blocks of C(50, 2) = 1225 pairs at p = 0.3
        let pairs = 1225.0;
        let p = 0.3;
        let mut total = 0.0;
        let samples = 40.0;
        for seed in 0..20 {
            let (g, truth) = gen_planted(&PlantedSpec {
                blocks: vec![50, 50],
                p_in: p,
                p_out: 0.01,
                seed,
            })
            .unwrap();
            for c in truth.clusters() {
                total += g.internal_edges(&c).unwrap() as f64;
            }
        }
        let mean = total / samples;
        let sigma_of_mean = (pairs * p * (1.0 - p) / samples).sqrt();
        assert!((mean - p * pairs).abs() < 3.0 * sigma_of_mean, "mean {mean}");
    }
}
