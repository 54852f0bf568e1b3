//! Flat SBM fitting by description-length minimisation.
//!
//! Each restart descends from the all-singletons partition (B = N) to a
//! single block by repeatedly applying the best block merge, running greedy
//! single-node move sweeps after every merge, and keeps the best partition
//! seen on the way. A final sweep, now allowed to open empty blocks, polishes
//! that partition. Deltas are evaluated incrementally; the returned report is
//! always recomputed from scratch with [`compute_dl`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dl::{compute_dl, ln_factorial, DlConfig, DlReport, Model};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Partition};

/// Above this many blocks merge candidates are sampled instead of enumerated.
const ALL_PAIRS_MAX_BLOCKS: usize = 64;
/// Random partner blocks tried per block when sampling merges.
const RANDOM_PARTNERS: usize = 3;
/// Improvements smaller than this are treated as ties.
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    #[default]
    Dc,
    Ndc,
    /// Fit both and keep the lower description length (ties go to DC).
    Chosen,
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelChoice::Dc => "dc",
            ModelChoice::Ndc => "ndc",
            ModelChoice::Chosen => "chosen",
        })
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chosen" => Ok(ModelChoice::Chosen),
            other => other.parse::<Model>().map(|m| match m {
                Model::Dc => ModelChoice::Dc,
                Model::Ndc => ModelChoice::Ndc,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub model: ModelChoice,
    pub beta: f64,
    pub edges_dl: bool,
    pub seed: u64,
    pub restarts: usize,
    pub move_sweep_limit: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            model: ModelChoice::Dc,
            beta: 1.0,
            edges_dl: true,
            seed: 0,
            restarts: 5,
            move_sweep_limit: 10,
        }
    }
}

impl InferenceConfig {
    fn dl_config(&self, model: Model) -> Result<DlConfig> {
        DlConfig::new(model, self.beta, self.edges_dl)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartLog {
    pub restart: usize,
    pub total: f64,
    /// Incumbent objective after each improvement; non-increasing.
    #[serde(skip)]
    pub accepted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: Model,
    pub total: f64,
    pub restarts: Vec<RestartLog>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub partition: Partition,
    pub report: DlReport,
    pub model_selected: Model,
    pub restarts_log: Vec<RestartLog>,
    /// One entry per model that was fitted (two for [`ModelChoice::Chosen`]).
    pub candidates: Vec<ModelFit>,
    /// DC and NDC reached exactly the same total.
    pub tie: bool,
}

pub fn fit(g: &Graph, cfg: &InferenceConfig) -> Result<FitResult> {
    if g.is_empty() {
        return Err(Error::domain("cannot fit a graph without nodes"));
    }
    if cfg.restarts == 0 {
        return Err(Error::domain("restarts must be at least 1"));
    }
    let models: &[Model] = match cfg.model {
        ModelChoice::Dc => &[Model::Dc],
        ModelChoice::Ndc => &[Model::Ndc],
        ModelChoice::Chosen => &[Model::Dc, Model::Ndc],
    };
    let mut fits = Vec::new();
    for &model in models {
        fits.push(fit_model(g, cfg, model)?);
    }
    // first strictly lower total wins, so DC keeps ties
    let mut best = 0;
    for (i, f) in fits.iter().enumerate() {
        if f.1.total < fits[best].1.total {
            best = i;
        }
    }
    let tie = fits.len() == 2 && fits[0].1.total == fits[1].1.total;
    let candidates = fits
        .iter()
        .map(|(_, report, logs)| ModelFit {
            model: report.model,
            total: report.total,
            restarts: logs.clone(),
        })
        .collect();
    let (partition, report, restarts_log) = fits.swap_remove(best);
    Ok(FitResult {
        partition,
        model_selected: report.model,
        report,
        restarts_log,
        candidates,
        tie,
    })
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn fit_model(g: &Graph, cfg: &InferenceConfig, model: Model) -> Result<(Partition, DlReport, Vec<RestartLog>)> {
    let dl = cfg.dl_config(model)?;
    let runs: Vec<(Partition, DlReport, Vec<f64>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(cfg.seed, restart);
            let mut state = State::new(g, dl, &Partition::singletons(g.num_nodes()));
            let mut accepted = vec![state.total];
            let best = descend(&mut state, cfg.move_sweep_limit, &mut rng, restart == 0, &mut accepted);
            let mut polished = State::new(g, dl, &best);
            polished.sweeps(cfg.move_sweep_limit, true, None);
            let partition = polished.partition();
            let report = compute_dl(g, &partition, &dl)?;
            if report.total < *accepted.last().unwrap() {
                accepted.push(report.total);
            }
            Ok((partition, report, accepted))
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1.total < runs[best].1.total {
            best = i;
        }
    }
    let logs = runs
        .iter()
        .enumerate()
        .map(|(restart, run)| RestartLog {
            restart,
            total: run.1.total,
            accepted: run.2.clone(),
        })
        .collect();
    let (partition, report, _) = runs.into_iter().nth(best).expect("restarts >= 1");
    Ok((partition, report, logs))
}

/// Greedy single-node moves to neighbouring or empty blocks, visiting nodes
/// in id order, until a sweep moves nothing or `sweep_limit` sweeps ran.
pub fn greedy_move_sweep(g: &Graph, p: &Partition, dl: &DlConfig, sweep_limit: usize) -> Result<Partition> {
    check(g, p, dl)?;
    let mut state = State::new(g, *dl, p);
    state.sweeps(sweep_limit, true, None);
    Ok(state.partition())
}

/// Merge descent from `p` down to one block with interleaved move sweeps,
/// returning the lowest-DL partition encountered (possibly `p` itself).
pub fn agglomerate(g: &Graph, p: &Partition, dl: &DlConfig, sweep_limit: usize, seed: u64) -> Result<Partition> {
    agglomerate_traced(g, p, dl, sweep_limit, seed).map(|(p, _)| p)
}

/// [`agglomerate`] plus the incumbent objective after every improvement.
pub fn agglomerate_traced(
    g: &Graph,
    p: &Partition,
    dl: &DlConfig,
    sweep_limit: usize,
    seed: u64,
) -> Result<(Partition, Vec<f64>)> {
    check(g, p, dl)?;
    let mut state = State::new(g, *dl, p);
    let mut rng = restart_rng(seed, 0);
    let mut accepted = vec![state.total];
    let best = descend(&mut state, sweep_limit, &mut rng, true, &mut accepted);
    Ok((best, accepted))
}

fn check(g: &Graph, p: &Partition, dl: &DlConfig) -> Result<()> {
    dl.validate()?;
    if p.len() != g.num_nodes() {
        return Err(Error::domain(format!(
            "partition assigns {} nodes but the graph has {}",
            p.len(),
            g.num_nodes()
        )));
    }
    Ok(())
}

fn descend(
    state: &mut State<'_>,
    sweep_limit: usize,
    rng: &mut ChaCha8Rng,
    greedy: bool,
    accepted: &mut Vec<f64>,
) -> Partition {
    let mut best = state.partition();
    let mut best_total = state.total;
    let order_rng = if greedy { None } else { Some(&mut *rng) };
    state.sweeps(sweep_limit, false, order_rng);
    if state.total < best_total - EPS {
        best_total = state.total;
        best = state.partition();
        accepted.push(best_total);
    }
    while state.num_blocks > 1 {
        let mut candidates = state.merge_candidates(rng);
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let pick = if !greedy && candidates.len() > 1 && rng.gen_bool(0.3) {
            rng.gen_range(0..candidates.len().min(3))
        } else {
            0
        };
        let (delta, keep, absorbed) = candidates[pick];
        state.apply_merge(absorbed, keep);
        state.total += delta;
        let order_rng = if greedy { None } else { Some(&mut *rng) };
        state.sweeps(sweep_limit, false, order_rng);
        if state.total < best_total - EPS {
            best_total = state.total;
            best = state.partition();
            accepted.push(best_total);
        }
    }
    best
}

/// Incrementally maintained block aggregates plus the running objective.
struct State<'g> {
    g: &'g Graph,
    dl: DlConfig,
    ln_fact: Vec<f64>,
    block: Vec<usize>,
    size: Vec<u64>,
    /// e_r
    degree_sum: Vec<u64>,
    /// e_rr (twice the internal edges)
    internal: Vec<u64>,
    /// off-diagonal e_rs, symmetric, nonzero entries only
    rows: Vec<HashMap<usize, u64>>,
    num_blocks: usize,
    empty: BTreeSet<usize>,
    /// sum_i ln k_i! for DC, else 0
    degree_const: f64,
    total: f64,
    // scratch for neighbour-block counts
    counts: Vec<u64>,
    touched: Vec<usize>,
    seen: Vec<u32>,
    stamp: u32,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph, dl: DlConfig, p: &Partition) -> Self {
        let n = g.num_nodes();
        let table_len = 2 * g.num_edges() + n + 2;
        let mut ln_fact = Vec::with_capacity(table_len);
        ln_fact.extend((0..table_len as u64).map(ln_factorial));
        let mut state = State {
            g,
            dl,
            ln_fact,
            block: p.assignment().to_vec(),
            size: vec![0; n],
            degree_sum: vec![0; n],
            internal: vec![0; n],
            rows: vec![HashMap::new(); n],
            num_blocks: p.num_clusters(),
            empty: (p.num_clusters()..n).collect(),
            degree_const: 0.0,
            total: 0.0,
            counts: vec![0; n],
            touched: Vec::new(),
            seen: vec![0; n],
            stamp: 0,
        };
        for v in 0..n {
            let r = state.block[v];
            state.size[r] += 1;
            state.degree_sum[r] += g.degree(v) as u64;
        }
        for (u, v) in g.edges() {
            let (r, s) = (state.block[u], state.block[v]);
            if r == s {
                state.internal[r] += 2;
            } else {
                state.adjust(r, s, 1);
            }
        }
        if dl.model == Model::Dc {
            state.degree_const = (0..n).map(|v| state.lf(g.degree(v) as u64)).sum();
        }
        state.total = state.full_total();
        state
    }

    fn partition(&self) -> Partition {
        Partition::from_assignment(&self.block)
    }

    fn lf(&self, x: u64) -> f64 {
        self.ln_fact
            .get(x as usize)
            .copied()
            .unwrap_or_else(|| ln_factorial(x))
    }

    fn lbinom(&self, n: u64, k: u64) -> f64 {
        if k == 0 || k >= n {
            0.0
        } else {
            self.lf(n) - self.lf(k) - self.lf(n - k)
        }
    }

    fn block_term(&self, n: u64, e: u64, err: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let beta = self.dl.beta;
        let partition = -self.lf(n);
        match self.dl.model {
            Model::Dc => {
                let m = err / 2;
                let double_fact = m as f64 * std::f64::consts::LN_2 + self.lf(m);
                self.lf(e) - double_fact + beta * (self.lbinom(n + e - 1, e) + partition)
            }
            Model::Ndc => self.lbinom(n * (n - 1) / 2, err / 2) + beta * partition,
        }
    }

    fn pair_term(&self, nr: u64, ns: u64, e: u64) -> f64 {
        if e == 0 {
            return 0.0;
        }
        match self.dl.model {
            Model::Dc => -self.lf(e),
            Model::Ndc => self.lbinom(nr * ns, e),
        }
    }

    fn global_term(&self, blocks: usize) -> f64 {
        let n = self.g.num_nodes() as u64;
        let e = self.g.num_edges() as u64;
        let b = blocks as u64;
        let mut prior = (n as f64).ln() + self.lbinom(n - 1, b.saturating_sub(1)) + self.lf(n);
        if self.dl.edges_dl && e > 0 {
            prior += self.lbinom(b * (b + 1) / 2 + e - 1, e);
        }
        self.dl.beta * prior - self.degree_const
    }

    fn full_total(&self) -> f64 {
        let mut s = self.global_term(self.num_blocks);
        for r in 0..self.size.len() {
            s += self.block_term(self.size[r], self.degree_sum[r], self.internal[r]);
            for (&t, &e) in &self.rows[r] {
                if r < t {
                    s += self.pair_term(self.size[r], self.size[t], e);
                }
            }
        }
        s
    }

    fn edge_count(&self, r: usize, s: usize) -> u64 {
        self.rows[r].get(&s).copied().unwrap_or(0)
    }

    fn adjust(&mut self, r: usize, s: usize, delta: i64) {
        if delta == 0 {
            return;
        }
        for (a, b) in [(r, s), (s, r)] {
            let entry = self.rows[a].entry(b).or_insert(0);
            let value = (*entry as i64 + delta) as u64;
            if value == 0 {
                self.rows[a].remove(&b);
            } else {
                *entry = value;
            }
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|x| *x = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Fills `counts`/`touched` with the number of neighbours of `v` per block.
    fn count_neighbour_blocks(&mut self, v: NodeId) {
        for &t in &self.touched {
            self.counts[t] = 0;
        }
        self.touched.clear();
        let g = self.g;
        for &w in g.neighbors(v) {
            let t = self.block[w];
            if self.counts[t] == 0 {
                self.touched.push(t);
            }
            self.counts[t] += 1;
        }
    }

    /// Objective change of moving `v` from its block to `s`; requires
    /// `count_neighbour_blocks(v)` to be current.
    fn move_delta(&mut self, v: NodeId, s: usize) -> f64 {
        let r = self.block[v];
        let k = self.g.degree(v) as u64;
        let (nr, ns) = (self.size[r], self.size[s]);
        let (cr, cs) = (self.counts[r], self.counts[s]);

        let mut delta = self.block_term(nr - 1, self.degree_sum[r] - k, self.internal[r] - 2 * cr)
            - self.block_term(nr, self.degree_sum[r], self.internal[r])
            + self.block_term(ns + 1, self.degree_sum[s] + k, self.internal[s] + 2 * cs)
            - self.block_term(ns, self.degree_sum[s], self.internal[s]);

        let ers = self.edge_count(r, s);
        delta += self.pair_term(nr - 1, ns + 1, ers + cr - cs) - self.pair_term(nr, ns, ers);

        let stamp = self.next_stamp();
        let mut others: Vec<usize> = self.touched.clone();
        if self.dl.model == Model::Ndc {
            others.extend(self.rows[r].keys().copied());
            others.extend(self.rows[s].keys().copied());
        }
        for t in others {
            if t == r || t == s || self.seen[t] == stamp {
                continue;
            }
            self.seen[t] = stamp;
            let ct = self.counts[t];
            let nt = self.size[t];
            let (ert, est) = (self.edge_count(r, t), self.edge_count(s, t));
            delta += self.pair_term(nr - 1, nt, ert - ct) - self.pair_term(nr, nt, ert);
            delta += self.pair_term(ns + 1, nt, est + ct) - self.pair_term(ns, nt, est);
        }

        let blocks_after = self.num_blocks - usize::from(nr == 1) + usize::from(ns == 0);
        delta + self.global_term(blocks_after) - self.global_term(self.num_blocks)
    }

    fn apply_move(&mut self, v: NodeId, s: usize) {
        let r = self.block[v];
        let k = self.g.degree(v) as u64;
        let (cr, cs) = (self.counts[r], self.counts[s]);
        let touched = self.touched.clone();
        for &t in &touched {
            if t != r && t != s {
                let ct = self.counts[t] as i64;
                self.adjust(r, t, -ct);
                self.adjust(s, t, ct);
            }
        }
        self.adjust(r, s, cr as i64 - cs as i64);
        self.internal[r] -= 2 * cr;
        self.internal[s] += 2 * cs;
        self.degree_sum[r] -= k;
        self.degree_sum[s] += k;
        if self.size[s] == 0 {
            self.empty.remove(&s);
            self.num_blocks += 1;
        }
        self.size[r] -= 1;
        self.size[s] += 1;
        if self.size[r] == 0 {
            self.empty.insert(r);
            self.num_blocks -= 1;
        }
        self.block[v] = s;
        // counts now describe v's neighbours relative to the old layout
        for &t in &self.touched {
            self.counts[t] = 0;
        }
        self.touched.clear();
    }

    /// Runs move sweeps; returns the number of accepted moves.
    fn sweeps(&mut self, limit: usize, allow_empty: bool, mut shuffle: Option<&mut ChaCha8Rng>) -> usize {
        let n = self.g.num_nodes();
        let mut order: Vec<NodeId> = (0..n).collect();
        let mut moved_total = 0;
        for _ in 0..limit {
            if let Some(rng) = shuffle.as_deref_mut() {
                order.shuffle(rng);
            }
            let mut moved = 0;
            for &v in &order {
                let r = self.block[v];
                self.count_neighbour_blocks(v);
                let mut targets: Vec<usize> = self.touched.iter().copied().filter(|&t| t != r).collect();
                if allow_empty && self.size[r] > 1 {
                    if let Some(&e) = self.empty.iter().next() {
                        targets.push(e);
                    }
                }
                targets.sort_unstable();
                let mut best: Option<(f64, usize)> = None;
                for s in targets {
                    let d = self.move_delta(v, s);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, s));
                    }
                }
                match best {
                    Some((d, s)) if d < -EPS => {
                        self.apply_move(v, s);
                        self.total += d;
                        moved += 1;
                    }
                    _ => {}
                }
            }
            moved_total += moved;
            if moved == 0 {
                break;
            }
        }
        moved_total
    }

    fn merge_delta(&self, r: usize, s: usize) -> f64 {
        let (nr, ns) = (self.size[r], self.size[s]);
        let ers = self.edge_count(r, s);
        let n_new = nr + ns;
        let mut delta = self.block_term(n_new, self.degree_sum[r] + self.degree_sum[s], self.internal[r] + self.internal[s] + 2 * ers)
            - self.block_term(nr, self.degree_sum[r], self.internal[r])
            - self.block_term(ns, self.degree_sum[s], self.internal[s])
            - self.pair_term(nr, ns, ers);
        for (&t, &ert) in &self.rows[r] {
            if t == s {
                continue;
            }
            let est = self.edge_count(s, t);
            let nt = self.size[t];
            delta += self.pair_term(n_new, nt, ert + est) - self.pair_term(nr, nt, ert) - self.pair_term(ns, nt, est);
        }
        for (&t, &est) in &self.rows[s] {
            if t == r || self.rows[r].contains_key(&t) {
                continue;
            }
            let nt = self.size[t];
            delta += self.pair_term(n_new, nt, est) - self.pair_term(ns, nt, est);
        }
        delta + self.global_term(self.num_blocks - 1) - self.global_term(self.num_blocks)
    }

    /// Candidate merges as `(delta, kept block, absorbed block)`, kept < absorbed.
    fn merge_candidates(&self, rng: &mut ChaCha8Rng) -> Vec<(f64, usize, usize)> {
        let live: Vec<usize> = (0..self.size.len()).filter(|&r| self.size[r] > 0).collect();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        if live.len() <= ALL_PAIRS_MAX_BLOCKS {
            for (i, &a) in live.iter().enumerate() {
                for &b in &live[i + 1..] {
                    pairs.push((a, b));
                }
            }
        } else {
            for &r in &live {
                pairs.extend(self.rows[r].keys().map(|&t| (r.min(t), r.max(t))));
                for _ in 0..RANDOM_PARTNERS {
                    let t = live[rng.gen_range(0..live.len())];
                    if t != r {
                        pairs.push((r.min(t), r.max(t)));
                    }
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
        }
        pairs
            .into_iter()
            .map(|(a, b)| (self.merge_delta(b, a), a, b))
            .collect()
    }

    /// Moves every node of `r` into `s`.
    fn apply_merge(&mut self, r: usize, s: usize) {
        let row = std::mem::take(&mut self.rows[r]);
        let ers = row.get(&s).copied().unwrap_or(0);
        for (t, e) in row {
            self.rows[t].remove(&r);
            if t != s {
                self.adjust(s, t, e as i64);
            }
        }
        self.internal[s] += self.internal[r] + 2 * ers;
        self.internal[r] = 0;
        self.degree_sum[s] += self.degree_sum[r];
        self.degree_sum[r] = 0;
        self.size[s] += self.size[r];
        self.size[r] = 0;
        for b in self.block.iter_mut() {
            if *b == r {
                *b = s;
            }
        }
        self.empty.insert(r);
        self.num_blocks -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::{gen_cliques, CliqueFixtureSpec};

    fn dc() -> DlConfig {
        DlConfig::default()
    }

    fn ndc() -> DlConfig {
        DlConfig::new(Model::Ndc, 1.0, true).unwrap()
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn running_total_matches_compute_dl() {
        for (seed, cfg) in [(1, dc()), (2, ndc()), (3, DlConfig::new(Model::Dc, 0.4, false).unwrap())] {
            let g = random_graph(30, 0.2, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let labels: Vec<usize> = (0..30).map(|_| rng.gen_range(0..6)).collect();
            let p = Partition::from_assignment(&labels);
            let mut state = State::new(&g, cfg, &p);
            let exact = compute_dl(&g, &p, &cfg).unwrap().total;
            assert!((state.total - exact).abs() < 1e-8);

            state.sweeps(3, true, None);
            let after = compute_dl(&g, &state.partition(), &cfg).unwrap().total;
            assert!((state.total - after).abs() < 1e-8, "{} vs {}", state.total, after);

            let candidates = state.merge_candidates(&mut rng);
            let (delta, keep, absorbed) = candidates[candidates.len() / 2];
            state.apply_merge(absorbed, keep);
            state.total += delta;
            let merged = compute_dl(&g, &state.partition(), &cfg).unwrap().total;
            assert!((state.total - merged).abs() < 1e-8);
        }
    }

    #[test]
    fn move_delta_matches_recomputation() {
        let g = random_graph(12, 0.35, 9);
        for cfg in [dc(), ndc()] {
            let p = Partition::from_assignment(&[0, 0, 1, 1, 2, 2, 0, 1, 2, 3, 3, 0]);
            let base = compute_dl(&g, &p, &cfg).unwrap().total;
            let mut state = State::new(&g, cfg, &p);
            for v in 0..12 {
                for s in 0..5 {
                    if s == p.cluster_of(v) {
                        continue;
                    }
                    state.count_neighbour_blocks(v);
                    let d = state.move_delta(v, s);
                    let mut labels = p.assignment().to_vec();
                    labels[v] = s;
                    let moved = compute_dl(&g, &Partition::from_assignment(&labels), &cfg).unwrap().total;
                    assert!((base + d - moved).abs() < 1e-8, "v {v} -> {s}");
                }
            }
        }
    }

    #[test]
    fn sweep_fixpoint_and_single_node() {
        let single = Graph::from_edges(1, []).unwrap();
        let p = Partition::one_block(1);
        assert_eq!(greedy_move_sweep(&single, &p, &dc(), 10).unwrap(), p);

        let g = random_graph(20, 0.3, 5);
        let once = greedy_move_sweep(&g, &Partition::one_block(20), &dc(), 50).unwrap();
        let twice = greedy_move_sweep(&g, &once, &dc(), 50).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn agglomerate_identity_on_one_block() {
        let g = random_graph(10, 0.4, 2);
        let p = Partition::one_block(10);
        assert_eq!(agglomerate(&g, &p, &dc(), 5, 0).unwrap(), p);
    }

    #[test]
    fn two_k5_improves_over_one_block() {
        let (g, _) = gen_cliques(&CliqueFixtureSpec {
            num_cliques: 2,
            clique_size: 5,
            bridges: 0,
            seed: 0,
        })
        .unwrap();
        let start = Partition::one_block(10);
        let before = compute_dl(&g, &start, &dc()).unwrap().total;
        let swept = greedy_move_sweep(&g, &start, &dc(), 10).unwrap();
        let merged = agglomerate(&g, &Partition::singletons(10), &dc(), 10, 0).unwrap();
        let after = compute_dl(&g, &merged, &dc()).unwrap().total;
        assert!(after < before);
        assert!(compute_dl(&g, &swept, &dc()).unwrap().total <= before);
    }

    #[test]
    fn accepted_trace_is_non_increasing() {
        let g = random_graph(25, 0.25, 8);
        let (best, trace) = agglomerate_traced(&g, &Partition::singletons(25), &dc(), 5, 3).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        let exact = compute_dl(&g, &best, &dc()).unwrap().total;
        assert!((exact - trace.last().unwrap()).abs() < 1e-6);
    }

    #[test]
    fn fit_is_deterministic_and_consistent() {
        let g = random_graph(24, 0.2, 4);
        let cfg = InferenceConfig {
            model: ModelChoice::Chosen,
            restarts: 3,
            seed: 17,
            ..Default::default()
        };
        let a = fit(&g, &cfg).unwrap();
        let b = fit(&g, &cfg).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.report, b.report);
        let again = compute_dl(&g, &a.partition, &DlConfig::new(a.model_selected, 1.0, true).unwrap()).unwrap();
        assert!((again.total - a.report.total).abs() < 1e-9);
        assert_eq!(a.candidates.len(), 2);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let empty = Graph::from_edges(0, []).unwrap();
        assert!(fit(&empty, &InferenceConfig::default()).is_err());
        let g = random_graph(5, 0.5, 1);
        let cfg = InferenceConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(fit(&g, &cfg).is_err());
    }

    #[test]
    fn model_choice_parsing() {
        assert_eq!("chosen".parse::<ModelChoice>().unwrap(), ModelChoice::Chosen);
        assert_eq!("NDC".parse::<ModelChoice>().unwrap(), ModelChoice::Ndc);
        assert!("pp".parse::<ModelChoice>().is_err());
    }
}
