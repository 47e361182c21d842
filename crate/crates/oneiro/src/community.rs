//! Weighted modularity, Louvain optimization with seeded restarts,
//! eigenvector-centrality community labels, and coarse-grained community
//! graphs.
//!
//! Louvain runs the usual two phases: local moves accepting the best positive
//! modularity gain (ties to the smallest community id), then aggregation of
//! communities into a weighted supergraph with self-loops, until no move
//! improves Q. The node visit order is shuffled from the seed, so a run is
//! deterministic given (graph, seed). The incremental Q bookkeeping is
//! cross-checked against the direct double-sum formula at every phase
//! boundary; [`louvain_traced`] exposes those checks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{connected_components, WeightedGraph};

/// Node-to-community assignment with its modularity.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    n_communities: usize,
    pub q: f64,
}

impl Partition {
    /// Densifies arbitrary community ids (first-appearance order over node
    /// index) and computes Q on `g`.
    pub fn from_assignment(g: &WeightedGraph, raw: &[usize]) -> Result<Partition> {
        let assignment = densify(raw);
        let n_communities = assignment.iter().max().map_or(0, |m| m + 1);
        let q = modularity(g, &assignment)?;
        Ok(Partition {
            assignment,
            n_communities,
            q,
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    /// Member node indices per community id, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

fn densify(raw: &[usize]) -> Vec<usize> {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    raw.iter()
        .map(|&c| {
            *remap.entry(c).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

/// Weighted Newman modularity
/// Q = (1/2m) sum_ij [w_ij - s_i s_j / 2m] delta(c_i, c_j).
pub fn modularity(g: &WeightedGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != g.n_nodes() {
        return Err(Error::Graph(format!(
            "assignment covers {} nodes but the graph has {}",
            assignment.len(),
            g.n_nodes()
        )));
    }
    let m = g.total_weight();
    if m <= 0.0 {
        return Err(Error::Graph(
            "modularity is undefined on an edgeless graph".into(),
        ));
    }
    let n_comm = assignment.iter().max().map_or(0, |c| c + 1);
    let mut intra = vec![0.0f64; n_comm];
    let mut tot = vec![0.0f64; n_comm];
    for &(u, v, w) in g.edges() {
        if assignment[u] == assignment[v] {
            intra[assignment[u]] += w;
        }
    }
    for u in 0..g.n_nodes() {
        tot[assignment[u]] += g.strength(u);
    }
    let two_m = 2.0 * m;
    let mut q = 0.0;
    for c in 0..n_comm {
        q += intra[c] / m - (tot[c] / two_m) * (tot[c] / two_m);
    }
    Ok(q)
}

/// Incremental-vs-direct modularity at one Louvain phase boundary.
#[derive(Debug, Clone, Copy)]
pub struct PhaseCheck {
    pub incremental_q: f64,
    pub direct_q: f64,
}

/// Working graph for one Louvain level. Self-loops (aggregated intra-community
/// weight) are kept separate from the neighbor lists; a loop of weight w
/// contributes 2w to the node strength.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
}

impl LevelGraph {
    fn from_graph(g: &WeightedGraph) -> LevelGraph {
        let n = g.n_nodes();
        let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|u| g.neighbors(u).to_vec()).collect();
        let strength = (0..n).map(|u| g.strength(u)).collect();
        LevelGraph {
            adj,
            self_loop: vec![0.0; n],
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Q of the singleton partition of this level graph.
    fn singleton_q(&self, two_m: f64) -> f64 {
        let mut q = 0.0;
        for i in 0..self.len() {
            q += 2.0 * self.self_loop[i] / two_m
                - (self.strength[i] / two_m) * (self.strength[i] / two_m);
        }
        q
    }

    fn aggregate(&self, assign: &[usize], n_comm: usize) -> LevelGraph {
        let mut loops = vec![0.0f64; n_comm];
        let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for i in 0..self.len() {
            loops[assign[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if i < j {
                    let (ci, cj) = (assign[i], assign[j]);
                    if ci == cj {
                        loops[ci] += w;
                    } else {
                        *between.entry((ci.min(cj), ci.max(cj))).or_insert(0.0) += w;
                    }
                }
            }
        }
        let mut adj = vec![Vec::new(); n_comm];
        for (&(a, b), &w) in &between {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(n, _)| n);
        }
        let strength = (0..n_comm)
            .map(|c| adj[c].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * loops[c])
            .collect();
        LevelGraph {
            adj,
            self_loop: loops,
            strength,
        }
    }
}

struct LocalPhase {
    assign: Vec<usize>,
    n_comm: usize,
    gain: f64,
    moved: bool,
}

/// One level of local moves. Returns the (densified) assignment, the summed
/// modularity gain, and whether anything moved.
fn local_phase(level: &LevelGraph, rng: &mut ChaCha8Rng, two_m: f64) -> LocalPhase {
    let n = level.len();
    let m = two_m / 2.0;
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = level.strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut total_gain = 0.0;
    let mut moved_any = false;
    loop {
        let mut moved_pass = false;
        for &node in &order {
            let current = comm[node];
            let s_i = level.strength[node];
            // edge weight from node to each adjacent community, ascending id
            let mut w_to: BTreeMap<usize, f64> = BTreeMap::new();
            for &(nb, w) in &level.adj[node] {
                *w_to.entry(comm[nb]).or_insert(0.0) += w;
            }
            let k_cur = w_to.get(&current).copied().unwrap_or(0.0);
            tot[current] -= s_i;
            let tot_cur_without = tot[current];

            // best positive gain; ascending iteration makes ties resolve to
            // the smallest community id
            let mut best_comm = current;
            let mut best_gain = 0.0;
            for (&cand, &k_cand) in &w_to {
                if cand == current {
                    continue;
                }
                let gain =
                    (k_cand - k_cur) / m - s_i * (tot[cand] - tot_cur_without) / (2.0 * m * m);
                if gain > best_gain {
                    best_gain = gain;
                    best_comm = cand;
                }
            }
            tot[best_comm] += s_i;
            if best_comm != current {
                comm[node] = best_comm;
                total_gain += best_gain;
                moved_pass = true;
                moved_any = true;
            }
        }
        if !moved_pass {
            break;
        }
    }
    let assign = densify(&comm);
    let n_comm = assign.iter().max().map_or(0, |c| c + 1);
    LocalPhase {
        assign,
        n_comm,
        gain: total_gain,
        moved: moved_any,
    }
}

/// Louvain with a seeded visit order. Returns the partition along with the
/// incremental-vs-direct Q check at every phase boundary.
pub fn louvain_traced(g: &WeightedGraph, seed: u64) -> Result<(Partition, Vec<PhaseCheck>)> {
    if g.n_edges() == 0 {
        return Err(Error::Graph(
            "louvain requires a graph with at least one edge".into(),
        ));
    }
    let n = g.n_nodes();
    let two_m = 2.0 * g.total_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = LevelGraph::from_graph(g);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut q_inc = level.singleton_q(two_m);
    let mut trace = Vec::new();
    let mut prev_q = q_inc;

    loop {
        let phase = local_phase(&level, &mut rng, two_m);
        if !phase.moved {
            break;
        }
        q_inc += phase.gain;
        for me in membership.iter_mut() {
            *me = phase.assign[*me];
        }
        let direct = modularity(g, &membership)?;
        // the incremental bookkeeping must agree with the double-sum formula
        debug_assert!(
            (q_inc - direct).abs() < 1e-9,
            "incremental Q {q_inc} drifted from direct Q {direct}"
        );
        trace.push(PhaseCheck {
            incremental_q: q_inc,
            direct_q: direct,
        });
        assert!(
            direct >= prev_q - 1e-12,
            "Q decreased across a phase: {prev_q} -> {direct}"
        );
        prev_q = direct;
        q_inc = direct;
        level = level.aggregate(&phase.assign, phase.n_comm);
    }

    let assignment = densify(&membership);
    let n_communities = assignment.iter().max().map_or(0, |c| c + 1);
    Ok((
        Partition {
            assignment,
            n_communities,
            q: q_inc,
        },
        trace,
    ))
}

/// Louvain community detection, deterministic given the seed.
pub fn louvain(g: &WeightedGraph, seed: u64) -> Result<Partition> {
    louvain_traced(g, seed).map(|(p, _)| p)
}

/// Runs `louvain` with seeds base_seed .. base_seed + n - 1 (in parallel) and
/// returns the best partition by Q; exact ties go to the lowest seed.
pub fn best_of_n(g: &WeightedGraph, n: usize, base_seed: u64) -> Result<Partition> {
    best_of_n_with_history(g, n, base_seed).map(|(p, _)| p)
}

/// Like [`best_of_n`] but also returns (seed, Q) for every restart.
pub fn best_of_n_with_history(
    g: &WeightedGraph,
    n: usize,
    base_seed: u64,
) -> Result<(Partition, Vec<(u64, f64)>)> {
    if n == 0 {
        return Err(Error::InvalidInput("best_of_n requires n >= 1".into()));
    }
    let runs: Vec<Result<Partition>> = (0..n)
        .into_par_iter()
        .map(|i| louvain(g, base_seed + i as u64))
        .collect();
    let mut best: Option<(usize, Partition)> = None;
    let mut history = Vec::with_capacity(n);
    for (i, run) in runs.into_iter().enumerate() {
        let p = run?;
        history.push((base_seed + i as u64, p.q));
        let better = match &best {
            None => true,
            Some((_, b)) => p.q > b.q,
        };
        if better {
            best = Some((i, p));
        }
    }
    Ok((best.expect("n >= 1").1, history))
}

// ---------------------------------------------------------------------------
// Eigenvector centrality
// ---------------------------------------------------------------------------

/// Power-iteration eigenvector centrality scores, unit-max normalized per
/// connected component.
#[derive(Debug, Clone)]
pub struct CentralityScores {
    pub scores: Vec<f64>,
    /// Iterations used by the slowest component.
    pub iterations: usize,
    /// max over components of ||A x - lambda x||_inf at return.
    pub residual: f64,
}

/// Power iteration on the weighted adjacency with a 0.5 self-damping shift
/// (kills bipartite oscillation), L-infinity normalized each step, converged
/// when successive iterates differ by < tol. Disconnected graphs are handled
/// per component.
pub fn eigenvector_centrality(
    g: &WeightedGraph,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityScores> {
    if g.n_nodes() == 0 {
        return Err(Error::Graph(
            "eigenvector centrality on an empty graph".into(),
        ));
    }
    let mut scores = vec![0.0f64; g.n_nodes()];
    let mut iterations = 0usize;
    let mut residual = 0.0f64;
    for component in connected_components(g) {
        if component.len() == 1 {
            scores[component[0]] = 1.0;
            continue;
        }
        let (x, iters, res) = component_centrality(g, &component, tol, max_iter)?;
        for (local, &orig) in component.iter().enumerate() {
            scores[orig] = x[local];
        }
        iterations = iterations.max(iters);
        residual = residual.max(res);
    }
    Ok(CentralityScores {
        scores,
        iterations,
        residual,
    })
}

fn component_centrality(
    g: &WeightedGraph,
    component: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = component.len();
    let mut local_of = std::collections::HashMap::with_capacity(n);
    for (i, &orig) in component.iter().enumerate() {
        local_of.insert(orig, i);
    }
    let adj: Vec<Vec<(usize, f64)>> = component
        .iter()
        .map(|&orig| {
            g.neighbors(orig)
                .iter()
                .map(|&(nb, w)| (local_of[&nb], w))
                .collect()
        })
        .collect();
    let max_strength = component
        .iter()
        .map(|&orig| g.strength(orig))
        .fold(0.0f64, f64::max);
    let damp = 0.5 * max_strength;

    let matvec = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| adj[i].iter().map(|&(j, w)| w * x[j]).sum::<f64>())
            .collect()
    };

    let mut x = vec![1.0; n];
    for it in 1..=max_iter {
        let ax = matvec(&x);
        let mut y: Vec<f64> = ax.iter().zip(&x).map(|(a, xi)| a + damp * xi).collect();
        let max = y.iter().cloned().fold(0.0f64, f64::max);
        if max == 0.0 {
            return Err(Error::Numeric("power iteration collapsed to zero".into()));
        }
        for v in &mut y {
            *v /= max;
        }
        let diff = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        x = y;
        if diff < tol {
            let (lambda, res) = rayleigh_residual(&matvec, &x);
            return Ok((x, it, res.max(lambda * 0.0)));
        }
    }
    let (_, res) = rayleigh_residual(&matvec, &x);
    Err(Error::Numeric(format!(
        "eigenvector centrality did not converge after {max_iter} iterations (residual {res:.3e})"
    )))
}

fn rayleigh_residual(matvec: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> (f64, f64) {
    let ax = matvec(x);
    let xtx: f64 = x.iter().map(|v| v * v).sum();
    let lambda: f64 = ax.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / xtx;
    let res = ax
        .iter()
        .zip(x)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0f64, f64::max);
    (lambda, res)
}

// ---------------------------------------------------------------------------
// Community labels and coarse-grained graph
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// Centrality computed on each community's induced subgraph (default).
    PerCommunity,
    /// Centrality computed once on the whole graph.
    Global,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CommunityLabel {
    pub community: usize,
    /// (symbol label, centrality score), best first.
    pub top: Vec<(String, f64)>,
}

const LABEL_TOL: f64 = 1e-12;
const LABEL_MAX_ITER: usize = 100_000;

/// Top-k symbols per community by eigenvector centrality, exact-score ties
/// broken lexicographically.
pub fn community_labels(
    g: &WeightedGraph,
    p: &Partition,
    top_k: usize,
    mode: LabelMode,
) -> Result<Vec<CommunityLabel>> {
    if p.assignment().len() != g.n_nodes() {
        return Err(Error::Graph("partition does not cover the graph".into()));
    }
    let global_scores = match mode {
        LabelMode::Global => Some(eigenvector_centrality(g, LABEL_TOL, LABEL_MAX_ITER)?.scores),
        LabelMode::PerCommunity => None,
    };
    let mut out = Vec::with_capacity(p.n_communities());
    for (community, members) in p.members().into_iter().enumerate() {
        let mut ranked: Vec<(String, f64)> = match &global_scores {
            Some(scores) => members
                .iter()
                .map(|&u| (g.node(u).label.clone(), scores[u]))
                .collect(),
            None => {
                let (sub, back) = g.induced_subgraph(&members);
                let scores = eigenvector_centrality(&sub, LABEL_TOL, LABEL_MAX_ITER)?.scores;
                back.iter()
                    .zip(&scores)
                    .map(|(&orig, &s)| (g.node(orig).label.clone(), s))
                    .collect()
            }
        };
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(top_k);
        out.push(CommunityLabel {
            community,
            top: ranked,
        });
    }
    Ok(out)
}

/// Graph whose nodes are communities: member counts, intra-community weight
/// per node, and inter-community edges summing all cross links.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CommunityGraph {
    pub sizes: Vec<usize>,
    pub internal_weight: Vec<f64>,
    /// (community a, community b, summed weight), a < b, sorted.
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn coarse_grain(g: &WeightedGraph, p: &Partition) -> Result<CommunityGraph> {
    if p.assignment().len() != g.n_nodes() {
        return Err(Error::Graph("partition does not cover the graph".into()));
    }
    let k = p.n_communities();
    let mut sizes = vec![0usize; k];
    for &c in p.assignment() {
        sizes[c] += 1;
    }
    let mut internal_weight = vec![0.0f64; k];
    let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(u, v, w) in g.edges() {
        let (cu, cv) = (p.community_of(u), p.community_of(v));
        if cu == cv {
            internal_weight[cu] += w;
        } else {
            *between.entry((cu.min(cv), cu.max(cv))).or_insert(0.0) += w;
        }
    }
    Ok(CommunityGraph {
        sizes,
        internal_weight,
        edges: between.into_iter().map(|((a, b), w)| (a, b, w)).collect(),
    })
}

// ---------------------------------------------------------------------------
// Partition comparison
// ---------------------------------------------------------------------------

/// Normalized mutual information between two labelings of the same node set
/// (natural log, arithmetic-mean normalization). 1.0 for identical
/// partitions up to relabeling, ~0 for independent ones.
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "nmi: labelings cover {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("nmi of empty labelings".into()));
    }
    let n = a.len() as f64;
    let mut ca: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cb: BTreeMap<usize, f64> = BTreeMap::new();
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_insert(0.0) += 1.0;
        *cb.entry(y).or_insert(0.0) += 1.0;
        *joint.entry((x, y)).or_insert(0.0) += 1.0;
    }
    let entropy = |counts: &BTreeMap<usize, f64>| -> f64 {
        counts.values().map(|&c| -(c / n) * (c / n).ln()).sum()
    };
    let (ha, hb) = (entropy(&ca), entropy(&cb));
    let denom = 0.5 * (ha + hb);
    if denom == 0.0 {
        return Ok(1.0); // both partitions trivial, hence identical
    }
    let mut mi = 0.0;
    for (&(x, y), &c) in &joint {
        let pxy = c / n;
        mi += pxy * (pxy / ((ca[&x] / n) * (cb[&y] / n))).ln();
    }
    Ok((mi / denom).clamp(0.0, 1.0))
}
