//! Weighted undirected graph core plus structural statistics and
//! plot-ready distributions.
//!
//! Graphs are immutable after [`GraphBuilder::build`]; all reads are pure and
//! safe to run concurrently. Node identity is the symbol id string; the label
//! carries the display headword.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::stats::Histogram;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub id: String,
    pub label: String,
}

/// Undirected weighted graph: no self-loops, no parallel edges, weights > 0.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    nodes: Vec<NodeInfo>,
    /// Sorted neighbor lists, mirrored for both endpoints.
    adj: Vec<Vec<(usize, f64)>>,
    /// Each edge once, u < v, sorted lexicographically.
    edges: Vec<(usize, usize, f64)>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<NodeInfo>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>, label: impl Into<String>) -> Result<usize> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::Graph("empty node id".into()));
        }
        if self.index.contains_key(&id) {
            return Err(Error::Graph(format!("duplicate node id '{id}'")));
        }
        let idx = self.nodes.len();
        self.index.insert(id.clone(), idx);
        self.nodes.push(NodeInfo {
            id,
            label: label.into(),
        });
        Ok(idx)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if u >= self.nodes.len() || v >= self.nodes.len() {
            return Err(Error::Graph(format!(
                "edge ({u}, {v}) references unknown node"
            )));
        }
        if u == v {
            return Err(Error::Graph(format!("self-loop on node {u}")));
        }
        if weight <= 0.0 || !weight.is_finite() {
            return Err(Error::Graph(format!(
                "edge ({u}, {v}) weight {weight} must be finite and > 0"
            )));
        }
        let key = (u.min(v), u.max(v));
        if self.edges.contains_key(&key) {
            return Err(Error::Graph(format!(
                "parallel edge ({}, {})",
                key.0, key.1
            )));
        }
        self.edges.insert(key, weight);
        Ok(())
    }

    pub fn build(self) -> WeightedGraph {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        let mut edges = Vec::with_capacity(self.edges.len());
        for (&(u, v), &w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
            edges.push((u, v, w));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(n, _)| n);
        }
        WeightedGraph {
            nodes: self.nodes,
            adj,
            edges,
            index: self.index,
        }
    }
}

impl WeightedGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, idx: usize) -> &NodeInfo {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Edges once each, (u, v, weight) with u < v, in sorted order.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Weighted degree: sum of incident edge weights.
    pub fn strength(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|&(_, w)| w).sum()
    }

    /// Sum of all edge weights (each edge once).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let (a, b) = (u.min(v), u.max(v));
        self.adj[a]
            .binary_search_by_key(&b, |&(n, _)| n)
            .ok()
            .map(|i| self.adj[a][i].1)
    }

    /// New graph with the same node set and the given subset of edges.
    pub fn edge_subgraph(&self, keep: impl Fn(usize, usize, f64) -> bool) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        for n in &self.nodes {
            b.add_node(n.id.clone(), n.label.clone())
                .expect("nodes were unique");
        }
        for &(u, v, w) in &self.edges {
            if keep(u, v, w) {
                b.add_edge(u, v, w).expect("edges were valid");
            }
        }
        b.build()
    }

    /// Subgraph induced by `members` (indices into this graph). Returns the
    /// subgraph and the mapping from subgraph index to original index.
    pub fn induced_subgraph(&self, members: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut sorted: Vec<usize> = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut b = GraphBuilder::new();
        let mut back = Vec::with_capacity(sorted.len());
        let mut to_sub = HashMap::new();
        for &orig in &sorted {
            let n = &self.nodes[orig];
            let idx = b.add_node(n.id.clone(), n.label.clone()).expect("unique");
            to_sub.insert(orig, idx);
            back.push(orig);
        }
        for &(u, v, w) in &self.edges {
            if let (Some(&su), Some(&sv)) = (to_sub.get(&u), to_sub.get(&v)) {
                b.add_edge(su, sv, w).expect("valid");
            }
        }
        (b.build(), back)
    }
}

/// The seven structural statistics of a network summary table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StatsSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub avg_strength: f64,
    pub clustering_coefficient: f64,
    /// Unweighted hop-count average over unordered pairs, restricted to the
    /// largest connected component.
    pub avg_shortest_path: f64,
    /// Size of the component the path average was computed on; equals
    /// n_nodes when the graph is connected.
    pub largest_component_size: usize,
}

impl StatsSummary {
    /// Statistic names in table order.
    pub const NAMES: [&'static str; 7] = [
        "n_nodes",
        "n_edges",
        "density",
        "avg_degree",
        "avg_strength",
        "clustering_coefficient",
        "avg_shortest_path",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.n_nodes as f64,
            self.n_edges as f64,
            self.density,
            self.avg_degree,
            self.avg_strength,
            self.clustering_coefficient,
            self.avg_shortest_path,
        ]
    }
}

/// Computes the structural summary. Clustering is the mean unweighted local
/// coefficient (nodes of degree < 2 contribute 0); the path average uses
/// unweighted hop counts within the largest connected component.
pub fn graph_stats(g: &WeightedGraph) -> Result<StatsSummary> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::Graph(format!(
            "graph_stats requires >= 2 nodes, got {n}"
        )));
    }
    let e = g.n_edges();
    let density = 2.0 * e as f64 / (n as f64 * (n as f64 - 1.0));
    let avg_degree = 2.0 * e as f64 / n as f64;
    let avg_strength = (0..n).map(|u| g.strength(u)).sum::<f64>() / n as f64;

    let mut clustering_sum = 0.0;
    for u in 0..n {
        let k = g.degree(u);
        if k < 2 {
            continue;
        }
        let mut triangles = 0usize;
        let nbrs = g.neighbors(u);
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                if g.edge_weight(nbrs[i].0, nbrs[j].0).is_some() {
                    triangles += 1;
                }
            }
        }
        clustering_sum += 2.0 * triangles as f64 / (k as f64 * (k as f64 - 1.0));
    }
    let clustering_coefficient = clustering_sum / n as f64;

    let components = connected_components(g);
    let largest = components.iter().max_by_key(|c| c.len()).expect("n >= 2");
    let (hops, pairs) = component_path_totals(g, largest);
    let avg_shortest_path = if pairs == 0 {
        0.0
    } else {
        hops as f64 / pairs as f64
    };

    Ok(StatsSummary {
        n_nodes: n,
        n_edges: e,
        density,
        avg_degree,
        avg_strength,
        clustering_coefficient,
        avg_shortest_path,
        largest_component_size: largest.len(),
    })
}

/// Sum of BFS hop counts over unordered pairs within one component.
fn component_path_totals(g: &WeightedGraph, component: &[usize]) -> (u64, u64) {
    let member: Vec<bool> = {
        let mut m = vec![false; g.n_nodes()];
        for &u in component {
            m[u] = true;
        }
        m
    };
    let totals: Vec<u64> = component
        .par_iter()
        .map(|&src| {
            let mut dist = vec![usize::MAX; g.n_nodes()];
            let mut queue = std::collections::VecDeque::new();
            dist[src] = 0;
            queue.push_back(src);
            let mut sum = 0u64;
            while let Some(u) = queue.pop_front() {
                for &(v, _) in g.neighbors(u) {
                    if member[v] && dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        sum += dist[v] as u64;
                        queue.push_back(v);
                    }
                }
            }
            sum
        })
        .collect();
    let total: u64 = totals.iter().sum();
    let c = component.len() as u64;
    // each unordered pair counted twice across sources
    (total / 2, c * (c - 1) / 2)
}

/// Partition of the node set into maximal connected components, each sorted,
/// ordered by smallest member.
pub fn connected_components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n_nodes();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Exact counts per degree value.
pub fn degree_distribution(g: &WeightedGraph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for u in 0..g.n_nodes() {
        *hist.entry(g.degree(u)).or_insert(0) += 1;
    }
    hist
}

fn binned(values: &[f64], bins: usize) -> Histogram {
    if values.is_empty() {
        return Histogram {
            edges: vec![0.0, 1.0],
            counts: vec![0],
        };
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let edges = if hi > lo {
        Histogram::uniform_edges(lo, hi, bins)
    } else {
        vec![lo, lo + 1.0]
    };
    Histogram::from_values(values, edges).expect("values lie inside computed range")
}

/// Node-strength histogram with `bins` equal-width bins over the data range.
pub fn strength_distribution(g: &WeightedGraph, bins: usize) -> Histogram {
    let strengths: Vec<f64> = (0..g.n_nodes()).map(|u| g.strength(u)).collect();
    binned(&strengths, bins)
}

/// Edge-weight histogram with `bins` equal-width bins over the data range.
pub fn weight_distribution(g: &WeightedGraph, bins: usize) -> Histogram {
    let weights: Vec<f64> = g.edges().iter().map(|&(_, _, w)| w).collect();
    binned(&weights, bins)
}

/// Cumulative distribution of interpretation-text character counts:
/// (length, fraction of docs with length <= that) in ascending order.
pub fn text_length_cdf(corpus: &Corpus) -> Vec<(usize, f64)> {
    let mut lengths: Vec<usize> = corpus
        .docs()
        .iter()
        .map(|d| d.text.chars().count())
        .collect();
    lengths.sort_unstable();
    let n = lengths.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, len) in lengths.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *len => last.1 = frac,
            _ => out.push((*len, frac)),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

/// Writes `id_u \t id_v \t weight` rows in deterministic edge order.
pub fn write_edgelist_tsv(g: &WeightedGraph, path: &Path) -> Result<()> {
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(out, "source\ttarget\tweight").map_err(|e| Error::io(path, e))?;
    for &(u, v, w) in g.edges() {
        writeln!(out, "{}\t{}\t{}", g.node(u).id, g.node(v).id, fmt_weight(w))
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Shortest representation that round-trips the f64 exactly.
pub(crate) fn fmt_weight(w: f64) -> String {
    let mut buf = format!("{w}");
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// GraphML export with node labels and an optional per-node community
/// attribute (`communities[node_index]`).
pub fn write_graphml(g: &WeightedGraph, path: &Path, communities: Option<&[usize]>) -> Result<()> {
    if let Some(c) = communities {
        if c.len() != g.n_nodes() {
            return Err(Error::Graph(format!(
                "community attribute length {} does not match node count {}",
                c.len(),
                g.n_nodes()
            )));
        }
    }
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    let io_err = |e| Error::io(path, e);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).map_err(io_err)?;
    writeln!(
        out,
        r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#
    )
    .map_err(io_err)?;
    writeln!(
        out,
        r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#
    )
    .map_err(io_err)?;
    if communities.is_some() {
        writeln!(
            out,
            r#"  <key id="community" for="node" attr.name="community" attr.type="int"/>"#
        )
        .map_err(io_err)?;
    }
    writeln!(
        out,
        r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#
    )
    .map_err(io_err)?;
    writeln!(out, r#"  <graph edgedefault="undirected">"#).map_err(io_err)?;
    for (idx, node) in g.nodes().iter().enumerate() {
        writeln!(out, r#"    <node id="{}">"#, xml_escape(&node.id)).map_err(io_err)?;
        writeln!(
            out,
            r#"      <data key="label">{}</data>"#,
            xml_escape(&node.label)
        )
        .map_err(io_err)?;
        if let Some(c) = communities {
            writeln!(out, r#"      <data key="community">{}</data>"#, c[idx]).map_err(io_err)?;
        }
        writeln!(out, "    </node>").map_err(io_err)?;
    }
    for &(u, v, w) in g.edges() {
        writeln!(
            out,
            r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
            xml_escape(&g.node(u).id),
            xml_escape(&g.node(v).id),
            fmt_weight(w)
        )
        .map_err(io_err)?;
    }
    writeln!(out, "  </graph>").map_err(io_err)?;
    writeln!(out, "</graphml>").map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Writes a histogram as CSV: bin_lo, bin_hi, count.
pub fn write_histogram_csv(h: &Histogram, path: &Path) -> Result<()> {
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(out, "bin_lo,bin_hi,count").map_err(|e| Error::io(path, e))?;
    for (i, &c) in h.counts.iter().enumerate() {
        writeln!(
            out,
            "{},{},{}",
            fmt_weight(h.edges[i]),
            fmt_weight(h.edges[i + 1]),
            c
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_node(format!("n{i}"), format!("node {i}")).unwrap();
        }
        for &(u, v, w) in edges {
            b.add_edge(u, v, w).unwrap();
        }
        b.build()
    }

    // Independent naive oracle: Floyd-Warshall distances, triple-loop
    // triangle counting, label-propagation components.
    mod oracle {
        use super::WeightedGraph;

        pub fn stats(g: &WeightedGraph) -> (f64, f64, f64, f64, f64, u64, u64) {
            let n = g.n_nodes();
            let e = g.n_edges();
            let density = 2.0 * e as f64 / (n as f64 * (n as f64 - 1.0));
            let avg_degree = 2.0 * e as f64 / n as f64;
            // strength via full matrix scan
            let mut strength_sum = 0.0;
            let mut adj = vec![vec![0.0f64; n]; n];
            for &(u, v, w) in g.edges() {
                adj[u][v] = w;
                adj[v][u] = w;
            }
            for u in 0..n {
                strength_sum += adj[u].iter().sum::<f64>();
            }
            let avg_strength = strength_sum / n as f64;

            let mut clustering_sum = 0.0;
            for u in 0..n {
                let nbrs: Vec<usize> = (0..n).filter(|&v| adj[u][v] > 0.0).collect();
                let k = nbrs.len();
                if k < 2 {
                    continue;
                }
                let mut tri = 0usize;
                for i in 0..k {
                    for j in (i + 1)..k {
                        if adj[nbrs[i]][nbrs[j]] > 0.0 {
                            tri += 1;
                        }
                    }
                }
                clustering_sum += 2.0 * tri as f64 / (k as f64 * (k as f64 - 1.0));
            }
            let clustering = clustering_sum / n as f64;

            // Floyd-Warshall on hop counts
            let inf = usize::MAX / 4;
            let mut dist = vec![vec![inf; n]; n];
            for u in 0..n {
                dist[u][u] = 0;
            }
            for &(u, v, _) in g.edges() {
                dist[u][v] = 1;
                dist[v][u] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let d = dist[i][k] + dist[k][j];
                        if d < dist[i][j] {
                            dist[i][j] = d;
                        }
                    }
                }
            }
            // largest component = largest set of mutually reachable nodes
            let mut comp_of = vec![usize::MAX; n];
            let mut n_comp = 0;
            for u in 0..n {
                if comp_of[u] == usize::MAX {
                    for v in 0..n {
                        if dist[u][v] < inf {
                            comp_of[v] = n_comp;
                        }
                    }
                    n_comp += 1;
                }
            }
            let mut sizes = vec![0usize; n_comp];
            for &c in &comp_of {
                sizes[c] += 1;
            }
            let (largest, _) = sizes.iter().enumerate().max_by_key(|&(_, s)| s).unwrap();
            let mut hops = 0u64;
            let mut pairs = 0u64;
            for i in 0..n {
                for j in (i + 1)..n {
                    if comp_of[i] == largest && comp_of[j] == largest {
                        hops += dist[i][j] as u64;
                        pairs += 1;
                    }
                }
            }
            (
                density,
                avg_degree,
                avg_strength,
                clustering,
                if pairs == 0 {
                    0.0
                } else {
                    hops as f64 / pairs as f64
                },
                hops,
                pairs,
            )
        }

        pub fn components(g: &WeightedGraph) -> Vec<Vec<usize>> {
            // union-find, independent of the BFS implementation
            let n = g.n_nodes();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for &(u, v, _) in g.edges() {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for u in 0..n {
                let r = find(&mut parent, u);
                groups.entry(r).or_default().push(u);
            }
            let mut out: Vec<Vec<usize>> = groups.into_values().collect();
            out.sort_by_key(|c| c[0]);
            out
        }
    }

    #[test]
    fn triangle_stats_closed_form() {
        let g = graph_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        let s = graph_stats(&g).unwrap();
        assert_eq!(s.density, 1.0);
        assert_eq!(s.avg_degree, 2.0);
        assert_eq!(s.clustering_coefficient, 1.0);
        assert_eq!(s.avg_shortest_path, 1.0);
        assert_eq!(s.avg_strength, 2.0);
    }

    #[test]
    fn path_graph_stats_hand_enumerated() {
        let g = graph_from_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        let s = graph_stats(&g).unwrap();
        assert_eq!(s.clustering_coefficient, 0.0);
        assert!((s.avg_shortest_path - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn star_degree_histogram() {
        let g = graph_from_edges(5, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]);
        let h = degree_distribution(&g);
        assert_eq!(h.get(&1), Some(&4));
        assert_eq!(h.get(&4), Some(&1));
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn edgeless_degree_histogram_is_all_zero() {
        let g = graph_from_edges(4, &[]);
        let h = degree_distribution(&g);
        assert_eq!(h.get(&0), Some(&4));
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn components_match_union_find_oracle() {
        let g = graph_from_edges(6, &[(0, 1, 1.0), (2, 3, 1.0)]);
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 4);
        assert_eq!(comps, oracle::components(&g));

        let tri = graph_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert_eq!(connected_components(&tri).len(), 1);
    }

    #[test]
    fn random_graphs_match_naive_oracle_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..25 {
            let n = rng.gen_range(2..=50);
            let p = rng.gen_range(0.02..0.4);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v, rng.gen_range(0.01..1.0)));
                    }
                }
            }
            let g = graph_from_edges(n, &edges);
            let s = graph_stats(&g).unwrap();
            let (density, avg_degree, avg_strength, clustering, avg_path, _, _) = oracle::stats(&g);
            assert_eq!(s.density, density, "trial {trial}");
            assert_eq!(s.avg_degree, avg_degree, "trial {trial}");
            assert!(
                (s.avg_strength - avg_strength).abs() < 1e-12,
                "trial {trial}"
            );
            assert_eq!(s.clustering_coefficient, clustering, "trial {trial}");
            assert_eq!(s.avg_shortest_path, avg_path, "trial {trial}");
            assert_eq!(
                connected_components(&g),
                oracle::components(&g),
                "trial {trial}"
            );

            // degree/strength sums
            let deg_sum: usize = (0..n).map(|u| g.degree(u)).sum();
            assert_eq!(deg_sum, 2 * g.n_edges());
            let strength_sum: f64 = (0..n).map(|u| g.strength(u)).sum();
            assert!((strength_sum - 2.0 * g.total_weight()).abs() < 1e-9);

            // path average is >= 1 whenever the largest component has an edge,
            // exactly 1 iff that component is complete
            if s.largest_component_size >= 2 {
                assert!(s.avg_shortest_path >= 1.0);
                let comp = connected_components(&g)
                    .into_iter()
                    .max_by_key(|c| c.len())
                    .unwrap();
                let complete = comp
                    .iter()
                    .enumerate()
                    .all(|(i, &u)| comp[i + 1..].iter().all(|&v| g.edge_weight(u, v).is_some()));
                assert_eq!(s.avg_shortest_path == 1.0, complete, "trial {trial}");
            }
            assert!((0.0..=1.0).contains(&s.clustering_coefficient));
        }
    }

    #[test]
    fn builder_rejects_invalid_edges() {
        let mut b = GraphBuilder::new();
        b.add_node("a", "a").unwrap();
        b.add_node("b", "b").unwrap();
        assert!(b.add_edge(0, 0, 1.0).is_err()); // self-loop
        assert!(b.add_edge(0, 2, 1.0).is_err()); // unknown node
        assert!(b.add_edge(0, 1, 0.0).is_err()); // non-positive weight
        assert!(b.add_edge(0, 1, -2.0).is_err());
        b.add_edge(0, 1, 0.5).unwrap();
        assert!(b.add_edge(1, 0, 0.7).is_err()); // parallel
        assert!(b.add_node("a", "again").is_err()); // duplicate id
    }

    #[test]
    fn text_length_cdf_steps() {
        use crate::corpus::{load_corpus, CorpusFormat};
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(
            f.path(),
            "{\"id\":\"1\",\"symbol\":\"a\",\"lang\":\"en\",\"text\":\"x\"}\n{\"id\":\"2\",\"symbol\":\"b\",\"lang\":\"en\",\"text\":\"xy\"}\n{\"id\":\"3\",\"symbol\":\"c\",\"lang\":\"en\",\"text\":\"xyz\"}\n",
        )
        .unwrap();
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        let cdf = text_length_cdf(&c);
        assert_eq!(cdf, vec![(1, 1.0 / 3.0), (2, 2.0 / 3.0), (3, 1.0)]);

        // all equal lengths: single step at that length
        std::fs::write(
            f.path(),
            "{\"id\":\"1\",\"symbol\":\"a\",\"lang\":\"en\",\"text\":\"aaaaaaaaaa\"}\n{\"id\":\"2\",\"symbol\":\"b\",\"lang\":\"en\",\"text\":\"bbbbbbbbbb\"}\n",
        )
        .unwrap();
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(text_length_cdf(&c), vec![(10, 1.0)]);
    }

    #[test]
    fn subgraph_operations_preserve_weights() {
        let g = graph_from_edges(4, &[(0, 1, 0.9), (1, 2, 0.5), (2, 3, 0.2), (0, 3, 0.4)]);
        let bb = g.edge_subgraph(|_, _, w| w >= 0.4);
        assert_eq!(bb.n_nodes(), 4);
        assert_eq!(bb.n_edges(), 3);
        assert_eq!(bb.edge_weight(0, 1), Some(0.9));
        assert_eq!(bb.edge_weight(2, 3), None);

        let (sub, back) = g.induced_subgraph(&[1, 2, 3]);
        assert_eq!(sub.n_nodes(), 3);
        assert_eq!(sub.n_edges(), 2);
        assert_eq!(back, vec![1, 2, 3]);
        assert_eq!(sub.edge_weight(0, 1), Some(0.5)); // (1,2) in original
    }

    #[test]
    fn exports_are_deterministic_and_well_formed() {
        let g = graph_from_edges(3, &[(0, 1, 0.25), (1, 2, 0.125)]);
        let dir = tempfile::tempdir().unwrap();
        let el = dir.path().join("edges.tsv");
        write_edgelist_tsv(&g, &el).unwrap();
        let content = std::fs::read_to_string(&el).unwrap();
        assert_eq!(
            content,
            "source\ttarget\tweight\nn0\tn1\t0.25\nn1\tn2\t0.125\n"
        );

        let gm = dir.path().join("g.graphml");
        write_graphml(&g, &gm, Some(&[0, 0, 1])).unwrap();
        let xml = std::fs::read_to_string(&gm).unwrap();
        assert!(xml.contains(r#"<node id="n0">"#));
        assert!(xml.contains(r#"<data key="community">1</data>"#));
        assert!(
            xml.contains(r#"<edge source="n0" target="n1"><data key="weight">0.25</data></edge>"#)
        );
        let again = dir.path().join("g2.graphml");
        write_graphml(&g, &again, Some(&[0, 0, 1])).unwrap();
        assert_eq!(std::fs::read(&gm).unwrap(), std::fs::read(&again).unwrap());
    }
}
