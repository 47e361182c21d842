//! Cross-language layer alignment and structural correlation.
//!
//! Nodes of two networks are matched on equal case-folded glosses: a layer
//! with a translation map contributes the mapped gloss of each symbol, an
//! English-style layer contributes its own symbols. Glosses carried by more
//! than one node on either side are excluded and reported rather than
//! matched arbitrarily. On the matched pairs the module computes the node
//! strength Pearson correlation and the edge-weight correlation
//!
//! r(A,B) = sum_{ij in S_A ∩ S_B} (e_ij^A - mean_A)(e_ij^B - mean_B)
//!          / sqrt(sum_{S_A} (e^A - mean_A)^2) sqrt(sum_{S_B} (e^B - mean_B)^2)
//!
//! where S_A is the set of edges among common nodes present in A and mean_A
//! is the average weight over S_A (likewise B).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{fold, TranslationMap};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::stats::{self, Method, TestResult};

/// Matched node pairs between two layers plus the symbols excluded because
/// their gloss was ambiguous.
#[derive(Debug, Clone)]
pub struct LayerAlignment {
    /// (node index in A, node index in B), ordered by gloss.
    pub pairs: Vec<(usize, usize)>,
    pub excluded: Vec<GlossCollision>,
    /// Symbols with no gloss (no translation entry), per layer.
    pub unmapped_a: usize,
    pub unmapped_b: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlossCollision {
    pub gloss: String,
    pub symbols_a: Vec<String>,
    pub symbols_b: Vec<String>,
}

fn glosses(g: &WeightedGraph, map: Option<&TranslationMap>) -> BTreeMap<String, Vec<usize>> {
    let mut out: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (idx, node) in g.nodes().iter().enumerate() {
        let gloss = match map {
            Some(m) => match m.lookup(&node.label) {
                Some(gl) => gl.to_string(),
                None => continue,
            },
            None => fold(&node.label),
        };
        out.entry(gloss).or_default().push(idx);
    }
    out
}

/// Matches nodes of two layers on equal case-folded glosses. A layer without
/// a translation map matches on its own symbols.
pub fn align_layers(
    ga: &WeightedGraph,
    gb: &WeightedGraph,
    map_a: Option<&TranslationMap>,
    map_b: Option<&TranslationMap>,
) -> LayerAlignment {
    let ga_gloss = glosses(ga, map_a);
    let gb_gloss = glosses(gb, map_b);
    let mapped_a: usize = ga_gloss.values().map(Vec::len).sum();
    let mapped_b: usize = gb_gloss.values().map(Vec::len).sum();

    let mut pairs = Vec::new();
    let mut excluded = Vec::new();
    for (gloss, a_nodes) in &ga_gloss {
        let Some(b_nodes) = gb_gloss.get(gloss) else {
            continue;
        };
        if a_nodes.len() == 1 && b_nodes.len() == 1 {
            pairs.push((a_nodes[0], b_nodes[0]));
        } else {
            excluded.push(GlossCollision {
                gloss: gloss.clone(),
                symbols_a: a_nodes.iter().map(|&i| ga.node(i).label.clone()).collect(),
                symbols_b: b_nodes.iter().map(|&i| gb.node(i).label.clone()).collect(),
            });
        }
    }
    let alignment = LayerAlignment {
        pairs,
        excluded,
        unmapped_a: ga.n_nodes() - mapped_a,
        unmapped_b: gb.n_nodes() - mapped_b,
    };
    alignment.assert_injective();
    alignment
}

impl LayerAlignment {
    /// Invariant check: each node participates in at most one pair.
    fn assert_injective(&self) {
        let mut seen_a = std::collections::HashSet::new();
        let mut seen_b = std::collections::HashSet::new();
        for &(a, b) in &self.pairs {
            assert!(seen_a.insert(a), "node {a} of layer A matched twice");
            assert!(seen_b.insert(b), "node {b} of layer B matched twice");
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Pearson correlation of node strengths over the aligned pairs.
pub fn strength_correlation(
    ga: &WeightedGraph,
    gb: &WeightedGraph,
    al: &LayerAlignment,
) -> Result<TestResult> {
    if al.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "strength correlation needs >= 3 aligned pairs, got {}",
            al.len()
        )));
    }
    let xs: Vec<f64> = al.pairs.iter().map(|&(a, _)| ga.strength(a)).collect();
    let ys: Vec<f64> = al.pairs.iter().map(|&(_, b)| gb.strength(b)).collect();
    stats::pearson(&xs, &ys)
}

/// Edges among common nodes present in one layer, keyed by the pair index of
/// both endpoints, with their weights.
fn common_edges(
    g: &WeightedGraph,
    node_to_pair: &BTreeMap<usize, usize>,
) -> BTreeMap<(usize, usize), f64> {
    let mut out = BTreeMap::new();
    for &(u, v, w) in g.edges() {
        if let (Some(&pu), Some(&pv)) = (node_to_pair.get(&u), node_to_pair.get(&v)) {
            out.insert((pu.min(pv), pu.max(pv)), w);
        }
    }
    out
}

/// Edge-weight correlation per the cross-layer formula: centered products
/// summed over the edge intersection, each denominator over that layer's own
/// common-edge set. The p-value is a t-approximation with the intersection
/// size as effective sample size, flagged as approximate.
pub fn edge_weight_correlation(
    ga: &WeightedGraph,
    gb: &WeightedGraph,
    al: &LayerAlignment,
) -> Result<TestResult> {
    let a_to_pair: BTreeMap<usize, usize> = al
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &(a, _))| (a, p))
        .collect();
    let b_to_pair: BTreeMap<usize, usize> = al
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &(_, b))| (b, p))
        .collect();
    let sa = common_edges(ga, &a_to_pair);
    let sb = common_edges(gb, &b_to_pair);
    if sa.is_empty() || sb.is_empty() {
        return Err(Error::InvalidInput(format!(
            "edge-weight correlation needs common-node edges in both layers (got {} and {})",
            sa.len(),
            sb.len()
        )));
    }
    let mean_a: f64 = sa.values().sum::<f64>() / sa.len() as f64;
    let mean_b: f64 = sb.values().sum::<f64>() / sb.len() as f64;
    let var_a: f64 = sa.values().map(|w| (w - mean_a) * (w - mean_a)).sum();
    let var_b: f64 = sb.values().map(|w| (w - mean_b) * (w - mean_b)).sum();
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::InvalidInput(
            "edge-weight correlation undefined: zero variance in a layer's common edges".into(),
        ));
    }
    let mut numerator = 0.0;
    let mut n_common = 0usize;
    for (key, wa) in &sa {
        if let Some(wb) = sb.get(key) {
            numerator += (wa - mean_a) * (wb - mean_b);
            n_common += 1;
        }
    }
    let r = (numerator / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0);

    // t-approximation using the intersection as sample size
    let (p, note) = if n_common < 3 {
        (
            1.0,
            "approximate p-value: fewer than 3 common edges, p = 1 by convention".to_string(),
        )
    } else {
        let df = (n_common - 2) as f64;
        let p = if 1.0 - r * r <= 0.0 {
            0.0
        } else {
            let t = r * (df / (1.0 - r * r)).sqrt();
            (2.0 * stats::t_sf(t.abs(), df)?).min(1.0)
        };
        (
            p,
            format!("approximate p-value: t-approximation over {n_common} common edges"),
        )
    };
    Ok(TestResult {
        statistic: r,
        p_value: p,
        df: n_common.saturating_sub(2) as f64,
        method: Method::Pearson,
        note: Some(note),
    })
}

/// Number of edges among common nodes present in both layers.
pub fn common_edge_count(ga: &WeightedGraph, gb: &WeightedGraph, al: &LayerAlignment) -> usize {
    let a_to_pair: BTreeMap<usize, usize> = al
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &(a, _))| (a, p))
        .collect();
    let b_to_pair: BTreeMap<usize, usize> = al
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &(_, b))| (b, p))
        .collect();
    let sa = common_edges(ga, &a_to_pair);
    let sb = common_edges(gb, &b_to_pair);
    sa.keys().filter(|k| sb.contains_key(k)).count()
}

/// All cells of a cross-layer comparison: counts plus the four correlations
/// (2 metrics x {backbone, full}), with p < 0.05 significance marks.
#[derive(Debug, Clone, Serialize)]
pub struct CrossLayerReport {
    pub n_common_nodes: usize,
    pub n_common_edges_backbone: usize,
    pub n_common_edges_full: usize,
    pub strength_backbone: TestResult,
    pub strength_full: TestResult,
    pub edge_weight_backbone: TestResult,
    pub edge_weight_full: TestResult,
}

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

pub fn is_significant(t: &TestResult) -> bool {
    t.p_value < SIGNIFICANCE_LEVEL
}

/// Computes every report cell. The alignment must come from the full layer
/// pair; backbones share the node sets (and hence indices) of their full
/// graphs.
pub fn cross_layer_report(
    ga_full: &WeightedGraph,
    ga_backbone: &WeightedGraph,
    gb_full: &WeightedGraph,
    gb_backbone: &WeightedGraph,
    al: &LayerAlignment,
) -> Result<CrossLayerReport> {
    for (full, bb) in [(ga_full, ga_backbone), (gb_full, gb_backbone)] {
        if full.n_nodes() != bb.n_nodes() {
            return Err(Error::Graph(
                "backbone node set must match its full graph for cross-layer comparison".into(),
            ));
        }
    }
    Ok(CrossLayerReport {
        n_common_nodes: al.len(),
        n_common_edges_backbone: common_edge_count(ga_backbone, gb_backbone, al),
        n_common_edges_full: common_edge_count(ga_full, gb_full, al),
        strength_backbone: strength_correlation(ga_backbone, gb_backbone, al)?,
        strength_full: strength_correlation(ga_full, gb_full, al)?,
        edge_weight_backbone: edge_weight_correlation(ga_backbone, gb_backbone, al)?,
        edge_weight_full: edge_weight_correlation(ga_full, gb_full, al)?,
    })
}
