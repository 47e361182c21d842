//! Disparity-filter backbone extraction: per-edge significance scores, a
//! fixed-level filter, and the minimal connected backbone.
//!
//! ```bash
//! cargo run -p oneiro --example extract_backbone
//! ```

use std::path::PathBuf;

use oneiro::backbone::{edge_significance, filter_backbone, minimal_backbone};
use oneiro::corpus::{load_corpus, load_stoplist, CorpusFormat};
use oneiro::graph::connected_components;
use oneiro::textproc::{build_similarity_graph, build_tfidf, preprocess, LangProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = load_corpus(&fixtures.join("synth_en.jsonl"), CorpusFormat::Jsonl)?;
    let stops = load_stoplist(&fixtures.join("stops_en.txt"))?;
    let tokens: Vec<_> = corpus
        .docs()
        .iter()
        .map(|d| preprocess(d, &LangProfile::english(), &stops))
        .collect();
    let vectors = build_tfidf(&tokens)?;
    let nodes: Vec<(String, String)> = corpus
        .docs()
        .iter()
        .map(|d| (d.id.clone(), d.symbol.clone()))
        .collect();
    let full = build_similarity_graph(&vectors, &nodes)?.graph;
    println!(
        "full network: {} nodes, {} edges",
        full.n_nodes(),
        full.n_edges()
    );

    // a weight is significant at a node when it is unexpectedly heavy given
    // the node's strength and degree; each edge gets min(both sides)
    let scores = edge_significance(&full);
    let most = scores
        .iter()
        .min_by(|a, b| a.combined().total_cmp(&b.combined()))
        .unwrap();
    println!(
        "most significant edge: {} -- {} (weight {:.3}, score {:.2e})",
        full.node(most.u).label,
        full.node(most.v).label,
        most.weight,
        most.combined()
    );

    for alpha in [0.01, 0.05, 0.2, 1.0] {
        let bb = filter_backbone(&full, alpha)?;
        let comps = connected_components(&bb.graph).len();
        println!(
            "alpha = {alpha:<4}: {} edges kept, {comps} components",
            bb.edges_kept
        );
    }

    // the smallest alpha whose filtering still spans every node
    let minimal = minimal_backbone(&full)?;
    println!(
        "minimal connected backbone: alpha* = {:.4}, {} of {} edges",
        minimal.alpha,
        minimal.edges_kept,
        full.n_edges()
    );
    Ok(())
}
