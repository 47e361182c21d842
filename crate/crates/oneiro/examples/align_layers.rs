//! Align two language layers through a translation map and measure how
//! strongly node strengths and edge weights correlate across them.
//!
//! ```bash
//! cargo run -p oneiro --example align_layers
//! ```

use std::path::PathBuf;

use oneiro::backbone::minimal_backbone;
use oneiro::corpus::{load_corpus, load_stoplist, load_translation_map, CorpusFormat};
use oneiro::graph::WeightedGraph;
use oneiro::multilayer::{align_layers, cross_layer_report, is_significant};
use oneiro::stats::TestResult;
use oneiro::textproc::{build_similarity_graph, build_tfidf, preprocess, LangProfile};

fn layer(
    fixtures: &std::path::Path,
    lang: &str,
) -> Result<WeightedGraph, Box<dyn std::error::Error>> {
    let corpus = load_corpus(
        &fixtures.join(format!("synth_{lang}.jsonl")),
        CorpusFormat::Jsonl,
    )?;
    let stops = load_stoplist(&fixtures.join(format!("stops_{lang}.txt")))?;
    let profile = if lang == "en" {
        LangProfile::english()
    } else {
        LangProfile::presegmented(lang)
    };
    let tokens: Vec<_> = corpus
        .docs()
        .iter()
        .map(|d| preprocess(d, &profile, &stops))
        .collect();
    let vectors = build_tfidf(&tokens)?;
    let nodes: Vec<(String, String)> = corpus
        .docs()
        .iter()
        .map(|d| (d.id.clone(), d.symbol.clone()))
        .collect();
    Ok(build_similarity_graph(&vectors, &nodes)?.graph)
}

fn cell(t: &TestResult) -> String {
    format!(
        "{:.3}{} (p = {:.2e})",
        t.statistic,
        if is_significant(t) { "*" } else { "" },
        t.p_value
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let zh_full = layer(&fixtures, "zh")?;
    let en_full = layer(&fixtures, "en")?;
    let zh_map = load_translation_map(&fixtures.join("map_zh_en.csv"), true)?;

    let alignment = align_layers(&zh_full, &en_full, Some(&zh_map), None);
    println!(
        "matched {} symbol pairs ({} excluded for gloss collisions, {} zh symbols unmapped)",
        alignment.len(),
        alignment.excluded.len(),
        alignment.unmapped_a
    );
    for &(a, b) in alignment.pairs.iter().take(5) {
        println!("  {} -> {}", zh_full.node(a).label, en_full.node(b).label);
    }

    let zh_bb = minimal_backbone(&zh_full)?.graph;
    let en_bb = minimal_backbone(&en_full)?.graph;
    let report = cross_layer_report(&zh_full, &zh_bb, &en_full, &en_bb, &alignment)?;
    println!("\ncommon nodes: {}", report.n_common_nodes);
    println!(
        "common edges: {} (backbone), {} (full)",
        report.n_common_edges_backbone, report.n_common_edges_full
    );
    println!(
        "node strength r: backbone {}, full {}",
        cell(&report.strength_backbone),
        cell(&report.strength_full)
    );
    println!(
        "edge weight   r: backbone {}, full {}",
        cell(&report.edge_weight_backbone),
        cell(&report.edge_weight_full)
    );
    println!("(* marks p < 0.05)");
    Ok(())
}
