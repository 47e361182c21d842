//! Structural statistics and plot-ready distributions of a similarity
//! network and its backbone.
//!
//! ```bash
//! cargo run -p oneiro --example network_stats
//! ```

use std::path::PathBuf;

use oneiro::backbone::minimal_backbone;
use oneiro::corpus::{load_corpus, load_stoplist, CorpusFormat};
use oneiro::graph::{
    degree_distribution, graph_stats, text_length_cdf, weight_distribution, StatsSummary,
};
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
    let backbone = minimal_backbone(&full)?.graph;

    println!("{:<24} {:>12} {:>12}", "statistic", "full", "backbone");
    let fs = graph_stats(&full)?;
    let bs = graph_stats(&backbone)?;
    for (i, name) in StatsSummary::NAMES.iter().enumerate() {
        println!(
            "{:<24} {:>12.4} {:>12.4}",
            name,
            fs.values()[i],
            bs.values()[i]
        );
    }

    let degrees = degree_distribution(&backbone);
    let (lo, hi) = (
        degrees.keys().next().copied().unwrap_or(0),
        degrees.keys().last().copied().unwrap_or(0),
    );
    println!("\nbackbone degrees span {lo}..{hi}:");
    for (d, c) in &degrees {
        println!("  degree {d:>3}: {}", "#".repeat(*c));
    }

    let weights = weight_distribution(&backbone, 10);
    println!("\nbackbone edge weights:");
    for (i, count) in weights.counts.iter().enumerate() {
        println!(
            "  [{:.3}, {:.3}): {count}",
            weights.edges[i],
            weights.edges[i + 1]
        );
    }

    let cdf = text_length_cdf(&corpus);
    println!("\ninterpretation length CDF (chars):");
    for q in [0.25, 0.5, 0.75, 1.0] {
        let (len, _) = cdf.iter().find(|&&(_, f)| f >= q).unwrap();
        println!("  {:>3.0}% of texts are <= {len} chars", q * 100.0);
    }
    Ok(())
}
