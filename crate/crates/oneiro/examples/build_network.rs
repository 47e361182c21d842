//! Build a similarity network from a corpus: load, preprocess, vectorize,
//! and connect symbols by the cosine similarity of their interpretations.
//!
//! ```bash
//! cargo run -p oneiro --example build_network
//! ```

use std::path::PathBuf;

use oneiro::corpus::{load_corpus, load_stoplist, CorpusFormat};
use oneiro::textproc::{
    build_similarity_graph, build_tfidf, cosine_similarity, preprocess, LangProfile,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = load_corpus(&fixtures.join("synth_en.jsonl"), CorpusFormat::Jsonl)?;
    let stops = load_stoplist(&fixtures.join("stops_en.txt"))?;
    let profile = LangProfile::english();
    println!("loaded {} documents ({})", corpus.len(), corpus.lang);

    // per-document token multisets, then TF-IDF vectors over the corpus
    let tokens: Vec<_> = corpus
        .docs()
        .iter()
        .map(|d| preprocess(d, &profile, &stops))
        .collect();
    let vectors = build_tfidf(&tokens)?;
    let first = &corpus.docs()[0];
    println!(
        "'{}': {} raw chars -> {} distinct stems, vector norm {:.3}",
        first.symbol,
        first.text.len(),
        tokens[0].distinct(),
        vectors[0].norm()
    );

    // pairwise similarities: same topic vs different topic
    let sim_same = cosine_similarity(&vectors[0], &vectors[1]); // goal vs hill
    let sim_diff = cosine_similarity(&vectors[0], &vectors[20]); // goal vs storm
    println!("cosine(goal, hill)  = {sim_same:.4}   (same planted topic)");
    println!("cosine(goal, storm) = {sim_diff:.4}   (different topic)");

    let nodes: Vec<(String, String)> = corpus
        .docs()
        .iter()
        .map(|d| (d.id.clone(), d.symbol.clone()))
        .collect();
    let sim = build_similarity_graph(&vectors, &nodes)?;
    println!(
        "similarity network: {} nodes, {} weighted edges, {} zero-norm documents",
        sim.graph.n_nodes(),
        sim.graph.n_edges(),
        sim.zero_norm_ids.len()
    );

    let heaviest = sim
        .graph
        .edges()
        .iter()
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .expect("non-empty graph");
    println!(
        "heaviest edge: {} -- {} ({:.4})",
        sim.graph.node(heaviest.0).label,
        sim.graph.node(heaviest.1).label,
        heaviest.2
    );
    Ok(())
}
