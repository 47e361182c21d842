//! Sentiment analysis over communities: happiness scores per symbol,
//! community-level score samples, pairwise similarity (Welch p-values),
//! hierarchical clustering, and a Kruskal-Wallis validation of the clusters.
//!
//! ```bash
//! cargo run -p oneiro --example sentiment_clusters
//! ```

use std::path::PathBuf;

use oneiro::backbone::minimal_backbone;
use oneiro::community::best_of_n;
use oneiro::corpus::{load_corpus, load_lexicon, load_stoplist, CorpusFormat};
use oneiro::sentiment::{
    cluster_communities, community_sentiment, community_similarity_matrix, kruskal_wallis,
    score_corpus, Cut, Linkage, SimilarityMethod,
};
use oneiro::textproc::{build_similarity_graph, build_tfidf, preprocess, LangProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = load_corpus(&fixtures.join("synth_en.jsonl"), CorpusFormat::Jsonl)?;
    let stops = load_stoplist(&fixtures.join("stops_en.txt"))?;
    let lexicon = load_lexicon(&fixtures.join("lexicon_en.tsv"))?;

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
    let partition = best_of_n(&backbone, 100, 42)?;

    // symbol happiness: mean lexicon score over the raw (unstemmed) tokens
    let happiness = score_corpus(&corpus, &lexicon);
    println!("scored {} of {} symbols", happiness.len(), corpus.len());
    let mut extremes: Vec<(&str, f64)> = happiness.iter().map(|(id, s)| (id, s.score)).collect();
    extremes.sort_by(|a, b| a.1.total_cmp(&b.1));
    let label = |id: &str| corpus.get(id).map(|d| d.symbol.clone()).unwrap_or_default();
    println!(
        "gloomiest: {} ({:.2}); happiest: {} ({:.2})",
        label(extremes[0].0),
        extremes[0].1,
        label(extremes.last().unwrap().0),
        extremes.last().unwrap().1
    );

    let cs = community_sentiment(&backbone, &partition, &happiness)?;
    for (c, mean) in cs.means.iter().enumerate() {
        if let Some(m) = mean {
            println!(
                "community {c}: {} scored symbols, mean happiness {m:.2}",
                cs.samples[c].len()
            );
        }
    }

    let matrix = community_similarity_matrix(&cs, SimilarityMethod::TTestP)?;
    println!("\npairwise Welch p-values (diagonal = community means):");
    for (i, row) in matrix.entries.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
        println!("  c{}: [{}]", matrix.communities[i], cells.join(", "));
    }

    let clustering = cluster_communities(&matrix, Linkage::Average, Cut::K(3))?;
    println!("\nflat clusters at k = 3:");
    for (row, &community) in clustering.communities.iter().enumerate() {
        println!(
            "  community {community} -> cluster {}",
            clustering.flat[row]
        );
    }

    let n_clusters = clustering.flat.iter().max().unwrap() + 1;
    let mut groups = vec![Vec::new(); n_clusters];
    for (row, &community) in clustering.communities.iter().enumerate() {
        groups[clustering.flat[row]].extend(cs.samples[community].iter().copied());
    }
    let kw = kruskal_wallis(&groups)?;
    println!(
        "\nKruskal-Wallis over the clusters: H = {:.2}, p = {:.2e}",
        kw.statistic, kw.p_value
    );
    Ok(())
}
