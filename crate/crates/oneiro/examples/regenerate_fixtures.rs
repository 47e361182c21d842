//! Regenerates the bundled synthetic trilingual fixture under `fixtures/`
//! (corpora, translation maps, lexicon, stop lists, planted groups, pinned
//! pipeline config) and records their content hashes in the golden file used
//! by the test suite.
//!
//! ```bash
//! cargo run -p oneiro --example regenerate_fixtures
//! ```
//!
//! Generation is a pure function of the seed, so re-running this never
//! changes committed files unless the generator itself changed.

use std::collections::BTreeMap;
use std::path::PathBuf;

const SEED: u64 = 42;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let fixtures = root.join("fixtures");
    let bundle = oneiro::synth::generate(SEED)?;
    oneiro::synth::write_fixtures(&bundle, &fixtures)?;

    let config = serde_json::json!({
        "layers": [
            {
                "lang": "en",
                "corpus": "synth_en.jsonl",
                "format": "jsonl",
                "profile": ["lowercase", "strip_punctuation", "whitespace_tokenize", "stop_filter", "porter_stem"],
                "stops": "stops_en.txt",
                "reference_partition": "planted_en.csv"
            },
            {
                "lang": "zh",
                "corpus": "synth_zh.jsonl",
                "format": "jsonl",
                "profile": ["lowercase", "strip_punctuation", "whitespace_tokenize", "stop_filter"],
                "stops": "stops_zh.txt",
                "translation_map": "map_zh_en.csv",
                "reference_partition": "planted_zh.csv"
            },
            {
                "lang": "ar",
                "corpus": "synth_ar.jsonl",
                "format": "jsonl",
                "profile": ["lowercase", "strip_punctuation", "whitespace_tokenize", "stop_filter"],
                "stops": "stops_ar.txt",
                "translation_map": "map_ar_en.csv",
                "reference_partition": "planted_ar.csv"
            }
        ],
        "alpha": "auto",
        "louvain": { "restarts": 100, "base_seed": 42 },
        "top_k": 5,
        "align": [["zh", "en"], ["ar", "en"], ["ar", "zh"]],
        "sentiment": {
            "layer": "en",
            "lexicon": "lexicon_en.tsv",
            "method": "t_test_p",
            "linkage": "average",
            "cut": { "k": 3 }
        },
        "out": "out",
        "histogram_bins": 20
    });
    std::fs::write(
        fixtures.join("config.json"),
        serde_json::to_string_pretty(&config)? + "\n",
    )?;

    // golden hashes for the fixture files
    let mut hashes: BTreeMap<String, String> = BTreeMap::new();
    let mut names: Vec<String> = std::fs::read_dir(&fixtures)?
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    names.sort();
    for name in names {
        let bytes = std::fs::read(fixtures.join(&name))?;
        hashes.insert(name, oneiro::pipeline::sha256_hex(&bytes));
    }
    let golden = root.join("tests/fixtures/golden");
    std::fs::create_dir_all(&golden)?;
    std::fs::write(
        golden.join("fixture_hashes.json"),
        serde_json::to_string_pretty(&hashes)? + "\n",
    )?;

    // reference-run golden for the English similarity graph: edge count,
    // weight histogram, minimal-backbone level. The test suite re-derives a
    // similarity sub-block independently to review these numbers.
    {
        use oneiro::textproc::{build_similarity_graph, build_tfidf, preprocess, LangProfile};
        let corpus = &bundle.corpora["en"];
        let stops = oneiro::textproc::StopList::from_words(bundle.stops["en"].iter().cloned());
        let profile = LangProfile::english();
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
        let full = build_similarity_graph(&vectors, &nodes)?.graph;
        let hist = oneiro::graph::weight_distribution(&full, 20);
        let backbone = oneiro::backbone::minimal_backbone(&full)?;
        let graph_golden = serde_json::json!({
            "n_nodes": full.n_nodes(),
            "n_edges": full.n_edges(),
            "weight_hist_edges": hist.edges,
            "weight_hist_counts": hist.counts,
            "alpha_star": backbone.alpha,
            "backbone_edges": backbone.edges_kept,
        });
        std::fs::write(
            golden.join("en_graph_golden.json"),
            serde_json::to_string_pretty(&graph_golden)? + "\n",
        )?;
    }

    for lang in oneiro::synth::LANGS {
        println!(
            "{lang}: {} docs, map {:?} entries",
            bundle.corpora[lang].len(),
            bundle.maps.get(lang).map(|m| m.len())
        );
    }
    println!("fixtures written to {}", fixtures.display());
    Ok(())
}
