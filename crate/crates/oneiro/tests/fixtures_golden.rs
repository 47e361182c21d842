//! Golden checks for the bundled synthetic fixtures: the committed files
//! hash to the values recorded at generation time, and regeneration
//! reproduces them byte for byte.

use std::collections::BTreeMap;
use std::path::PathBuf;

use oneiro::corpus::{load_corpus, validate_corpus, CorpusFormat};
use oneiro::pipeline::sha256_hex;
use oneiro::synth;
use oneiro::textproc::{LangProfile, StopList};

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn golden_hashes() -> BTreeMap<String, String> {
    let text =
        std::fs::read_to_string(manifest_dir().join("tests/fixtures/golden/fixture_hashes.json"))
            .unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn committed_fixtures_match_recorded_hashes() {
    let fixtures = manifest_dir().join("fixtures");
    let golden = golden_hashes();
    assert!(golden.len() >= 13, "golden file covers all fixtures");
    for (name, want) in &golden {
        let bytes =
            std::fs::read(fixtures.join(name)).unwrap_or_else(|_| panic!("missing fixture {name}"));
        let got = sha256_hex(&bytes);
        assert_eq!(&got, want, "fixture {name} diverged from its golden hash");
    }
}

#[test]
fn synthetic_corpus_loads_with_recorded_shape() {
    let fixtures = manifest_dir().join("fixtures");
    let corpus = load_corpus(&fixtures.join("synth_en.jsonl"), CorpusFormat::Jsonl).unwrap();
    assert_eq!(corpus.len(), 60);
    assert_eq!(corpus.lang, "en");

    // the validation report reflects the generator's length envelope
    let stops = oneiro::corpus::load_stoplist(&fixtures.join("stops_en.txt")).unwrap();
    let report = validate_corpus(&corpus, &LangProfile::english(), &stops);
    assert_eq!(report.warnings(), 0);
    assert!(report.length_min >= 12 * 3, "tokens are >= 3 chars each");
    assert!(report.length_median > report.length_min);
    assert!(report.length_max > report.length_median);
}

#[test]
fn regeneration_reproduces_committed_files() {
    let bundle = synth::generate(42).unwrap();
    let dir = tempfile::tempdir().unwrap();
    synth::write_fixtures(&bundle, dir.path()).unwrap();
    let fixtures = manifest_dir().join("fixtures");
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let name = entry.unwrap().file_name();
        let regenerated = std::fs::read(dir.path().join(&name)).unwrap();
        let committed = std::fs::read(fixtures.join(&name)).unwrap();
        assert_eq!(
            regenerated,
            committed,
            "{} drifted from the committed fixture",
            name.to_string_lossy()
        );
    }
}

#[test]
fn translation_fixtures_have_recorded_sizes() {
    let fixtures = manifest_dir().join("fixtures");
    for lang in ["zh", "ar"] {
        let map = oneiro::corpus::load_translation_map(
            &fixtures.join(format!("map_{lang}_en.csv")),
            true,
        )
        .unwrap();
        assert_eq!(map.len(), 50, "{lang}: 50 of 60 symbols mapped");
    }
    let lexicon = oneiro::corpus::load_lexicon(&fixtures.join("lexicon_en.tsv")).unwrap();
    assert_eq!(lexicon.len(), 88); // 3 x 24 topic words + 16 noise words
}

/// Reference-run golden for the English similarity network, reviewed by an
/// independent re-derivation of a similarity sub-block: raw df counting and
/// union-iteration cosines, no shared code with the TfIdfVector path.
#[test]
fn en_graph_matches_reference_run_golden() {
    use oneiro::textproc::{build_similarity_graph, build_tfidf, preprocess, LangProfile, StopList};
    let fixtures = manifest_dir().join("fixtures");
    let corpus = load_corpus(&fixtures.join("synth_en.jsonl"), CorpusFormat::Jsonl).unwrap();
    let stops = oneiro::corpus::load_stoplist(&fixtures.join("stops_en.txt")).unwrap();
    let profile = LangProfile::english();
    let tokens: Vec<_> = corpus
        .docs()
        .iter()
        .map(|d| preprocess(d, &profile, &stops))
        .collect();
    let vectors = build_tfidf(&tokens).unwrap();
    let nodes: Vec<(String, String)> = corpus
        .docs()
        .iter()
        .map(|d| (d.id.clone(), d.symbol.clone()))
        .collect();
    let full = build_similarity_graph(&vectors, &nodes).unwrap().graph;

    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(manifest_dir().join("tests/fixtures/golden/en_graph_golden.json"))
            .unwrap(),
    )
    .unwrap();
    assert_eq!(full.n_nodes() as u64, golden["n_nodes"].as_u64().unwrap());
    assert_eq!(full.n_edges() as u64, golden["n_edges"].as_u64().unwrap());
    let hist = oneiro::graph::weight_distribution(&full, 20);
    let want_counts: Vec<u64> = golden["weight_hist_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(hist.counts, want_counts);
    let want_edges: Vec<f64> = golden["weight_hist_edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(hist.edges, want_edges);
    let bb = oneiro::backbone::minimal_backbone(&full).unwrap();
    assert_eq!(bb.alpha, golden["alpha_star"].as_f64().unwrap());
    assert_eq!(bb.edges_kept as u64, golden["backbone_edges"].as_u64().unwrap());

    // independent sub-block: docs 0..6 pairwise cosines recomputed from raw
    // token counts with document-frequency counting and union iteration
    let n = corpus.len() as f64;
    let mut df: std::collections::HashMap<&str, usize> = Default::default();
    for t in &tokens {
        for token in t.counts().keys() {
            *df.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let naive_weight = |doc: usize, token: &str| -> f64 {
        match tokens[doc].counts().get(token) {
            Some(&c) => c as f64 * (n / df[token] as f64).ln(),
            None => 0.0,
        }
    };
    for i in 0..6 {
        for j in (i + 1)..6 {
            let union: std::collections::BTreeSet<&str> = tokens[i]
                .counts()
                .keys()
                .chain(tokens[j].counts().keys())
                .map(String::as_str)
                .collect();
            let mut dot = 0.0;
            let mut ni = 0.0;
            let mut nj = 0.0;
            for token in union {
                let (wi, wj) = (naive_weight(i, token), naive_weight(j, token));
                dot += wi * wj;
                ni += wi * wi;
                nj += wj * wj;
            }
            let expected = if ni == 0.0 || nj == 0.0 {
                0.0
            } else {
                dot / (ni.sqrt() * nj.sqrt())
            };
            let got = full.edge_weight(i, j).unwrap_or(0.0);
            assert!(
                (got - expected).abs() < 1e-12,
                "sub-block ({i}, {j}): graph {got} vs naive {expected}"
            );
        }
    }
}

#[test]
fn bundled_alignment_reports_planted_collisions() {
    use oneiro::pipeline::{Pipeline, RunConfig, Stage};
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::load(&manifest_dir().join("fixtures/config.json")).unwrap();
    config.out = dir.path().to_path_buf();
    let mut p = Pipeline::new(config, false);
    p.run(Stage::Align).unwrap();

    let exclusions =
        std::fs::read_to_string(dir.path().join("align/zh-en/exclusions.csv")).unwrap();
    // header + the two planted gloss collisions
    assert_eq!(exclusions.lines().count(), 1 + 2, "{exclusions}");
    let pairs = std::fs::read_to_string(dir.path().join("align/zh-en/pairs.csv")).unwrap();
    // 50 mapped symbols minus the 2x2 sources caught in gloss collisions
    assert_eq!(pairs.lines().count(), 1 + 46);
}

#[test]
fn preprocessing_profiles_cover_all_layers() {
    let fixtures = manifest_dir().join("fixtures");
    for lang in synth::LANGS {
        let corpus = load_corpus(
            &fixtures.join(format!("synth_{lang}.jsonl")),
            CorpusFormat::Jsonl,
        )
        .unwrap();
        let stops =
            oneiro::corpus::load_stoplist(&fixtures.join(format!("stops_{lang}.txt"))).unwrap();
        let profile = if lang == "en" {
            LangProfile::english()
        } else {
            LangProfile::presegmented(lang)
        };
        let report = validate_corpus(&corpus, &profile, &stops);
        assert_eq!(
            report.warnings(),
            0,
            "{lang}: no documents empty after preprocessing"
        );
        let no_stops = validate_corpus(&corpus, &profile, &StopList::default());
        assert_eq!(no_stops.n_docs, 60);
    }
}
