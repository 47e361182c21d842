//! Per-language preprocessing and TF-IDF vector space construction.
//!
//! A [`LangProfile`] is an ordered list of steps; English typically runs
//! lowercase, strip punctuation, tokenize, stop-filter, Porter stem.
//! Languages that need external segmentation or stemming (pre-segmented
//! Chinese, pre-stemmed Arabic) use the same machinery minus the stem step.
//! TF-IDF uses raw-count tf times ln(N / df) with no smoothing; document
//! similarity is the cosine over the shared token support.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::SymbolDoc;
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

mod porter;
pub use porter::porter_stem;

/// One preprocessing step. String-level steps may appear before
/// tokenization; token-level steps (stemming, stop filtering, length
/// filtering) only after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Lowercase,
    StripPunctuation,
    WhitespaceTokenize,
    PorterStem,
    StopFilter,
    MinTokenLen(usize),
}

/// Ordered preprocessing recipe for one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangProfile {
    pub lang: String,
    steps: Vec<Step>,
}

impl LangProfile {
    /// Validates the step order: exactly one tokenize step, and every
    /// token-level step after it.
    pub fn new(lang: impl Into<String>, steps: Vec<Step>) -> Result<LangProfile> {
        let tokenize_positions: Vec<usize> = steps
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Step::WhitespaceTokenize)
            .map(|(i, _)| i)
            .collect();
        if tokenize_positions.len() != 1 {
            return Err(Error::Config(format!(
                "profile must contain whitespace_tokenize exactly once, found {}",
                tokenize_positions.len()
            )));
        }
        let tok_at = tokenize_positions[0];
        for (i, step) in steps.iter().enumerate() {
            let token_level = matches!(
                step,
                Step::PorterStem | Step::StopFilter | Step::MinTokenLen(_)
            );
            if token_level && i < tok_at {
                return Err(Error::Config(format!(
                    "step {step:?} requires tokens and must come after whitespace_tokenize"
                )));
            }
        }
        Ok(LangProfile {
            lang: lang.into(),
            steps,
        })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// English default: lowercase, strip punctuation, tokenize, stop-filter,
    /// Porter stem. Stop words are filtered before stemming because stop
    /// lists contain surface forms.
    pub fn english() -> LangProfile {
        LangProfile::new(
            "en",
            vec![
                Step::Lowercase,
                Step::StripPunctuation,
                Step::WhitespaceTokenize,
                Step::StopFilter,
                Step::PorterStem,
            ],
        )
        .expect("static profile is valid")
    }

    /// Profile for languages arriving pre-segmented / pre-stemmed: lowercase,
    /// strip punctuation, tokenize, stop-filter.
    pub fn presegmented(lang: impl Into<String>) -> LangProfile {
        LangProfile::new(
            lang,
            vec![
                Step::Lowercase,
                Step::StripPunctuation,
                Step::WhitespaceTokenize,
                Step::StopFilter,
            ],
        )
        .expect("static profile is valid")
    }
}

/// Case-folded stop words.
#[derive(Debug, Clone, Default)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    pub fn from_words<I: IntoIterator<Item = String>>(words: I) -> StopList {
        StopList {
            words: words.into_iter().filter(|w| !w.is_empty()).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Multiset of normalized tokens for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDoc {
    pub id: String,
    counts: BTreeMap<String, u32>,
}

impl TokenDoc {
    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.counts
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Total token occurrences.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

fn strip_punctuation(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect()
}

/// Applies the profile steps in order. Deterministic; an empty result is
/// allowed and flagged downstream.
pub fn preprocess(doc: &SymbolDoc, profile: &LangProfile, stops: &StopList) -> TokenDoc {
    debug_assert_eq!(
        doc.lang, profile.lang,
        "profile language must match document"
    );
    enum State {
        Text(String),
        Tokens(Vec<String>),
    }
    let mut state = State::Text(doc.text.clone());
    for step in profile.steps() {
        state = match (state, step) {
            (State::Text(t), Step::Lowercase) => State::Text(t.to_lowercase()),
            (State::Text(t), Step::StripPunctuation) => State::Text(strip_punctuation(&t)),
            (State::Text(t), Step::WhitespaceTokenize) => {
                State::Tokens(t.split_whitespace().map(str::to_string).collect())
            }
            (State::Tokens(ts), Step::Lowercase) => {
                State::Tokens(ts.into_iter().map(|t| t.to_lowercase()).collect())
            }
            (State::Tokens(ts), Step::StripPunctuation) => State::Tokens(
                ts.into_iter()
                    .map(|t| {
                        strip_punctuation(&t)
                            .split_whitespace()
                            .collect::<Vec<_>>()
                            .join("")
                    })
                    .filter(|t| !t.is_empty())
                    .collect(),
            ),
            (State::Tokens(ts), Step::PorterStem) => {
                State::Tokens(ts.into_iter().map(|t| porter_stem(&t)).collect())
            }
            (State::Tokens(ts), Step::StopFilter) => {
                State::Tokens(ts.into_iter().filter(|t| !stops.contains(t)).collect())
            }
            (State::Tokens(ts), Step::MinTokenLen(n)) => {
                State::Tokens(ts.into_iter().filter(|t| t.chars().count() >= *n).collect())
            }
            (state @ State::Tokens(_), Step::WhitespaceTokenize) => state,
            (state @ State::Text(_), _) => state, // token-level step before tokenize: rejected at construction
        };
    }
    let tokens = match state {
        State::Tokens(ts) => ts,
        State::Text(t) => t.split_whitespace().map(str::to_string).collect(),
    };
    let mut counts = BTreeMap::new();
    for t in tokens {
        if !t.is_empty() {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    TokenDoc {
        id: doc.id.clone(),
        counts,
    }
}

/// Sparse TF-IDF vector with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfVector {
    weights: BTreeMap<String, f64>,
    norm: f64,
}

impl TfIdfVector {
    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// True when every weight is zero (e.g. all tokens appear in all docs).
    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }
}

/// Builds TF-IDF vectors: weight = raw count * ln(N / df). Tokens occurring
/// in every document get weight 0; tokens absent from a document get no
/// entry.
pub fn build_tfidf(docs: &[TokenDoc]) -> Result<Vec<TfIdfVector>> {
    let n = docs.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "tf-idf requires at least 2 documents, got {n}"
        )));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        for token in doc.counts().keys() {
            *df.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let n_f = n as f64;
    Ok(docs
        .iter()
        .map(|doc| {
            let mut weights = BTreeMap::new();
            let mut norm_sq = 0.0;
            for (token, &count) in doc.counts() {
                let idf = (n_f / df[token.as_str()] as f64).ln();
                let w = count as f64 * idf;
                norm_sq += w * w;
                weights.insert(token.clone(), w);
            }
            TfIdfVector {
                weights,
                norm: norm_sq.sqrt(),
            }
        })
        .collect())
}

/// Cosine similarity over the shared token support, in [0, 1]. A vector with
/// zero norm is defined to have similarity 0 with everything (the formula is
/// undefined there); callers flag such documents separately.
pub fn cosine_similarity(a: &TfIdfVector, b: &TfIdfVector) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    let (small, big) = if a.weights.len() <= b.weights.len() {
        (a, b)
    } else {
        (b, a)
    };
    let mut dot = 0.0;
    for (token, &wa) in &small.weights {
        if wa == 0.0 {
            continue;
        }
        if let Some(&wb) = big.weights.get(token) {
            dot += wa * wb;
        }
    }
    (dot / (a.norm * b.norm)).min(1.0)
}

/// Similarity graph over all document pairs plus the ids of documents whose
/// vectors were all-zero (flagged, not fatal).
pub struct SimilarityGraph {
    pub graph: WeightedGraph,
    pub zero_norm_ids: Vec<String>,
}

/// Assembles the fully connected similarity network: one node per symbol,
/// an edge wherever the cosine similarity is positive. `nodes` supplies
/// (id, label) pairs aligned with `vectors`.
pub fn build_similarity_graph(
    vectors: &[TfIdfVector],
    nodes: &[(String, String)],
) -> Result<SimilarityGraph> {
    if vectors.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "similarity graph requires >= 2 vectors, got {}",
            vectors.len()
        )));
    }
    if vectors.len() != nodes.len() {
        return Err(Error::InvalidInput(format!(
            "{} vectors but {} node entries",
            vectors.len(),
            nodes.len()
        )));
    }
    let n = vectors.len();
    // pure pairwise map, parallel over rows; row order keeps the result
    // deterministic
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in (i + 1)..n {
                let s = cosine_similarity(&vectors[i], &vectors[j]);
                if s > 0.0 {
                    row.push((i, j, s));
                }
            }
            row
        })
        .collect();

    let mut builder = GraphBuilder::new();
    for (id, label) in nodes {
        builder.add_node(id.clone(), label.clone())?;
    }
    for row in rows {
        for (i, j, s) in row {
            builder.add_edge(i, j, s)?;
        }
    }
    let zero_norm_ids = vectors
        .iter()
        .zip(nodes)
        .filter(|(v, _)| v.is_zero())
        .map(|(_, (id, _))| id.clone())
        .collect();
    Ok(SimilarityGraph {
        graph: builder.build(),
        zero_norm_ids,
    })
}

/// Debug dump: one `doc_id \t token \t weight` row per entry, in
/// deterministic order.
pub fn write_vectors_tsv(vectors: &[TfIdfVector], ids: &[String], path: &Path) -> Result<()> {
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(out, "doc_id\ttoken\tweight").map_err(|e| Error::io(path, e))?;
    for (vec, id) in vectors.iter().zip(ids) {
        for (token, w) in vec.weights() {
            writeln!(out, "{id}\t{token}\t{}", crate::graph::fmt_weight(*w))
                .map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}
