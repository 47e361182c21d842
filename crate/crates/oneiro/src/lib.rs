//! Weighted similarity networks from symbol-interpretation corpora.
//!
//! `oneiro` builds weighted undirected networks whose nodes are dictionary
//! symbols and whose edge weights are TF-IDF cosine similarities between the
//! symbols' interpretation texts. On top of that core it provides:
//!
//! - disparity-filter backbone extraction at a fixed significance level, plus
//!   a search for the minimal connected backbone ([`backbone`]),
//! - Louvain community detection with seeded restarts, eigenvector-centrality
//!   community labels, and coarse-grained community graphs ([`community`]),
//! - alignment of networks in different languages via translation maps and
//!   cross-layer strength / edge-weight correlations ([`multilayer`]),
//! - happiness-lexicon sentiment scoring with hierarchical clustering of
//!   communities by sentiment ([`sentiment`]),
//! - a self-contained statistics kernel (Pearson, Welch, Kruskal-Wallis,
//!   Jensen-Shannon, t / chi-squared tails) ([`stats`]).
//!
//! The [`pipeline`] module orchestrates the whole flow behind a pinned JSON
//! configuration and writes deterministic, content-hashed artifacts; the
//! `oneiro` binary is a thin CLI over it. Start with the runnable examples
//! (`cargo run -p oneiro --example build_network`) for a tour of each stage.

pub mod backbone;
pub mod community;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod multilayer;
pub mod pipeline;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod textproc;

pub use error::{Error, Result};
