//! Pipeline orchestration behind a pinned JSON configuration.
//!
//! One config file describes one reproducible experiment: corpus paths and
//! preprocessing profile per language, backbone alpha (fixed or `"auto"`),
//! Louvain restart budget and base seed, alignment pairs, and the sentiment
//! stage. Stages (`build`, `communities`, `align`, `sentiment`, `report`)
//! write their artifacts under one output directory together with a manifest
//! of SHA-256 content hashes; `timings.json` and internal stage state are
//! kept out of the manifest so two runs with identical inputs and seed
//! produce byte-identical manifests. Re-running a stage re-verifies upstream
//! artifacts by hash first: a mismatch means something was edited or the
//! config changed, and the run refuses unless forced.
//!
//! All randomness flows from the single base seed; there is no ambient
//! entropy anywhere downstream.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backbone::{self, BackboneResult};
use crate::community::{self, LabelMode, Partition};
use crate::corpus::{self, Corpus, CorpusFormat, HappinessLexicon, TranslationMap};
use crate::error::{Error, Result};
use crate::graph::{self, StatsSummary, WeightedGraph};
use crate::multilayer::{self, CrossLayerReport};
use crate::sentiment::{self, Cut, Linkage, SimilarityMethod};
use crate::stats::TestResult;
use crate::textproc::{self, LangProfile, Step, StopList, TfIdfVector};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerConfig {
    pub lang: String,
    pub corpus: PathBuf,
    #[serde(default = "default_format")]
    pub format: CorpusFormat,
    pub profile: Vec<Step>,
    #[serde(default)]
    pub stops: Option<PathBuf>,
    /// Translation map into English glosses; required for non-English layers
    /// that participate in alignment.
    #[serde(default)]
    pub translation_map: Option<PathBuf>,
    /// Whether the translation map CSV starts with a header row.
    #[serde(default = "default_true")]
    pub translation_map_header: bool,
    /// Optional reference grouping (CSV id,group) scored with NMI in the
    /// communities stage.
    #[serde(default)]
    pub reference_partition: Option<PathBuf>,
}

fn default_format() -> CorpusFormat {
    CorpusFormat::Jsonl
}

fn default_true() -> bool {
    true
}

/// Backbone significance level: a fixed value in (0, 1] or `"auto"` for the
/// minimal connected backbone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaMode {
    Fixed(f64),
    Named(String),
}

impl AlphaMode {
    pub fn is_auto(&self) -> Result<bool> {
        match self {
            AlphaMode::Fixed(a) => {
                if *a > 0.0 && *a <= 1.0 {
                    Ok(false)
                } else {
                    Err(Error::Config(format!("alpha {a} outside (0, 1]")))
                }
            }
            AlphaMode::Named(s) if s == "auto" => Ok(true),
            AlphaMode::Named(s) => Err(Error::Config(format!(
                "alpha must be a number in (0, 1] or \"auto\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LouvainConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
}

fn default_restarts() -> usize {
    500
}

fn default_seed() -> u64 {
    42
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            restarts: default_restarts(),
            base_seed: default_seed(),
        }
    }
}

/// Flat-cut rule in config form; `p_threshold` is the significance cut on
/// the p-value similarity (distance threshold 1 - p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutConfig {
    K(usize),
    PThreshold(f64),
}

impl CutConfig {
    fn to_cut(self) -> Result<Cut> {
        match self {
            CutConfig::K(k) if k >= 1 => Ok(Cut::K(k)),
            CutConfig::K(k) => Err(Error::Config(format!("cut k must be >= 1, got {k}"))),
            CutConfig::PThreshold(p) if (0.0..=1.0).contains(&p) => Ok(Cut::Threshold(1.0 - p)),
            CutConfig::PThreshold(p) => {
                Err(Error::Config(format!("p_threshold {p} outside [0, 1]")))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentimentConfig {
    pub layer: String,
    pub lexicon: PathBuf,
    #[serde(default = "default_method")]
    pub method: SimilarityMethod,
    #[serde(default = "default_linkage")]
    pub linkage: Linkage,
    #[serde(default = "default_cut")]
    pub cut: CutConfig,
}

fn default_method() -> SimilarityMethod {
    SimilarityMethod::TTestP
}

fn default_linkage() -> Linkage {
    Linkage::Average
}

fn default_cut() -> CutConfig {
    CutConfig::PThreshold(0.05)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub layers: Vec<LayerConfig>,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaMode,
    #[serde(default)]
    pub louvain: LouvainConfig,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_label_mode")]
    pub label_mode: LabelMode,
    /// Layer pairs to align, e.g. [["zh", "en"], ["ar", "en"]].
    #[serde(default)]
    pub align: Vec<(String, String)>,
    #[serde(default)]
    pub sentiment: Option<SentimentConfig>,
    pub out: PathBuf,
    /// Worker threads for the parallel maps; 0 means the rayon default.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub dump_vectors: bool,
    /// Number of bins for strength/weight histograms.
    #[serde(default = "default_hist_bins")]
    pub histogram_bins: usize,
}

fn default_alpha() -> AlphaMode {
    AlphaMode::Named("auto".into())
}

fn default_top_k() -> usize {
    5
}

fn default_label_mode() -> LabelMode {
    LabelMode::PerCommunity
}

fn default_hist_bins() -> usize {
    20
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    /// Interprets relative paths against the config file's directory.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        for layer in &mut self.layers {
            fix(&mut layer.corpus);
            if let Some(p) = &mut layer.stops {
                fix(p);
            }
            if let Some(p) = &mut layer.translation_map {
                fix(p);
            }
            if let Some(p) = &mut layer.reference_partition {
                fix(p);
            }
        }
        if let Some(s) = &mut self.sentiment {
            fix(&mut s.lexicon);
        }
        fix(&mut self.out);
    }

    /// Hash of everything that affects results; the output directory is not
    /// part of it.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        sha256_hex(text.as_bytes())
    }

    fn layer(&self, lang: &str) -> Result<&LayerConfig> {
        self.layers
            .iter()
            .find(|l| l.lang == lang)
            .ok_or_else(|| Error::Config(format!("no layer with lang '{lang}'")))
    }

    /// Structural validation plus input loading checks. Returns a list of
    /// human-readable findings (empty = valid).
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut notes = Vec::new();
        if self.layers.is_empty() {
            return Err(Error::Config("config needs at least one layer".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for layer in &self.layers {
            if !seen.insert(layer.lang.clone()) {
                return Err(Error::Config(format!(
                    "duplicate layer lang '{}'",
                    layer.lang
                )));
            }
            LangProfile::new(layer.lang.clone(), layer.profile.clone())?;
            let corpus = corpus::load_corpus(&layer.corpus, layer.format)?;
            if corpus.lang != layer.lang {
                return Err(Error::Config(format!(
                    "layer '{}' reads corpus with lang '{}'",
                    layer.lang, corpus.lang
                )));
            }
            notes.push(format!("layer {}: {} documents", layer.lang, corpus.len()));
            if let Some(p) = &layer.stops {
                corpus::load_stoplist(p)?;
            }
            if let Some(p) = &layer.translation_map {
                corpus::load_translation_map(p, layer.translation_map_header)?;
            }
            if let Some(p) = &layer.reference_partition {
                load_reference_partition(p)?;
            }
        }
        self.alpha.is_auto()?;
        if self.louvain.restarts == 0 {
            return Err(Error::Config("louvain.restarts must be >= 1".into()));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be >= 1".into()));
        }
        for (a, b) in &self.align {
            if a == b {
                return Err(Error::Config(format!(
                    "cannot align layer '{a}' with itself"
                )));
            }
            for lang in [a, b] {
                let layer = self.layer(lang)?;
                if layer.lang != "en" && layer.translation_map.is_none() {
                    return Err(Error::Config(format!(
                        "alignment uses non-English layer '{lang}' without a translation map"
                    )));
                }
            }
        }
        if let Some(s) = &self.sentiment {
            self.layer(&s.layer)?;
            corpus::load_lexicon(&s.lexicon)?;
            s.cut.to_cut()?;
        }
        Ok(notes)
    }
}

fn load_reference_partition(path: &Path) -> Result<BTreeMap<String, usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue; // header
        }
        let (id, group) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(path, lineno + 1, "expected id,group"))?;
        let group: usize = group
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, format!("bad group '{group}'")))?;
        if out.insert(id.trim().to_string(), group).is_some() {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("duplicate id '{id}'"),
            ));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!(
            "reference partition {} is empty",
            path.display()
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Computed layer data (in-memory, derived deterministically from the config)
// ---------------------------------------------------------------------------

pub struct LayerData {
    pub corpus: Corpus,
    pub profile: LangProfile,
    pub stops: StopList,
    pub vectors: Vec<TfIdfVector>,
    pub zero_norm_ids: Vec<String>,
    pub full: WeightedGraph,
    pub backbone: BackboneResult,
    pub translation: Option<TranslationMap>,
    pub reference: Option<BTreeMap<String, usize>>,
}

fn compute_layer(layer: &LayerConfig, alpha: &AlphaMode) -> Result<LayerData> {
    let corpus = corpus::load_corpus(&layer.corpus, layer.format)?;
    let profile = LangProfile::new(layer.lang.clone(), layer.profile.clone())?;
    let stops = match &layer.stops {
        Some(p) => corpus::load_stoplist(p)?,
        None => StopList::default(),
    };
    let tokens: Vec<_> = corpus
        .docs()
        .iter()
        .map(|d| textproc::preprocess(d, &profile, &stops))
        .collect();
    let vectors = textproc::build_tfidf(&tokens)?;
    let nodes: Vec<(String, String)> = corpus
        .docs()
        .iter()
        .map(|d| (d.id.clone(), d.symbol.clone()))
        .collect();
    let sim = textproc::build_similarity_graph(&vectors, &nodes)?;
    let backbone = if alpha.is_auto()? {
        backbone::minimal_backbone(&sim.graph)?
    } else {
        let AlphaMode::Fixed(a) = alpha else {
            unreachable!()
        };
        backbone::filter_backbone(&sim.graph, *a)?
    };
    let translation = match &layer.translation_map {
        Some(p) => Some(corpus::load_translation_map(
            p,
            layer.translation_map_header,
        )?),
        None => None,
    };
    let reference = match &layer.reference_partition {
        Some(p) => Some(load_reference_partition(p)?),
        None => None,
    };
    Ok(LayerData {
        corpus,
        profile,
        stops,
        vectors,
        zero_norm_ids: sim.zero_norm_ids,
        full: sim.graph,
        backbone,
        translation,
        reference,
    })
}

fn compute_partition(
    config: &RunConfig,
    layer: &LayerData,
) -> Result<(Partition, Vec<(u64, f64)>)> {
    community::best_of_n_with_history(
        &layer.backbone.graph,
        config.louvain.restarts,
        config.louvain.base_seed,
    )
}

// ---------------------------------------------------------------------------
// Stage state, hashing, manifest
// ---------------------------------------------------------------------------

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
struct StageState {
    config_hash: String,
    base_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_change: Option<(u64, u64)>,
    /// stage name -> { relative path -> sha256 }
    stages: BTreeMap<String, BTreeMap<String, String>>,
}

const STATE_FILE: &str = "stage_state.json";
const MANIFEST_FILE: &str = "manifest.json";
const TIMINGS_FILE: &str = "timings.json";

fn load_state(out: &Path) -> Result<Option<StageState>> {
    let path = out.join(STATE_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(Some(serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!("corrupt {}: {e}", path.display()))
    })?))
}

fn save_state(out: &Path, state: &StageState) -> Result<()> {
    let path = out.join(STATE_FILE);
    let text = serde_json::to_string_pretty(state).expect("state serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// The report embeds this manifest (config echo and all artifact hashes), so
/// it cannot itself be listed: hashing it here would be circular.
const REPORT_FILE: &str = "report/report.json";

fn write_manifest(out: &Path, state: &StageState) -> Result<()> {
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for outputs in state.stages.values() {
        for (rel, hash) in outputs {
            if rel != REPORT_FILE {
                files.insert(rel.clone(), hash.clone());
            }
        }
    }
    let path = out.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&files).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Collects artifacts written by one stage and records their hashes.
struct ArtifactSink<'a> {
    out: &'a Path,
    written: BTreeMap<String, String>,
}

impl<'a> ArtifactSink<'a> {
    fn new(out: &'a Path) -> Self {
        ArtifactSink {
            out,
            written: BTreeMap::new(),
        }
    }

    fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let path = self.out.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        Ok(path)
    }

    fn record(&mut self, rel: &str) -> Result<()> {
        let hash = hash_file(&self.out.join(rel))?;
        self.written.insert(rel.to_string(), hash);
        Ok(())
    }

    fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(rel)?;
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.record(rel)
    }

    fn write_string(&mut self, rel: &str, text: &str) -> Result<()> {
        self.write_bytes(rel, text.as_bytes())
    }

    fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::InvalidInput(format!("serialize {rel}: {e}")))?;
        self.write_string(rel, &(text + "\n"))
    }
}

fn fmt(v: f64) -> String {
    graph::fmt_weight(v)
}

// ---------------------------------------------------------------------------
// Stage implementations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Build,
    Communities,
    Align,
    Sentiment,
    Report,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Build => "build",
            Stage::Communities => "communities",
            Stage::Align => "align",
            Stage::Sentiment => "sentiment",
            Stage::Report => "report",
        }
    }

    fn upstream(&self) -> Vec<Stage> {
        match self {
            Stage::Build => vec![],
            Stage::Communities | Stage::Align => vec![Stage::Build],
            Stage::Sentiment => vec![Stage::Build, Stage::Communities],
            Stage::Report => {
                vec![
                    Stage::Build,
                    Stage::Communities,
                    Stage::Align,
                    Stage::Sentiment,
                ]
            }
        }
    }
}

/// One pipeline invocation: a resolved config, the output directory, and
/// lazily computed per-layer data shared across stages.
pub struct Pipeline {
    pub config: RunConfig,
    force: bool,
    layers: BTreeMap<String, LayerData>,
    partitions: BTreeMap<String, (Partition, Vec<(u64, f64)>)>,
    timings: BTreeMap<String, u64>,
}

impl Pipeline {
    pub fn new(config: RunConfig, force: bool) -> Pipeline {
        Pipeline {
            config,
            force,
            layers: BTreeMap::new(),
            partitions: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    fn layer_data(&mut self, lang: &str) -> Result<&LayerData> {
        if !self.layers.contains_key(lang) {
            let layer_cfg = self.config.layer(lang)?.clone();
            let data = compute_layer(&layer_cfg, &self.config.alpha)?;
            self.layers.insert(lang.to_string(), data);
        }
        Ok(&self.layers[lang])
    }

    fn partition(&mut self, lang: &str) -> Result<&(Partition, Vec<(u64, f64)>)> {
        if !self.partitions.contains_key(lang) {
            self.layer_data(lang)?;
            let computed = compute_partition(&self.config, &self.layers[lang])?;
            self.partitions.insert(lang.to_string(), computed);
        }
        Ok(&self.partitions[lang])
    }

    /// Runs one stage (and any missing upstream stages), maintaining the
    /// stage state, manifest, and timings.
    pub fn run(&mut self, stage: Stage) -> Result<()> {
        let out = self.config.out.clone();
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        let config_hash = self.config.fingerprint();

        let mut state = match load_state(&out)? {
            Some(prev) if prev.config_hash != config_hash => {
                if !self.force {
                    return Err(Error::StaleArtifact(format!(
                        "configuration changed since the last run in {}",
                        out.display()
                    )));
                }
                let seed_change = (prev.base_seed != self.config.louvain.base_seed)
                    .then_some((prev.base_seed, self.config.louvain.base_seed));
                StageState {
                    config_hash: config_hash.clone(),
                    base_seed: self.config.louvain.base_seed,
                    seed_change,
                    stages: BTreeMap::new(),
                }
            }
            Some(prev) => prev,
            None => StageState {
                config_hash: config_hash.clone(),
                base_seed: self.config.louvain.base_seed,
                seed_change: None,
                stages: BTreeMap::new(),
            },
        };

        // upstream artifacts: re-run what is missing, refuse what was edited
        for up in stage.upstream() {
            let rerun = match state.stages.get(up.name()) {
                None => true,
                Some(outputs) => {
                    let mut any_missing = false;
                    for (rel, recorded) in outputs {
                        let path = out.join(rel);
                        if !path.exists() {
                            any_missing = true;
                            continue;
                        }
                        let actual = hash_file(&path)?;
                        if &actual != recorded && !self.force {
                            return Err(Error::StaleArtifact(format!(
                                "{rel} changed on disk since stage '{}' wrote it",
                                up.name()
                            )));
                        }
                    }
                    any_missing
                }
            };
            if rerun || self.force {
                self.execute(up, &mut state)?;
            }
        }

        self.execute(stage, &mut state)?;
        save_state(&out, &state)?;
        write_manifest(&out, &state)?;
        self.write_timings(&out)?;
        Ok(())
    }

    /// (lang, chosen alpha, backbone edges, full edges) for every layer
    /// computed in this invocation.
    pub fn layer_alphas(&self) -> Vec<(String, f64, usize, usize)> {
        self.layers
            .iter()
            .map(|(lang, d)| {
                (
                    lang.clone(),
                    d.backbone.alpha,
                    d.backbone.edges_kept,
                    d.full.n_edges(),
                )
            })
            .collect()
    }

    /// Languages whose backbone splits into more than one component (path
    /// statistics then cover the largest); empty with alpha = auto.
    pub fn disconnected_backbones(&self) -> Vec<(String, usize)> {
        self.layers
            .iter()
            .filter_map(|(lang, d)| {
                let parts = crate::graph::connected_components(&d.backbone.graph).len();
                (parts > 1).then(|| (lang.clone(), parts))
            })
            .collect()
    }

    fn write_timings(&self, out: &Path) -> Result<()> {
        let path = out.join(TIMINGS_FILE);
        let text = serde_json::to_string_pretty(&self.timings).expect("timings serialize");
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    fn execute(&mut self, stage: Stage, state: &mut StageState) -> Result<()> {
        let started = Instant::now();
        let out = self.config.out.clone();
        let mut sink = ArtifactSink::new(&out);
        match stage {
            Stage::Build => self.stage_build(&mut sink)?,
            Stage::Communities => self.stage_communities(&mut sink)?,
            Stage::Align => self.stage_align(&mut sink)?,
            Stage::Sentiment => self.stage_sentiment(&mut sink)?,
            Stage::Report => self.stage_report(&mut sink, state)?,
        }
        state
            .stages
            .insert(stage.name().to_string(), std::mem::take(&mut sink.written));
        self.timings.insert(
            stage.name().to_string(),
            started.elapsed().as_millis() as u64,
        );
        Ok(())
    }

    // -- build ---------------------------------------------------------------

    fn stage_build(&mut self, sink: &mut ArtifactSink) -> Result<()> {
        let langs: Vec<String> = self.config.layers.iter().map(|l| l.lang.clone()).collect();
        let bins = self.config.histogram_bins;
        let dump_vectors = self.config.dump_vectors;
        for lang in langs {
            self.layer_data(&lang)?;
            let layer = &self.layers[&lang];
            let base = format!("layers/{lang}");

            let report = corpus::validate_corpus(&layer.corpus, &layer.profile, &layer.stops);
            sink.write_json(&format!("{base}/validation.json"), &report)?;

            let full_stats = graph::graph_stats(&layer.full)?;
            let bb_stats = graph::graph_stats(&layer.backbone.graph)?;
            sink.write_string(
                &format!("{base}/stats.csv"),
                &stats_csv(&full_stats, &bb_stats),
            )?;

            graph::write_edgelist_tsv(&layer.full, &sink.path(&format!("{base}/full.edges.tsv"))?)?;
            sink.record(&format!("{base}/full.edges.tsv"))?;
            graph::write_edgelist_tsv(
                &layer.backbone.graph,
                &sink.path(&format!("{base}/backbone.edges.tsv"))?,
            )?;
            sink.record(&format!("{base}/backbone.edges.tsv"))?;
            graph::write_graphml(
                &layer.full,
                &sink.path(&format!("{base}/full.graphml"))?,
                None,
            )?;
            sink.record(&format!("{base}/full.graphml"))?;
            graph::write_graphml(
                &layer.backbone.graph,
                &sink.path(&format!("{base}/backbone.graphml"))?,
                None,
            )?;
            sink.record(&format!("{base}/backbone.graphml"))?;

            for (name, g) in [("full", &layer.full), ("backbone", &layer.backbone.graph)] {
                let deg = graph::degree_distribution(g);
                let mut csv = String::from("degree,count\n");
                for (d, c) in deg {
                    csv.push_str(&format!("{d},{c}\n"));
                }
                sink.write_string(&format!("{base}/degree_hist_{name}.csv"), &csv)?;
                graph::write_histogram_csv(
                    &graph::strength_distribution(g, bins),
                    &sink.path(&format!("{base}/strength_hist_{name}.csv"))?,
                )?;
                sink.record(&format!("{base}/strength_hist_{name}.csv"))?;
                graph::write_histogram_csv(
                    &graph::weight_distribution(g, bins),
                    &sink.path(&format!("{base}/weight_hist_{name}.csv"))?,
                )?;
                sink.record(&format!("{base}/weight_hist_{name}.csv"))?;
            }

            let cdf = graph::text_length_cdf(&layer.corpus);
            let mut csv = String::from("length,cumulative_fraction\n");
            for (len, frac) in cdf {
                csv.push_str(&format!("{len},{}\n", fmt(frac)));
            }
            sink.write_string(&format!("{base}/text_length_cdf.csv"), &csv)?;

            sink.write_json(
                &format!("{base}/alpha.json"),
                &serde_json::json!({
                    "mode": self.config.alpha,
                    "alpha": layer.backbone.alpha,
                    "edges_kept": layer.backbone.edges_kept,
                    "edges_full": layer.full.n_edges(),
                    "zero_norm_ids": layer.zero_norm_ids,
                }),
            )?;

            if dump_vectors {
                let ids: Vec<String> = layer.corpus.docs().iter().map(|d| d.id.clone()).collect();
                textproc::write_vectors_tsv(
                    &layer.vectors,
                    &ids,
                    &sink.path(&format!("{base}/vectors.tsv"))?,
                )?;
                sink.record(&format!("{base}/vectors.tsv"))?;
            }
        }
        Ok(())
    }

    // -- communities -----------------------------------------------------------

    fn stage_communities(&mut self, sink: &mut ArtifactSink) -> Result<()> {
        let langs: Vec<String> = self.config.layers.iter().map(|l| l.lang.clone()).collect();
        let top_k = self.config.top_k;
        let label_mode = self.config.label_mode;
        for lang in langs {
            self.partition(&lang)?;
            let layer = &self.layers[&lang];
            let (partition, history) = &self.partitions[&lang];
            let base = format!("communities/{lang}");

            let mut csv = String::from("id,symbol,community\n");
            for (node, &c) in partition.assignment().iter().enumerate() {
                let info = layer.backbone.graph.node(node);
                csv.push_str(&format!("{},{},{c}\n", info.id, csv_escape(&info.label)));
            }
            sink.write_string(&format!("{base}/partition.csv"), &csv)?;

            let labels =
                community::community_labels(&layer.backbone.graph, partition, top_k, label_mode)?;
            let mut csv = String::from("community,rank,symbol,score\n");
            for l in &labels {
                for (rank, (symbol, score)) in l.top.iter().enumerate() {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        l.community,
                        rank + 1,
                        csv_escape(symbol),
                        fmt(*score)
                    ));
                }
            }
            sink.write_string(&format!("{base}/labels.csv"), &csv)?;

            let mut csv = String::from("seed,q\n");
            for (seed, q) in history {
                csv.push_str(&format!("{seed},{}\n", fmt(*q)));
            }
            sink.write_string(&format!("{base}/restarts.csv"), &csv)?;

            let cg = community::coarse_grain(&layer.backbone.graph, partition)?;
            write_community_graphml(
                &cg,
                &labels,
                &sink.path(&format!("{base}/community_graph.graphml"))?,
            )?;
            sink.record(&format!("{base}/community_graph.graphml"))?;

            let annotated = sink.path(&format!("{base}/backbone_communities.graphml"))?;
            graph::write_graphml(
                &layer.backbone.graph,
                &annotated,
                Some(partition.assignment()),
            )?;
            sink.record(&format!("{base}/backbone_communities.graphml"))?;

            if let Some(reference) = &layer.reference {
                let nmi = reference_nmi(&layer.backbone.graph, partition, reference)?;
                sink.write_json(
                    &format!("{base}/nmi.json"),
                    &serde_json::json!({ "nmi": nmi, "reference_groups": reference.values().collect::<std::collections::BTreeSet<_>>().len() }),
                )?;
            }
        }
        Ok(())
    }

    // -- align -------------------------------------------------------------

    fn stage_align(&mut self, sink: &mut ArtifactSink) -> Result<()> {
        let pairs = self.config.align.clone();
        for (a, b) in pairs {
            self.layer_data(&a)?;
            self.layer_data(&b)?;
            let la = &self.layers[&a];
            let lb = &self.layers[&b];
            let alignment = multilayer::align_layers(
                &la.full,
                &lb.full,
                la.translation.as_ref(),
                lb.translation.as_ref(),
            );
            let report = multilayer::cross_layer_report(
                &la.full,
                &la.backbone.graph,
                &lb.full,
                &lb.backbone.graph,
                &alignment,
            )?;
            let base = format!("align/{a}-{b}");

            let mut csv = String::from("symbol_a,symbol_b\n");
            for &(na, nb) in &alignment.pairs {
                csv.push_str(&format!(
                    "{},{}\n",
                    csv_escape(&la.full.node(na).label),
                    csv_escape(&lb.full.node(nb).label)
                ));
            }
            sink.write_string(&format!("{base}/pairs.csv"), &csv)?;

            let mut csv = String::from("gloss,symbols_a,symbols_b\n");
            for ex in &alignment.excluded {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    csv_escape(&ex.gloss),
                    csv_escape(&ex.symbols_a.join(";")),
                    csv_escape(&ex.symbols_b.join(";"))
                ));
            }
            sink.write_string(&format!("{base}/exclusions.csv"), &csv)?;

            sink.write_string(
                &format!("{base}/crosslayer.csv"),
                &table2_csv(&[(format!("{a} & {b}"), &report)]),
            )?;
            sink.write_json(&format!("{base}/crosslayer.json"), &report)?;
        }
        Ok(())
    }

    // -- sentiment -----------------------------------------------------------

    fn stage_sentiment(&mut self, sink: &mut ArtifactSink) -> Result<()> {
        let Some(cfg) = self.config.sentiment.clone() else {
            return Ok(()); // stage requested but not configured: nothing to do
        };
        let lang = cfg.layer.clone();
        self.partition(&lang)?;
        let layer = &self.layers[&lang];
        let (partition, _) = &self.partitions[&lang];
        let lexicon = corpus::load_lexicon(&cfg.lexicon)?;
        let result = run_sentiment(layer, partition, &lexicon, &cfg, self.config.top_k)?;
        let base = format!("sentiment/{lang}");

        let mut csv = String::from("id,symbol,score,coverage\n");
        for doc in layer.corpus.docs() {
            if let Some(s) = result.scores.get(&doc.id) {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    doc.id,
                    csv_escape(&doc.symbol),
                    fmt(s.score),
                    fmt(s.coverage)
                ));
            }
        }
        sink.write_string(&format!("{base}/symbol_scores.csv"), &csv)?;

        let m = &result.matrix;
        let mut csv = String::from("community");
        for &c in &m.communities {
            csv.push_str(&format!(",c{c}"));
        }
        csv.push('\n');
        for (i, &c) in m.communities.iter().enumerate() {
            csv.push_str(&format!("c{c}"));
            for j in 0..m.communities.len() {
                csv.push_str(&format!(",{}", fmt(m.entries[i][j])));
            }
            csv.push('\n');
        }
        sink.write_string(&format!("{base}/similarity_matrix.csv"), &csv)?;

        sink.write_json(
            &format!("{base}/dendrogram.json"),
            &dendrogram_json(&result.clustering),
        )?;

        let mut csv = String::from("community,cluster,mean_happiness\n");
        for (row, &c) in result.clustering.communities.iter().enumerate() {
            csv.push_str(&format!(
                "{c},{},{}\n",
                result.clustering.flat[row],
                fmt(m.entries[row][row])
            ));
        }
        sink.write_string(&format!("{base}/clusters.csv"), &csv)?;

        sink.write_string(
            &format!("{base}/cluster_table.csv"),
            &table3_csv(&result, self.config.top_k),
        )?;
        sink.write_json(
            &format!("{base}/kruskal_wallis.json"),
            &serde_json::json!({
                "test": result.kruskal_wallis,
                "group_sizes": result.cluster_sample_sizes,
            }),
        )?;
        Ok(())
    }

    // -- report --------------------------------------------------------------

    fn stage_report(&mut self, sink: &mut ArtifactSink, state: &mut StageState) -> Result<()> {
        // table 1: backbone structural statistics, one column per layer
        let langs: Vec<String> = self.config.layers.iter().map(|l| l.lang.clone()).collect();
        let mut per_layer: BTreeMap<String, LayerReport> = BTreeMap::new();
        let mut columns: Vec<(String, StatsSummary)> = Vec::new();
        for lang in &langs {
            self.partition(lang)?;
            let layer = &self.layers[lang];
            let (partition, history) = &self.partitions[lang];
            let bb_stats = graph::graph_stats(&layer.backbone.graph)?;
            let full_stats = graph::graph_stats(&layer.full)?;
            let labels = community::community_labels(
                &layer.backbone.graph,
                partition,
                self.config.top_k,
                self.config.label_mode,
            )?;
            let nmi = match &layer.reference {
                Some(reference) => {
                    Some(reference_nmi(&layer.backbone.graph, partition, reference)?)
                }
                None => None,
            };
            columns.push((lang.clone(), bb_stats.clone()));
            per_layer.insert(
                lang.clone(),
                LayerReport {
                    alpha: layer.backbone.alpha,
                    alpha_mode: self.config.alpha.clone(),
                    n_docs: layer.corpus.len(),
                    zero_norm_ids: layer.zero_norm_ids.clone(),
                    full_stats,
                    backbone_stats: bb_stats,
                    best_q: partition.q,
                    n_communities: partition.n_communities(),
                    restart_q: history.clone(),
                    labels: labels.into_iter().map(|l| (l.community, l.top)).collect(),
                    reference_nmi: nmi,
                },
            );
        }
        sink.write_string("report/table1.csv", &table1_csv(&columns))?;

        let pairs = self.config.align.clone();
        let mut cross: BTreeMap<String, CrossLayerReport> = BTreeMap::new();
        let mut table2_rows: Vec<(String, CrossLayerReport)> = Vec::new();
        for (a, b) in &pairs {
            self.layer_data(a)?;
            self.layer_data(b)?;
            let la = &self.layers[a];
            let lb = &self.layers[b];
            let alignment = multilayer::align_layers(
                &la.full,
                &lb.full,
                la.translation.as_ref(),
                lb.translation.as_ref(),
            );
            let report = multilayer::cross_layer_report(
                &la.full,
                &la.backbone.graph,
                &lb.full,
                &lb.backbone.graph,
                &alignment,
            )?;
            cross.insert(format!("{a}-{b}"), report.clone());
            table2_rows.push((format!("{a} & {b}"), report));
        }
        let rows: Vec<(String, &CrossLayerReport)> =
            table2_rows.iter().map(|(n, r)| (n.clone(), r)).collect();
        sink.write_string("report/table2.csv", &table2_csv(&rows))?;

        let sentiment_report = match self.config.sentiment.clone() {
            Some(cfg) => {
                let lang = cfg.layer.clone();
                self.partition(&lang)?;
                let layer = &self.layers[&lang];
                let (partition, _) = &self.partitions[&lang];
                let lexicon = corpus::load_lexicon(&cfg.lexicon)?;
                let result = run_sentiment(layer, partition, &lexicon, &cfg, self.config.top_k)?;
                sink.write_string("report/table3.csv", &table3_csv(&result, self.config.top_k))?;
                Some(SentimentReport {
                    layer: lang,
                    method: cfg.method,
                    linkage: cfg.linkage,
                    cut: cfg.cut,
                    clusters: result
                        .clustering
                        .communities
                        .iter()
                        .zip(&result.clustering.flat)
                        .map(|(&c, &f)| (c, f))
                        .collect(),
                    community_means: result
                        .matrix
                        .communities
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| (c, result.matrix.entries[i][i]))
                        .collect(),
                    kruskal_wallis: result.kruskal_wallis.clone(),
                    scored_symbols: result.scores.len(),
                })
            }
            None => None,
        };

        let mut artifacts: BTreeMap<String, String> = state
            .stages
            .values()
            .flat_map(|m| m.iter().map(|(k, v)| (k.clone(), v.clone())))
            .collect();
        for (rel, hash) in &sink.written {
            artifacts.insert(rel.clone(), hash.clone());
        }
        artifacts.remove(REPORT_FILE);

        let report = RunReport {
            config: self.config.clone(),
            config_hash: state.config_hash.clone(),
            seed_change: state.seed_change,
            layers: per_layer,
            cross_layer: cross,
            sentiment: sentiment_report,
            artifacts,
        };
        sink.write_json(REPORT_FILE, &report)?;
        Ok(())
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Counts print as integers, real-valued statistics with full precision.
fn stat_cell(index: usize, value: f64) -> String {
    if index < 2 {
        format!("{}", value as u64)
    } else {
        fmt(value)
    }
}

fn stats_csv(full: &StatsSummary, backbone: &StatsSummary) -> String {
    let mut out = String::from("statistic,full,backbone\n");
    for (i, name) in StatsSummary::NAMES.iter().enumerate() {
        out.push_str(&format!(
            "{name},{},{}\n",
            stat_cell(i, full.values()[i]),
            stat_cell(i, backbone.values()[i])
        ));
    }
    out
}

fn table1_csv(columns: &[(String, StatsSummary)]) -> String {
    let mut out = String::from("statistic");
    for (lang, _) in columns {
        out.push_str(&format!(",{lang}"));
    }
    out.push('\n');
    for (i, name) in StatsSummary::NAMES.iter().enumerate() {
        out.push_str(name);
        for (_, stats) in columns {
            out.push_str(&format!(",{}", stat_cell(i, stats.values()[i])));
        }
        out.push('\n');
    }
    out
}

fn table2_cell(t: &TestResult) -> String {
    let mark = if multilayer::is_significant(t) {
        "*"
    } else {
        ""
    };
    format!("{:.4}{mark}", t.statistic)
}

fn table2_csv(rows: &[(String, &CrossLayerReport)]) -> String {
    let mut out = String::from(
        "networks,common_nodes,common_edges_backbone,common_edges_full,\
         strength_r_backbone,strength_r_full,edge_weight_r_backbone,edge_weight_r_full\n",
    );
    for (name, r) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_escape(name),
            r.n_common_nodes,
            r.n_common_edges_backbone,
            r.n_common_edges_full,
            table2_cell(&r.strength_backbone),
            table2_cell(&r.strength_full),
            table2_cell(&r.edge_weight_backbone),
            table2_cell(&r.edge_weight_full),
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Sentiment stage internals
// ---------------------------------------------------------------------------

struct SentimentResult {
    scores: BTreeMap<String, sentiment::SymbolScore>,
    matrix: sentiment::SimilarityMatrix,
    clustering: sentiment::CommunityClustering,
    kruskal_wallis: TestResult,
    cluster_sample_sizes: Vec<usize>,
    /// community id -> top-k labels, for the cluster table
    labels: BTreeMap<usize, Vec<(String, f64)>>,
}

fn run_sentiment(
    layer: &LayerData,
    partition: &Partition,
    lexicon: &HappinessLexicon,
    cfg: &SentimentConfig,
    top_k: usize,
) -> Result<SentimentResult> {
    let happiness = sentiment::score_corpus(&layer.corpus, lexicon);
    let cs = sentiment::community_sentiment(&layer.backbone.graph, partition, &happiness)?;
    let matrix = sentiment::community_similarity_matrix(&cs, cfg.method)?;
    let clustering = sentiment::cluster_communities(&matrix, cfg.linkage, cfg.cut.to_cut()?)?;

    // flat clusters -> pooled happiness samples for the Kruskal-Wallis check
    let n_clusters = clustering.flat.iter().max().map_or(0, |m| m + 1);
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); n_clusters];
    for (row, &community) in clustering.communities.iter().enumerate() {
        groups[clustering.flat[row]].extend(cs.samples[community].iter().copied());
    }
    let kruskal_wallis = if n_clusters >= 2 {
        sentiment::kruskal_wallis(&groups)?
    } else {
        TestResult {
            statistic: 0.0,
            p_value: 1.0,
            df: 0.0,
            method: crate::stats::Method::KruskalWallis,
            note: Some("single cluster: no grouping to test".into()),
        }
    };
    let cluster_sample_sizes = groups.iter().map(Vec::len).collect();

    let labels = community::community_labels(
        &layer.backbone.graph,
        partition,
        top_k,
        LabelMode::PerCommunity,
    )?
    .into_iter()
    .map(|l| (l.community, l.top))
    .collect();

    let scores = happiness
        .iter()
        .map(|(id, s)| (id.to_string(), s))
        .collect();
    Ok(SentimentResult {
        scores,
        matrix,
        clustering,
        kruskal_wallis,
        cluster_sample_sizes,
        labels,
    })
}

/// Table-3-style layout: communities grouped by flat sentiment cluster, one
/// row per community with its top-k central symbols.
fn table3_csv(result: &SentimentResult, top_k: usize) -> String {
    let mut out = String::from("cluster,community");
    for i in 1..=top_k {
        out.push_str(&format!(",symbol_{i}"));
    }
    out.push('\n');
    let mut rows: Vec<(usize, usize)> = result
        .clustering
        .communities
        .iter()
        .enumerate()
        .map(|(row, &c)| (result.clustering.flat[row], c))
        .collect();
    rows.sort_unstable();
    for (cluster, community) in rows {
        out.push_str(&format!("{cluster},c{community}"));
        let labels = result
            .labels
            .get(&community)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        for i in 0..top_k {
            match labels.get(i) {
                Some((symbol, _)) => out.push_str(&format!(",{}", csv_escape(symbol))),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Nested dendrogram tree: leaves carry community ids, internal nodes their
/// merge height.
fn dendrogram_json(clustering: &sentiment::CommunityClustering) -> serde_json::Value {
    let n = clustering.communities.len();
    let mut nodes: Vec<serde_json::Value> = (0..n)
        .map(|i| serde_json::json!({ "community": clustering.communities[i] }))
        .collect();
    for m in &clustering.merges {
        let left = nodes[m.left].clone();
        let right = nodes[m.right].clone();
        nodes.push(serde_json::json!({
            "height": m.height,
            "size": m.size,
            "children": [left, right],
        }));
    }
    nodes.pop().unwrap_or(serde_json::Value::Null)
}

fn write_community_graphml(
    cg: &community::CommunityGraph,
    labels: &[community::CommunityLabel],
    path: &Path,
) -> Result<()> {
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    let io_err = |e| Error::io(path, e);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).map_err(io_err)?;
    writeln!(
        out,
        r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#
    )
    .map_err(io_err)?;
    writeln!(
        out,
        r#"  <key id="size" for="node" attr.name="size" attr.type="int"/>"#
    )
    .map_err(io_err)?;
    writeln!(
        out,
        r#"  <key id="internal_weight" for="node" attr.name="internal_weight" attr.type="double"/>"#
    )
    .map_err(io_err)?;
    writeln!(
        out,
        r#"  <key id="top_symbols" for="node" attr.name="top_symbols" attr.type="string"/>"#
    )
    .map_err(io_err)?;
    writeln!(
        out,
        r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#
    )
    .map_err(io_err)?;
    writeln!(out, r#"  <graph edgedefault="undirected">"#).map_err(io_err)?;
    for (c, (&size, &internal)) in cg.sizes.iter().zip(&cg.internal_weight).enumerate() {
        let top = labels
            .iter()
            .find(|l| l.community == c)
            .map(|l| {
                l.top
                    .iter()
                    .map(|(s, _)| s.as_str())
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        writeln!(out, r#"    <node id="c{c}">"#).map_err(io_err)?;
        writeln!(out, r#"      <data key="size">{size}</data>"#).map_err(io_err)?;
        writeln!(
            out,
            r#"      <data key="internal_weight">{}</data>"#,
            fmt(internal)
        )
        .map_err(io_err)?;
        writeln!(
            out,
            r#"      <data key="top_symbols">{}</data>"#,
            graph::xml_escape(&top)
        )
        .map_err(io_err)?;
        writeln!(out, "    </node>").map_err(io_err)?;
    }
    for &(a, b, w) in &cg.edges {
        writeln!(
            out,
            r#"    <edge source="c{a}" target="c{b}"><data key="weight">{}</data></edge>"#,
            fmt(w)
        )
        .map_err(io_err)?;
    }
    writeln!(out, "  </graph>").map_err(io_err)?;
    writeln!(out, "</graphml>").map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn reference_nmi(
    g: &WeightedGraph,
    partition: &Partition,
    reference: &BTreeMap<String, usize>,
) -> Result<f64> {
    let mut ours = Vec::new();
    let mut theirs = Vec::new();
    for (node, &c) in partition.assignment().iter().enumerate() {
        if let Some(&group) = reference.get(&g.node(node).id) {
            ours.push(c);
            theirs.push(group);
        }
    }
    if ours.is_empty() {
        return Err(Error::InvalidInput(
            "reference partition shares no ids with the corpus".into(),
        ));
    }
    community::normalized_mutual_information(&ours, &theirs)
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct LayerReport {
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
    pub n_docs: usize,
    pub zero_norm_ids: Vec<String>,
    pub full_stats: StatsSummary,
    pub backbone_stats: StatsSummary,
    pub best_q: f64,
    pub n_communities: usize,
    /// (seed, Q) of every restart.
    pub restart_q: Vec<(u64, f64)>,
    pub labels: BTreeMap<usize, Vec<(String, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_nmi: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SentimentReport {
    pub layer: String,
    pub method: SimilarityMethod,
    pub linkage: Linkage,
    pub cut: CutConfig,
    /// community id -> flat cluster id
    pub clusters: BTreeMap<usize, usize>,
    pub community_means: BTreeMap<usize, f64>,
    pub kruskal_wallis: TestResult,
    pub scored_symbols: usize,
}

/// The consolidated run report. Wall-clock timings are tracked separately in
/// `timings.json` so this file is byte-reproducible across runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_change: Option<(u64, u64)>,
    pub layers: BTreeMap<String, LayerReport>,
    pub cross_layer: BTreeMap<String, CrossLayerReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<SentimentReport>,
    /// Relative path -> sha256 of every data artifact.
    pub artifacts: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
    }

    fn fixture_config(out: &Path) -> RunConfig {
        let mut config = RunConfig::load(&fixture_dir().join("config.json")).unwrap();
        config.out = out.to_path_buf();
        config
    }

    #[test]
    fn config_loads_resolves_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        assert_eq!(config.layers.len(), 3);
        assert!(config.layers[0].corpus.is_absolute());
        let notes = config.validate().unwrap();
        assert_eq!(notes.len(), 3);
        assert!(config.alpha.is_auto().unwrap());
    }

    #[test]
    fn alpha_mode_parses_auto_and_numbers() {
        let auto: AlphaMode = serde_json::from_str("\"auto\"").unwrap();
        assert!(auto.is_auto().unwrap());
        let fixed: AlphaMode = serde_json::from_str("0.05").unwrap();
        assert!(!fixed.is_auto().unwrap());
        let bad: AlphaMode = serde_json::from_str("\"automatic\"").unwrap();
        assert!(bad.is_auto().is_err());
        let out_of_range: AlphaMode = serde_json::from_str("1.5").unwrap();
        assert!(out_of_range.is_auto().is_err());
    }

    #[test]
    fn cut_config_maps_to_distance_threshold() {
        assert_eq!(CutConfig::K(3).to_cut().unwrap(), Cut::K(3));
        assert_eq!(
            CutConfig::PThreshold(0.05).to_cut().unwrap(),
            Cut::Threshold(1.0 - 0.05)
        );
        assert!(CutConfig::K(0).to_cut().is_err());
        assert!(CutConfig::PThreshold(1.5).to_cut().is_err());
    }

    #[test]
    fn build_stage_emits_layer_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let mut p = Pipeline::new(config, false);
        p.run(Stage::Build).unwrap();
        for lang in ["en", "zh", "ar"] {
            for file in [
                "stats.csv",
                "full.edges.tsv",
                "backbone.edges.tsv",
                "full.graphml",
                "backbone.graphml",
                "degree_hist_full.csv",
                "degree_hist_backbone.csv",
                "strength_hist_full.csv",
                "weight_hist_backbone.csv",
                "text_length_cdf.csv",
                "alpha.json",
                "validation.json",
            ] {
                let path = dir.path().join(format!("layers/{lang}/{file}"));
                assert!(path.exists(), "missing {}", path.display());
            }
        }
        assert!(dir.path().join("manifest.json").exists());
        assert!(dir.path().join("timings.json").exists());

        let stats = std::fs::read_to_string(dir.path().join("layers/en/stats.csv")).unwrap();
        assert_eq!(stats.lines().count(), 8); // header + 7 statistics
    }

    #[test]
    fn stale_artifact_detection_refuses_then_force_rebuilds() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let mut p = Pipeline::new(config.clone(), false);
        p.run(Stage::Build).unwrap();

        // tamper with a build artifact
        let victim = dir.path().join("layers/en/stats.csv");
        std::fs::write(&victim, "tampered\n").unwrap();
        let mut p2 = Pipeline::new(config.clone(), false);
        let err = p2.run(Stage::Communities).unwrap_err();
        assert!(matches!(err, Error::StaleArtifact(_)), "{err}");

        // forcing re-runs the upstream stage and repairs the artifact
        let mut p3 = Pipeline::new(config, true);
        p3.run(Stage::Communities).unwrap();
        let repaired = std::fs::read_to_string(&victim).unwrap();
        assert!(repaired.starts_with("statistic,full,backbone"));
    }

    #[test]
    fn config_change_refused_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let mut p = Pipeline::new(config.clone(), false);
        p.run(Stage::Build).unwrap();

        let mut changed = config.clone();
        changed.louvain.base_seed = 777;
        let mut p2 = Pipeline::new(changed.clone(), false);
        let err = p2.run(Stage::Build).unwrap_err();
        assert!(matches!(err, Error::StaleArtifact(_)));

        let mut p3 = Pipeline::new(changed, true);
        p3.run(Stage::Report).unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("report/report.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["seed_change"][0], 42);
        assert_eq!(report["seed_change"][1], 777);
    }

    #[test]
    fn build_succeeds_without_lexicon_when_sentiment_not_configured() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture_config(dir.path());
        config.sentiment = Some(SentimentConfig {
            layer: "en".into(),
            lexicon: dir.path().join("missing_lexicon.tsv"),
            method: default_method(),
            linkage: default_linkage(),
            cut: default_cut(),
        });
        // the lexicon does not exist, but build never touches it
        let mut p = Pipeline::new(config.clone(), false);
        p.run(Stage::Build).unwrap();
        assert!(dir.path().join("layers/en/stats.csv").exists());
        // the sentiment stage itself fails on the missing file
        let mut p2 = Pipeline::new(config, false);
        assert!(p2.run(Stage::Sentiment).is_err());
    }

    #[test]
    fn missing_intermediate_is_reproduced_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let mut p = Pipeline::new(config.clone(), false);
        p.run(Stage::Communities).unwrap();
        let partition_path = dir.path().join("communities/en/partition.csv");
        let original = std::fs::read(&partition_path).unwrap();
        std::fs::remove_file(dir.path().join("layers/en/stats.csv")).unwrap();
        std::fs::remove_file(&partition_path).unwrap();

        let mut p2 = Pipeline::new(config, false);
        p2.run(Stage::Communities).unwrap();
        assert!(dir.path().join("layers/en/stats.csv").exists());
        assert_eq!(std::fs::read(&partition_path).unwrap(), original);
    }
}
