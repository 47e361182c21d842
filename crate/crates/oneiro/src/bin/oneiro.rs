//! Thin CLI over the pipeline: every subcommand parses flags, applies them
//! as config overrides, and delegates to `oneiro::pipeline`.
//!
//! Exit codes: 0 success, 1 validation error (bad config or inputs),
//! 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oneiro::error::Error;
use oneiro::pipeline::{AlphaMode, CutConfig, Pipeline, RunConfig, Stage};
use oneiro::sentiment::SimilarityMethod;

#[derive(Parser)]
#[command(
    name = "oneiro",
    version,
    about = "Similarity networks from symbol-interpretation corpora: backbones, communities, cross-language correlation, sentiment clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest corpora, build TF-IDF similarity networks, extract backbones
    Build(StageArgs),
    /// Detect communities (seeded Louvain restarts) and label them
    Communities(StageArgs),
    /// Align layers via translation maps and correlate strengths/weights
    Align(StageArgs),
    /// Score happiness, compare communities, cluster them by sentiment
    Sentiment(StageArgs),
    /// Run everything and emit the consolidated report and tables
    Report(StageArgs),
    /// Check a config file and all referenced inputs without running
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Backbone significance level in (0, 1] or "auto" for the minimal
    /// connected backbone
    #[arg(long)]
    alpha: Option<String>,
    /// Louvain base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Louvain restart count
    #[arg(long)]
    restarts: Option<usize>,
    /// Symbols listed per community
    #[arg(long)]
    top_k: Option<usize>,
    /// Flat sentiment cluster count (overrides the configured cut)
    #[arg(long)]
    clusters: Option<usize>,
    /// Sentiment similarity: t_test_p, t_test_p_student or js_similarity
    #[arg(long)]
    method: Option<String>,
    /// Re-run stages even when artifacts are stale or the config changed
    #[arg(long)]
    force: bool,
    /// Dump per-document TF-IDF vectors as TSV
    #[arg(long)]
    dump_vectors: bool,
    /// Worker threads (0 = auto)
    #[arg(long)]
    workers: Option<usize>,
}

impl StageArgs {
    fn load_config(&self) -> Result<RunConfig, Error> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(alpha) = &self.alpha {
            config.alpha = if alpha == "auto" {
                AlphaMode::Named("auto".into())
            } else {
                let v: f64 = alpha.parse().map_err(|_| {
                    Error::Config(format!(
                        "--alpha must be a number or \"auto\", got '{alpha}'"
                    ))
                })?;
                AlphaMode::Fixed(v)
            };
        }
        if let Some(seed) = self.seed {
            config.louvain.base_seed = seed;
        }
        if let Some(restarts) = self.restarts {
            config.louvain.restarts = restarts;
        }
        if let Some(top_k) = self.top_k {
            config.top_k = top_k;
        }
        if let Some(k) = self.clusters {
            match &mut config.sentiment {
                Some(s) => s.cut = CutConfig::K(k),
                None => {
                    return Err(Error::Config(
                        "--clusters given but no sentiment stage configured".into(),
                    ))
                }
            }
        }
        if let Some(method) = &self.method {
            let parsed = match method.as_str() {
                "t_test_p" => SimilarityMethod::TTestP,
                "t_test_p_student" => SimilarityMethod::TTestPStudent,
                "js_similarity" => SimilarityMethod::JsSimilarity,
                other => return Err(Error::Config(format!(
                    "--method must be t_test_p, t_test_p_student or js_similarity, got '{other}'"
                ))),
            };
            match &mut config.sentiment {
                Some(s) => s.method = parsed,
                None => {
                    return Err(Error::Config(
                        "--method given but no sentiment stage configured".into(),
                    ))
                }
            }
        }
        if let Some(w) = self.workers {
            config.workers = w;
        }
        config.dump_vectors |= self.dump_vectors;
        Ok(config)
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidInput(_) | Error::Parse { .. } => 1,
        _ => 2,
    }
}

fn run_stage(args: &StageArgs, stage: Stage) -> Result<(), Error> {
    let config = args.load_config()?;
    if config.workers > 0 {
        // a global pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global();
    }
    let out = config.out.clone();
    let mut pipeline = Pipeline::new(config, args.force);
    pipeline.run(stage)?;
    for (lang, alpha, kept, full) in pipeline.layer_alphas() {
        eprintln!("layer {lang}: alpha = {alpha}, backbone keeps {kept} of {full} edges");
    }
    for (lang, parts) in pipeline.disconnected_backbones() {
        eprintln!(
            "warning: backbone of layer {lang} has {parts} components; \
             path statistics cover the largest"
        );
    }
    eprintln!("{} artifacts under {}", stage.name(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => run_stage(a, Stage::Build),
        Command::Communities(a) => run_stage(a, Stage::Communities),
        Command::Align(a) => run_stage(a, Stage::Align),
        Command::Sentiment(a) => run_stage(a, Stage::Sentiment),
        Command::Report(a) => run_stage(a, Stage::Report),
        Command::Validate { config } => (|| {
            let config = RunConfig::load(config)?;
            for note in config.validate()? {
                eprintln!("{note}");
            }
            eprintln!("configuration is valid");
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
