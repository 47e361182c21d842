//! The whole pipeline through the `Pipeline` API: build, communities,
//! alignment, sentiment, and the consolidated report, driven by the bundled
//! configuration. Equivalent to `oneiro report --config ...`.
//!
//! ```bash
//! cargo run -p oneiro --example full_pipeline
//! ```

use std::path::PathBuf;

use oneiro::pipeline::{Pipeline, RunConfig, Stage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut config = RunConfig::load(&fixtures.join("config.json"))?;
    config.out = std::env::temp_dir().join("oneiro_full_pipeline_example");
    let _ = std::fs::remove_dir_all(&config.out);

    for note in config.validate()? {
        println!("{note}");
    }

    let out = config.out.clone();
    let mut pipeline = Pipeline::new(config, false);
    pipeline.run(Stage::Report)?;
    for (lang, alpha, kept, full) in pipeline.layer_alphas() {
        println!("layer {lang}: alpha* = {alpha:.4}, backbone keeps {kept} of {full} edges");
    }

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report/report.json"))?)?;
    for (lang, layer) in report["layers"].as_object().unwrap() {
        println!(
            "{lang}: best Q = {:.4}, {} communities, reference NMI = {}",
            layer["best_q"].as_f64().unwrap(),
            layer["n_communities"],
            layer["reference_nmi"]
        );
    }
    println!("sentiment clusters: {}", report["sentiment"]["clusters"]);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json"))?)?;
    println!(
        "{} content-hashed artifacts under {}",
        manifest.as_object().unwrap().len(),
        out.display()
    );
    println!("tables: report/table1.csv, report/table2.csv, report/table3.csv");
    Ok(())
}
