//! Turning selected components into the JSON and HTML topic report.
//! Runs the staged pipeline on the toy corpus, then reads the report back.
//!
//!     cargo run --release --example topic_report

use std::path::PathBuf;

use tensor_topics::ensemble::Strategy;
use tensor_topics::pipeline::{self, PipelineConfig};
use tensor_topics::report::read_report;

fn main() -> tensor_topics::Result<()> {
    let root = std::env::temp_dir().join("tensor-topics-report-example");
    let mut cfg = PipelineConfig {
        corpus: Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.csv")),
        workdir: root.join("work"),
        output: root.join("report"),
        top_n: 5,
        keyword_count: 15,
        ..PipelineConfig::default()
    };
    cfg.selection.ranks = vec![2, 3, 4];
    cfg.selection.strategy = Strategy::GreedyDedup;
    cfg.als.seed = 7;

    pipeline::ingest(&cfg)?;
    pipeline::factorize(&cfg)?;
    pipeline::select(&cfg)?;
    let bundle = pipeline::report(&cfg)?;

    let doc = read_report(&bundle.report)?;
    for c in &doc.components {
        println!("component {} (λ = {:.3})", c.id, c.weight);
        for m in &c.modes {
            let top: Vec<&str> = m.entries.iter().take(3).map(|e| e.label.as_str()).collect();
            println!("  {:<9} {}", m.mode, top.join(" | "));
        }
    }
    println!("open {} in a browser", bundle.html.display());
    Ok(())
}
