//! End to end from a config file, as the CLI's `pipeline` subcommand does.
//!
//!     cargo run --release --example pipeline [config.toml]

use std::path::PathBuf;

use tensor_topics::pipeline::{run_pipeline, PipelineConfig};

fn main() -> tensor_topics::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let config = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy.toml"));
    let mut cfg = PipelineConfig::from_file(&config)?;
    let root = std::env::temp_dir().join("tensor-topics-pipeline-example");
    cfg.workdir = root.join("work");
    cfg.output = root.join("report");
    let bundle = run_pipeline(&cfg)?;
    println!("{}", bundle.summary.display());
    println!("{}", bundle.html.display());
    Ok(())
}
