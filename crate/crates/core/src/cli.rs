//! Command-line front end over [`crate::pipeline`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::corpus::CorpusFormat;
use crate::ensemble::Strategy;
use crate::error::Result;
use crate::pipeline::{self, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "tensor-topics", version, about = "Sparse CP-ALS topic extraction for article corpora")]
pub struct Cli {
    /// Pipeline config file (TOML key-value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for factor initialization.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (1 = sequential, bitwise reproducible).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Comma-separated, ascending rank list, e.g. 20,40,60.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// Cosine similarity threshold in [0, 1].
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// stable-then-dedup | greedy-dedup
    #[arg(long, global = true)]
    pub strategy: Option<Strategy>,
    /// Entries reported per mode.
    #[arg(long = "top-n", global = true)]
    pub top_n: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CorpusArgs {
    /// Corpus table (CSV or TSV).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// csv | tsv (default: from the file extension).
    #[arg(long)]
    pub format: Option<CorpusFormat>,
}

#[derive(Debug, Args, Default)]
pub struct WorkdirArgs {
    #[arg(long)]
    pub workdir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the tensor from a corpus table.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        work: WorkdirArgs,
    },
    /// Run CP-ALS at every configured rank.
    Factorize {
        #[command(flatten)]
        work: WorkdirArgs,
    },
    /// Pool components across ranks and keep distinct topics.
    Select {
        #[command(flatten)]
        work: WorkdirArgs,
        /// Write the full pooled similarity matrix into selection.json.
        #[arg(long)]
        similarity_matrix: bool,
    },
    /// Write report.json, summary.json and index.html.
    Report {
        #[command(flatten)]
        work: WorkdirArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// All stages end to end.
    Pipeline {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        work: WorkdirArgs,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        similarity_matrix: bool,
    },
}

impl Cli {
    /// Config file values overridden by flags.
    pub fn resolve_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.als.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if let Some(r) = &self.ranks {
            cfg.selection.ranks = r.clone();
        }
        if let Some(t) = self.threshold {
            cfg.selection.threshold = t;
        }
        if let Some(s) = self.strategy {
            cfg.selection.strategy = s;
        }
        if let Some(n) = self.top_n {
            cfg.top_n = n;
        }

        let (corpus, work, output, sim) = match &self.command {
            Command::Ingest { corpus, work } => (Some(corpus), work, None, false),
            Command::Factorize { work } => (None, work, None, false),
            Command::Select { work, similarity_matrix } => (None, work, None, *similarity_matrix),
            Command::Report { work, output } => (None, work, output.as_ref(), false),
            Command::Pipeline {
                corpus,
                work,
                output,
                similarity_matrix,
            } => (Some(corpus), work, output.as_ref(), *similarity_matrix),
        };
        if let Some(c) = corpus {
            if let Some(p) = &c.corpus {
                cfg.corpus = Some(p.clone());
            }
            if let Some(f) = c.format {
                cfg.format = Some(f);
            }
        }
        if let Some(w) = &work.workdir {
            cfg.workdir = w.clone();
        }
        if let Some(o) = output {
            cfg.output = o.clone();
        }
        cfg.similarity_matrix |= sim;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn execute(&self) -> Result<()> {
        let cfg = self.resolve_config()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| self.dispatch(&cfg))
    }

    fn dispatch(&self, cfg: &PipelineConfig) -> Result<()> {
        match &self.command {
            Command::Ingest { .. } => {
                let s = pipeline::ingest(cfg)?;
                println!(
                    "tensor {:?}: {} nonzeros (density {:.3e}) from {} of {} records",
                    s.shape, s.nnz, s.density, s.records_after_dedup, s.records_loaded
                );
            }
            Command::Factorize { .. } => {
                for f in pipeline::factorize(cfg)? {
                    match (&f.final_fit, &f.error) {
                        (Some(fit), _) => println!(
                            "rank {:>4}: fit {fit:.6} after {} sweeps{}",
                            f.rank,
                            f.iterations,
                            if f.converged { "" } else { " (not converged)" }
                        ),
                        (None, err) => println!("rank {:>4}: failed: {}", f.rank, err.as_deref().unwrap_or("?")),
                    }
                }
            }
            Command::Select { .. } => {
                let s = pipeline::select(cfg)?;
                println!(
                    "kept {} of {} components (threshold {}, {})",
                    s.kept.len(),
                    s.pooled_components,
                    s.threshold,
                    s.strategy
                );
                for k in &s.kept {
                    let partners: Vec<String> = k
                        .stability_partners
                        .iter()
                        .map(|(id, c)| format!("{id} ({c:.3})"))
                        .collect();
                    println!("  {} λ={:.4e}  partners: {}", k.id, k.weight, partners.join(", "));
                }
            }
            Command::Report { .. } => print_bundle(&pipeline::report(cfg)?),
            Command::Pipeline { .. } => print_bundle(&pipeline::run_pipeline(cfg)?),
        }
        Ok(())
    }
}

fn print_bundle(b: &crate::report::ReportBundle) {
    println!("wrote {}", b.report.display());
    println!("wrote {}", b.summary.display());
    println!("wrote {}", b.html.display());
}

/// Parses `argv` (including the program name) and runs it. Returns the
/// process exit status.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
