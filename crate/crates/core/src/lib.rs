//! Topic extraction from article corpora by sparse CP tensor decomposition.
//!
//! The pipeline builds an order-4 tensor indexed by first author, document,
//! journal and word, with entries `ln(1 + count)`; factorizes it with CP-ALS
//! at an ensemble of ranks; selects mutually distinct components by cosine
//! similarity of their word factors; and reports each component's top
//! authors, documents, journals and keywords.
//!
//! ```no_run
//! use tensor_topics::corpus::{self, CleaningRules, CorpusFormat};
//! use tensor_topics::cp_als::AlsOptions;
//! use tensor_topics::ensemble::{self, SelectionConfig};
//!
//! let rules = CleaningRules::default();
//! let loaded = corpus::load_corpus("articles.csv".as_ref(), CorpusFormat::Csv)?;
//! let records = corpus::dedup(&corpus::clean_and_filter(&loaded.records, &rules));
//! let counts = corpus::build_counts(&records, &rules);
//! let tensor = corpus::counts_to_tensor(&counts)?;
//!
//! let cfg = SelectionConfig { ranks: vec![5, 10], ..SelectionConfig::default() };
//! let pool = ensemble::decompose_ensemble(&tensor, &cfg, &AlsOptions::default())?;
//! let kept = ensemble::select_components(&pool, &cfg, corpus::WORD_MODE)?;
//! println!("{} of {} components kept", kept.len(), pool.len());
//! # Ok::<(), tensor_topics::Error>(())
//! ```

pub mod cli;
pub mod corpus;
pub mod cp_als;
pub mod ensemble;
mod error;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod sparse_tensor;

pub use error::{Error, Result};
