//! The staged ingest → factorize → select → report workflow and its
//! on-disk layout.
//!
//! ```text
//! <workdir>/
//!   tensor/tensor.tns, tensor/axis-<mode>.txt
//!   ingest.json                 corpus statistics
//!   models/rank-<R>.model       one Kruskal model per rank
//!   models/fits.json            per-rank fit history and failures
//!   selection.json              kept components, stability partners
//! <output>/
//!   report.json, summary.json, index.html
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CleaningRules, CleaningRulesFile, CorpusFormat, WORD_MODE};
use crate::cp_als::{self, AlsOptions};
use crate::ensemble::{self, Component, ComponentId, KeptComponent, SelectionConfig, Strategy};
use crate::error::{Error, IoContext, Result};
use crate::report::{self, ReportBundle, ReportMeta, DEFAULT_KEYWORD_COUNT, DEFAULT_TOP_N};
use crate::sparse_tensor::io::LabeledTensor;

pub const TENSOR_DIR: &str = "tensor";
pub const MODELS_DIR: &str = "models";
pub const INGEST_FILE: &str = "ingest.json";
pub const FITS_FILE: &str = "fits.json";
pub const SELECTION_FILE: &str = "selection.json";
pub const SCHEMA_VERSION: u32 = 1;

/// Everything a pipeline run needs.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub format: Option<CorpusFormat>,
    pub workdir: PathBuf,
    pub output: PathBuf,
    pub rules: CleaningRules,
    pub selection: SelectionConfig,
    pub als: AlsOptions,
    /// Worker threads; 1 runs everything sequentially.
    pub threads: usize,
    pub top_n: usize,
    pub keyword_count: usize,
    /// Include the full pooled similarity matrix in `selection.json`.
    pub similarity_matrix: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            format: None,
            workdir: PathBuf::from("work"),
            output: PathBuf::from("report"),
            rules: CleaningRules::default(),
            selection: SelectionConfig::default(),
            als: AlsOptions::default(),
            threads: 1,
            top_n: DEFAULT_TOP_N,
            keyword_count: DEFAULT_KEYWORD_COUNT,
            similarity_matrix: false,
        }
    }
}

/// TOML form of [`PipelineConfig`]. Relative paths resolve against the
/// config file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfigFile {
    pub corpus: Option<String>,
    pub format: Option<String>,
    pub workdir: Option<String>,
    pub output: Option<String>,
    /// Path to a separate cleaning-rules file.
    pub rules: Option<String>,
    /// Inline cleaning rules; applied after `rules`.
    pub cleaning: Option<CleaningRulesFile>,
    pub ranks: Option<Vec<usize>>,
    pub threshold: Option<f64>,
    pub strategy: Option<String>,
    pub max_iters: Option<usize>,
    pub fit_tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub top_n: Option<usize>,
    pub keyword_count: Option<usize>,
    pub similarity_matrix: Option<bool>,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).at(path)?;
        let file: PipelineConfigFile = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_parsed(file, base)
    }

    pub fn from_parsed(file: PipelineConfigFile, base: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let resolve = |p: &str| base.join(p);
        cfg.corpus = file.corpus.as_deref().map(resolve);
        if let Some(f) = &file.format {
            cfg.format = Some(f.parse()?);
        }
        if let Some(w) = &file.workdir {
            cfg.workdir = resolve(w);
        }
        if let Some(o) = &file.output {
            cfg.output = resolve(o);
        }
        if let Some(r) = &file.rules {
            cfg.rules = CleaningRules::from_file(&resolve(r))?;
        }
        if let Some(inline) = file.cleaning {
            if file.rules.is_some() {
                return Err(Error::InvalidArgument(
                    "give cleaning rules either as `rules = <file>` or as a [cleaning] table, not both".into(),
                ));
            }
            cfg.rules = inline.into_rules(base)?;
        }
        if let Some(r) = file.ranks {
            cfg.selection.ranks = r;
        }
        if let Some(t) = file.threshold {
            cfg.selection.threshold = t;
        }
        if let Some(s) = &file.strategy {
            cfg.selection.strategy = s.parse()?;
        }
        if let Some(v) = file.max_iters {
            cfg.als.max_iters = v;
        }
        if let Some(v) = file.fit_tolerance {
            cfg.als.fit_tolerance = v;
        }
        if let Some(v) = file.seed {
            cfg.als.seed = v;
        }
        if let Some(v) = file.threads {
            cfg.threads = v;
        }
        if let Some(v) = file.top_n {
            cfg.top_n = v;
        }
        if let Some(v) = file.keyword_count {
            cfg.keyword_count = v;
        }
        if let Some(v) = file.similarity_matrix {
            cfg.similarity_matrix = v;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.rules.validate()?;
        self.selection.validate()?;
        self.als.validate()?;
        if self.threads == 0 {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        if self.top_n == 0 || self.keyword_count == 0 {
            return Err(Error::InvalidArgument("top_n and keyword_count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn tensor_dir(&self) -> PathBuf {
        self.workdir.join(TENSOR_DIR)
    }

    pub fn models_dir(&self) -> PathBuf {
        self.workdir.join(MODELS_DIR)
    }

    pub fn model_path(&self, rank: usize) -> PathBuf {
        self.models_dir().join(format!("rank-{rank:04}.model"))
    }

    pub fn selection_path(&self) -> PathBuf {
        self.workdir.join(SELECTION_FILE)
    }

    fn als_options(&self) -> AlsOptions {
        AlsOptions {
            parallel: self.threads > 1,
            ..self.als.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub schema_version: u32,
    pub records_loaded: usize,
    pub rows_skipped: usize,
    pub unreadable_bodies: usize,
    pub records_after_cleaning: usize,
    pub records_after_dedup: usize,
    pub shape: Vec<usize>,
    pub nnz: usize,
    pub density: f64,
    pub total_tokens: u64,
}

pub fn ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    let path = cfg
        .corpus
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("no corpus given (--corpus or `corpus` key)".into()))?;
    let format = cfg.format.unwrap_or_else(|| CorpusFormat::from_path(path));
    let loaded = corpus::load_corpus(path, format)?;
    let cleaned = corpus::clean_and_filter(&loaded.records, &cfg.rules);
    let records = corpus::dedup(&cleaned);
    let counts = corpus::build_counts(&records, &cfg.rules);
    let labeled = counts.to_labeled()?;
    labeled.write_dir(&cfg.tensor_dir())?;

    let t = &labeled.tensor;
    let summary = IngestSummary {
        schema_version: SCHEMA_VERSION,
        records_loaded: loaded.records.len(),
        rows_skipped: loaded.skipped_rows,
        unreadable_bodies: loaded.unreadable_bodies,
        records_after_cleaning: cleaned.len(),
        records_after_dedup: records.len(),
        shape: t.shape().to_vec(),
        nnz: t.nnz(),
        density: t.density(),
        total_tokens: counts.total_tokens(),
    };
    report::write_json(&cfg.workdir.join(INGEST_FILE), &summary)?;
    log::info!(
        "ingest: {} records → {} after cleaning → {} after dedup; shape {:?}, nnz {}",
        summary.records_loaded,
        summary.records_after_cleaning,
        summary.records_after_dedup,
        summary.shape,
        summary.nnz
    );
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFit {
    pub rank: usize,
    pub seed: u64,
    pub converged: bool,
    pub iterations: usize,
    pub final_fit: Option<f64>,
    pub fit_history: Vec<f64>,
    pub error: Option<String>,
}

/// Factorizes the ingested tensor once per configured rank and writes one
/// model file per successful rank.
pub fn factorize(cfg: &PipelineConfig) -> Result<Vec<RankFit>> {
    let labeled = LabeledTensor::read_dir(&cfg.tensor_dir())?;
    let runs = ensemble::factorize_ranks(&labeled.tensor, &cfg.selection.ranks, &cfg.als_options());
    fs::create_dir_all(cfg.models_dir()).at(cfg.models_dir())?;

    let mut fits = Vec::new();
    for run in runs {
        let seed = ensemble::rank_seed(cfg.als.seed, run.rank);
        match run.result {
            Ok(res) => {
                cp_als::io::write(&cfg.model_path(run.rank), &res.model, Some(&format!("../{TENSOR_DIR}")))?;
                log::info!("rank {}: fit {:.6} after {} sweeps", run.rank, res.final_fit(), res.fit_history.len());
                fits.push(RankFit {
                    rank: run.rank,
                    seed,
                    converged: res.converged,
                    iterations: res.fit_history.len(),
                    final_fit: Some(res.final_fit()),
                    fit_history: res.fit_history,
                    error: None,
                });
            }
            Err(e) => {
                log::warn!("rank {} failed: {e}", run.rank);
                let _ = fs::remove_file(cfg.model_path(run.rank));
                fits.push(RankFit {
                    rank: run.rank,
                    seed,
                    converged: false,
                    iterations: 0,
                    final_fit: None,
                    fit_history: Vec::new(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    report::write_json(&cfg.models_dir().join(FITS_FILE), &fits)?;
    Ok(fits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTable {
    pub ids: Vec<ComponentId>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    pub schema_version: u32,
    pub ranks: Vec<usize>,
    pub threshold: f64,
    pub strategy: Strategy,
    pub word_mode: usize,
    pub pooled_components: usize,
    pub kept: Vec<KeptComponent>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub similarity: Option<SimilarityTable>,
}

/// Loads the pooled components of every configured rank that has a model.
pub fn load_pool(cfg: &PipelineConfig) -> Result<Vec<Component>> {
    let mut pool = Vec::new();
    for &rank in &cfg.selection.ranks {
        let path = cfg.model_path(rank);
        if !path.exists() {
            log::warn!("no model for rank {rank} at {}; skipped", path.display());
            continue;
        }
        let (model, _) = cp_als::io::read(&path)?;
        pool.extend(Component::from_model(&model, rank));
    }
    Ok(pool)
}

pub fn select(cfg: &PipelineConfig) -> Result<SelectionFile> {
    let pool = load_pool(cfg)?;
    if pool.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no models for ranks {:?} under {}; run factorize first",
            cfg.selection.ranks,
            cfg.models_dir().display()
        )));
    }
    let sel =ensemble::select(&pool, &cfg.selection, WORD_MODE)?;
    let file = SelectionFile {
        schema_version: SCHEMA_VERSION,
        ranks: cfg.selection.ranks.clone(),
        threshold: cfg.selection.threshold,
        strategy: cfg.selection.strategy,
        word_mode: WORD_MODE,
        pooled_components: pool.len(),
        kept: sel.details,
        similarity: cfg.similarity_matrix.then(|| SimilarityTable {
            ids: pool.iter().map(Component::id).collect(),
            matrix: sel.similarity,
        }),
    };
    report::write_json(&cfg.selection_path(), &file)?;
    log::info!("select: kept {} of {} components", file.kept.len(), file.pooled_components);
    Ok(file)
}

pub fn read_selection(path: &Path) -> Result<SelectionFile> {
    let text = fs::read_to_string(path).at(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn report(cfg: &PipelineConfig) -> Result<ReportBundle> {
    let selection = read_selection(&cfg.selection_path())?;
    let labeled = LabeledTensor::read_dir(&cfg.tensor_dir())?;
    let mut reports = Vec::with_capacity(selection.kept.len());
    let mut cached: Option<(usize, Vec<Component>)> = None;
    for kept in &selection.kept {
        let rank = kept.id.origin_rank;
        if cached.as_ref().map(|(r, _)| *r) != Some(rank) {
            let (model, _) = cp_als::io::read(&cfg.model_path(rank))?;
            cached = Some((rank, Component::from_model(&model, rank)));
        }
        let components = &cached.as_ref().expect("just filled").1;
        let c = components.get(kept.id.index).ok_or_else(|| {
            Error::InvalidArgument(format!("selection names missing component {}", kept.id))
        })?;
        reports.push(report::component_report(
            c,
            &labeled.mode_names,
            &labeled.axes,
            selection.word_mode,
            cfg.top_n,
            cfg.keyword_count,
        )?);
    }
    let meta = ReportMeta {
        ranks: selection.ranks.clone(),
        threshold: selection.threshold,
        strategy: selection.strategy,
        pooled_components: selection.pooled_components,
        top_n: cfg.top_n,
        keyword_count: cfg.keyword_count,
    };
    report::emit_report(&reports, &meta, &cfg.output)
}

/// Runs every stage in order.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    ingest(cfg)?;
    factorize(cfg)?;
    select(cfg)?;
    report(cfg)
}
