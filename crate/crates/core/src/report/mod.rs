//! Human-readable groupings for selected components, written as JSON plus a
//! self-contained static HTML page.

mod html;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{Component, ComponentId, Strategy};
use crate::error::{Error, IoContext, Result};
use crate::sparse_tensor::AxisMap;

pub const SCHEMA_VERSION: u32 = 1;
/// Entries shown per mode, matching the published component plots.
pub const DEFAULT_TOP_N: usize = 13;
/// Words emitted per word cloud.
pub const DEFAULT_KEYWORD_COUNT: usize = 50;

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const HTML_FILE: &str = "index.html";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredLabel {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntries {
    pub mode: String,
    pub entries: Vec<ScoredLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub id: ComponentId,
    pub weight: f64,
    /// Top entries of every mode's factor slice.
    pub modes: Vec<ModeEntries>,
    /// Word-cloud data: top words of the word mode with raw factor weights.
    pub keywords: Vec<ScoredLabel>,
}

/// The `n` largest entries of one factor slice, labeled. Ties are broken
/// by label. Asking for more entries than exist returns them all.
pub fn top_n(c: &Component, mode: usize, n: usize, axis: &AxisMap) -> Result<Vec<ScoredLabel>> {
    if n == 0 {
        return Err(Error::InvalidArgument("top_n requires n ≥ 1".into()));
    }
    let slice = c
        .factor_slices
        .get(mode)
        .ok_or_else(|| Error::InvalidArgument(format!("component has no mode {mode}")))?;
    if slice.len() != axis.len() {
        return Err(Error::ShapeMismatch(format!(
            "mode {mode} slice has {} entries, axis has {} labels",
            slice.len(),
            axis.len()
        )));
    }
    let mut order: Vec<usize> = (0..slice.len()).collect();
    order.sort_by(|&a, &b| {
        slice[b]
            .total_cmp(&slice[a])
            .then_with(|| axis.labels()[a].cmp(&axis.labels()[b]))
    });
    Ok(order
        .into_iter()
        .take(n)
        .map(|i| ScoredLabel {
            label: axis.labels()[i].clone(),
            score: slice[i],
        })
        .collect())
}

pub fn keyword_cloud(
    c: &Component,
    word_mode: usize,
    n: usize,
    words: &AxisMap,
) -> Result<Vec<ScoredLabel>> {
    top_n(c, word_mode, n, words)
}

/// Builds the report for one component.
pub fn component_report(
    c: &Component,
    mode_names: &[String],
    axes: &[AxisMap],
    word_mode: usize,
    top: usize,
    keyword_count: usize,
) -> Result<ComponentReport> {
    if axes.len() != c.factor_slices.len() || mode_names.len() != axes.len() {
        return Err(Error::ShapeMismatch(format!(
            "component has {} modes, {} axes supplied",
            c.factor_slices.len(),
            axes.len()
        )));
    }
    let modes = mode_names
        .iter()
        .zip(axes)
        .enumerate()
        .map(|(k, (name, axis))| {
            Ok(ModeEntries {
                mode: name.clone(),
                entries: top_n(c, k, top, axis)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ComponentReport {
        id: c.id(),
        weight: c.weight,
        modes,
        keywords: keyword_cloud(c, word_mode, keyword_count, &axes[word_mode])?,
    })
}

/// Run-level facts written to the summary index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub ranks: Vec<usize>,
    pub threshold: f64,
    pub strategy: Strategy,
    /// Components pooled across all ranks before selection.
    pub pooled_components: usize,
    pub top_n: usize,
    pub keyword_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub meta: ReportMeta,
    pub components: Vec<ComponentReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub component_count: usize,
    pub pooled_components: usize,
    pub ranks: Vec<usize>,
    pub threshold: f64,
    pub strategy: Strategy,
    pub components: Vec<ComponentId>,
}

/// Paths of the files written by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub report: PathBuf,
    pub summary: PathBuf,
    pub html: PathBuf,
}

/// Writes `report.json`, `summary.json` and `index.html` into `out_dir`.
pub fn emit_report(reports: &[ComponentReport], meta: &ReportMeta, out_dir: &Path) -> Result<ReportBundle> {
    fs::create_dir_all(out_dir).at(out_dir)?;
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        meta: meta.clone(),
        components: reports.to_vec(),
    };
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        component_count: reports.len(),
        pooled_components: meta.pooled_components,
        ranks: meta.ranks.clone(),
        threshold: meta.threshold,
        strategy: meta.strategy,
        components: reports.iter().map(|r| r.id).collect(),
    };
    let bundle = ReportBundle {
        report: out_dir.join(REPORT_FILE),
        summary: out_dir.join(SUMMARY_FILE),
        html: out_dir.join(HTML_FILE),
    };
    write_json(&bundle.report, &doc)?;
    write_json(&bundle.summary, &summary)?;
    fs::write(&bundle.html, html::render(&doc)).at(&bundle.html)?;
    Ok(bundle)
}

pub fn read_report(path: &Path) -> Result<ReportDocument> {
    let text = fs::read_to_string(path).at(path)?;
    let doc: ReportDocument = serde_json::from_str(&text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Format {
            path: path.to_path_buf(),
            line: 0,
            message: format!("unsupported schema_version {}", doc.schema_version),
        });
    }
    Ok(doc)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).at(path)
}
