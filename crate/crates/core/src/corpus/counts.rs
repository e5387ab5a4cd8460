use std::collections::{BTreeMap, HashMap, HashSet};

use super::clean::{raw_tokens, CleaningRules};
use super::{CorpusRecord, MODE_NAMES};
use crate::error::{Error, Result};
use crate::sparse_tensor::io::LabeledTensor;
use crate::sparse_tensor::{AxisMap, SparseTensor};

pub const UNKNOWN_JOURNAL: &str = "(unknown-journal)";
pub const UNKNOWN_AUTHOR: &str = "(unknown-author)";
const UNTITLED: &str = "(untitled)";

/// Word counts keyed by `[author, document, journal, word]` indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadCounts {
    pub counts: BTreeMap<[usize; 4], u64>,
    pub axes: [AxisMap; 4],
}

impl QuadCounts {
    pub fn total_tokens(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn shape(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|k| self.axes[k].len())
    }

    pub fn to_labeled(&self) -> Result<LabeledTensor> {
        LabeledTensor::new(
            counts_to_tensor(self)?,
            MODE_NAMES.iter().map(|s| s.to_string()).collect(),
            self.axes.to_vec(),
        )
    }
}

/// Aggregates per-document word counts. Axes are numbered in first-seen
/// order; records with no surviving tokens are skipped entirely.
pub fn build_counts(records: &[CorpusRecord], rules: &CleaningRules) -> QuadCounts {
    let token_lists: Vec<Vec<String>> = records
        .iter()
        .map(|r| filtered_tokens(&r.body, rules))
        .collect();
    let name_like = if rules.name_df_floor > 0 {
        probable_names(records, &token_lists, rules.name_df_floor)
    } else {
        HashSet::new()
    };

    let mut q = QuadCounts::default();
    for (p, (record, tokens)) in records.iter().zip(&token_lists).enumerate() {
        let tokens: Vec<&String> = tokens.iter().filter(|t| !name_like.contains(*t)).collect();
        if tokens.is_empty() {
            log::info!("record {p} ({:?}) has no tokens after filtering", record.title);
            continue;
        }
        let author = q.axes[0].intern(or_sentinel(&record.first_author, UNKNOWN_AUTHOR));
        let doc = q.axes[1].intern(unique_doc_label(&q.axes[1], &record.title));
        let journal = q.axes[2].intern(or_sentinel(&record.journal, UNKNOWN_JOURNAL));
        for t in tokens {
            let w = q.axes[3].intern(t.as_str());
            *q.counts.entry([author, doc, journal, w]).or_insert(0) += 1;
        }
    }
    q
}

fn filtered_tokens(body: &str, rules: &CleaningRules) -> Vec<String> {
    raw_tokens(body)
        .map(str::to_lowercase)
        .filter(|t| rules.keep_token(t))
        .collect()
}

/// Words that only ever appear capitalized and occur in fewer than `floor`
/// documents.
fn probable_names(records: &[CorpusRecord], tokens: &[Vec<String>], floor: usize) -> HashSet<String> {
    let mut lower_seen = HashSet::new();
    for r in records {
        for raw in raw_tokens(&r.body) {
            if !raw.chars().next().is_some_and(char::is_uppercase) {
                lower_seen.insert(raw.to_lowercase());
            }
        }
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for list in tokens {
        let distinct: HashSet<&str> = list.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    df.into_iter()
        .filter(|(t, n)| *n < floor && !lower_seen.contains(*t))
        .map(|(t, _)| t.to_string())
        .collect()
}

fn or_sentinel<'a>(s: &'a str, sentinel: &'a str) -> &'a str {
    if s.trim().is_empty() {
        sentinel
    } else {
        s
    }
}

fn unique_doc_label(docs: &AxisMap, title: &str) -> String {
    let base = or_sentinel(title, UNTITLED);
    if docs.index_of(base).is_none() {
        return base.to_string();
    }
    (2..)
        .map(|k| format!("{base} #{k}"))
        .find(|l| docs.index_of(l).is_none())
        .expect("unbounded search")
}

/// One nonzero per count with value `ln(1 + count)`.
pub fn counts_to_tensor(q: &QuadCounts) -> Result<SparseTensor> {
    let shape = q.shape();
    if shape.contains(&0) {
        return Err(Error::EmptyTensor("corpus produced no tokens"));
    }
    SparseTensor::from_entries(
        q.counts.iter().map(|(c, &n)| (*c, (1.0 + n as f64).ln())),
        &shape,
    )
}
