//! Rank ensembles: factorize at several ranks, pool every component, and
//! keep a set of mutually distinct topics chosen by word-factor cosine
//! similarity.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cp_als::{self, mix_seed, AlsOptions, AlsResult, KruskalModel};
use crate::error::{Error, Result};
use crate::sparse_tensor::SparseTensor;

/// Ranks used for the CORD-19 study.
pub const DEFAULT_RANKS: [usize; 7] = [20, 40, 60, 80, 100, 120, 200];
pub const DEFAULT_THRESHOLD: f64 = 0.35;

/// `(origin_rank, index_in_model)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentId {
    pub origin_rank: usize,
    pub index: usize,
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}#{}", self.origin_rank, self.index)
    }
}

/// One rank-one term of a Kruskal model, tagged with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub origin_rank: usize,
    pub index_in_model: usize,
    pub weight: f64,
    /// Column `index_in_model` of each factor matrix.
    pub factor_slices: Vec<Vec<f64>>,
}

impl Component {
    pub fn id(&self) -> ComponentId {
        ComponentId {
            origin_rank: self.origin_rank,
            index: self.index_in_model,
        }
    }

    /// Splits a model into its components.
    pub fn from_model(model: &KruskalModel, origin_rank: usize) -> Vec<Component> {
        (0..model.rank())
            .map(|r| Component {
                origin_rank,
                index_in_model: r,
                weight: model.weights[r],
                factor_slices: model.factors.iter().map(|f| f.column(r)).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Keep only components that recur across ranks, then deduplicate.
    #[default]
    StableThenDedup,
    /// Deduplicate the whole pool.
    GreedyDedup,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::StableThenDedup => "stable-then-dedup",
            Strategy::GreedyDedup => "greedy-dedup",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stable-then-dedup" => Ok(Strategy::StableThenDedup),
            "greedy-dedup" => Ok(Strategy::GreedyDedup),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy {other:?} (expected stable-then-dedup or greedy-dedup)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub ranks: Vec<usize>,
    pub threshold: f64,
    pub strategy: Strategy,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            ranks: DEFAULT_RANKS.to_vec(),
            threshold: DEFAULT_THRESHOLD,
            strategy: Strategy::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() {
            return Err(Error::InvalidArgument("rank list is empty".into()));
        }
        if self.ranks.contains(&0) {
            return Err(Error::InvalidArgument("ranks must be positive".into()));
        }
        if self.ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "ranks must be distinct and ascending".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidArgument(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Outcome of factorizing at one rank.
#[derive(Debug)]
pub struct RankRun {
    pub rank: usize,
    pub result: Result<AlsResult>,
}

/// Seed used for the run at `rank`.
pub fn rank_seed(seed: u64, rank: usize) -> u64 {
    mix_seed(seed, rank as u64)
}

/// Runs CP-ALS once per rank. With `opts.parallel` the ranks run
/// concurrently, each with the sequential kernel, so results do not depend
/// on the thread count.
pub fn factorize_ranks(t: &SparseTensor, ranks: &[usize], opts: &AlsOptions) -> Vec<RankRun> {
    let run = |&rank: &usize| {
        let opts = AlsOptions {
            seed: rank_seed(opts.seed, rank),
            parallel: false,
            ..opts.clone()
        };
        RankRun {
            rank,
            result: cp_als::cp_als(t, rank, &opts),
        }
    };
    if opts.parallel {
        ranks.par_iter().map(run).collect()
    } else {
        ranks.iter().map(run).collect()
    }
}

/// Pools the components of every successful run. Failed ranks are logged
/// and skipped.
pub fn pool_components(runs: &[RankRun]) -> Vec<Component> {
    let mut pool = Vec::new();
    for run in runs {
        match &run.result {
            Ok(res) => pool.extend(Component::from_model(&res.model, run.rank)),
            Err(e) => log::warn!("rank {} dropped from the ensemble: {e}", run.rank),
        }
    }
    pool
}

pub fn decompose_ensemble(
    t: &SparseTensor,
    cfg: &SelectionConfig,
    opts: &AlsOptions,
) -> Result<Vec<Component>> {
    cfg.validate()?;
    Ok(pool_components(&factorize_ranks(t, &cfg.ranks, opts)))
}

/// `u·v / (‖u‖₂‖v‖₂)`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let nu = norm2(u);
    let nv = norm2(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm2(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Pairwise word-factor cosines. A component with an all-zero word factor
/// has similarity 0 to everything else.
pub fn similarity_matrix(components: &[Component], word_mode: usize) -> Vec<Vec<f64>> {
    let n = components.len();
    let norms: Vec<f64> = components
        .iter()
        .map(|c| norm2(&c.factor_slices[word_mode]))
        .collect();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        s[i][i] = 1.0;
        for j in i + 1..n {
            let denom = norms[i] * norms[j];
            let c = if denom > 0.0 {
                let d = dot(&components[i].factor_slices[word_mode], &components[j].factor_slices[word_mode]);
                (d / denom).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            s[i][j] = c;
            s[j][i] = c;
        }
    }
    s
}

/// A kept component and the cross-rank components it agrees with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptComponent {
    pub id: ComponentId,
    pub weight: f64,
    /// Components of other ranks whose word-factor cosine is ≥ τ, as
    /// `(id, cosine)`, most similar first.
    pub stability_partners: Vec<(ComponentId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Positions in the input pool, in selection order.
    pub kept: Vec<usize>,
    pub details: Vec<KeptComponent>,
    pub similarity: Vec<Vec<f64>>,
}

/// Runs the configured selection strategy over a component pool.
pub fn select(components: &[Component], cfg: &SelectionConfig, word_mode: usize) -> Result<Selection> {
    if components.is_empty() {
        return Ok(Selection {
            kept: Vec::new(),
            details: Vec::new(),
            similarity: Vec::new(),
        });
    }
    let width = components[0].factor_slices.get(word_mode).map(Vec::len);
    for c in components {
        match c.factor_slices.get(word_mode) {
            Some(s) if Some(s.len()) == width => {}
            _ => {
                return Err(Error::ShapeMismatch(format!(
                    "component {} has no word factor of length {width:?} in mode {word_mode}",
                    c.id()
                )))
            }
        }
    }

    let tau = cfg.threshold;
    let sim = similarity_matrix(components, word_mode);
    let n = components.len();
    let partners = |i: usize| -> Vec<(ComponentId, f64)> {
        let mut p: Vec<(usize, f64)> = (0..n)
            .filter(|&j| components[j].origin_rank != components[i].origin_rank && sim[i][j] >= tau)
            .map(|j| (j, sim[i][j]))
            .collect();
        p.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| components[a.0].id().cmp(&components[b.0].id())));
        p.into_iter().map(|(j, c)| (components[j].id(), c)).collect()
    };

    let mut candidates: Vec<usize> = match cfg.strategy {
        Strategy::StableThenDedup => (0..n).filter(|&i| !partners(i).is_empty()).collect(),
        Strategy::GreedyDedup => (0..n).collect(),
    };
    candidates.sort_by(|&a, &b| {
        components[b]
            .weight
            .abs()
            .total_cmp(&components[a].weight.abs())
            .then_with(|| components[a].id().cmp(&components[b].id()))
    });

    let mut kept: Vec<usize> = Vec::new();
    for i in candidates {
        if kept.iter().all(|&k| sim[i][k] < tau) {
            kept.push(i);
        }
    }

    let details = kept
        .iter()
        .map(|&i| KeptComponent {
            id: components[i].id(),
            weight: components[i].weight,
            stability_partners: partners(i),
        })
        .collect();
    Ok(Selection {
        kept,
        details,
        similarity: sim,
    })
}

/// The kept components, in selection order.
pub fn select_components(
    components: &[Component],
    cfg: &SelectionConfig,
    word_mode: usize,
) -> Result<Vec<Component>> {
    let sel = select(components, cfg, word_mode)?;
    Ok(sel.kept.iter().map(|&i| components[i].clone()).collect())
}
