//! CP decomposition of sparse tensors by alternating least squares.
//!
//! The result is a [`KruskalModel`] `⟦λ; A⁽¹⁾, …, A⁽ᵈ⁾⟧` whose factor
//! columns each sum to 1, with the absorbed magnitudes carried by `λ`.

pub mod io;
mod mttkrp;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use mttkrp::{mttkrp, mttkrp_par};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::sparse_tensor::SparseTensor;

/// Weighted sum of rank-one tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct KruskalModel {
    pub weights: Vec<f64>,
    pub factors: Vec<Matrix>,
}

impl KruskalModel {
    pub fn new(weights: Vec<f64>, factors: Vec<Matrix>) -> Result<Self> {
        let rank = weights.len();
        if let Some((d, f)) = factors.iter().enumerate().find(|(_, f)| f.cols() != rank) {
            return Err(Error::ShapeMismatch(format!(
                "factor {d} has {} columns, model rank is {rank}",
                f.cols()
            )));
        }
        Ok(Self { weights, factors })
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    /// Components whose weight stayed negative after sign normalization.
    /// Unconstrained ALS can produce these when an odd number of a
    /// component's columns have negative sums.
    pub fn negative_components(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&r| self.weights[r] < 0.0).collect()
    }

    /// `‖𝓜‖_F² = λᵀ (⊛_d A⁽ᵈ⁾ᵀA⁽ᵈ⁾) λ`.
    pub fn norm_squared(&self) -> f64 {
        let grams: Vec<Matrix> = self.factors.iter().map(linalg::gram).collect();
        weighted_quadratic(&self.weights, &grams)
    }

    /// Value of the reconstruction at one coordinate.
    pub fn entry(&self, coord: &[usize]) -> f64 {
        (0..self.rank())
            .map(|r| {
                self.weights[r]
                    * self
                        .factors
                        .iter()
                        .zip(coord)
                        .map(|(f, &c)| f[(c, r)])
                        .product::<f64>()
            })
            .sum()
    }
}

fn weighted_quadratic(weights: &[f64], grams: &[Matrix]) -> f64 {
    let r = weights.len();
    if r == 0 {
        return 0.0;
    }
    let h = linalg::hadamard_all(grams).expect("grams share the rank");
    let mut total = 0.0;
    for p in 0..r {
        for q in 0..r {
            total += weights[p] * h[(p, q)] * weights[q];
        }
    }
    total
}

/// Stopping and initialization parameters for [`cp_als`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlsOptions {
    pub max_iters: usize,
    /// Stop once the fit improves by less than this between sweeps.
    pub fit_tolerance: f64,
    pub seed: u64,
    /// Use the multi-threaded MTTKRP kernel. The sequential kernel is
    /// bitwise reproducible; the parallel one agrees to rounding.
    pub parallel: bool,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            fit_tolerance: 1e-6,
            seed: 0,
            parallel: false,
        }
    }
}

impl AlsOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if self.fit_tolerance.is_nan() || self.fit_tolerance <= 0.0 {
            return Err(Error::InvalidArgument("fit_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Output of one CP-ALS run.
#[derive(Debug, Clone)]
pub struct AlsResult {
    pub model: KruskalModel,
    /// Fit after each full sweep.
    pub fit_history: Vec<f64>,
    pub converged: bool,
}

impl AlsResult {
    pub fn final_fit(&self) -> f64 {
        self.fit_history.last().copied().unwrap_or(0.0)
    }
}

/// Mixes two integers into a well-spread 64-bit seed (SplitMix64 finalizer).
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform(0, 1) factor matrices, one generator per mode seeded by
/// `(seed, mode)`.
pub fn init_factors(shape: &[usize], rank: usize, seed: u64) -> Result<Vec<Matrix>> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    Ok(shape
        .iter()
        .enumerate()
        .map(|(mode, &rows)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, mode as u64));
            Matrix::from_fn(rows, rank, |_, _| rng.sample(Open01))
        })
        .collect())
}

/// Fits a rank-`rank` CP model to `t`.
pub fn cp_als(t: &SparseTensor, rank: usize, opts: &AlsOptions) -> Result<AlsResult> {
    opts.validate()?;
    if t.nnz() == 0 {
        return Err(Error::EmptyTensor("cannot factorize a tensor with no nonzeros"));
    }
    let order = t.order();
    let norm_x = t.frobenius_norm();
    let kernel = if opts.parallel { mttkrp_par } else { mttkrp };

    let mut factors = init_factors(t.shape(), rank, opts.seed)?;
    let mut grams: Vec<Matrix> = factors.iter().map(linalg::gram).collect();
    let mut weights = vec![1.0; rank];
    let mut fit_history = Vec::new();
    let mut converged = false;

    for iteration in 0..opts.max_iters {
        for mode in 0..order {
            let m = kernel(t, &factors, mode)?;
            let h = linalg::hadamard_all(
                grams.iter().enumerate().filter(|&(k, _)| k != mode).map(|(_, g)| g),
            )
            .unwrap_or_else(|_| Matrix::from_fn(rank, rank, |_, _| 1.0));
            let mut updated = linalg::solve_gram(&h, &m)
                .map_err(|_| Error::Diverged { iteration, mode })?;
            weights = linalg::normalize_columns_l2(&mut updated);
            if !updated.is_finite() || weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Diverged { iteration, mode });
            }
            grams[mode] = linalg::gram(&updated);
            factors[mode] = updated;
        }

        let norm_m_sq = weighted_quadratic(&weights, &grams);
        let fit = fit_from_residual(norm_x, residual_sq(t, &weights, &factors, norm_m_sq));
        if !fit.is_finite() {
            return Err(Error::Diverged {
                iteration,
                mode: order - 1,
            });
        }
        let improvement = fit_history.last().map(|prev| fit - prev);
        fit_history.push(fit);
        log::trace!("cp_als rank {rank} iter {iteration}: fit {fit:.10}");
        if improvement.is_some_and(|d: f64| d.abs() < opts.fit_tolerance) {
            converged = true;
            break;
        }
    }

    Ok(AlsResult {
        model: arrange(&KruskalModel { weights, factors }),
        fit_history,
        converged,
    })
}

/// `‖𝒳 − 𝓜‖_F²` without densifying. The usual expansion
/// `‖𝒳‖² + ‖𝓜‖² − 2⟨𝒳, 𝓜⟩` is regrouped as the residual over the stored
/// nonzeros plus the model's mass off the support, `‖𝓜‖² − Σ_nz m²`. Both
/// are algebraically equal, but the regrouping avoids cancelling two nearly
/// equal norms when the fit is close to 1. Off-support mass at the level of
/// rounding noise in `‖𝓜‖²` is treated as zero.
fn residual_sq(t: &SparseTensor, weights: &[f64], factors: &[Matrix], norm_m_sq: f64) -> f64 {
    let rank = weights.len();
    let mut on_support = 0.0;
    let mut model_on_support = 0.0;
    let mut prod = vec![0.0; rank];
    for (coord, x) in t.iter() {
        prod.copy_from_slice(weights);
        for (f, &c) in factors.iter().zip(coord) {
            for (p, a) in prod.iter_mut().zip(f.row(c)) {
                *p *= a;
            }
        }
        let m: f64 = prod.iter().sum();
        on_support += (x - m) * (x - m);
        model_on_support += m * m;
    }
    let mut off_support = norm_m_sq - model_on_support;
    if off_support <= 64.0 * f64::EPSILON * norm_m_sq.abs() {
        off_support = 0.0;
    }
    on_support + off_support
}

fn fit_from_residual(norm_x: f64, resid_sq: f64) -> f64 {
    1.0 - resid_sq.max(0.0).sqrt() / norm_x
}

/// `1 − ‖𝒳 − 𝓜‖_F / ‖𝒳‖_F`, evaluated without densifying either operand.
pub fn fit(t: &SparseTensor, m: &KruskalModel) -> Result<f64> {
    if m.shape() != t.shape() {
        return Err(Error::ShapeMismatch(format!(
            "model shape {:?} vs tensor shape {:?}",
            m.shape(),
            t.shape()
        )));
    }
    let norm_x = t.frobenius_norm();
    if norm_x == 0.0 {
        return Err(Error::EmptyTensor("fit is undefined for a zero tensor"));
    }
    Ok(fit_from_residual(norm_x, residual_sq(t, &m.weights, &m.factors, m.norm_squared())))
}

/// Canonical form: non-negative column sums (signs pushed into `λ`), columns
/// scaled to sum to 1, components sorted by `|λ|` descending with ties kept
/// in original order.
pub fn arrange(m: &KruskalModel) -> KruskalModel {
    let rank = m.rank();
    let mut weights = m.weights.clone();
    let mut factors = m.factors.clone();

    for f in &mut factors {
        for (r, s) in f.column_sums().into_iter().enumerate() {
            if s < 0.0 {
                f.scale_column(r, -1.0);
                weights[r] = -weights[r];
            }
        }
    }
    for f in &mut factors {
        let (normalized, sums) = linalg::normalize_columns_l1(f);
        *f = normalized;
        for (w, s) in weights.iter_mut().zip(sums) {
            *w *= s;
        }
    }

    let mut perm: Vec<usize> = (0..rank).collect();
    perm.sort_by(|&a, &b| weights[b].abs().total_cmp(&weights[a].abs()));
    KruskalModel {
        weights: perm.iter().map(|&r| weights[r]).collect(),
        factors: factors.iter().map(|f| f.permute_columns(&perm)).collect(),
    }
}
