use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sparse_tensor::SparseTensor;

/// Matricized tensor times Khatri–Rao product for `mode`.
///
/// `result[i][r] = Σ_{nonzeros with coord[mode] = i} value · Π_{k≠mode} factors[k][coord[k]][r]`.
/// The factor at `mode` is ignored and may have any row count.
pub fn mttkrp(t: &SparseTensor, factors: &[Matrix], mode: usize) -> Result<Matrix> {
    let rank = check_operands(t, factors, mode)?;
    let mut out = Matrix::zeros(t.shape()[mode], rank);
    accumulate(t, factors, mode, 0..t.nnz(), &mut out);
    Ok(out)
}

/// Multi-threaded [`mttkrp`]. Nonzeros are split into one contiguous block
/// per worker, each block accumulates privately, and block results are summed
/// in block order. Differs from the sequential kernel only by floating-point
/// reassociation.
pub fn mttkrp_par(t: &SparseTensor, factors: &[Matrix], mode: usize) -> Result<Matrix> {
    let rank = check_operands(t, factors, mode)?;
    let rows = t.shape()[mode];
    let nnz = t.nnz();
    let blocks = rayon::current_num_threads().max(1).min(nnz.max(1));
    let block = nnz.div_ceil(blocks).max(1);

    let partials: Vec<Matrix> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut part = Matrix::zeros(rows, rank);
            let lo = (b * block).min(nnz);
            let hi = ((b + 1) * block).min(nnz);
            accumulate(t, factors, mode, lo..hi, &mut part);
            part
        })
        .collect();

    let mut out = Matrix::zeros(rows, rank);
    for part in &partials {
        for (o, p) in out.as_mut_slice().iter_mut().zip(part.as_slice()) {
            *o += p;
        }
    }
    Ok(out)
}

fn check_operands(t: &SparseTensor, factors: &[Matrix], mode: usize) -> Result<usize> {
    let order = t.order();
    if mode >= order {
        return Err(Error::InvalidArgument(format!(
            "mode {mode} out of range for order-{order} tensor"
        )));
    }
    if factors.len() != order {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for an order-{order} tensor",
            factors.len()
        )));
    }
    // With a single mode the Khatri–Rao product is a row of ones.
    let rank = (0..order)
        .find(|&k| k != mode)
        .map_or(factors[mode].cols(), |k| factors[k].cols());
    for (k, f) in factors.iter().enumerate() {
        if k == mode {
            continue;
        }
        if f.rows() != t.shape()[k] || f.cols() != rank {
            return Err(Error::ShapeMismatch(format!(
                "factor {k} is {}×{}, expected {}×{rank}",
                f.rows(),
                f.cols(),
                t.shape()[k]
            )));
        }
    }
    Ok(rank)
}

fn accumulate(
    t: &SparseTensor,
    factors: &[Matrix],
    mode: usize,
    range: std::ops::Range<usize>,
    out: &mut Matrix,
) {
    let rank = out.cols();
    let mut scratch = vec![0.0; rank];
    for n in range {
        let coord = t.coord(n);
        scratch.fill(t.values()[n]);
        for (k, f) in factors.iter().enumerate() {
            if k == mode {
                continue;
            }
            for (s, x) in scratch.iter_mut().zip(f.row(coord[k])) {
                *s *= x;
            }
        }
        for (o, s) in out.row_mut(coord[mode]).iter_mut().zip(&scratch) {
            *o += s;
        }
    }
}
