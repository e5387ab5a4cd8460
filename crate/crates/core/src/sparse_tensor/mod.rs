//! Order-d sparse tensors in coordinate (COO) format.
//!
//! Nonzeros are kept lexicographically sorted by coordinate with no
//! duplicates, so iteration order (and therefore every accumulation done by
//! the kernels in [`crate::cp_als`]) is fixed for a given tensor.

mod axis;
pub mod io;

use std::cmp::Ordering;

pub use axis::AxisMap;

use crate::error::{Error, Result};

/// Immutable COO tensor with strictly positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor {
    shape: Vec<usize>,
    /// Row-major `nnz × order` coordinate table.
    coords: Vec<usize>,
    values: Vec<f64>,
}

impl SparseTensor {
    /// Builds a tensor from `(coordinate, value)` pairs.
    ///
    /// Duplicate coordinates are summed; entries that sum to zero are dropped.
    /// Out-of-range coordinates, non-finite values and negative values are
    /// rejected.
    pub fn from_entries<I, C>(entries: I, shape: &[usize]) -> Result<Self>
    where
        I: IntoIterator<Item = (C, f64)>,
        C: AsRef<[usize]>,
    {
        let order = shape.len();
        if order == 0 {
            return Err(Error::InvalidArgument("tensor order must be at least 1".into()));
        }
        if let Some(mode) = shape.iter().position(|&e| e == 0) {
            return Err(Error::InvalidArgument(format!("mode {mode} has zero extent")));
        }

        let mut flat = Vec::new();
        let mut vals = Vec::new();
        for (entry, (coord, value)) in entries.into_iter().enumerate() {
            let coord = coord.as_ref();
            if coord.len() != order {
                return Err(Error::OrderMismatch {
                    expected: order,
                    got: coord.len(),
                });
            }
            for (mode, (&c, &extent)) in coord.iter().zip(shape).enumerate() {
                if c >= extent {
                    return Err(Error::OutOfBounds {
                        mode,
                        index: c,
                        extent,
                    });
                }
            }
            if !value.is_finite() {
                return Err(Error::NonFinite { entry, value });
            }
            if value < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "entry {entry} has negative value {value}"
                )));
            }
            flat.extend_from_slice(coord);
            vals.push(value);
        }

        // Sorting duplicates by value as well makes the coalesced sums
        // independent of input order, bit for bit.
        let mut perm: Vec<usize> = (0..vals.len()).collect();
        perm.sort_by(|&a, &b| {
            flat[a * order..(a + 1) * order]
                .cmp(&flat[b * order..(b + 1) * order])
                .then_with(|| vals[a].total_cmp(&vals[b]))
        });

        let mut coords = Vec::with_capacity(flat.len());
        let mut values: Vec<f64> = Vec::with_capacity(vals.len());
        let mut last: Option<&[usize]> = None;
        for &p in &perm {
            let c = &flat[p * order..(p + 1) * order];
            if last == Some(c) {
                *values.last_mut().expect("run has a head") += vals[p];
            } else {
                coords.extend_from_slice(c);
                values.push(vals[p]);
                last = Some(c);
            }
        }

        let mut tensor = Self {
            shape: shape.to_vec(),
            coords,
            values,
        };
        tensor.drop_zeros();
        Ok(tensor)
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let order = self.order();
        let mut coords = Vec::with_capacity(self.coords.len());
        let mut values = Vec::with_capacity(self.values.len());
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                coords.extend_from_slice(&self.coords[i * order..(i + 1) * order]);
                values.push(v);
            }
        }
        self.coords = coords;
        self.values = values;
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coordinate of the `i`-th stored nonzero.
    pub fn coord(&self, i: usize) -> &[usize] {
        let d = self.order();
        &self.coords[i * d..(i + 1) * d]
    }

    /// Iterates `(coordinate, value)` in lexicographic coordinate order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.coords
            .chunks_exact(self.order())
            .zip(self.values.iter().copied())
    }

    /// Number of cells, as a float (real corpora overflow `u64`).
    pub fn num_cells(&self) -> f64 {
        self.shape.iter().map(|&e| e as f64).product()
    }

    /// Fraction of cells that are stored.
    pub fn density(&self) -> f64 {
        self.nnz() as f64 / self.num_cells()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Finds the stored value at `coord`, or 0.
    pub fn get(&self, coord: &[usize]) -> f64 {
        let d = self.order();
        if coord.len() != d {
            return 0.0;
        }
        let (mut lo, mut hi) = (0, self.nnz());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coord(mid).cmp(coord) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return self.values[mid],
            }
        }
        0.0
    }
}
