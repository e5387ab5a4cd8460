//! Dense row-major matrices and the small set of kernels CP-ALS needs.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix. Used both for `I × R` factor matrices and for
/// `R × R` Gram matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// An `I_d × R` factor matrix of a Kruskal model.
pub type FactorMatrix = Matrix;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale_column(&mut self, j: usize, s: f64) {
        for i in 0..self.rows {
            self[(i, j)] *= s;
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols.max(1)) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Copy with columns reordered so that new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, perm.len(), |i, k| self[(i, perm[k])])
    }

    /// Largest absolute entrywise difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Column-wise Kronecker product. Row `i * B.rows + j` of column `r` is
/// `A[i][r] * B[j][r]`.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.cols {
        return Err(Error::ShapeMismatch(format!(
            "khatri_rao: {} vs {} columns",
            a.cols, b.cols
        )));
    }
    let r = a.cols;
    let mut out = Matrix::zeros(a.rows * b.rows, r);
    for i in 0..a.rows {
        let ar = a.row(i);
        for j in 0..b.rows {
            let br = b.row(j);
            for (o, (x, y)) in out.row_mut(i * b.rows + j).iter_mut().zip(ar.iter().zip(br)) {
                *o = x * y;
            }
        }
    }
    Ok(out)
}

/// `AᵀA`.
pub fn gram(a: &Matrix) -> Matrix {
    let r = a.cols;
    let mut g = Matrix::zeros(r, r);
    for row in a.data.chunks_exact(r.max(1)) {
        for p in 0..r {
            let x = row[p];
            if x == 0.0 {
                continue;
            }
            for (q, &y) in row.iter().enumerate().skip(p) {
                g.data[p * r + q] += x * y;
            }
        }
    }
    for p in 0..r {
        for q in 0..p {
            g.data[p * r + q] = g.data[q * r + p];
        }
    }
    g
}

/// Elementwise product of equally shaped matrices.
pub fn hadamard_all<'a, I>(mats: I) -> Result<Matrix>
where
    I: IntoIterator<Item = &'a Matrix>,
{
    let mut it = mats.into_iter();
    let mut acc = it
        .next()
        .ok_or_else(|| Error::InvalidArgument("hadamard of an empty list".into()))?
        .clone();
    for m in it {
        if (m.rows, m.cols) != (acc.rows, acc.cols) {
            return Err(Error::ShapeMismatch("hadamard operands differ in shape".into()));
        }
        for (a, b) in acc.data.iter_mut().zip(&m.data) {
            *a *= b;
        }
    }
    Ok(acc)
}

/// Solves `X · G = RHS` for symmetric positive semi-definite `G`.
///
/// Uses a Cholesky factorization. When `G` is numerically singular a ridge
/// of `1e-12 · trace(G) / R` is added (escalated by 10× until the
/// factorization succeeds), so rank-deficient Grams never abort a sweep.
pub fn solve_gram(g: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    let r = g.rows;
    if g.cols != r {
        return Err(Error::ShapeMismatch("solve_gram: G is not square".into()));
    }
    if rhs.cols != r {
        return Err(Error::ShapeMismatch(format!(
            "solve_gram: RHS has {} columns, G is {r}×{r}",
            rhs.cols
        )));
    }
    if !g.is_finite() || !rhs.is_finite() {
        return Err(Error::InvalidArgument("solve_gram: non-finite input".into()));
    }
    if r == 0 {
        return Ok(rhs.clone());
    }

    let trace: f64 = (0..r).map(|i| g[(i, i)]).sum();
    if trace <= 0.0 {
        // G = 0 for a PSD Gram; the minimum-norm minimizer is X = 0.
        return Ok(Matrix::zeros(rhs.rows, r));
    }

    let mut chol = cholesky(g, 0.0);
    let mut ridge = 1e-12 * trace / r as f64;
    while chol.is_none() {
        if !ridge.is_finite() || ridge > trace {
            return Err(Error::InvalidArgument("solve_gram: G is not positive semi-definite".into()));
        }
        log::debug!("solve_gram: singular Gram, ridge {ridge:e}");
        chol = cholesky(g, ridge);
        ridge *= 10.0;
    }
    let l = chol.expect("loop exits on success");

    let mut x = rhs.clone();
    for row in x.data.chunks_exact_mut(r) {
        // L y = b
        for i in 0..r {
            let mut s = row[i];
            for k in 0..i {
                s -= l[(i, k)] * row[k];
            }
            row[i] = s / l[(i, i)];
        }
        // Lᵀ x = y
        for i in (0..r).rev() {
            let mut s = row[i];
            for k in i + 1..r {
                s -= l[(k, i)] * row[k];
            }
            row[i] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// Lower Cholesky factor of `G + ridge·I`, or `None` when a pivot is not
/// safely positive.
fn cholesky(g: &Matrix, ridge: f64) -> Option<Matrix> {
    let r = g.rows;
    let max_diag = (0..r).map(|i| g[(i, i)]).fold(0.0, f64::max) + ridge;
    let floor = r as f64 * f64::EPSILON * max_diag;
    let mut l = Matrix::zeros(r, r);
    for j in 0..r {
        let mut d = g[(j, j)] + ridge;
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= floor {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..r {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Scales every column to sum to 1 and returns the absorbed sums.
///
/// All-zero columns get weight 0 and stay zero. A nonzero column whose
/// entries cancel to an exact zero sum is scaled by its absolute sum instead.
pub fn normalize_columns_l1(a: &Matrix) -> (Matrix, Vec<f64>) {
    let mut out = a.clone();
    let sums = a.column_sums();
    let mut weights = Vec::with_capacity(a.cols);
    for (j, &s) in sums.iter().enumerate() {
        let w = if s != 0.0 {
            s
        } else {
            (0..a.rows).map(|i| a[(i, j)].abs()).sum()
        };
        if w != 0.0 {
            out.scale_column(j, 1.0 / w);
        }
        weights.push(w);
    }
    (out, weights)
}

/// Scales every column to unit 2-norm and returns the absorbed norms.
/// All-zero columns get weight 0 and stay zero.
pub fn normalize_columns_l2(a: &mut Matrix) -> Vec<f64> {
    let mut norms = vec![0.0; a.cols];
    for row in a.data.chunks_exact(a.cols.max(1)) {
        for (n, v) in norms.iter_mut().zip(row) {
            *n += v * v;
        }
    }
    for (j, n) in norms.iter_mut().enumerate() {
        *n = n.sqrt();
        if *n > 0.0 {
            a.scale_column(j, 1.0 / *n);
        }
    }
    norms
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    // Oracle: nested-loop Kronecker of each column pair.
    fn kron_oracle(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols());
        for r in 0..a.cols() {
            let (ca, cb) = (a.column(r), b.column(r));
            let mut k = 0;
            for x in &ca {
                for y in &cb {
                    out[(k, r)] = x * y;
                    k += 1;
                }
            }
        }
        out
    }

    fn transpose_multiply(a: &Matrix) -> Matrix {
        Matrix::from_fn(a.cols(), a.cols(), |p, q| {
            (0..a.rows()).map(|i| a[(i, p)] * a[(i, q)]).sum()
        })
    }

    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
        })
    }

    #[test]
    fn khatri_rao_examples() {
        let a = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
        assert_eq!(khatri_rao(&a, &b).unwrap().as_slice(), &[3.0, 4.0, 6.0, 8.0]);

        let i2 = Matrix::identity(2);
        let kr = khatri_rao(&i2, &i2).unwrap();
        assert_eq!(kr.column(0), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(kr.column(1), vec![0.0, 0.0, 0.0, 1.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(3, 2, &mut rng);
        let b = random(4, 2, &mut rng);
        assert!(khatri_rao(&a, &b).unwrap().max_abs_diff(&kron_oracle(&a, &b)) < 1e-12);

        assert!(khatri_rao(&Matrix::zeros(2, 2), &Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram(&Matrix::identity(3)), Matrix::identity(3));
        let ones = Matrix::from_fn(4, 1, |_, _| 1.0);
        assert_eq!(gram(&ones).as_slice(), &[4.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(5, 3, &mut rng);
        let g = gram(&a);
        assert!(g.max_abs_diff(&transpose_multiply(&a)) < 1e-12);
        for p in 0..3 {
            for q in 0..3 {
                assert!((g[(p, q)] - g[(q, p)]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn hadamard_examples() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(hadamard_all([&m]).unwrap(), m);

        let a = Matrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0, 1.0], [1.0, 3.0]]).unwrap();
        assert_eq!(
            hadamard_all([&a, &b]).unwrap(),
            Matrix::from_rows(&[[6.0, 0.0], [0.0, 6.0]]).unwrap()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ms: Vec<_> = (0..3).map(|_| random(4, 4, &mut rng)).collect();
        let h = hadamard_all(&ms).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h[(i, j)], ms[0][(i, j)] * ms[1][(i, j)] * ms[2][(i, j)]);
            }
        }

        assert!(hadamard_all(std::iter::empty::<&Matrix>()).is_err());
        assert!(hadamard_all([&Matrix::zeros(2, 2), &Matrix::zeros(3, 3)]).is_err());
    }

    #[test]
    fn solve_gram_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random(6, 3, &mut rng);
        assert!(solve_gram(&Matrix::identity(3), &m).unwrap().max_abs_diff(&m) < 1e-15);

        let mut two = Matrix::identity(3);
        two.as_mut_slice().iter_mut().for_each(|v| *v *= 2.0);
        let half = Matrix::from_fn(6, 3, |i, j| m[(i, j)] / 2.0);
        assert!(solve_gram(&two, &m).unwrap().max_abs_diff(&half) < 1e-15);

        // Known X₀, well-conditioned G = BᵀB + I.
        let b = random(8, 4, &mut rng);
        let mut g = gram(&b);
        for i in 0..4 {
            g[(i, i)] += 1.0;
        }
        let x0 = random(5, 4, &mut rng);
        let rhs = matmul(&x0, &g);
        assert!(solve_gram(&g, &rhs).unwrap().max_abs_diff(&x0) < 1e-8);
    }

    #[test]
    fn solve_gram_singular_does_not_abort() {
        // Rank-1 Gram.
        let v = Matrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]).unwrap();
        let g = gram(&v);
        let rhs = Matrix::from_rows(&[[5.0, 5.0]]).unwrap();
        let x = solve_gram(&g, &rhs).unwrap();
        assert!(x.is_finite());
        // Residual should be small relative to RHS.
        let res = matmul(&x, &g).max_abs_diff(&rhs);
        assert!(res < 1e-6, "{res}");

        assert_eq!(
            solve_gram(&Matrix::zeros(2, 2), &rhs).unwrap(),
            Matrix::zeros(1, 2)
        );
    }

    #[test]
    fn solve_gram_rejects_non_finite() {
        let mut g = Matrix::identity(2);
        g[(0, 1)] = f64::NAN;
        assert!(solve_gram(&g, &Matrix::zeros(1, 2)).is_err());
        assert!(solve_gram(&Matrix::identity(2), &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn least_squares_via_normal_equations() {
        // min ‖A Xᵀ − M‖ has normal equations X (AᵀA) = Mᵀ A.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(12, 3, &mut rng);
        let m = random(12, 4, &mut rng);
        let mt_a = Matrix::from_fn(4, 3, |i, j| (0..12).map(|k| m[(k, i)] * a[(k, j)]).sum());
        let x = solve_gram(&gram(&a), &mt_a).unwrap();
        // Optimality: residual orthogonal to range(A).
        for col in 0..4 {
            for p in 0..3 {
                let dot: f64 = (0..12)
                    .map(|k| {
                        let fitted: f64 = (0..3).map(|q| a[(k, q)] * x[(col, q)]).sum();
                        (m[(k, col)] - fitted) * a[(k, p)]
                    })
                    .sum();
                assert!(dot.abs() < 1e-8, "{dot}");
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let a = Matrix::from_rows(&[[2.0], [2.0]]).unwrap();
        let (n, w) = normalize_columns_l1(&a);
        assert_eq!(n.as_slice(), &[0.5, 0.5]);
        assert_eq!(w, vec![4.0]);

        let z = Matrix::zeros(2, 1);
        let (n, w) = normalize_columns_l1(&z);
        assert_eq!(n, z);
        assert_eq!(w, vec![0.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = Matrix::from_fn(6, 3, |_, _| rng.gen_range(0.01..1.0));
        let (n, w) = normalize_columns_l1(&a);
        for s in n.column_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        let back = Matrix::from_fn(6, 3, |i, j| n[(i, j)] * w[j]);
        assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn l2_normalize() {
        let mut a = Matrix::from_rows(&[[3.0, 0.0], [4.0, 0.0]]).unwrap();
        let w = normalize_columns_l2(&mut a);
        assert_eq!(w, vec![5.0, 0.0]);
        assert!((a[(0, 0)] - 0.6).abs() < 1e-15 && (a[(1, 0)] - 0.8).abs() < 1e-15);
    }
}
