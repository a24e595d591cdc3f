//! Dense real linear algebra for sample matrices.
//!
//! Everything here is sized for link-level simulation: blocks of a few
//! thousand channel uses across at most a handful of antennas. The
//! decompositions are deterministic, allocate eagerly, and keep all
//! determinant work in the log domain so that block lengths in the
//! thousands cannot overflow.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative tolerance deciding when a column carries no innovation.
///
/// A column is treated as linearly dependent on its predecessors when its
/// residual norm falls below this fraction of its original norm. Relative
/// (rather than absolute) thresholding keeps rank decisions invariant under
/// rescaling of the input.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Dense row-major matrix of `f64` samples.
///
/// Rows index channel uses (time), columns index antennas or stacked
/// coordinates. Zero rows or columns are permitted so that absent signals
/// and empty factors have a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Square identity.
    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major data. Fails on non-finite entries or a length
    /// mismatch.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from a list of equally sized rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".to_string(),
            ));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Matrix::from_vec(nrows, ncols, data)
    }

    /// Single-column matrix from a slice.
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Matrix::from_vec(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// Borrow one row as a slice.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Copy one column out.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Plain matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, indices.len());
        for (jj, &j) in indices.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot hstack {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Per-entry scaling.
    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Empirical correlation of the columns: `(1/rows) * selfᵀ * self`.
    pub fn empirical_correlation(&self) -> Result<Matrix> {
        if self.rows == 0 {
            return Err(Error::DimensionMismatch(
                "correlation of an empty sample".to_string(),
            ));
        }
        let gram = self.transpose().matmul(self)?;
        Ok(gram.scaled(1.0 / self.rows as f64))
    }

    /// Subtracts the per-column mean from every entry.
    pub fn centered(&self) -> Matrix {
        let mut out = self.clone();
        let n = self.rows as f64;
        for j in 0..self.cols {
            let mean: f64 = (0..self.rows).map(|i| self.get(i, j)).sum::<f64>() / n;
            for i in 0..self.rows {
                out.set(i, j, self.get(i, j) - mean);
            }
        }
        out
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Growable orthonormal basis maintained by sequential projection.
///
/// Columns are fed in one at a time; each is split into the part lying in
/// the current span and the residual ("innovation"). A second projection
/// sweep is applied when cancellation ate most of the column, which keeps
/// the basis orthonormal to machine precision without changing what the
/// residual represents.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

/// Outcome of presenting one column to an [`OrthonormalBasis`].
#[derive(Clone, Debug)]
pub struct Innovation {
    /// Norm of the residual after projecting out the span.
    pub norm: f64,
    /// Whether the residual exceeded the rank tolerance and joined the basis.
    pub accepted: bool,
    /// Projection coefficients onto the basis vectors present before the call.
    pub coefficients: Vec<f64>,
}

impl OrthonormalBasis {
    pub fn new(dim: usize) -> Self {
        OrthonormalBasis {
            dim,
            vectors: Vec::new(),
        }
    }

    /// Seeds the basis with the orthonormal factor of a previous decomposition.
    pub fn from_qr(qr: &QrFactors) -> Self {
        let mut basis = OrthonormalBasis::new(qr.q.rows());
        for j in 0..qr.q.cols() {
            basis.vectors.push(qr.q.column(j));
        }
        basis
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn sweep(&self, v: &mut [f64], coefficients: &mut [f64]) {
        for (q, c) in self.vectors.iter().zip(coefficients.iter_mut()) {
            let proj = dot(q, v);
            *c += proj;
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
    }

    /// Projects `column` against the span and, if the residual clears
    /// `rank_tol` relative to the original norm, appends it (normalized).
    pub fn insert(&mut self, column: &[f64], rank_tol: f64) -> Innovation {
        assert_eq!(column.len(), self.dim, "column length must match basis dim");
        let original_norm = norm(column);
        let mut v = column.to_vec();
        let mut coefficients = vec![0.0; self.vectors.len()];
        self.sweep(&mut v, &mut coefficients);
        let mut residual = norm(&v);
        // Cancellation-triggered second sweep keeps orthogonality tight.
        if residual < 0.7 * original_norm && residual > 0.0 {
            self.sweep(&mut v, &mut coefficients);
            residual = norm(&v);
        }
        let accepted = residual > rank_tol * original_norm && residual > 0.0;
        if accepted {
            let inv = 1.0 / residual;
            for vi in v.iter_mut() {
                *vi *= inv;
            }
            self.vectors.push(v);
        }
        Innovation {
            norm: residual,
            accepted,
            coefficients,
        }
    }

    /// Materializes the basis as a matrix with orthonormal columns.
    pub fn to_matrix(&self) -> Matrix {
        let mut q = Matrix::zeros(self.dim, self.vectors.len());
        for (j, col) in self.vectors.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                q.set(i, j, v);
            }
        }
        q
    }
}

/// Result of a rank-revealing Gram-Schmidt decomposition.
///
/// Columns whose innovation fell below the rank tolerance are dropped
/// rather than kept at a zero pivot, so `diag` holds strictly positive
/// innovation norms and `source restricted to kept_columns == q * rtri`.
#[derive(Clone, Debug)]
pub struct QrFactors {
    /// Column-orthonormal factor, `rows x rank`.
    pub q: Matrix,
    /// Upper-triangular factor over the kept columns, `rank x rank`.
    pub rtri: Matrix,
    /// Innovation norms of the kept columns (the `rtri` diagonal).
    pub diag: Vec<f64>,
    /// Detected numerical rank.
    pub rank: usize,
    /// Indices of the kept columns in the source matrix, in order.
    pub kept_columns: Vec<usize>,
    /// Column count of the source matrix.
    pub source_cols: usize,
}

impl QrFactors {
    /// True when some source column was dropped as linearly dependent.
    pub fn pruned(&self) -> bool {
        self.rank < self.source_cols
    }
}

/// Left-to-right modified Gram-Schmidt with column dropping.
///
/// A column whose residual norm is at most `rank_tol` times its original
/// norm is declared linearly dependent on its predecessors and excluded
/// from the factors. A zero matrix therefore yields rank 0.
pub fn modified_gram_schmidt(m: &Matrix, rank_tol: f64) -> QrFactors {
    assert!(rank_tol > 0.0, "rank tolerance must be positive");
    let mut basis = OrthonormalBasis::new(m.rows());
    let mut kept_columns = Vec::new();
    let mut diag = Vec::new();
    // Per kept column: coefficients against previously kept columns.
    let mut rcols: Vec<Vec<f64>> = Vec::new();

    for j in 0..m.cols() {
        let column = m.column(j);
        let innovation = basis.insert(&column, rank_tol);
        if innovation.accepted {
            kept_columns.push(j);
            rcols.push(innovation.coefficients);
            diag.push(innovation.norm);
        }
    }

    let rank = kept_columns.len();
    let mut rtri = Matrix::zeros(rank, rank);
    for (jj, coeffs) in rcols.iter().enumerate() {
        for (i, &c) in coeffs.iter().enumerate() {
            rtri.set(i, jj, c);
        }
        rtri.set(jj, jj, diag[jj]);
    }

    QrFactors {
        q: basis.to_matrix(),
        rtri,
        diag,
        rank,
        kept_columns,
        source_cols: m.cols(),
    }
}

/// Log-determinant of the empirical correlation `(1/rows) * mᵀ * m`.
///
/// Accumulated from the Gram-Schmidt diagonal as
/// `sum(2 ln diag_i) - cols ln rows`; returns `-inf` when the matrix is
/// numerically rank-deficient under `rank_tol`.
pub fn gram_log_det_with_tol(m: &Matrix, rank_tol: f64) -> f64 {
    let qr = modified_gram_schmidt(m, rank_tol);
    if qr.rank < m.cols() {
        return f64::NEG_INFINITY;
    }
    log_det_from_diag(&qr.diag, m.rows())
}

/// [`gram_log_det_with_tol`] at the default tolerance.
pub fn gram_log_det(m: &Matrix) -> f64 {
    gram_log_det_with_tol(m, DEFAULT_RANK_TOL)
}

/// `sum(2 ln diag_i) - k ln rows` for `k = diag.len()`.
pub(crate) fn log_det_from_diag(diag: &[f64], rows: usize) -> f64 {
    let sum: f64 = diag.iter().map(|d| 2.0 * d.ln()).sum();
    sum - diag.len() as f64 * (rows as f64).ln()
}

/// Triangular factor of an input covariance, used to color white samples.
///
/// `factor` is upper triangular with `factorᵀ * factor == covariance`.
#[derive(Clone, Debug)]
pub struct Coloring {
    pub factor: Matrix,
    pub covariance: Matrix,
}

impl Coloring {
    /// Identity covariance: white samples pass through unchanged.
    pub fn identity(dim: usize) -> Self {
        Coloring {
            factor: Matrix::identity(dim),
            covariance: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.covariance.rows()
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Upper Cholesky factorization of a symmetric positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot is not strictly
/// positive, and with a dimension error when the input is not square or
/// not symmetric to `1e-12` relative to its largest entry.
pub fn cholesky_factor(covariance: &Matrix) -> Result<Coloring> {
    let k = covariance.rows();
    if covariance.cols() != k {
        return Err(Error::DimensionMismatch(format!(
            "covariance must be square, got {}x{}",
            covariance.rows(),
            covariance.cols()
        )));
    }
    if !covariance.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = covariance.max_abs().max(1.0);
    for i in 0..k {
        for j in (i + 1)..k {
            if (covariance.get(i, j) - covariance.get(j, i)).abs() > SYMMETRY_TOL * scale {
                return Err(Error::DimensionMismatch(
                    "covariance is not symmetric".to_string(),
                ));
            }
        }
    }

    let mut factor = Matrix::zeros(k, k);
    for j in 0..k {
        for i in 0..=j {
            let mut sum = covariance.get(i, j);
            for p in 0..i {
                sum -= factor.get(p, i) * factor.get(p, j);
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                factor.set(j, j, sum.sqrt());
            } else {
                factor.set(i, j, sum / factor.get(i, i));
            }
        }
    }

    Ok(Coloring {
        factor,
        covariance: covariance.clone(),
    })
}

/// Log-determinant of a symmetric positive definite matrix via Cholesky.
pub fn log_det_pd(m: &Matrix) -> Result<f64> {
    let chol = cholesky_factor(m)?;
    Ok((0..m.rows())
        .map(|i| 2.0 * chol.factor.get(i, i).ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_gaussian_matrix, RngStream};
    use approx::assert_relative_eq;

    // Cofactor-expansion determinant for k <= 3, the independent oracle for
    // the Gram-Schmidt diagonal product.
    fn det_small(m: &Matrix) -> f64 {
        match m.rows() {
            0 => 1.0,
            1 => m.get(0, 0),
            2 => m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0),
            3 => {
                m.get(0, 0) * (m.get(1, 1) * m.get(2, 2) - m.get(1, 2) * m.get(2, 1))
                    - m.get(0, 1) * (m.get(1, 0) * m.get(2, 2) - m.get(1, 2) * m.get(2, 0))
                    + m.get(0, 2) * (m.get(1, 0) * m.get(2, 1) - m.get(1, 1) * m.get(2, 0))
            }
            _ => panic!("oracle only handles k <= 3"),
        }
    }

    fn random_matrix(rows: usize, cols: usize, tag: u64) -> Matrix {
        let stream = RngStream::new(0x5eed).with_trial(tag);
        sample_gaussian_matrix(rows, cols, &Coloring::identity(cols), &stream).unwrap()
    }

    #[test]
    fn gram_schmidt_identity_input() {
        let qr = modified_gram_schmidt(&Matrix::identity(2), DEFAULT_RANK_TOL);
        assert_eq!(qr.rank, 2);
        assert_eq!(qr.kept_columns, vec![0, 1]);
        assert_eq!(qr.q, Matrix::identity(2));
        assert_eq!(qr.diag, vec![1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_drops_dependent_column() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let qr = modified_gram_schmidt(&m, DEFAULT_RANK_TOL);
        assert_eq!(qr.rank, 1);
        assert_eq!(qr.kept_columns, vec![0]);
        assert_relative_eq!(qr.diag[0], 1.0, max_relative = 1e-14);
        assert!(qr.pruned());
    }

    #[test]
    fn gram_schmidt_zero_matrix_rank_zero() {
        let qr = modified_gram_schmidt(&Matrix::zeros(4, 3), DEFAULT_RANK_TOL);
        assert_eq!(qr.rank, 0);
        assert!(qr.kept_columns.is_empty());
    }

    #[test]
    fn diagonal_product_matches_determinant_oracle() {
        for tag in 0..50 {
            let m = random_matrix(6, 3, tag);
            let qr = modified_gram_schmidt(&m, DEFAULT_RANK_TOL);
            assert_eq!(qr.rank, 3);
            let prod: f64 = qr.diag.iter().map(|d| d * d).product();
            let gram = m.transpose().matmul(&m).unwrap();
            let direct = det_small(&gram);
            assert_relative_eq!(prod, direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn reconstruction_and_orthogonality_over_random_inputs() {
        for tag in 0..1000 {
            let rows = 2 + (tag as usize * 7) % 63;
            let cols = 1 + (tag as usize * 3) % 8usize.min(rows);
            let m = random_matrix(rows, cols, 10_000 + tag);
            let qr = modified_gram_schmidt(&m, DEFAULT_RANK_TOL);

            let qtq = qr.q.transpose().matmul(&qr.q).unwrap();
            for i in 0..qr.rank {
                for j in 0..qr.rank {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (qtq.get(i, j) - expect).abs() <= 1e-10,
                        "orthogonality violated at ({i},{j}): {}",
                        qtq.get(i, j)
                    );
                }
            }

            let rebuilt = qr.q.matmul(&qr.rtri).unwrap();
            let kept = m.select_columns(&qr.kept_columns);
            let scale = m.max_abs();
            for i in 0..kept.rows() {
                for j in 0..kept.cols() {
                    assert!(
                        (rebuilt.get(i, j) - kept.get(i, j)).abs() <= 1e-9 * scale,
                        "reconstruction off at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn gram_log_det_identity_correlation_is_zero() {
        // sqrt(n)-scaled identity padding makes (1/n) MᵀM the identity.
        let n = 5;
        let mut m = Matrix::zeros(n, 2);
        let s = (n as f64).sqrt();
        m.set(0, 0, s);
        m.set(1, 1, s);
        assert_relative_eq!(gram_log_det(&m), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gram_log_det_repeated_column_is_neg_infinity() {
        let m = Matrix::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![-1.0, -1.0]]).unwrap();
        assert_eq!(gram_log_det(&m), f64::NEG_INFINITY);
    }

    #[test]
    fn gram_log_det_matches_direct_two_by_two() {
        for tag in 0..20 {
            let m = random_matrix(8, 2, 400 + tag);
            let corr = m.empirical_correlation().unwrap();
            let direct = det_small(&corr).ln();
            assert_relative_eq!(gram_log_det(&m), direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn cholesky_identity() {
        let c = cholesky_factor(&Matrix::identity(3)).unwrap();
        assert_eq!(c.factor, Matrix::identity(3));
    }

    #[test]
    fn cholesky_diagonal_case() {
        let cov = Matrix::from_rows(vec![vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let c = cholesky_factor(&cov).unwrap();
        assert_relative_eq!(c.factor.get(0, 0), 2.0);
        assert_relative_eq!(c.factor.get(1, 1), 3.0);
        assert_eq!(c.factor.get(0, 1), 0.0);
    }

    #[test]
    fn cholesky_reconstructs_covariance() {
        let cov = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let c = cholesky_factor(&cov).unwrap();
        let rebuilt = c.factor.transpose().matmul(&c.factor).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rebuilt.get(i, j) - cov.get(i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_and_asymmetric() {
        let indefinite = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky_factor(&indefinite),
            Err(Error::NotPositiveDefinite)
        ));
        let asymmetric = Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.2, 1.0]]).unwrap();
        assert!(cholesky_factor(&asymmetric).is_err());
    }

    #[test]
    fn log_det_pd_matches_oracle() {
        let cov = Matrix::from_rows(vec![vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_relative_eq!(
            log_det_pd(&cov).unwrap(),
            det_small(&cov).ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(matches!(
            Matrix::from_vec(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn matrix_serde_round_trip() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.5], vec![-0.25, 4.0]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[1.0,2.5],[-0.25,4.0]]");
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_serde_rejects_ragged_rows() {
        let err = serde_json::from_str::<Matrix>("[[1.0,2.0],[3.0]]");
        assert!(err.is_err());
    }
}
