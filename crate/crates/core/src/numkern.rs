//! Dense real linear algebra: orthonormalization, numerical kernels,
//! determinant signs and seeded random orthogonal matrices.
//!
//! Everything here is `f64`. Randomness is always seeded explicitly; there is
//! no global generator.

use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative singular-value threshold used for kernel dimensions.
pub const KERNEL_TOL: f64 = 1e-7;
/// A kernel whose spectral gap falls below this ratio is reported as ambiguous.
pub const MIN_SPECTRAL_GAP: f64 = 1e3;

/// Orientation sign of a basis, structure or fibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn from_value(value: i8) -> Option<Sign> {
        match value {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    /// `(-1)^n` applied to `self`.
    pub fn pow_flip(self, n: usize) -> Sign {
        if n.is_multiple_of(2) {
            self
        } else {
            -self
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Sign, String> {
        Sign::from_value(v).ok_or_else(|| format!("sign must be +1 or -1, got {v}"))
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-1",
            Sign::Positive => "+1",
        })
    }
}

/// Seeded generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Uniformly distributed point on the unit sphere of `R^dim`.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let g = gaussian_vector(rng, dim);
        let n = g.norm();
        if n > 1e-8 {
            return g / n;
        }
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `max |T^T T - id|`.
pub fn orthogonality_residual(t: &Matrix) -> f64 {
    let n = t.ncols();
    max_abs(&(t.transpose() * t - Matrix::identity(n, n)))
}

/// Orthogonal projector onto the span of an orthonormal family.
pub fn projector(basis: &[Vector], dim: usize) -> Matrix {
    let mut p = Matrix::zeros(dim, dim);
    for b in basis {
        p += b * b.transpose();
    }
    p
}

/// Columns gathered into a matrix.
pub fn columns(vectors: &[Vector]) -> Matrix {
    Matrix::from_columns(vectors)
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Vectors whose residual norm drops below `tol` are skipped, or rejected
/// with [`Error::DependentInput`] when `full_rank` is set. The output spans
/// the same subspace as the independent prefix of the input and preserves
/// the orientation of each prefix.
pub fn orthonormalize(vectors: &[Vector], tol: f64, full_rank: bool) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if let Some(first) = vectors.first() {
            if v.len() != first.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: v.len(),
                });
            }
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let residual = r.norm();
        if residual < tol {
            if full_rank {
                return Err(Error::DependentInput { index, residual });
            }
            continue;
        }
        out.push(r / residual);
    }
    Ok(out)
}

/// Numerical kernel of a matrix.
#[derive(Clone, Debug)]
pub struct KernelResult {
    pub basis: Vec<Vector>,
    pub dimension: usize,
    /// Smallest retained singular value over the largest discarded one;
    /// infinite when the kernel is empty or everything.
    pub spectral_gap: f64,
}

impl KernelResult {
    pub fn projector(&self, dim: usize) -> Matrix {
        projector(&self.basis, dim)
    }
}

/// Kernel by singular values, without the ambiguity guard.
pub fn null_space(m: &Matrix, tol_rel: f64) -> Result<KernelResult> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let cols = m.ncols();
    if cols == 0 {
        return Ok(KernelResult {
            basis: Vec::new(),
            dimension: 0,
            spectral_gap: f64::INFINITY,
        });
    }
    // Pad short matrices so the SVD yields a full right singular basis.
    let work = if m.nrows() < cols {
        let mut w = Matrix::zeros(cols, cols);
        w.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        w
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let threshold = tol_rel * smax.max(1.0);

    let mut basis = Vec::new();
    let mut min_kept = f64::INFINITY;
    let mut max_dropped = 0.0_f64;
    for (i, &s) in sigma.iter().enumerate() {
        if s < threshold {
            basis.push(v_t.row(i).transpose());
            max_dropped = max_dropped.max(s);
        } else {
            min_kept = min_kept.min(s);
        }
    }
    let dimension = basis.len();
    let spectral_gap = if dimension == 0 || dimension == cols || max_dropped == 0.0 {
        f64::INFINITY
    } else {
        min_kept / max_dropped
    };
    Ok(KernelResult {
        basis,
        dimension,
        spectral_gap,
    })
}

/// Kernel with the spectral-gap guard: fails with [`Error::AmbiguousRank`]
/// when singular values do not separate cleanly into zero and nonzero.
pub fn kernel(m: &Matrix, tol_rel: f64) -> Result<KernelResult> {
    let k = null_space(m, tol_rel)?;
    if k.spectral_gap < MIN_SPECTRAL_GAP {
        return Err(Error::AmbiguousRank {
            spectral_gap: k.spectral_gap,
        });
    }
    Ok(k)
}

/// Sign of the determinant, or 0 when `|det|` is below `1e-10` times the
/// product of row norms (floored at 1).
pub fn det_sign(m: &Matrix) -> i8 {
    assert!(m.is_square(), "det_sign needs a square matrix");
    let scale = m.row_iter().map(|r| r.norm()).product::<f64>().max(1.0);
    let det = m.clone().determinant();
    if det.abs() < 1e-10 * scale {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

/// Seeded Haar-like orthogonal matrix with prescribed determinant sign.
pub fn random_orthogonal(m: usize, want: Sign, seed: u64) -> Matrix {
    assert!(m >= 1, "dimension must be positive");
    let mut rng = rng(seed);
    loop {
        let g = gaussian_matrix(&mut rng, m, m);
        let cols: Vec<Vector> = g.column_iter().map(|c| c.into_owned()).collect();
        let Ok(q) = orthonormalize(&cols, 1e-6, true) else {
            continue;
        };
        let mut t = columns(&q);
        if det_sign(&t) != want.value() {
            let mut last = t.column_mut(m - 1);
            last.neg_mut();
        }
        return t;
    }
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1_i128;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Integer matrix product `a * b`.
pub fn integer_matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Converts an integer-valued float matrix; `None` if any entry is not an integer.
pub fn to_integer(m: &Matrix) -> Option<Vec<Vec<i64>>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let x = m[(i, j)];
                    (x.fract() == 0.0 && x.abs() < 1e15).then_some(x as i64)
                })
                .collect()
        })
        .collect()
}

pub fn from_integer(rows: &[Vec<i64>]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(r, c, |i, j| rows[i][j] as f64)
}

/// Wire form of a matrix: `{"rows": R, "cols": C, "data": [row-major]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().iter().cloned().collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.rows * self.cols != self.data.len() {
            return Err(Error::Schema {
                field: "data".into(),
                message: format!(
                    "expected rows*cols = {} entries, found {}",
                    self.rows * self.cols,
                    self.data.len()
                ),
            });
        }
        if self.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema {
                field: "data".into(),
                message: "entries must be finite".into(),
            });
        }
        Ok(Matrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}
