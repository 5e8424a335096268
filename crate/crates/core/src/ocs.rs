//! Orthogonal complex structures on `R^{2n}`.
//!
//! A [`ComplexStructure`] is a validated matrix `J` with `J² = −id`,
//! `Jᵀ = −J` and `JJᵀ = id`. Its sign comes from any decomposition of
//! `R^{2n}` into `J`-invariant planes `span(v_k, J v_k)`: the sign of
//! `det[v₁ Jv₁ … vₙ Jvₙ]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::OrientedPlane;
use crate::numkern::{
    det_sign, kernel, max_abs, orthogonality_residual, random_orthogonal, KernelResult, Matrix,
    MatrixJson, Sign, Vector, KERNEL_TOL,
};

/// Default tolerance for the three defining identities.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Validated orthogonal complex structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "StructureJson", try_from = "StructureJson")]
pub struct ComplexStructure {
    j: Matrix,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    n: usize,
}

impl From<ComplexStructure> for StructureJson {
    fn from(c: ComplexStructure) -> Self {
        let m = MatrixJson::from(&c.j);
        StructureJson {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
            n: c.n(),
        }
    }
}

impl TryFrom<StructureJson> for ComplexStructure {
    type Error = Error;
    fn try_from(s: StructureJson) -> Result<Self> {
        if s.rows != s.cols {
            return Err(schema("cols", "complex structures are square"));
        }
        if s.rows != 2 * s.n {
            return Err(schema(
                "n",
                &format!(
                    "expected rows = 2n, found rows = {} and n = {}",
                    s.rows, s.n
                ),
            ));
        }
        let m = MatrixJson {
            rows: s.rows,
            cols: s.cols,
            data: s.data,
        }
        .to_matrix()?;
        validate(&m, STRUCTURE_TOL).map_err(|e| schema("data", &e.to_string()))
    }
}

fn schema(field: &str, message: &str) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

impl ComplexStructure {
    pub fn matrix(&self) -> &Matrix {
        &self.j
    }

    /// Half the ambient dimension.
    pub fn n(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.j * x
    }

    /// `−J`, again an orthogonal complex structure.
    pub fn negated(&self) -> ComplexStructure {
        ComplexStructure { j: -&self.j }
    }

    /// Wraps a matrix without checking it. Callers guarantee validity.
    pub(crate) fn from_trusted(j: Matrix) -> ComplexStructure {
        ComplexStructure { j }
    }
}

/// Checks `J² = −id`, `J + Jᵀ = 0` and `JJᵀ = id` in that order.
pub fn validate(j: &Matrix, tol: f64) -> Result<ComplexStructure> {
    if !j.is_square() {
        return Err(Error::DimensionMismatch {
            expected: j.nrows(),
            found: j.ncols(),
        });
    }
    if j.nrows() == 0 || !j.nrows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: j.nrows() + 1,
            found: j.nrows(),
        });
    }
    if j.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let id = Matrix::identity(j.nrows(), j.ncols());
    let checks: [(&'static str, f64); 3] = [
        ("J^2 = -id", max_abs(&(j * j + &id))),
        ("J + J^T = 0", max_abs(&(j + j.transpose()))),
        ("J J^T = id", max_abs(&(j * j.transpose() - &id))),
    ];
    for (condition, residual) in checks {
        if residual > tol {
            return Err(Error::NotComplexStructure {
                condition,
                residual,
            });
        }
    }
    Ok(ComplexStructure { j: j.clone() })
}

/// Block diagonal `diag(I, …, I)` with `I = [[0, −1], [1, 0]]`.
pub fn standard(n: usize) -> ComplexStructure {
    assert!(n >= 1, "n must be positive");
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    ComplexStructure { j }
}

/// Block diagonal matrix from square blocks.
pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let size = blocks.iter().map(Matrix::nrows).sum();
    let mut m = Matrix::zeros(size, size);
    let mut at = 0;
    for b in blocks {
        m.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    m
}

/// `T J Tᵀ`.
pub fn conjugate(j: &ComplexStructure, t: &Matrix) -> Result<ComplexStructure> {
    if t.nrows() != j.dim() || t.ncols() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: t.nrows(),
        });
    }
    let residual = orthogonality_residual(t);
    if residual > 1e-10 {
        return Err(Error::NotOrthogonal { residual });
    }
    let m = t * &j.j * t.transpose();
    // Symmetrize away rounding so the result stays exactly skew.
    let m = (&m - m.transpose()) * 0.5;
    validate(&m, STRUCTURE_TOL)
}

/// First standard basis vector whose residual against `span` exceeds `1e-6`,
/// normalized.
pub(crate) fn next_seed(span: &[Vector], dim: usize) -> Vector {
    for i in 0..dim {
        let mut r = Vector::zeros(dim);
        r[i] = 1.0;
        for _ in 0..2 {
            for q in span {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let norm = r.norm();
        if norm > 1e-6 {
            return r / norm;
        }
    }
    panic!("span already fills R^{dim}");
}

/// `J`-invariant planes `span(v_k, J v_k)` decomposing `R^{2n}`.
pub fn invariant_decomposition(j: &ComplexStructure) -> Vec<OrientedPlane> {
    let dim = j.dim();
    let mut span: Vec<Vector> = Vec::with_capacity(dim);
    let mut planes = Vec::with_capacity(j.n());
    for _ in 0..j.n() {
        let v = next_seed(&span, dim);
        let jv = j.apply(&v);
        planes.push(OrientedPlane::new(&v, &jv).expect("Jv is orthogonal to v"));
        span.push(v);
        span.push(jv);
    }
    planes
}

/// `[v₁ Jv₁ … vₙ Jvₙ]` from the invariant decomposition.
fn assembled(j: &ComplexStructure) -> Matrix {
    let cols: Vec<Vector> = invariant_decomposition(j)
        .iter()
        .flat_map(|p| [p.u().clone(), j.apply(p.u())])
        .collect();
    Matrix::from_columns(&cols)
}

/// Sign of an orthogonal complex structure.
pub fn sign(j: &ComplexStructure) -> Result<Sign> {
    Sign::from_value(det_sign(&assembled(j))).ok_or(Error::AmbiguousSign)
}

/// `conjugate(standard(n), T)` for a seeded orthogonal `T` with `det_sign(T) = want`.
pub fn random_ocs(n: usize, want: Sign, seed: u64) -> ComplexStructure {
    let t = random_orthogonal(2 * n, want, seed);
    conjugate(&standard(n), &t).expect("random_orthogonal returns an orthogonal matrix")
}

/// Orthogonal `T` with `Tᵀ J T = standard(n)` and `det_sign(T) = sign(J)`.
pub fn conjugator_to_standard(j: &ComplexStructure) -> Matrix {
    assembled(j)
}

/// `span⁺(p, Jp)`.
pub fn fiber_plane(j: &ComplexStructure, p: &Vector) -> OrientedPlane {
    OrientedPlane::new(p, &j.apply(p)).expect("Jp is a unit vector orthogonal to p")
}

/// Which agreement kernel to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `ker(J − K)`: points whose fibers agree with orientation.
    #[default]
    Difference,
    /// `ker(J + K)`: points whose fibers agree with opposite orientation.
    Sum,
}

/// `‖(id − Π) J Π‖_max` for the projector `Π` onto `basis`.
pub fn invariance_residual(j: &ComplexStructure, basis: &[Vector]) -> f64 {
    let dim = j.dim();
    let pi = crate::numkern::projector(basis, dim);
    max_abs(&((Matrix::identity(dim, dim) - &pi) * &j.j * &pi))
}

/// `ker(J − K)` or `ker(J + K)`, certified `J`-invariant and even-dimensional.
pub fn agreement_space(
    j: &ComplexStructure,
    k: &ComplexStructure,
    mode: Mode,
) -> Result<KernelResult> {
    if j.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: k.dim(),
        });
    }
    let m = match mode {
        Mode::Difference => &j.j - &k.j,
        Mode::Sum => &j.j + &k.j,
    };
    let ker = kernel(&m, KERNEL_TOL)?;
    let residual = invariance_residual(j, &ker.basis);
    if residual > 1e-8 {
        return Err(Error::KernelNotInvariant { residual });
    }
    if ker.dimension % 2 != 0 {
        return Err(Error::KernelNotInvariant { residual: f64::NAN });
    }
    Ok(ker)
}

/// Paired orthonormal bases adapted to `J` and `K` with a common first vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairedBases {
    #[serde(rename = "E", with = "vectors_json")]
    pub e: Vec<Vector>,
    #[serde(rename = "F", with = "vectors_json")]
    pub f: Vec<Vector>,
    #[serde(rename = "Q", with = "matrix_json")]
    pub q: Matrix,
    /// `(c_k, s_k)` for `k = 1 … n−1`.
    pub angles: Vec<(f64, f64)>,
    pub corner: Sign,
}

impl PairedBases {
    /// Block-rotation matrix predicted by the angles and the corner.
    pub fn ideal_q(&self) -> Matrix {
        let dim = self.e.len();
        let mut q = Matrix::zeros(dim, dim);
        q[(0, 0)] = 1.0;
        for (k, &(c, s)) in self.angles.iter().enumerate() {
            let (a, b) = (2 * k + 1, 2 * k + 2);
            q[(a, a)] = c;
            q[(a, b)] = -s;
            q[(b, a)] = s;
            q[(b, b)] = c;
        }
        q[(dim - 1, dim - 1)] = self.corner.as_f64();
        q
    }

    /// `max |Q − ideal|`.
    pub fn pattern_residual(&self) -> f64 {
        max_abs(&(&self.q - self.ideal_q()))
    }

    /// `max |Eᵀ J E − I₀|`.
    pub fn standard_residual_e(&self, j: &ComplexStructure) -> f64 {
        in_basis_residual(&self.e, j)
    }

    /// `max |Fᵀ K F − I₀|`.
    pub fn standard_residual_f(&self, k: &ComplexStructure) -> f64 {
        in_basis_residual(&self.f, k)
    }

    /// `max_j ‖f_j − Σ_i Q_ij e_i‖_∞`.
    pub fn change_of_basis_residual(&self) -> f64 {
        let e = Matrix::from_columns(&self.e);
        let f = Matrix::from_columns(&self.f);
        max_abs(&(f - e * &self.q))
    }

    /// `max |c² + s² − 1|`.
    pub fn circle_residual(&self) -> f64 {
        self.angles
            .iter()
            .map(|(c, s)| (c * c + s * s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn in_basis_residual(basis: &[Vector], j: &ComplexStructure) -> f64 {
    let b = Matrix::from_columns(basis);
    let n = basis.len() / 2;
    max_abs(&(b.transpose() * &j.j * &b - &standard(n).j))
}

/// Orthogonalizes `v` against `span` (two passes) and normalizes.
fn mgs(v: &Vector, span: &[Vector]) -> Vector {
    let mut r = v.clone();
    for _ in 0..2 {
        for q in span {
            let c = q.dot(&r);
            r.axpy(-c, q, 1.0);
        }
    }
    let n = r.norm();
    r / n
}

/// Inductive construction of bases `E`, `F` with `e₁ = f₁ = p`, `J`
/// standard in `E`, `K` standard in `F`, and block-rotation change of basis.
pub fn paired_bases(j: &ComplexStructure, k: &ComplexStructure, p: &Vector) -> Result<PairedBases> {
    if j.dim() != k.dim() || p.len() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: if j.dim() != k.dim() { k.dim() } else { p.len() },
        });
    }
    let n = j.n();
    let dim = j.dim();
    let p = p / p.norm();
    let mut e: Vec<Vector> = vec![p.clone()];
    let mut f: Vec<Vector> = vec![p];
    let mut angles = Vec::with_capacity(n.saturating_sub(1));
    let mut corner = Sign::Positive;

    for step in 1..=n {
        let e_even = mgs(&j.apply(&e[2 * step - 2]), &e);
        let f_even = mgs(&k.apply(&f[2 * step - 2]), &f);
        e.push(e_even.clone());
        f.push(f_even.clone());
        if step == n {
            corner = if f_even.dot(&e_even) >= 0.0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            break;
        }
        let c0 = f_even.dot(&e_even);
        let r = &f_even - &e_even * c0;
        let e_odd = if r.norm() >= 1e-8 {
            mgs(&r, &e)
        } else {
            next_seed(&e, dim)
        };
        let c = f_even.dot(&e_even).clamp(-1.0, 1.0);
        let s = (1.0 - c * c).sqrt();
        let f_odd = mgs(&(&e_even * (-s) + &e_odd * c), &f);
        e.push(e_odd);
        f.push(f_odd);
        angles.push((c, s));
    }

    let q = Matrix::from_fn(dim, dim, |a, b| e[a].dot(&f[b]));
    Ok(PairedBases {
        e,
        f,
        q,
        angles,
        corner,
    })
}

/// The block pairs `(J, K)` of the higher-dimensional agreement chart, in the
/// order (n odd, same sign), (n odd, opposite signs), (n even, same sign),
/// (n even, opposite signs), with their kernel dimensions of `J − K`.
pub fn chart_pairs() -> Vec<ChartEntry> {
    let i = standard(1).j;
    let minus_i = -&i;
    let rep = |count: usize, first: &Matrix| {
        let mut blocks = vec![first.clone()];
        blocks.extend(std::iter::repeat_n(i.clone(), count - 1));
        ComplexStructure::from_trusted(block_diag(&blocks))
    };
    vec![
        ChartEntry {
            label: "n odd, same sign",
            j: rep(3, &i),
            k: rep(3, &i),
            expected_dimension: 6,
        },
        ChartEntry {
            label: "n odd, opposite signs",
            j: rep(3, &i),
            k: rep(3, &minus_i),
            expected_dimension: 4,
        },
        ChartEntry {
            label: "n even, same sign",
            j: rep(2, &i),
            k: rep(2, &i),
            expected_dimension: 4,
        },
        ChartEntry {
            label: "n even, opposite signs",
            j: rep(4, &i),
            k: rep(4, &minus_i),
            expected_dimension: 6,
        },
    ]
}

/// One cell of the agreement chart.
#[derive(Clone, Debug)]
pub struct ChartEntry {
    pub label: &'static str,
    pub j: ComplexStructure,
    pub k: ComplexStructure,
    pub expected_dimension: usize,
}

pub(crate) mod vectors_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::numkern::Vector;

    pub fn serialize<S: Serializer>(v: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = v.iter().map(|x| x.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(Vector::from_vec).collect())
    }
}

pub(crate) mod vector_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::numkern::Vector;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        Ok(Vector::from_vec(Vec::deserialize(d)?))
    }
}

pub(crate) mod matrix_json {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use crate::numkern::{Matrix, MatrixJson};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        MatrixJson::deserialize(d)?
            .to_matrix()
            .map_err(D::Error::custom)
    }
}
