//! Quaternionic structures on `R^{4n}` and Hopf fibrations of `S^{4n-1}` by
//! great 3-spheres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkern::KernelResult;
use crate::numkern::{
    det_sign, from_integer, integer_matmul, integer_rank, kernel, max_abs, projector,
    random_orthogonal, random_unit_vector, rng, to_integer, Matrix, Sign, Vector, KERNEL_TOL,
};
use crate::ocs::{
    agreement_space, block_diag, conjugate, next_seed, validate, ComplexStructure, Mode,
};
use crate::report::{Check, Report};

/// Tolerance for the quaternion identities.
pub const QUAT_TOL: f64 = 1e-10;
/// Projector distance below which two 4-planes are the same.
pub const PLANE4_TOL: f64 = 1e-8;

/// Left multiplication by `i` on `H = R^4` with basis `(1, i, j, k)`.
pub fn l_i() -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[
            0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.,
        ],
    )
}

/// Left multiplication by `j`.
pub fn l_j() -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[
            0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.,
        ],
    )
}

/// Left multiplication by `k`.
pub fn l_k() -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[
            0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.,
        ],
    )
}

/// An orthogonal quaternionic structure `(I, J, K)` with `IJK = −id`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "QuatJson", into = "QuatJson")]
pub struct QuatStructure {
    i: ComplexStructure,
    j: ComplexStructure,
    k: ComplexStructure,
}

#[derive(Serialize, Deserialize)]
struct QuatJson {
    #[serde(rename = "I")]
    i: ComplexStructure,
    #[serde(rename = "J")]
    j: ComplexStructure,
    #[serde(rename = "K")]
    k: ComplexStructure,
}

impl From<QuatStructure> for QuatJson {
    fn from(q: QuatStructure) -> Self {
        QuatJson {
            i: q.i,
            j: q.j,
            k: q.k,
        }
    }
}

impl TryFrom<QuatJson> for QuatStructure {
    type Error = Error;
    fn try_from(q: QuatJson) -> Result<Self> {
        for (field, m) in [("J", &q.j), ("K", &q.k)] {
            if m.dim() != q.i.dim() {
                return Err(Error::Schema {
                    field: field.into(),
                    message: format!("dimension {} differs from I ({})", m.dim(), q.i.dim()),
                });
            }
        }
        if !q.i.dim().is_multiple_of(4) {
            return Err(Error::Schema {
                field: "I".into(),
                message: format!("dimension {} is not a multiple of 4", q.i.dim()),
            });
        }
        validate_quat(q.i.matrix(), q.j.matrix(), q.k.matrix(), QUAT_TOL).map_err(|e| {
            Error::Schema {
                field: "K".into(),
                message: e.to_string(),
            }
        })
    }
}

impl QuatStructure {
    pub fn i(&self) -> &ComplexStructure {
        &self.i
    }

    pub fn j(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn k(&self) -> &ComplexStructure {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.i.dim()
    }

    pub fn factors(&self) -> [&ComplexStructure; 3] {
        [&self.i, &self.j, &self.k]
    }
}

/// Checks that each factor is an orthogonal complex structure, `IJK = −id`,
/// `IJ = K`, and that `p, Ip, Jp, Kp` are orthonormal for 10 seeded `p`.
pub fn validate_quat(i: &Matrix, j: &Matrix, k: &Matrix, tol: f64) -> Result<QuatStructure> {
    let dim = i.nrows();
    for m in [i, j, k] {
        if !m.is_square() || m.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
    }
    if dim == 0 || !dim.is_multiple_of(4) {
        return Err(Error::DimensionMismatch {
            expected: 4 * (dim / 4 + 1),
            found: dim,
        });
    }
    let factor = |m: &Matrix, name: &'static str| {
        validate(m, tol).map_err(|e| match e {
            Error::NotComplexStructure { residual, .. } => Error::NotQuaternionic {
                identity: name,
                residual,
            },
            other => other,
        })
    };
    let q = QuatStructure {
        i: factor(i, "I orthogonal complex structure")?,
        j: factor(j, "J orthogonal complex structure")?,
        k: factor(k, "K orthogonal complex structure")?,
    };
    let id = Matrix::identity(dim, dim);
    let ijk = max_abs(&(i * j * k + &id));
    if ijk > tol {
        return Err(Error::NotQuaternionic {
            identity: "IJK = -id",
            residual: ijk,
        });
    }
    let ij = max_abs(&(i * j - k));
    if ij > tol {
        return Err(Error::NotQuaternionic {
            identity: "IJ = K",
            residual: ij,
        });
    }
    let mut r = rng(0);
    for _ in 0..10 {
        let p = random_unit_vector(&mut r, dim);
        let frame = frame_of(&q, &p);
        let gram = &frame.transpose() * &frame;
        let residual = max_abs(&(gram - Matrix::identity(4, 4)));
        if residual > tol {
            return Err(Error::NotQuaternionic {
                identity: "p, Ip, Jp, Kp orthonormal",
                residual,
            });
        }
    }
    Ok(q)
}

/// `(diag(L_i, …), diag(L_j, …), diag(L_k, …))` on `R^{4n}`.
pub fn standard_quat(n: usize) -> QuatStructure {
    assert!(n >= 1, "n must be positive");
    let diag = |m: Matrix| block_diag(&vec![m; n]);
    validate_quat(&diag(l_i()), &diag(l_j()), &diag(l_k()), QUAT_TOL)
        .expect("standard structure is exact")
}

/// `(T I Tᵀ, T J Tᵀ, T K Tᵀ)`.
pub fn conjugate_quat(q: &QuatStructure, t: &Matrix) -> Result<QuatStructure> {
    let i = conjugate(&q.i, t)?;
    let j = conjugate(&q.j, t)?;
    let k = conjugate(&q.k, t)?;
    validate_quat(i.matrix(), j.matrix(), k.matrix(), QUAT_TOL)
}

/// `conjugate_quat(standard_quat(n), T)` for a seeded orthogonal `T` of the
/// requested determinant sign.
pub fn random_quat(n: usize, want: Sign, seed: u64) -> QuatStructure {
    let t = random_orthogonal(4 * n, want, seed);
    conjugate_quat(&standard_quat(n), &t).expect("random_orthogonal returns an orthogonal matrix")
}

fn frame_of(q: &QuatStructure, p: &Vector) -> Matrix {
    Matrix::from_columns(&[p.clone(), q.i.apply(p), q.j.apply(p), q.k.apply(p)])
}

/// Sign of `det[v₁ Iv₁ Jv₁ Kv₁ … vₙ Ivₙ Jvₙ Kvₙ]` over a greedy decomposition
/// into invariant 4-planes.
pub fn quat_sign(q: &QuatStructure) -> Result<Sign> {
    let dim = q.dim();
    let mut span: Vec<Vector> = Vec::with_capacity(dim);
    for _ in 0..dim / 4 {
        let v = next_seed(&span, dim);
        let (iv, jv, kv) = (q.i.apply(&v), q.j.apply(&v), q.k.apply(&v));
        span.extend([v, iv, jv, kv]);
    }
    Sign::from_value(det_sign(&Matrix::from_columns(&span))).ok_or(Error::AmbiguousSign)
}

/// Oriented 4-plane given by an ordered orthonormal frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Plane4 {
    #[serde(with = "crate::ocs::vectors_json")]
    pub basis: Vec<Vector>,
}

impl Plane4 {
    pub fn frame(&self) -> Matrix {
        Matrix::from_columns(&self.basis)
    }

    pub fn projector(&self) -> Matrix {
        projector(&self.basis, self.basis[0].len())
    }

    /// Largest off-identity entry of the Gram matrix.
    pub fn orthonormality_residual(&self) -> f64 {
        let f = self.frame();
        max_abs(&(f.transpose() * &f - Matrix::identity(4, 4)))
    }

    pub fn distance(&self, other: &Plane4) -> f64 {
        max_abs(&(self.projector() - other.projector()))
    }
}

/// The oriented fiber `span(p, Ip, Jp, Kp)` through unit `p`.
pub fn fiber4(q: &QuatStructure, p: &Vector) -> Result<Plane4> {
    if p.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.len(),
        });
    }
    let norm = p.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnitNorm { norm });
    }
    let p = p / norm;
    Ok(Plane4 {
        basis: vec![p.clone(), q.i.apply(&p), q.j.apply(&p), q.k.apply(&p)],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    AgreeOriented,
    AgreeUnorientedOnly,
    Disagree,
}

impl Agreement {
    pub fn unoriented(self) -> bool {
        self != Agreement::Disagree
    }
}

/// Compares the fibers of two structures through `p`: equal projectors up
/// to `tol`, and a positive change-of-basis determinant for orientation.
pub fn fibers_agree(
    q1: &QuatStructure,
    q2: &QuatStructure,
    p: &Vector,
    tol: f64,
) -> Result<Agreement> {
    let a = fiber4(q1, p)?;
    let b = fiber4(q2, p)?;
    if a.distance(&b) >= tol {
        return Ok(Agreement::Disagree);
    }
    let change = a.frame().transpose() * b.frame();
    Ok(if change.determinant() > 0.0 {
        Agreement::AgreeOriented
    } else {
        Agreement::AgreeUnorientedOnly
    })
}

fn stacked_sums(q1: &QuatStructure, q2: &QuatStructure) -> Result<Matrix> {
    if q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            expected: q1.dim(),
            found: q2.dim(),
        });
    }
    let dim = q1.dim();
    let mut m = Matrix::zeros(3 * dim, dim);
    for (b, (x, y)) in q1.factors().into_iter().zip(q2.factors()).enumerate() {
        m.view_mut((b * dim, 0), (dim, dim))
            .copy_from(&(x.matrix() + y.matrix()));
    }
    Ok(m)
}

/// `ker(I₁ + I₂) ∩ ker(J₁ + J₂) ∩ ker(K₁ + K₂)`.
pub fn triple_kernel(q1: &QuatStructure, q2: &QuatStructure) -> Result<KernelResult> {
    kernel(&stacked_sums(q1, q2)?, KERNEL_TOL)
}

/// `diag(1, −1, [[c, −s], [s, c]])`.
pub fn detector_q(c: f64, s: f64) -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[1., 0., 0., 0., 0., -1., 0., 0., 0., 0., c, -s, 0., 0., s, c],
    )
}

/// The two vectors `(−s, 1+c, 0, 0)` and `(1−c, −s, 0, 0)`, which lie in
/// `ker(QL_i + L_iQ) ∩ ker(QL_j + L_jQ) ∩ ker(QL_k + L_kQ)`.
pub fn detector_witnesses(c: f64, s: f64) -> [Vector; 2] {
    [
        Vector::from_row_slice(&[-s, 1.0 + c, 0.0, 0.0]),
        Vector::from_row_slice(&[1.0 - c, -s, 0.0, 0.0]),
    ]
}

/// `max |(QL + LQ) w|` over the three products and both witnesses.
pub fn detector_witness_residual(c: f64, s: f64) -> f64 {
    let q = detector_q(c, s);
    let mut worst = 0.0_f64;
    for l in [l_i(), l_j(), l_k()] {
        let m = &q * &l + &l * &q;
        for w in detector_witnesses(c, s) {
            worst = worst.max((&m * w).amax());
        }
    }
    worst
}

/// The detector argument carried out on a concrete opposite-sign pair on `R^4`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectorRun {
    /// Unit `p` with `I⁻p = −I⁺p`.
    #[serde(with = "crate::ocs::vector_json")]
    pub p: Vector,
    /// Change of basis between `(p, I⁺p, J⁺p, K⁺p)` and `(p, I⁻p, J⁻p, K⁻p)`.
    #[serde(with = "crate::ocs::matrix_json")]
    pub change_of_basis: Matrix,
    pub c: f64,
    pub s: f64,
    /// Distance of the change of basis from `detector_q(c, s)`.
    pub pattern_residual: f64,
    /// Witnesses mapped back to `R^4`.
    #[serde(with = "crate::ocs::vectors_json")]
    pub witnesses: Vec<Vector>,
    /// `max |(I⁺ + I⁻) x|`-type residual of the mapped witnesses.
    pub witness_residual: f64,
}

/// Follows the detector argument for `(plus, minus)` on `R^4`.
pub fn detector_run(plus: &QuatStructure, minus: &QuatStructure) -> Result<DetectorRun> {
    if plus.dim() != 4 || minus.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: plus.dim().max(minus.dim()),
        });
    }
    if quat_sign(plus)? == quat_sign(minus)? {
        return Err(Error::SameSign);
    }
    let ker = agreement_space(plus.i(), minus.i(), Mode::Sum)?;
    let p = ker.basis[0].normalize();
    let e = frame_of(plus, &p);
    let f = frame_of(minus, &p);
    let q = e.transpose() * &f;
    let (c, s) = (q[(2, 2)], q[(3, 2)]);
    let pattern_residual = max_abs(&(&q - detector_q(c, s)));
    let witnesses: Vec<Vector> = detector_witnesses(c, s)
        .iter()
        .map(|w| &e * (&q * w))
        .collect();
    let sums = stacked_sums(plus, minus)?;
    let witness_residual = witnesses
        .iter()
        .map(|x| (&sums * x).amax())
        .fold(0.0, f64::max);
    Ok(DetectorRun {
        p,
        change_of_basis: q,
        c,
        s,
        pattern_residual,
        witnesses,
        witness_residual,
    })
}

/// `diag(−1, 1, 1, [[0, −1], [1, 0]], 1, 1, 1)`.
pub fn counterexample_q() -> Vec<Vec<i64>> {
    let mut q = vec![vec![0i64; 8]; 8];
    for (i, d) in [-1, 1, 1, 0, 0, 1, 1, 1].into_iter().enumerate() {
        q[i][i] = d;
    }
    q[3][4] = -1;
    q[4][3] = 1;
    q
}

/// The standard structure on `R^8` and its conjugate by [`counterexample_q`].
pub fn counterexample_pair() -> (QuatStructure, QuatStructure) {
    let plus = standard_quat(2);
    let minus = conjugate_quat(&plus, &from_integer(&counterexample_q())).expect("Q is orthogonal");
    (plus, minus)
}

fn int_sum(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect()
}

fn int_apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn basis_vector(terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0i64; 8];
    for &(i, c) in terms {
        v[i] = c;
    }
    v
}

/// Exact check of `QI⁺ + I⁺Q`, `QJ⁺ + J⁺Q`, `QK⁺ + K⁺Q` and their kernels.
pub fn s3_counterexample() -> Report {
    let mut report = Report::new("s7-nonexistence", 0);
    let q = counterexample_q();
    let plus = standard_quat(2);
    let expected: [(&str, Vec<Vec<i64>>); 3] = [
        ("I", vec![basis_vector(&[(0, 1)]), basis_vector(&[(1, 1)])]),
        ("J", vec![basis_vector(&[(0, 1)]), basis_vector(&[(2, 1)])]),
        (
            "K",
            vec![
                basis_vector(&[(0, 1), (7, 1)]),
                basis_vector(&[(3, 1), (4, -1)]),
            ],
        ),
    ];
    report.push(
        Check::new(
            "det_Q",
            det_sign(&from_integer(&q)) == -1,
            format!("det_sign(Q) = {}", det_sign(&from_integer(&q))),
        )
        .stat("det_sign", f64::from(det_sign(&from_integer(&q)))),
    );
    let mut stacked = Vec::new();
    for ((name, span), factor) in expected.iter().zip(plus.factors()) {
        let l = to_integer(factor.matrix()).expect("standard structure is integral");
        let sum = int_sum(&integer_matmul(&q, &l), &integer_matmul(&l, &q));
        let annihilated = span
            .iter()
            .all(|v| int_apply(&sum, v).iter().all(|&x| x == 0));
        let rank = integer_rank(&sum);
        let ok = annihilated && rank == 8 - span.len() && integer_rank(span) == span.len();
        report.push(
            Check::new(
                format!("kernel_Q{name}+{name}Q"),
                ok,
                format!("rank {rank}, expected kernel spanned by {span:?}"),
            )
            .stat("rank", rank as f64),
        );
        stacked.extend(sum);
    }
    let rank = integer_rank(&stacked);
    report.push(
        Check::new(
            "triple_intersection_trivial",
            rank == 8,
            format!("stacked rank {rank} of 8"),
        )
        .stat("stacked_rank", rank as f64),
    );
    let (p, m) = counterexample_pair();
    match (quat_sign(&p), quat_sign(&m)) {
        (Ok(a), Ok(b)) => report.push(
            Check::new("opposite_signs", a != b, format!("signs {a} and {b}"))
                .stat("sign_plus", a.as_f64())
                .stat("sign_minus", b.as_f64()),
        ),
        (a, b) => report.push(Check::new("opposite_signs", false, format!("{a:?}, {b:?}"))),
    }
    match triple_kernel(&p, &m) {
        Ok(k) => report.push(
            Check::new(
                "triple_kernel_numeric",
                k.dimension == 0,
                format!("dimension {}", k.dimension),
            )
            .stat("dimension", k.dimension as f64),
        ),
        Err(e) => report.push(Check::new("triple_kernel_numeric", false, e.to_string())),
    }
    report
}

/// `(diag(L_i, L_i), diag(L_j, L_j), diag(L_k, L_k))` and its conjugate by
/// `diag(id, L_i)`.
pub fn nonuniqueness_pair() -> (QuatStructure, QuatStructure) {
    let one = standard_quat(2);
    let t = block_diag(&[Matrix::identity(4, 4), l_i()]);
    let two = conjugate_quat(&one, &t).expect("diag(id, L_i) is orthogonal");
    (one, two)
}

fn unit(dim: usize, terms: &[(usize, f64)]) -> Vector {
    let mut v = Vector::zeros(dim);
    for &(i, c) in terms {
        v[i] = c;
    }
    v.normalize()
}

/// Shared fibers through `e₁` and `e₅`, different fibers through
/// `(e₁ + e₅)/√2`, and the non-linear agreement locus.
pub fn nonuniqueness_report() -> Report {
    let mut report = Report::new("s7-nonuniqueness", 0).tolerance("plane", PLANE4_TOL);
    let (one, two) = nonuniqueness_pair();
    let want = [
        block_diag(&[l_i(), l_i()]),
        block_diag(&[l_j(), -l_j()]),
        block_diag(&[l_k(), -l_k()]),
    ];
    let exact =
        two.factors().iter().zip(&want).all(|(f, w)| {
            to_integer(f.matrix()) == to_integer(w) && max_abs(&(f.matrix() - w)) == 0.0
        });
    report.push(Check::new(
        "conjugated_blocks",
        exact,
        "(I2, J2, K2) = (diag(L_i, L_i), diag(L_j, -L_j), diag(L_k, -L_k))",
    ));
    let p = unit(8, &[(0, 1.0)]);
    let q = unit(8, &[(4, 1.0)]);
    let r = unit(8, &[(0, 1.0), (4, 1.0)]);
    let agree = |x: &Vector| fibers_agree(&one, &two, x, PLANE4_TOL).expect("unit vector in R^8");
    let (ap, aq, ar) = (agree(&p), agree(&q), agree(&r));
    report.push(Check::new(
        "shared_P",
        ap == Agreement::AgreeOriented,
        format!("{ap:?} at e1"),
    ));
    report.push(Check::new(
        "shared_Q",
        aq == Agreement::AgreeOriented,
        format!("{aq:?} at e5"),
    ));
    let fp = fiber4(&one, &p).expect("unit");
    let fq = fiber4(&one, &q).expect("unit");
    let cross = max_abs(&(fp.frame().transpose() * fq.frame()));
    report.push(Check::new(
        "P_orthogonal_Q",
        cross == 0.0,
        format!("max |<P, Q>| = {cross}"),
    ));
    let gap = fiber4(&one, &r)
        .expect("unit")
        .distance(&fiber4(&two, &r).expect("unit"));
    report.push(
        Check::new(
            "R1_ne_R2",
            ar == Agreement::Disagree && gap > 0.1,
            format!("projector distance {gap}"),
        )
        .stat("projector_distance", gap),
    );
    report.push(Check::new(
        "agreement_locus_nonlinear",
        ap.unoriented() && aq.unoriented() && !ar.unoriented(),
        "locus contains e1 and e5 but not (e1+e5)/sqrt2",
    ));
    report
}

/// Probe points: `e_i`, `(e_i ± e_j)/√2`, then `samples` seeded random points.
pub fn probe_candidates(dim: usize, samples: usize, seed: u64) -> Vec<Vector> {
    let mut candidates = Vec::new();
    for i in 0..dim {
        candidates.push(unit(dim, &[(i, 1.0)]));
    }
    for i in 0..dim {
        for k in i + 1..dim {
            candidates.push(unit(dim, &[(i, 1.0), (k, 1.0)]));
            candidates.push(unit(dim, &[(i, 1.0), (k, -1.0)]));
        }
    }
    let mut r = rng(seed);
    for _ in 0..samples {
        candidates.push(random_unit_vector(&mut r, dim));
    }
    candidates
}

/// Probe points at which the two fibers agree with orientation, with the
/// shared fiber.
pub fn oriented_agreements(
    q1: &QuatStructure,
    q2: &QuatStructure,
    samples: usize,
    seed: u64,
) -> Result<Vec<(Vector, Plane4)>> {
    if q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            expected: q1.dim(),
            found: q2.dim(),
        });
    }
    let mut found = Vec::new();
    for x in probe_candidates(q1.dim(), samples, seed) {
        if fibers_agree(q1, q2, &x, PLANE4_TOL)? == Agreement::AgreeOriented {
            let plane = fiber4(q1, &x)?;
            found.push((x, plane));
        }
    }
    Ok(found)
}

/// Samples points and collects those where the two fibers agree with
/// orientation; passes when all of them lie on one 4-plane.
///
/// Finding no agreement is only consistent with nonexistence.
pub fn shared_uniqueness_probe(
    q1: &QuatStructure,
    q2: &QuatStructure,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    if q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            expected: q1.dim(),
            found: q2.dim(),
        });
    }
    if quat_sign(q1)? == quat_sign(q2)? {
        return Err(Error::SameSign);
    }
    let candidates = probe_candidates(q1.dim(), samples, seed).len();
    let planes: Vec<Plane4> = oriented_agreements(q1, q2, samples, seed)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let spread = planes
        .iter()
        .skip(1)
        .map(|p| p.distance(&planes[0]))
        .fold(0.0, f64::max);
    let mut report = Report::new("shared-uniqueness", seed).tolerance("plane", PLANE4_TOL);
    let details = if planes.is_empty() {
        format!("no oriented agreement among {candidates} points, consistent with no shared fiber")
    } else {
        format!(
            "{} agreeing points, all on one 4-plane (spread {spread:.1e})",
            planes.len()
        )
    };
    report.push(
        Check::new("at_most_one_shared_fiber", spread < PLANE4_TOL, details)
            .stat("candidates", candidates as f64)
            .stat("agreements", planes.len() as f64)
            .stat("spread", spread),
    );
    Ok(report)
}

/// The standard structure on `R^8` and its conjugate by
/// `diag(1, 1, 1, 1, −1, 1, 1, 1)`, which share exactly `span(e₁, …, e₄)`.
pub fn one_shared_pair() -> (QuatStructure, QuatStructure) {
    let one = standard_quat(2);
    let mut t = Matrix::identity(8, 8);
    t[(4, 4)] = -1.0;
    let two = conjugate_quat(&one, &t).expect("diagonal sign matrix is orthogonal");
    (one, two)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocs::sign;
    use proptest::prelude::*;

    fn e(dim: usize, i: usize) -> Vector {
        unit(dim, &[(i, 1.0)])
    }

    #[test]
    fn validate_examples() {
        assert!(validate_quat(&l_i(), &l_j(), &l_k(), 1e-10).is_ok());
        let err = validate_quat(&l_i(), &l_k(), &l_j(), 1e-10).unwrap_err();
        assert!(
            matches!(
                err,
                Error::NotQuaternionic {
                    identity: "IJK = -id",
                    ..
                }
            ),
            "{err}"
        );
        let err = validate_quat(&l_i(), &l_j(), &-l_k(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotQuaternionic { .. }));
        let err = validate_quat(&(l_i() * 2.0), &l_j(), &l_k(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotQuaternionic { .. }));
    }

    #[test]
    fn left_multiplication_matches_quaternion_product() {
        // Quaternion product in the basis (1, i, j, k).
        fn mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
            [
                a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
            ]
        }
        for (unit, l) in [
            ([0., 1., 0., 0.], l_i()),
            ([0., 0., 1., 0.], l_j()),
            ([0., 0., 0., 1.], l_k()),
        ] {
            for c in 0..4 {
                let mut b = [0.0; 4];
                b[c] = 1.0;
                let prod = mul(unit, b);
                for r in 0..4 {
                    assert_eq!(l[(r, c)], prod[r]);
                }
            }
        }
    }

    #[test]
    fn standard_is_exact() {
        let q = standard_quat(2);
        assert_eq!(q.i().matrix(), &block_diag(&[l_i(), l_i()]));
        let id = Matrix::identity(8, 8);
        assert_eq!(
            max_abs(&(q.i().matrix() * q.j().matrix() * q.k().matrix() + id)),
            0.0
        );
        assert_eq!(quat_sign(&q).unwrap(), Sign::Positive);
        assert_eq!(quat_sign(&standard_quat(3)).unwrap(), Sign::Positive);
    }

    #[test]
    fn conjugation_examples() {
        let q = standard_quat(2);
        let same = conjugate_quat(&q, &Matrix::identity(8, 8)).unwrap();
        assert_eq!(same.k().matrix(), q.k().matrix());
        let (_, two) = nonuniqueness_pair();
        assert_eq!(two.j().matrix(), &block_diag(&[l_j(), -l_j()]));
        assert_eq!(two.k().matrix(), &block_diag(&[l_k(), -l_k()]));
        assert!(matches!(
            conjugate_quat(&q, &(Matrix::identity(8, 8) * 2.0)),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn sign_coherence() {
        for seed in 0..200u64 {
            let want = if seed % 3 == 0 {
                Sign::Negative
            } else {
                Sign::Positive
            };
            let n = 1 + (seed % 2) as usize;
            let q = random_quat(n, want, seed);
            assert_eq!(quat_sign(&q).unwrap(), want);
            for f in q.factors() {
                assert_eq!(sign(f).unwrap(), want);
            }
        }
    }

    #[test]
    fn fiber4_examples() {
        let q = standard_quat(2);
        let f = fiber4(&q, &e(8, 0)).unwrap();
        assert!(
            max_abs(&(f.projector() - projector(&(0..4).map(|i| e(8, i)).collect::<Vec<_>>(), 8)))
                < 1e-15
        );
        let f = fiber4(&q, &e(8, 4)).unwrap();
        assert!(
            max_abs(&(f.projector() - projector(&(4..8).map(|i| e(8, i)).collect::<Vec<_>>(), 8)))
                < 1e-15
        );
        let mut r = rng(3);
        let q = random_quat(2, Sign::Negative, 3);
        for _ in 0..100 {
            assert!(
                fiber4(&q, &random_unit_vector(&mut r, 8))
                    .unwrap()
                    .orthonormality_residual()
                    < 1e-12
            );
        }
    }

    #[test]
    fn agreement_examples() {
        let q = random_quat(2, Sign::Positive, 5);
        let mut r = rng(5);
        for _ in 0..20 {
            assert_eq!(
                fibers_agree(&q, &q, &random_unit_vector(&mut r, 8), 1e-8).unwrap(),
                Agreement::AgreeOriented
            );
        }
        let report = nonuniqueness_report();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn detector_witnesses_lie_in_kernels() {
        for k in 0..64 {
            let t = k as f64 * std::f64::consts::TAU / 64.0;
            assert!(detector_witness_residual(t.cos(), t.sin()) < 1e-10);
        }
    }

    #[test]
    fn detector_law_on_random_pairs() {
        for seed in 0..300u64 {
            let plus = random_quat(1, Sign::Positive, 2 * seed);
            let minus = random_quat(1, Sign::Negative, 2 * seed + 1);
            let k = triple_kernel(&plus, &minus).unwrap();
            assert!(k.dimension >= 1, "seed {seed}");
            let run = detector_run(&plus, &minus).unwrap();
            assert!(
                run.pattern_residual < 1e-10,
                "seed {seed}: {}",
                run.pattern_residual
            );
            assert!(run.witness_residual < 1e-10);
            assert!(run.witnesses.iter().any(|w| w.norm() > 0.5));
        }
    }

    #[test]
    fn s3_counterexample_integer_sums() {
        // QI⁺ + I⁺Q, QJ⁺ + J⁺Q, QK⁺ + K⁺Q, entry by entry.
        let expected_sums: [[[i64; 8]; 8]; 3] = [
            [
                [0, 0, 0, 0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0, 0, 0, 0],
                [0, 0, 0, -1, 1, 0, 0, 0],
                [0, 0, 1, 0, 0, 1, 0, 0],
                [0, 0, 1, 0, 0, -1, 0, 0],
                [0, 0, 0, 1, 1, 0, 0, 0],
                [0, 0, 0, 0, 0, 0, 0, -2],
                [0, 0, 0, 0, 0, 0, 2, 0],
            ],
            [
                [0, 0, 0, 0, 0, 0, 0, 0],
                [0, 0, 0, 1, -1, 0, 0, 0],
                [0, 0, 0, 0, 0, 0, 0, 0],
                [0, -1, 0, 0, 0, 0, 1, 0],
                [0, -1, 0, 0, 0, 0, -1, 0],
                [0, 0, 0, 0, 0, 0, 0, 2],
                [0, 0, 0, 1, 1, 0, 0, 0],
                [0, 0, 0, 0, 0, -2, 0, 0],
            ],
            [
                [0, 0, 0, 1, 1, 0, 0, 0],
                [0, 0, -2, 0, 0, 0, 0, 0],
                [0, 2, 0, 0, 0, 0, 0, 0],
                [-1, 0, 0, 0, 0, 0, 0, 1],
                [1, 0, 0, 0, 0, 0, 0, -1],
                [0, 0, 0, 0, 0, 0, -2, 0],
                [0, 0, 0, 0, 0, 2, 0, 0],
                [0, 0, 0, 1, 1, 0, 0, 0],
            ],
        ];
        let q = counterexample_q();
        for (d, f) in expected_sums.iter().zip(standard_quat(2).factors()) {
            let l = to_integer(f.matrix()).unwrap();
            let sum = int_sum(&integer_matmul(&q, &l), &integer_matmul(&l, &q));
            let want: Vec<Vec<i64>> = d.iter().map(|r| r.to_vec()).collect();
            assert_eq!(sum, want);
        }
        let report = s3_counterexample();
        assert!(report.passed(), "{report}");
        assert!(report.checks.len() >= 5);
    }

    #[test]
    fn probe_examples() {
        let (p, m) = counterexample_pair();
        let report = shared_uniqueness_probe(&p, &m, 200, 0).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks[0].stats["agreements"], 0.0);

        let (one, two) = one_shared_pair();
        let report = shared_uniqueness_probe(&one, &two, 200, 1).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.checks[0].stats["agreements"] > 0.0);

        assert!(matches!(
            shared_uniqueness_probe(&one, &one, 10, 0),
            Err(Error::SameSign)
        ));
    }

    #[test]
    fn quat_json_round_trip() {
        let q = random_quat(1, Sign::Negative, 8);
        let text = serde_json::to_string(&q).unwrap();
        assert!(text.contains("\"I\"") && text.contains("\"K\""));
        let back: QuatStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(back.j().matrix(), q.j().matrix());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["K"] = v["J"].clone();
        let err = serde_json::from_value::<QuatStructure>(v)
            .unwrap_err()
            .to_string();
        assert!(err.contains("`K`"), "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn conjugated_fibers_are_images(seed in any::<u64>(), neg in any::<bool>()) {
            let want = if neg { Sign::Negative } else { Sign::Positive };
            let t = random_orthogonal(8, want, seed);
            let q = conjugate_quat(&standard_quat(2), &t).unwrap();
            prop_assert_eq!(quat_sign(&q).unwrap(), want);
            let p = random_unit_vector(&mut rng(seed ^ 7), 8);
            let image = &t * fiber4(&standard_quat(2), &p).unwrap().frame();
            let frame = fiber4(&q, &(&t * &p)).unwrap().frame();
            prop_assert!(max_abs(&(image - frame)) < 1e-9);
        }
    }
}
