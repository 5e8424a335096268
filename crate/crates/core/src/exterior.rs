//! Bivectors on `R^4`: wedge products, the plane-to-bivector map, the Hodge
//! star and its eigenspace split, decomposability, and normal forms.
//!
//! A [`Bivector`] is stored in the lexicographic basis
//! `e12, e13, e14, e23, e24, e34`, where coordinate `(i, j)` is the value of
//! the alternating form on `(e_i, e_j)`. The standard basis is orthonormal.
//! Four-forms are represented by their coefficient on the volume form.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::OrientedPlane;
use crate::numkern::{Matrix, Vector};

/// Index pairs of the six coordinates, 0-based.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Element of the second exterior power of `R^4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bivector {
    pub coords: [f64; 6],
}

impl Bivector {
    pub const ZERO: Bivector = Bivector { coords: [0.0; 6] };

    pub fn new(coords: [f64; 6]) -> Self {
        Bivector { coords }
    }

    /// `e_i ∧ e_j` for 0-based `i < j`; reversed indices give the negative.
    pub fn basis(i: usize, j: usize) -> Self {
        let mut b = Bivector::ZERO;
        let (lo, hi, s) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS
            .iter()
            .position(|&p| p == (lo, hi))
            .expect("index pair out of range");
        b.coords[k] = s;
        b
    }

    pub fn norm_squared(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    /// The skew matrix `A_ij = α(e_i, e_j)`.
    pub fn to_skew_matrix(&self) -> Matrix {
        let mut a = Matrix::zeros(4, 4);
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            a[(i, j)] = self.coords[k];
            a[(j, i)] = -self.coords[k];
        }
        a
    }

    /// Reads the upper triangle of a 4x4 matrix.
    pub fn from_skew_matrix(a: &Matrix) -> Self {
        let mut b = Bivector::ZERO;
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            b.coords[k] = a[(i, j)];
        }
        b
    }
}

impl Index<usize> for Bivector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.coords[k]
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(mut self, rhs: Bivector) -> Bivector {
        self += rhs;
        self
    }
}

impl AddAssign for Bivector {
    fn add_assign(&mut self, rhs: Bivector) {
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a += b;
        }
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, rhs: Bivector) -> Bivector {
        self + (-rhs)
    }
}

impl Neg for Bivector {
    type Output = Bivector;
    fn neg(self) -> Bivector {
        self * -1.0
    }
}

impl Mul<f64> for Bivector {
    type Output = Bivector;
    fn mul(mut self, s: f64) -> Bivector {
        for a in &mut self.coords {
            *a *= s;
        }
        self
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;
    fn mul(self, b: Bivector) -> Bivector {
        b * self
    }
}

impl fmt::Display for Bivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["e12", "e13", "e14", "e23", "e24", "e34"];
        let mut first = true;
        for (c, name) in self.coords.iter().zip(names) {
            if *c == 0.0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{c}·{name}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Wedge of two vectors of `R^4`: coordinate `(i, j)` is `x_i y_j - x_j y_i`.
pub fn wedge1(x: &Vector, y: &Vector) -> Bivector {
    assert_eq!(x.len(), 4, "wedge1 expects vectors in R^4");
    assert_eq!(y.len(), 4, "wedge1 expects vectors in R^4");
    let mut b = Bivector::ZERO;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        b.coords[k] = x[i] * y[j] - x[j] * y[i];
    }
    b
}

/// The unit decomposable bivector `u ∧ v` of an oriented plane in `R^4`.
pub fn omega(p: &OrientedPlane) -> Bivector {
    wedge1(p.u(), p.v())
}

pub fn inner(a: &Bivector, b: &Bivector) -> f64 {
    a.coords.iter().zip(&b.coords).map(|(x, y)| x * y).sum()
}

/// Hodge star: `e12↦e34, e13↦−e24, e14↦e23, e23↦e14, e24↦−e13, e34↦e12`.
pub fn star(a: &Bivector) -> Bivector {
    let [a12, a13, a14, a23, a24, a34] = a.coords;
    Bivector::new([a34, -a24, a23, a14, -a13, a12])
}

/// Coefficient of the volume form in `α ∧ β`.
pub fn wedge22(a: &Bivector, b: &Bivector) -> f64 {
    let [a12, a13, a14, a23, a24, a34] = a.coords;
    let [b12, b13, b14, b23, b24, b34] = b.coords;
    a12 * b34 - a13 * b24 + a14 * b23 + a23 * b14 - a24 * b13 + a34 * b12
}

/// Anti-self-dual and self-dual parts, in that order.
pub fn pi_split(a: &Bivector) -> (Bivector, Bivector) {
    let s = star(a);
    ((*a - s) * 0.5, (*a + s) * 0.5)
}

pub fn pi_minus(a: &Bivector) -> Bivector {
    pi_split(a).0
}

pub fn pi_plus(a: &Bivector) -> Bivector {
    pi_split(a).1
}

/// A nonzero bivector is decomposable exactly when `<α, *α> = 0`.
pub fn is_decomposable(a: &Bivector, tol: f64) -> bool {
    let n2 = a.norm_squared();
    a.norm() > tol && inner(a, &star(a)).abs() < tol * n2
}

/// Inverse of [`omega`] on its image: the oriented plane whose unit
/// bivector is `α`.
pub fn omega_inverse(a: &Bivector) -> Result<OrientedPlane> {
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnitNorm { norm });
    }
    if !is_decomposable(a, 1e-8) {
        return Err(Error::NotDecomposable {
            residual: inner(a, &star(a)).abs() / a.norm_squared(),
        });
    }
    // A = u v^T - v u^T, so -A^2 projects onto the plane and A u = -v.
    let m = a.to_skew_matrix() * (1.0 / norm);
    let proj = -(&m * &m);
    let k = (0..4)
        .max_by(|&i, &j| proj.column(i).norm().total_cmp(&proj.column(j).norm()))
        .expect("four columns");
    let u: Vector = proj.column(k).normalize();
    let mut v: Vector = -(&m * &u);
    if inner(&wedge1(&u, &v), a) < 0.0 {
        v.neg_mut();
    }
    OrientedPlane::new(&u, &v)
}

/// `a·ω_P + b·ω_Q` with `P`, `Q` intersecting trivially.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DarbouxForm {
    pub a: f64,
    #[serde(rename = "P")]
    pub p: OrientedPlane,
    pub b: f64,
    #[serde(rename = "Q")]
    pub q: OrientedPlane,
}

impl DarbouxForm {
    pub fn reconstruct(&self) -> Bivector {
        omega(&self.p) * self.a + omega(&self.q) * self.b
    }
}

/// Darboux normal form through the self-dual split.
///
/// With `p̂±` the parts of `α` rescaled to norm `1/√2`, the planes are
/// `ω_P = p̂₋ + p̂₊` and `ω_Q = −p̂₋ + p̂₊`, so `<ω_P, *ω_Q> = 1`.
pub fn darboux_decompose(a: &Bivector) -> DarbouxForm {
    let e12 = Bivector::basis(0, 1);
    let e34 = Bivector::basis(2, 3);
    let (minus, plus) = pi_split(a);
    let nm = minus.norm();
    let np = plus.norm();
    let scale = a.norm();
    if scale == 0.0 {
        return DarbouxForm {
            a: 0.0,
            p: OrientedPlane::standard(4, 0, 1),
            b: 0.0,
            q: OrientedPlane::standard(4, 2, 3),
        };
    }
    let half_root = std::f64::consts::FRAC_1_SQRT_2;
    let tiny = 1e-14 * scale;
    let hat_minus = if nm > tiny {
        minus * (half_root / nm)
    } else {
        (e12 - e34) * 0.5
    };
    let hat_plus = if np > tiny {
        plus * (half_root / np)
    } else {
        (e12 + e34) * 0.5
    };
    let sqrt2 = std::f64::consts::SQRT_2;
    let p = omega_inverse(&(hat_minus + hat_plus)).expect("p̂₋ + p̂₊ lies in the image of ω");
    let q = omega_inverse(&(hat_plus - hat_minus)).expect("−p̂₋ + p̂₊ lies in the image of ω");
    DarbouxForm {
        a: (sqrt2 * nm + sqrt2 * np) / 2.0,
        p,
        b: (sqrt2 * np - sqrt2 * nm) / 2.0,
        q,
    }
}

/// Canonical congruence forms of a 4x4 skew matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkewForm {
    B0,
    B1,
    B2,
}

impl SkewForm {
    pub fn rank(self) -> usize {
        match self {
            SkewForm::B0 => 0,
            SkewForm::B1 => 2,
            SkewForm::B2 => 4,
        }
    }

    pub fn matrix(self) -> Matrix {
        let mut b = Matrix::zeros(4, 4);
        if self.rank() >= 2 {
            b[(0, 1)] = 1.0;
            b[(1, 0)] = -1.0;
        }
        if self.rank() == 4 {
            b[(2, 3)] = 1.0;
            b[(3, 2)] = -1.0;
        }
        b
    }
}

/// Reduces a skew matrix by elementary congruence operations, returning `Q`
/// with `QᵀAQ` equal to one of `B0`, `B1`, `B2`.
///
/// Each stage picks the largest remaining off-diagonal entry as pivot, moves
/// it to the next 2x2 block, scales it to 1 and clears the rest of that
/// block's rows and columns.
pub fn skew_normal_form(a: &Matrix) -> Result<(Matrix, SkewForm)> {
    if a.nrows() != 4 || a.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: a.nrows().max(a.ncols()),
        });
    }
    let residual = crate::numkern::max_abs(&(a + a.transpose()));
    if residual > 1e-12 * crate::numkern::max_abs(a).max(1.0) {
        return Err(Error::NotSkew { residual });
    }
    let zero_tol = 1e-10 * crate::numkern::max_abs(a);
    let mut m = a.clone();
    let mut q = Matrix::identity(4, 4);
    let mut blocks = 0;

    let congruence = |m: &mut Matrix, q: &mut Matrix, e: &Matrix| {
        *m = e.transpose() * &*m * e;
        *q = &*q * e;
    };

    for k in [0usize, 2] {
        let mut best = (0.0_f64, k, k + 1);
        for i in k..4 {
            for j in i + 1..4 {
                if m[(i, j)].abs() > best.0 {
                    best = (m[(i, j)].abs(), i, j);
                }
            }
        }
        let (pivot, i, j) = best;
        if pivot <= zero_tol || pivot == 0.0 {
            break;
        }
        // Move the pivot to (k, k+1).
        let mut perm = Matrix::identity(4, 4);
        perm.swap_columns(k, i);
        let j = if j == k { i } else { j };
        perm.swap_columns(k + 1, j);
        congruence(&mut m, &mut q, &perm);

        let mut scale = Matrix::identity(4, 4);
        scale[(k + 1, k + 1)] = 1.0 / m[(k, k + 1)];
        congruence(&mut m, &mut q, &scale);

        // Clear rows/columns k and k+1 outside the block.
        let mut elim = Matrix::identity(4, 4);
        for l in k + 2..4 {
            elim[(k, l)] = m[(k + 1, l)];
            elim[(k + 1, l)] = -m[(k, l)];
        }
        congruence(&mut m, &mut q, &elim);
        blocks += 1;
    }
    let form = match blocks {
        0 => SkewForm::B0,
        1 => SkewForm::B1,
        _ => SkewForm::B2,
    };
    Ok((q, form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{orthogonal_complement, OrientedPlane};
    use crate::numkern::{gaussian_vector, rng};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e(i: usize) -> Vector {
        let mut v = Vector::zeros(4);
        v[i] = 1.0;
        v
    }

    fn random_bivector(seed: u64) -> Bivector {
        let mut r = rng(seed);
        let g = gaussian_vector(&mut r, 6);
        Bivector::new([g[0], g[1], g[2], g[3], g[4], g[5]])
    }

    fn random_plane(seed: u64) -> OrientedPlane {
        let mut r = rng(seed);
        let a = gaussian_vector(&mut r, 4);
        let b = gaussian_vector(&mut r, 4);
        OrientedPlane::new(&a, &b).unwrap()
    }

    /// Independent oracle: determinant of the 2x2 matrix B^T A of projections.
    fn projection_det(p: &OrientedPlane, q: &OrientedPlane) -> f64 {
        let a11 = q.u().dot(p.u());
        let a12 = q.u().dot(p.v());
        let a21 = q.v().dot(p.u());
        let a22 = q.v().dot(p.v());
        a11 * a22 - a12 * a21
    }

    #[test]
    fn wedge1_examples() {
        assert_eq!(wedge1(&e(0), &e(1)).coords, [1., 0., 0., 0., 0., 0.]);
        let x = (e(0) + e(2)) * FRAC_1_SQRT_2;
        let w = wedge1(&x, &e(1));
        let want = [FRAC_1_SQRT_2, 0., 0., -FRAC_1_SQRT_2, 0., 0.];
        for k in 0..6 {
            assert!((w[k] - want[k]).abs() < 1e-15);
        }
        let y = Vector::from_row_slice(&[0.3, -1.2, 2.0, 0.7]);
        assert_eq!(wedge1(&y, &y), Bivector::ZERO);
    }

    #[test]
    fn omega_orientation() {
        let p = OrientedPlane::new(&e(0), &e(1)).unwrap();
        let q = OrientedPlane::new(&e(1), &e(0)).unwrap();
        assert_eq!(omega(&p), Bivector::basis(0, 1));
        assert_eq!(omega(&q), -Bivector::basis(0, 1));
    }

    #[test]
    fn omega_of_standard_hopf_fiber() {
        let (a, b, c, d) = (0.5_f64, -0.1, 0.7, 0.0);
        let n = (a * a + b * b + c * c + d * d).sqrt();
        let (a, b, c, d) = (a / n, b / n, c / n, d / n);
        let x = Vector::from_row_slice(&[a, b, c, d]);
        let y = Vector::from_row_slice(&[-b, a, -d, c]);
        let w = omega(&OrientedPlane::new(&x, &y).unwrap());
        let want = [
            a * a + b * b,
            -a * d + b * c,
            a * c + b * d,
            -b * d - a * c,
            b * c - a * d,
            c * c + d * d,
        ];
        for k in 0..6 {
            assert!((w[k] - want[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn inner_examples() {
        let p = OrientedPlane::new(&e(0), &e(1)).unwrap();
        let q = OrientedPlane::new(&((e(0) + e(2)) * FRAC_1_SQRT_2), &e(1)).unwrap();
        assert!((inner(&omega(&p), &omega(&p)) - 1.0).abs() < 1e-15);
        assert_eq!(inner(&Bivector::basis(0, 1), &Bivector::basis(0, 2)), 0.0);
        assert!((projection_det(&p, &q) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((inner(&omega(&p), &omega(&q)) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn star_on_basis() {
        assert_eq!(star(&Bivector::basis(0, 1)), Bivector::basis(2, 3));
        assert_eq!(star(&Bivector::basis(0, 2)), -Bivector::basis(1, 3));
        assert_eq!(star(&Bivector::basis(0, 3)), Bivector::basis(1, 2));
        for seed in 0..100 {
            let a = random_bivector(seed);
            assert!((star(&star(&a)) - a).max_abs() < 1e-14);
        }
    }

    #[test]
    fn wedge22_examples() {
        assert_eq!(wedge22(&Bivector::basis(0, 1), &Bivector::basis(2, 3)), 1.0);
        let w = omega(&random_plane(4));
        assert!(wedge22(&w, &w).abs() < 1e-15);
        for seed in 0..50 {
            let a = random_bivector(seed);
            let b = random_bivector(seed + 1000);
            assert!((wedge22(&a, &star(&b)) - inner(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn pi_split_examples() {
        let w = omega(&random_plane(9));
        let (m, p) = pi_split(&w);
        assert!((m.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((p.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        let sd = Bivector::basis(0, 1) + Bivector::basis(2, 3);
        let (m, p) = pi_split(&sd);
        assert_eq!(m, Bivector::ZERO);
        assert_eq!(p, sd);
    }

    #[test]
    fn decomposability() {
        let w = omega(&random_plane(2));
        assert!(is_decomposable(&w, 1e-10));
        assert!(is_decomposable(&(w * 0.3), 1e-10));
        assert!(!is_decomposable(
            &(Bivector::basis(0, 1) + Bivector::basis(2, 3)),
            1e-10
        ));
        assert!(!is_decomposable(&Bivector::ZERO, 1e-10));
    }

    #[test]
    fn omega_inverse_examples() {
        let p = omega_inverse(&Bivector::basis(0, 1)).unwrap();
        assert!((omega(&p) - Bivector::basis(0, 1)).max_abs() < 1e-12);
        let q = omega_inverse(&-Bivector::basis(0, 1)).unwrap();
        assert!((omega(&q) + Bivector::basis(0, 1)).max_abs() < 1e-12);
        assert!(matches!(
            omega_inverse(&(Bivector::basis(0, 1) * 2.0)),
            Err(Error::NotUnitNorm { .. })
        ));
        let sd = (Bivector::basis(0, 1) + Bivector::basis(2, 3)) * FRAC_1_SQRT_2;
        assert!(matches!(
            omega_inverse(&sd),
            Err(Error::NotDecomposable { .. })
        ));
    }

    #[test]
    fn omega_inverse_near_coordinate_plane() {
        let w = Bivector::new([0.0, 3.2e-13, 0.0, 1.0, 1.1e-13, 0.0]);
        let w = w * (1.0 / w.norm());
        let p = omega_inverse(&w).unwrap();
        let x = (e(1) + e(2)) * FRAC_1_SQRT_2;
        assert!(p.containment_residual(&x) < 1e-12);
        assert!((omega(&p) - w).max_abs() < 1e-12);
    }

    #[test]
    fn omega_inverse_round_trip() {
        for seed in 0..500 {
            let w = omega(&random_plane(seed));
            let back = omega(&omega_inverse(&w).unwrap());
            assert!((back - w).max_abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn hodge_star_is_orthogonal_complement() {
        for seed in 0..200 {
            let p = random_plane(seed);
            let perp = orthogonal_complement(&p);
            assert!((star(&omega(&p)) - omega(&perp)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn darboux_examples() {
        let w = omega(&random_plane(5));
        let d = darboux_decompose(&w);
        assert!((d.a - 1.0).abs() < 1e-12 && d.b.abs() < 1e-12);
        assert!((d.reconstruct() - w).max_abs() < 1e-12);

        let sd = Bivector::basis(0, 1) + Bivector::basis(2, 3);
        let d = darboux_decompose(&sd);
        assert!((d.a - 1.0).abs() < 1e-12 && (d.b - 1.0).abs() < 1e-12);
        assert!((d.reconstruct() - sd).max_abs() < 1e-12);

        let d = darboux_decompose(&Bivector::ZERO);
        assert_eq!((d.a, d.b), (0.0, 0.0));
        assert_eq!(omega(&d.p), Bivector::basis(0, 1));
        assert_eq!(omega(&d.q), Bivector::basis(2, 3));
    }

    #[test]
    fn darboux_random_and_degenerate() {
        for seed in 0..500 {
            let raw = random_bivector(seed);
            let a = match seed % 5 {
                0 => pi_plus(&raw),
                1 => pi_minus(&raw),
                2 => omega(&random_plane(seed)) * 3.0,
                _ => raw,
            };
            let d = darboux_decompose(&a);
            assert!((d.reconstruct() - a).norm() < 1e-9, "seed {seed}");
            assert!(inner(&omega(&d.p), &star(&omega(&d.q))).abs() > 0.99);
            assert!(d.a >= d.b.abs());
        }
    }

    #[test]
    fn skew_normal_form_examples() {
        let (q, f) = skew_normal_form(&Matrix::zeros(4, 4)).unwrap();
        assert_eq!(f, SkewForm::B0);
        assert_eq!(q, Matrix::identity(4, 4));

        let b1 = SkewForm::B1.matrix();
        let (q, f) = skew_normal_form(&b1).unwrap();
        assert_eq!(f, SkewForm::B1);
        assert!(crate::numkern::max_abs(&(q.transpose() * &b1 * &q - &b1)) < 1e-12);

        for seed in 0..100 {
            let a = random_bivector(seed).to_skew_matrix();
            let (q, f) = skew_normal_form(&a).unwrap();
            assert_eq!(f, SkewForm::B2);
            assert!(
                crate::numkern::max_abs(&(q.transpose() * &a * &q - SkewForm::B2.matrix())) < 1e-9
            );
        }

        let mut not_skew = Matrix::zeros(4, 4);
        not_skew[(0, 1)] = 1.0;
        assert!(matches!(
            skew_normal_form(&not_skew),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn skew_normal_form_rank_two() {
        for seed in 0..100 {
            let w = omega(&random_plane(seed)) * 2.5;
            let a = w.to_skew_matrix();
            let (q, f) = skew_normal_form(&a).unwrap();
            assert_eq!(f, SkewForm::B1, "seed {seed}");
            assert!(
                crate::numkern::max_abs(&(q.transpose() * &a * &q - SkewForm::B1.matrix())) < 1e-9
            );
        }
    }

    proptest! {
        #[test]
        fn duality_pairing(seed in any::<u64>()) {
            let a = random_bivector(seed);
            let b = random_bivector(seed.wrapping_add(1));
            prop_assert!((wedge22(&a, &star(&b)) - inner(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn split_is_orthogonal(seed in any::<u64>()) {
            let a = random_bivector(seed);
            let (m, p) = pi_split(&a);
            prop_assert!((m + p - a).max_abs() < 1e-15);
            prop_assert!((star(&p) - p).max_abs() < 1e-15);
            prop_assert!((star(&m) + m).max_abs() < 1e-15);
            prop_assert!((a.norm_squared() - m.norm_squared() - p.norm_squared()).abs() < 1e-12);
        }

        #[test]
        fn inner_is_projection_determinant(seed in any::<u64>()) {
            let p = random_plane(seed);
            let q = random_plane(seed.wrapping_add(7));
            prop_assert!((inner(&omega(&p), &omega(&q)) - projection_det(&p, &q)).abs() < 1e-10);
        }
    }
}
