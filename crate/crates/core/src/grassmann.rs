//! Oriented 2-planes: construction, complements, the angles θ±, the
//! intersection test and the point-anchored maps `ψ_{p±}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{inner, omega, pi_split, star, wedge1, Bivector};
use crate::numkern::{det_sign, orthonormalize, Matrix, Vector};

/// Residual below which two vectors count as dependent when building a plane.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// Ordered orthonormal pair `(u, v)` spanning an oriented plane in `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PlaneJson", try_from = "PlaneJson")]
pub struct OrientedPlane {
    u: Vector,
    v: Vector,
}

#[derive(Serialize, Deserialize)]
struct PlaneJson {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl From<OrientedPlane> for PlaneJson {
    fn from(p: OrientedPlane) -> Self {
        PlaneJson {
            u: p.u.iter().copied().collect(),
            v: p.v.iter().copied().collect(),
        }
    }
}

impl TryFrom<PlaneJson> for OrientedPlane {
    type Error = Error;
    fn try_from(j: PlaneJson) -> Result<Self> {
        if j.u.is_empty() || j.u.iter().any(|x| !x.is_finite()) {
            return Err(schema("u", "expected a nonempty list of finite numbers"));
        }
        if j.v.len() != j.u.len() || j.v.iter().any(|x| !x.is_finite()) {
            return Err(schema("v", "expected finite numbers, same length as u"));
        }
        OrientedPlane::new(&Vector::from_vec(j.u), &Vector::from_vec(j.v))
            .map_err(|e| schema("v", &format!("not independent of u: {e}")))
    }
}

fn schema(field: &str, message: &str) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

impl OrientedPlane {
    /// Gram–Schmidt on `(u, v)`; orientation is preserved.
    pub fn new(u: &Vector, v: &Vector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        let scale = u.norm().max(v.norm()).max(f64::MIN_POSITIVE);
        let q = orthonormalize(&[u / scale, v / scale], DEPENDENCE_TOL, true)?;
        Ok(OrientedPlane {
            u: q[0].clone(),
            v: q[1].clone(),
        })
    }

    /// `span⁺(e_i, e_j)` in `R^m`, 0-based.
    pub fn standard(m: usize, i: usize, j: usize) -> Self {
        let mut u = Vector::zeros(m);
        let mut v = Vector::zeros(m);
        u[i] = 1.0;
        v[j] = 1.0;
        OrientedPlane { u, v }
    }

    pub fn u(&self) -> &Vector {
        &self.u
    }

    pub fn v(&self) -> &Vector {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `u vᵀ − v uᵀ`: the plane's bivector as a skew matrix in any dimension.
    pub fn skew(&self) -> Matrix {
        &self.u * self.v.transpose() - &self.v * self.u.transpose()
    }

    pub fn projector(&self) -> Matrix {
        &self.u * self.u.transpose() + &self.v * self.v.transpose()
    }

    /// `‖x − Πx‖`.
    pub fn containment_residual(&self, x: &Vector) -> f64 {
        let proj = &self.u * self.u.dot(x) + &self.v * self.v.dot(x);
        (x - proj).norm()
    }

    /// Same plane, opposite orientation.
    pub fn reversed(&self) -> Self {
        OrientedPlane {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// Image under a linear map, re-orthonormalized.
    pub fn transform(&self, t: &Matrix) -> Result<Self> {
        OrientedPlane::new(&(t * &self.u), &(t * &self.v))
    }
}

impl fmt::Display for OrientedPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: &Vector| {
            x.iter()
                .map(|c| format!("{c:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "span⁺([{}], [{}])", show(&self.u), show(&self.v))
    }
}

/// Builds a plane from two independent vectors.
pub fn plane(u: &Vector, v: &Vector) -> Result<OrientedPlane> {
    OrientedPlane::new(u, v)
}

/// Orientation-sensitive distance between planes of the same dimension:
/// `‖ω_P − ω_Q‖`, computed as `‖A_P − A_Q‖_F / √2` on skew matrices so it
/// works in any `R^m`.
pub fn plane_distance(p: &OrientedPlane, q: &OrientedPlane) -> f64 {
    (p.skew() - q.skew()).norm() / std::f64::consts::SQRT_2
}

/// Planes are equal when their bivectors agree to `1e-8`.
pub fn same_plane(p: &OrientedPlane, q: &OrientedPlane) -> bool {
    plane_distance(p, q) < 1e-8
}

/// `P⊥` oriented so that `(p1, p2, p3, p4)` is a positive basis.
pub fn orthogonal_complement(p: &OrientedPlane) -> OrientedPlane {
    assert_eq!(p.dim(), 4, "orthogonal_complement needs a plane in R^4");
    let mut seeds = vec![p.u.clone(), p.v.clone()];
    seeds.extend((0..4).map(|i| {
        let mut e = Vector::zeros(4);
        e[i] = 1.0;
        e
    }));
    let q = orthonormalize(&seeds, 1e-6, false).expect("vectors share a dimension");
    let w3 = q[2].clone();
    let mut w4 = q[3].clone();
    let frame = Matrix::from_columns(&[p.u.clone(), p.v.clone(), w3.clone(), w4.clone()]);
    if det_sign(&frame) < 0 {
        w4.neg_mut();
    }
    OrientedPlane { u: w3, v: w4 }
}

/// Robust angle between two nonzero vectors of the same space.
fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x / na, y / nb);
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Angles between the anti-self-dual parts and between the self-dual parts
/// of `ω_P` and `ω_Q`, in `[0, π]`.
pub fn theta_pm(p: &OrientedPlane, q: &OrientedPlane) -> (f64, f64) {
    let (pm, pp) = pi_split(&omega(p));
    let (qm, qp) = pi_split(&omega(q));
    (
        angle_between(&pm.coords, &qm.coords),
        angle_between(&pp.coords, &qp.coords),
    )
}

/// `|<ω_P, *ω_Q>| < tol`.
pub fn intersects(p: &OrientedPlane, q: &OrientedPlane, tol: f64) -> bool {
    inner(&omega(p), &star(&omega(q))).abs() < tol
}

/// The two eigenspaces of the Hodge star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    /// Projection of a bivector onto this side's eigenspace.
    pub fn project(self, a: &Bivector) -> Bivector {
        let (m, p) = pi_split(a);
        match self {
            Side::Minus => m,
            Side::Plus => p,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        })
    }
}

/// `ψ_{p,side}(u) = π_side(p ∧ u)` for `u ⊥ p`.
pub fn psi(p: &Vector, u: &Vector, side: Side) -> Result<Bivector> {
    let dot = p.dot(u);
    if dot.abs() > 1e-10 * u.norm().max(1.0) {
        return Err(Error::NotOrthogonal {
            residual: dot.abs(),
        });
    }
    Ok(side.project(&wedge1(p, u)))
}

/// Least-squares inverse of [`psi`] on `p⊥`.
///
/// For unit `p` the map `u ↦ π_side(p ∧ u)` is `1/√2` times an isometry on
/// `p⊥` and vanishes on `p`, so the normal-equation solution is `2 Lᵀ a`.
pub fn psi_inverse(p: &Vector, a: &Bivector, side: Side) -> Result<Vector> {
    let mut u = Vector::zeros(4);
    for k in 0..4 {
        let mut e = Vector::zeros(4);
        e[k] = 1.0;
        u[k] = 2.0 * inner(&side.project(&wedge1(p, &e)), a);
    }
    let back = side.project(&wedge1(p, &u));
    let residual = (back - *a).max_abs();
    if residual > 1e-8 * a.max_abs().max(1.0) {
        return Err(Error::OffSphere { residual });
    }
    Ok(u)
}

/// Deterministic positively oriented orthonormal frame `(f1, f2, f3)` of `p⊥`
/// for unit `p ∈ R^4`: coordinate axes taken in order of increasing `|p_i|`,
/// Gram–Schmidt against `p`, last vector flipped if `det[p f1 f2 f3] < 0`.
pub fn perp_frame(p: &Vector) -> [Vector; 3] {
    assert_eq!(p.len(), 4, "perp_frame needs a vector in R^4");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()).then(i.cmp(&j)));
    let mut seeds = vec![p.clone()];
    for &i in &order[..3] {
        let mut e = Vector::zeros(4);
        e[i] = 1.0;
        seeds.push(e);
    }
    let q = orthonormalize(&seeds, 1e-6, true).expect("three smallest axes are independent of p");
    let (f1, f2, mut f3) = (q[1].clone(), q[2].clone(), q[3].clone());
    let m = Matrix::from_columns(&[p.clone(), f1.clone(), f2.clone(), f3.clone()]);
    if m.determinant() < 0.0 {
        f3.neg_mut();
    }
    [f1, f2, f3]
}

/// Maps frame coordinates `(x1, x2, x3)` to `x1 f1 + x2 f2 + x3 f3 ∈ p⊥`.
pub fn from_frame(frame: &[Vector; 3], x: &[f64; 3]) -> Vector {
    &frame[0] * x[0] + &frame[1] * x[1] + &frame[2] * x[2]
}

/// Frame coordinates of a vector in `p⊥`.
pub fn to_frame(frame: &[Vector; 3], u: &Vector) -> [f64; 3] {
    [frame[0].dot(u), frame[1].dot(u), frame[2].dot(u)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{omega_inverse, pi_minus, pi_plus};
    use crate::numkern::{gaussian_vector, random_unit_vector, rng};
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn e(i: usize) -> Vector {
        let mut v = Vector::zeros(4);
        v[i] = 1.0;
        v
    }

    fn random_plane<R: rand::Rng>(r: &mut R) -> OrientedPlane {
        OrientedPlane::new(&gaussian_vector(r, 4), &gaussian_vector(r, 4)).unwrap()
    }

    fn sharing_pair<R: rand::Rng>(r: &mut R) -> (OrientedPlane, OrientedPlane) {
        let w = gaussian_vector(r, 4);
        let p = OrientedPlane::new(&w, &gaussian_vector(r, 4)).unwrap();
        let q = OrientedPlane::new(&gaussian_vector(r, 4), &w).unwrap();
        (p, q)
    }

    #[test]
    fn plane_constructor_examples() {
        let p = plane(&e(0), &e(1)).unwrap();
        assert_eq!((p.u(), p.v()), (&e(0), &e(1)));
        let p = plane(&(e(0) * 2.0), &(e(0) + e(1))).unwrap();
        assert!((p.u() - e(0)).amax() < 1e-15 && (p.v() - e(1)).amax() < 1e-15);
        let p = plane(&e(1), &e(0)).unwrap();
        assert_eq!(omega(&p), -Bivector::basis(0, 1));
        assert!(matches!(
            plane(&e(0), &(e(0) * 3.0)),
            Err(Error::DependentInput { .. })
        ));
    }

    #[test]
    fn plane_preserves_orientation() {
        let mut r = rng(1);
        for _ in 0..200 {
            let a = gaussian_vector(&mut r, 4);
            let b = gaussian_vector(&mut r, 4);
            let p = plane(&a, &b).unwrap();
            let change = [
                [p.u().dot(&a), p.u().dot(&b)],
                [p.v().dot(&a), p.v().dot(&b)],
            ];
            assert!(change[0][0] * change[1][1] - change[0][1] * change[1][0] > 0.0);
        }
    }

    #[test]
    fn complement_examples() {
        let c = orthogonal_complement(&OrientedPlane::standard(4, 0, 1));
        assert_eq!(omega(&c), Bivector::basis(2, 3));
        let mut r = rng(2);
        for _ in 0..100 {
            let p = random_plane(&mut r);
            let c = orthogonal_complement(&p);
            let cc = orthogonal_complement(&c);
            assert!(plane_distance(&cc, &p) < 1e-10);
            let m =
                Matrix::from_columns(&[p.u().clone(), p.v().clone(), c.u().clone(), c.v().clone()]);
            assert!(m.determinant() > 0.0);
            let via_star = omega_inverse(&star(&omega(&p))).unwrap();
            assert!(plane_distance(&c, &via_star) < 1e-9);
        }
    }

    #[test]
    fn theta_examples() {
        let p = OrientedPlane::standard(4, 0, 1);
        let (tm, tp) = theta_pm(&p, &p);
        assert!(tm.abs() < 1e-12 && tp.abs() < 1e-12);
        let q = OrientedPlane::standard(4, 2, 3);
        let (tm, tp) = theta_pm(&p, &q);
        assert!((tm - PI).abs() < 1e-12 && tp.abs() < 1e-12);
        let mut r = rng(3);
        for _ in 0..100 {
            let (p, q) = sharing_pair(&mut r);
            let (tm, tp) = theta_pm(&p, &q);
            assert!((tm - tp).abs() < 1e-8);
        }
    }

    #[test]
    fn intersects_examples() {
        let p = OrientedPlane::standard(4, 0, 1);
        assert!(intersects(&p, &p, 1e-9));
        assert!(!intersects(&p, &OrientedPlane::standard(4, 2, 3), 1e-9));
        let w = Vector::from_element(4, 0.5);
        let a = plane(&w, &e(0)).unwrap();
        let b = plane(&e(2), &w).unwrap();
        assert!(intersects(&a, &b, 1e-9));
    }

    #[test]
    fn theta_criterion_matches_intersection() {
        let mut r = rng(4);
        for trial in 0..1000 {
            let (p, q) = if trial % 2 == 0 {
                sharing_pair(&mut r)
            } else {
                (random_plane(&mut r), random_plane(&mut r))
            };
            let (tm, tp) = theta_pm(&p, &q);
            assert_eq!(
                intersects(&p, &q, 1e-9),
                (tp - tm).abs() < 1e-7,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn independent_planes_are_bounded_away() {
        let mut r = rng(5);
        let far = (0..1000)
            .filter(|_| {
                let (p, q) = (random_plane(&mut r), random_plane(&mut r));
                inner(&omega(&p), &star(&omega(&q))).abs() > 1e-6
            })
            .count();
        assert!(far >= 990);
    }

    #[test]
    fn psi_examples() {
        let a = psi(&e(0), &e(1), Side::Minus).unwrap();
        let want = (Bivector::basis(0, 1) - Bivector::basis(2, 3)) * 0.5;
        assert!((a - want).max_abs() < 1e-15);
        assert!(matches!(
            psi(&e(0), &e(0), Side::Plus),
            Err(Error::NotOrthogonal { .. })
        ));

        let mut r = rng(6);
        for _ in 0..100 {
            let p = random_unit_vector(&mut r, 4);
            let frame = perp_frame(&p);
            let u = from_frame(&frame, &[r.random(), r.random(), r.random()]);
            let w = from_frame(&frame, &[r.random(), r.random(), r.random()]);
            let un = &u / u.norm();
            for side in [Side::Minus, Side::Plus] {
                assert!((psi(&p, &un, side).unwrap().norm() - FRAC_1_SQRT_2).abs() < 1e-12);
                let ip = inner(&psi(&p, &u, side).unwrap(), &psi(&p, &w, side).unwrap());
                assert!((ip - u.dot(&w) / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi_inverse_examples() {
        let a = (Bivector::basis(0, 1) - Bivector::basis(2, 3)) * 0.5;
        let u = psi_inverse(&e(0), &a, Side::Minus).unwrap();
        assert!((u - e(1)).amax() < 1e-15);
        let u3 = psi_inverse(&e(0), &(a * 3.0), Side::Minus).unwrap();
        assert!((u3 - e(1) * 3.0).amax() < 1e-14);
        // A self-dual element has no preimage on the minus side.
        let sd = (Bivector::basis(0, 1) + Bivector::basis(2, 3)) * 0.5;
        assert!(matches!(
            psi_inverse(&e(0), &sd, Side::Minus),
            Err(Error::OffSphere { .. })
        ));

        let mut r = rng(7);
        for _ in 0..200 {
            let p = random_unit_vector(&mut r, 4);
            let frame = perp_frame(&p);
            let u = from_frame(&frame, &[r.random(), r.random(), r.random()]);
            for side in [Side::Minus, Side::Plus] {
                let back = psi_inverse(&p, &psi(&p, &u, side).unwrap(), side).unwrap();
                assert!((back - &u).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn perp_frame_is_positive_orthonormal() {
        let mut r = rng(8);
        for _ in 0..200 {
            let p = random_unit_vector(&mut r, 4);
            let f = perp_frame(&p);
            let m = Matrix::from_columns(&[p.clone(), f[0].clone(), f[1].clone(), f[2].clone()]);
            assert!(crate::numkern::orthogonality_residual(&m) < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-10);
        }
        let f = perp_frame(&e(0));
        assert_eq!(
            (f[0].clone(), f[1].clone(), f[2].clone()),
            (e(1), e(2), e(3))
        );
    }

    #[test]
    fn planes_through_p_form_graph_of_isometry() {
        let mut r = rng(9);
        let p = random_unit_vector(&mut r, 4);
        let planes: Vec<OrientedPlane> = (0..50)
            .map(|_| plane(&p, &gaussian_vector(&mut r, 4)).unwrap())
            .collect();
        let parts: Vec<(Bivector, Bivector)> = planes.iter().map(|q| pi_split(&omega(q))).collect();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let ma = angle_between(&parts[i].0.coords, &parts[j].0.coords);
                let pa = angle_between(&parts[i].1.coords, &parts[j].1.coords);
                assert!((ma - pa).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn plane_json_round_trip() {
        let p = plane(&e(1), &(e(0) + e(3))).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: OrientedPlane = serde_json::from_str(&text).unwrap();
        assert!(plane_distance(&p, &back) < 1e-15);
        let bad = serde_json::from_str::<OrientedPlane>(r#"{"u":[1,0,0,0],"v":[1,0]}"#);
        assert!(bad.unwrap_err().to_string().contains("`v`"));
    }

    proptest! {
        #[test]
        fn omega_parts_lie_on_spheres(seed in any::<u64>()) {
            let mut r = rng(seed);
            let w = omega(&random_plane(&mut r));
            prop_assert!((pi_minus(&w).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
            prop_assert!((pi_plus(&w).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        }

        #[test]
        fn sphere_product_points_are_decomposable(seed in any::<u64>()) {
            let mut r = rng(seed);
            let m = pi_minus(&Bivector::new(std::array::from_fn(|_| r.random::<f64>() - 0.5)));
            let p = pi_plus(&Bivector::new(std::array::from_fn(|_| r.random::<f64>() - 0.5)));
            prop_assume!(m.norm() > 1e-3 && p.norm() > 1e-3);
            let a = m * (FRAC_1_SQRT_2 / m.norm()) + p * (FRAC_1_SQRT_2 / p.norm());
            prop_assert!(crate::exterior::is_decomposable(&a, 1e-10));
        }
    }
}
