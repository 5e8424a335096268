//! Fibrations of `S^3` by oriented great circles.
//!
//! Two kinds are supported. A Hopf fibration is given by an orthogonal
//! complex structure `J` on `R^4`; its fiber through `x` is `span⁺(x, Jx)`.
//! A graph fibration is given by a basepoint `p`, a distance-decreasing map
//! `f` of the unit sphere of `p⊥`, and a chirality. With the positive
//! chirality its fibers are the planes with bivector `ψ₋(v) + ψ₊(f(v))`;
//! the negative chirality exchanges the two sides.
//!
//! Points of the unit sphere of `p⊥` are handled in coordinates of the
//! frame returned by [`perp_frame`].

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{omega, omega_inverse, wedge1, Bivector};
use crate::grassmann::{
    orthogonal_complement, perp_frame, plane_distance, psi, theta_pm, OrientedPlane, Side,
};
use crate::numkern::{det_sign, max_abs, random_unit_vector, rng, Matrix, Sign, Vector};
use crate::ocs::{fiber_plane, sign, validate, ComplexStructure};
use crate::report::{Check, Report};

type Mat63 = SMatrix<f64, 6, 3>;
type Vec6 = SVector<f64, 6>;

/// Default convergence threshold for [`fiber_of`].
pub const FIBER_EPS: f64 = 1e-12;
/// Default iteration cap for [`fiber_of`].
pub const FIBER_MAX_ITER: usize = 10_000;

const RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Geodesic distance between unit vectors.
pub fn geodesic_distance(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    2.0 * (a - b).norm().atan2((a + b).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Constant,
    Contraction,
}

/// Parametric self-map of the unit 2-sphere.
///
/// The contraction with center `c`, factor `λ` and rotation `R` sends `v` to
/// `exp_c(λ t)`, where `t` is the component of `Rv` tangent to the sphere at
/// `c`. Tangent projection and `exp_c` on a ball of radius `< π/2` are both
/// 1-Lipschitz, so the map shrinks geodesic distances by at least `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphereMapJson", into = "SphereMapJson")]
pub struct SphereMap {
    kind: MapKind,
    c: Vector3<f64>,
    lambda: f64,
    rotation: Matrix3<f64>,
}

#[derive(Serialize, Deserialize)]
struct SphereMapJson {
    kind: MapKind,
    c: [f64; 3],
    #[serde(default)]
    lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<[[f64; 3]; 3]>,
}

impl From<SphereMap> for SphereMapJson {
    fn from(m: SphereMap) -> Self {
        let r = m.rotation;
        SphereMapJson {
            kind: m.kind,
            c: [m.c[0], m.c[1], m.c[2]],
            lambda: m.lambda,
            rotation: (r != Matrix3::identity())
                .then(|| std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)]))),
        }
    }
}

impl TryFrom<SphereMapJson> for SphereMap {
    type Error = Error;
    fn try_from(j: SphereMapJson) -> Result<Self> {
        let rotation = j
            .rotation
            .map(|rows| Matrix3::from_fn(|i, k| rows[i][k]))
            .unwrap_or_else(Matrix3::identity);
        let c = Vector3::from(j.c);
        match j.kind {
            MapKind::Constant => SphereMap::constant(c),
            MapKind::Contraction => SphereMap::contraction(c, j.lambda, rotation),
        }
    }
}

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn unit_center(c: Vector3<f64>) -> Result<Vector3<f64>> {
    if c.iter().any(|x| !x.is_finite()) || (c.norm() - 1.0).abs() > 1e-8 {
        return Err(schema(
            "c",
            format!("must be a unit vector, norm is {}", c.norm()),
        ));
    }
    Ok(c / c.norm())
}

impl SphereMap {
    pub fn constant(c: Vector3<f64>) -> Result<Self> {
        Ok(SphereMap {
            kind: MapKind::Constant,
            c: unit_center(c)?,
            lambda: 0.0,
            rotation: Matrix3::identity(),
        })
    }

    /// Contraction with `0 ≤ λ < 1` and orthogonal `rotation`.
    pub fn contraction(c: Vector3<f64>, lambda: f64, rotation: Matrix3<f64>) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(schema(
                "lambda",
                format!("must lie in [0, 1), got {lambda}"),
            ));
        }
        let residual = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        if !residual.is_finite() || residual > 1e-10 {
            return Err(schema(
                "rotation",
                format!("not orthogonal (residual {residual:e})"),
            ));
        }
        Ok(SphereMap {
            kind: MapKind::Contraction,
            c: unit_center(c)?,
            lambda,
            rotation,
        })
    }

    /// Same formula with any `λ ≥ 0`; used to build non-fibrations.
    pub fn unchecked_contraction(c: Vector3<f64>, lambda: f64) -> Self {
        SphereMap {
            kind: MapKind::Contraction,
            c: c.normalize(),
            lambda,
            rotation: Matrix3::identity(),
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn center(&self) -> &Vector3<f64> {
        &self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        match self.kind {
            MapKind::Constant => self.c,
            MapKind::Contraction => {
                let w = self.rotation * v;
                let t = w - self.c * w.dot(&self.c);
                let nt = t.norm();
                if nt == 0.0 {
                    return self.c;
                }
                let r = self.lambda * nt;
                self.c * r.cos() + t * (r.sin() / nt)
            }
        }
    }
}

/// Samples `samples` pairs and reports the worst ratio
/// `d(f(u), f(v)) / d(u, v)` of geodesic distances.
///
/// Pairs alternate between close pairs (about `1e-3` apart) at random points,
/// close pairs near the preimage of the center and its antipode, and
/// independent random pairs.
pub fn is_distance_decreasing(f: &SphereMap, samples: usize, seed: u64) -> (bool, f64) {
    let mut r = rng(seed);
    let unit3 = |r: &mut rand_chacha::ChaCha8Rng| {
        let g = random_unit_vector(r, 3);
        Vector3::new(g[0], g[1], g[2])
    };
    let anchor = f.rotation.transpose() * f.c;
    let mut worst = 0.0_f64;
    for i in 0..samples.max(2) {
        let (u, v) = match i % 4 {
            0 | 1 => {
                let base = match i % 8 {
                    1 => anchor,
                    5 => -anchor,
                    _ => unit3(&mut r),
                };
                let jitter = unit3(&mut r) * 1e-3;
                let u = (base + unit3(&mut r) * 1e-3).normalize();
                (u, (u + jitter).normalize())
            }
            _ => (unit3(&mut r), unit3(&mut r)),
        };
        let d = geodesic_distance(&u, &v);
        if d < 1e-12 {
            continue;
        }
        worst = worst.max(geodesic_distance(&f.apply(&u), &f.apply(&v)) / d);
    }
    (worst < 1.0 - 1e-6, worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Positive,
    Negative,
}

impl Chirality {
    /// Side holding the map's domain.
    pub fn domain_side(self) -> Side {
        match self {
            Chirality::Positive => Side::Minus,
            Chirality::Negative => Side::Plus,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            Chirality::Positive => Sign::Positive,
            Chirality::Negative => Sign::Negative,
        }
    }
}

/// 6x3 matrix of `x ↦ π_side(p ∧ Σ x_k f_k)`.
fn psi_matrix(p: &Vector, frame: &[Vector; 3], side: Side) -> Mat63 {
    let mut m = Mat63::zeros();
    for (k, f) in frame.iter().enumerate() {
        let b = side.project(&wedge1(p, f));
        m.set_column(k, &Vec6::from(b.coords));
    }
    m
}

fn to_bivector(v: &Vec6) -> Bivector {
    Bivector::new(std::array::from_fn(|k| v[k]))
}

fn rescale(v: Vec6) -> Vec6 {
    v * (RADIUS / v.norm())
}

/// Fibration whose bivectors form the graph of a distance-decreasing map
/// between the two spheres of radius `1/√2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct GraphFibration {
    p: Vector,
    frame: [Vector; 3],
    map: SphereMap,
    chirality: Chirality,
    psi_domain: Mat63,
    psi_target: Mat63,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    p: Vec<f64>,
    chirality: Chirality,
    map: SphereMap,
}

impl From<GraphFibration> for GraphJson {
    fn from(g: GraphFibration) -> Self {
        GraphJson {
            p: g.p.iter().copied().collect(),
            chirality: g.chirality,
            map: g.map,
        }
    }
}

impl TryFrom<GraphJson> for GraphFibration {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        if j.p.len() != 4 || j.p.iter().any(|x| !x.is_finite()) {
            return Err(schema("p", "expected 4 finite numbers"));
        }
        GraphFibration::new(&Vector::from_vec(j.p), j.map, j.chirality).map_err(|e| match e {
            Error::NotUnitNorm { norm } => {
                schema("p", format!("must be a unit vector, norm is {norm}"))
            }
            Error::NotDistanceDecreasing { ratio } => {
                schema("map", format!("not distance-decreasing (ratio {ratio})"))
            }
            other => other,
        })
    }
}

impl GraphFibration {
    /// Builds the fibration after certifying `f` on 2000 sampled pairs.
    pub fn new(p: &Vector, map: SphereMap, chirality: Chirality) -> Result<Self> {
        let (ok, ratio) = is_distance_decreasing(&map, 2000, 0);
        if !ok {
            return Err(Error::NotDistanceDecreasing { ratio });
        }
        GraphFibration::unchecked(p, map, chirality)
    }

    /// Skips the distance-decreasing certificate.
    pub fn unchecked(p: &Vector, map: SphereMap, chirality: Chirality) -> Result<Self> {
        if p.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: p.len(),
            });
        }
        let norm = p.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotUnitNorm { norm });
        }
        let p = p / norm;
        let frame = perp_frame(&p);
        let dom = chirality.domain_side();
        Ok(GraphFibration {
            psi_domain: psi_matrix(&p, &frame, dom),
            psi_target: psi_matrix(&p, &frame, dom.other()),
            p,
            frame,
            map,
            chirality,
        })
    }

    pub fn p(&self) -> &Vector {
        &self.p
    }

    pub fn frame(&self) -> &[Vector; 3] {
        &self.frame
    }

    pub fn map(&self) -> &SphereMap {
        &self.map
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    /// Vector of `p⊥` with the given frame coordinates.
    pub fn embed(&self, x: &Vector3<f64>) -> Vector {
        &self.frame[0] * x[0] + &self.frame[1] * x[1] + &self.frame[2] * x[2]
    }

    /// Frame coordinates of a vector in `p⊥`.
    pub fn coordinates(&self, u: &Vector) -> Vector3<f64> {
        Vector3::new(
            self.frame[0].dot(u),
            self.frame[1].dot(u),
            self.frame[2].dot(u),
        )
    }

    /// The graph map between sides: `ψ₊ ∘ f ∘ ψ₋⁻¹` for positive chirality,
    /// `ψ₋ ∘ f ∘ ψ₊⁻¹` for negative.
    fn graph_map6(&self, a: &Vec6) -> Vec6 {
        let v = (self.psi_domain.transpose() * a * 2.0).normalize();
        self.psi_target * self.map.apply(&v)
    }

    pub fn graph_map(&self, a: &Bivector) -> Bivector {
        to_bivector(&self.graph_map6(&Vec6::from(a.coords)))
    }

    /// The fiber indexed by a unit vector `v` of the domain sphere (frame
    /// coordinates): `φ_p(v, f(v))` or `φ_p(f(v), v)`.
    pub fn plane_at(&self, v: &Vector3<f64>) -> Result<OrientedPlane> {
        let v = v.normalize();
        let w = self.psi_domain * v + self.psi_target * self.map.apply(&v);
        omega_inverse(&to_bivector(&w))
    }

    /// `max |π_target(ω) − graph_map(π_domain(ω))|`.
    pub fn graph_defect(&self, plane: &OrientedPlane) -> f64 {
        let w = omega(plane);
        let dom = self.chirality.domain_side();
        let a = dom.project(&w);
        (dom.other().project(&w) - self.graph_map(&a)).max_abs()
    }

    /// Fixed-point search for the fiber through `x`.
    fn lookup(&self, x: &Vector, eps: f64, max_iter: usize) -> Result<OrientedPlane> {
        let dom = self.chirality.domain_side();
        let frame_x = perp_frame(x);
        let phi_dom = psi_matrix(x, &frame_x, dom);
        let phi_tgt = psi_matrix(x, &frame_x, dom.other());
        // Inverse of the isometry between sides given by planes through x.
        let back: SMatrix<f64, 6, 6> = phi_dom * phi_tgt.transpose() * 2.0;
        let mut a = self.psi_domain.column(0).into_owned();
        let mut step = f64::INFINITY;
        for _ in 0..max_iter {
            let next = rescale(back * self.graph_map6(&a));
            step = (next - a).norm();
            a = next;
            if step < eps {
                let w = a + self.graph_map6(&a);
                return omega_inverse(&to_bivector(&(w / w.norm())));
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            step,
        })
    }
}

/// A Hopf fibration or a graph fibration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Fibration {
    Hopf {
        #[serde(rename = "J")]
        j: ComplexStructure,
    },
    Graph(GraphFibration),
}

impl Fibration {
    pub fn hopf(j: ComplexStructure) -> Self {
        Fibration::Hopf { j }
    }

    pub fn graph(p: &Vector, map: SphereMap, chirality: Chirality) -> Result<Self> {
        Ok(Fibration::Graph(GraphFibration::new(p, map, chirality)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Fibration::Hopf { j } => j.dim(),
            Fibration::Graph(_) => 4,
        }
    }
}

fn check_unit(x: &Vector) -> Result<()> {
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnitNorm { norm });
    }
    Ok(())
}

/// The oriented fiber through `x`.
pub fn fiber_of(f: &Fibration, x: &Vector, eps: f64, max_iter: usize) -> Result<OrientedPlane> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    check_unit(x)?;
    match f {
        Fibration::Hopf { j } => Ok(fiber_plane(j, x)),
        Fibration::Graph(g) => g.lookup(x, eps, max_iter),
    }
}

/// [`fiber_of`] with default tolerances.
pub fn fiber(f: &Fibration, x: &Vector) -> Result<OrientedPlane> {
    fiber_of(f, x, FIBER_EPS, FIBER_MAX_ITER)
}

/// `x` turned a quarter circle forward along its fiber.
pub fn rotate90(f: &Fibration, x: &Vector) -> Result<Vector> {
    match f {
        Fibration::Hopf { j } => {
            check_unit(x)?;
            Ok(j.apply(x))
        }
        Fibration::Graph(_) => {
            let plane = fiber(f, x)?;
            let (a, b) = (plane.u().dot(x), plane.v().dot(x));
            Ok(plane.v() * a - plane.u() * b)
        }
    }
}

/// Sign of `det[p p' q q']` for seeded points on distinct fibers.
pub fn fibration_sign(f: &Fibration, seed: u64) -> Result<Sign> {
    if f.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: f.dim(),
        });
    }
    let mut r = rng(seed);
    let p = random_unit_vector(&mut r, 4);
    let fp = fiber(f, &p)?;
    let p1 = rotate90(f, &p)?;
    for _ in 0..100 {
        let q = random_unit_vector(&mut r, 4);
        if plane_distance(&fp, &fiber(f, &q)?) <= 1e-6 {
            continue;
        }
        let q1 = rotate90(f, &q)?;
        let m = Matrix::from_columns(&[p.clone(), p1.clone(), q, q1]);
        if let Some(s) = Sign::from_value(det_sign(&m)) {
            return Ok(s);
        }
    }
    Err(Error::DegenerateSampling)
}

/// The plane with bivector `ψ₋(u) + ψ₊(v)`.
pub fn phi_p(p: &Vector, u: &Vector, v: &Vector) -> Result<OrientedPlane> {
    for w in [u, v] {
        check_unit(w)?;
    }
    let a = psi(p, u, Side::Minus)? + psi(p, v, Side::Plus)?;
    omega_inverse(&a)
}

/// The Hopf structure of the requested sign whose fiber through `u` is `P`:
/// `J u = v` on `P = span⁺(u, v)` and `J w₃ = ±w₄` on the positively
/// oriented complement.
pub fn hopf_through(plane: &OrientedPlane, want: Sign) -> ComplexStructure {
    let c = orthogonal_complement(plane);
    let b = Matrix::from_columns(&[
        plane.u().clone(),
        plane.v().clone(),
        c.u().clone(),
        c.v().clone(),
    ]);
    let s = want.as_f64();
    let mut d = Matrix::zeros(4, 4);
    d[(1, 0)] = 1.0;
    d[(0, 1)] = -1.0;
    d[(3, 2)] = s;
    d[(2, 3)] = -s;
    let j = &b * d * b.transpose();
    validate(&((&j - j.transpose()) * 0.5), 1e-9).expect("conjugate of a standard form")
}

/// Which component of the fiber bivectors is constant, its value, and the
/// largest deviation observed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceResult {
    pub side: Side,
    pub point: Bivector,
    pub spread: f64,
}

/// For a Hopf structure on `R^4` of sign `+1` the self-dual parts of all
/// fiber bivectors coincide; for sign `−1` the anti-self-dual parts do.
pub fn hopf_slice_check(j: &ComplexStructure, samples: usize, seed: u64) -> Result<SliceResult> {
    if j.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: j.dim(),
        });
    }
    let side = match sign(j)? {
        Sign::Positive => Side::Plus,
        Sign::Negative => Side::Minus,
    };
    let mut r = rng(seed);
    let parts: Vec<Bivector> = (0..samples.max(1))
        .map(|_| side.project(&omega(&fiber_plane(j, &random_unit_vector(&mut r, 4)))))
        .collect();
    let mut point = Bivector::ZERO;
    for p in &parts {
        point += *p;
    }
    point = point * (1.0 / parts.len() as f64);
    let spread = parts
        .iter()
        .map(|p| (*p - point).max_abs())
        .fold(0.0, f64::max);
    Ok(SliceResult {
        side,
        point,
        spread,
    })
}

/// Fits a linear map to `x ↦ rotate90(F, x)` over sampled points and returns
/// it as a complex structure when the fit is exact.
pub fn extract_linear_structure(
    f: &Fibration,
    samples: usize,
    seed: u64,
) -> Result<ComplexStructure> {
    let dim = f.dim();
    let count = samples.max(2 * dim);
    let mut r = rng(seed);
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for _ in 0..count {
        let x = random_unit_vector(&mut r, dim);
        ys.push(rotate90(f, &x)?);
        xs.push(x);
    }
    let x = Matrix::from_columns(&xs);
    let y = Matrix::from_columns(&ys);
    let gram = &x * x.transpose();
    let inv = gram.try_inverse().ok_or(Error::DegenerateSampling)?;
    let m = &y * x.transpose() * inv;
    let residual = max_abs(&(&m * &x - &y));
    if residual >= 1e-6 {
        return Err(Error::NotLinear { residual });
    }
    validate(&m, 1e-8)?;
    validate(&((&m - m.transpose()) * 0.5), 1e-8)
}

/// Disjointness of a family of fibers: for every pair of distinct planes
/// `θ₊ ≠ θ₋`, and the sign of `θ₊ − θ₋` never changes.
pub fn disjointness_check(planes: &[OrientedPlane]) -> Check {
    let (mut pos, mut neg, mut zero, mut same) = (0usize, 0usize, 0usize, 0usize);
    let mut min_gap = f64::INFINITY;
    for i in 0..planes.len() {
        for k in i + 1..planes.len() {
            if plane_distance(&planes[i], &planes[k]) <= 1e-6 {
                same += 1;
                continue;
            }
            let (tm, tp) = theta_pm(&planes[i], &planes[k]);
            let d = tp - tm;
            min_gap = min_gap.min(d.abs());
            if d.abs() <= 1e-10 {
                zero += 1;
            } else if d > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
    }
    let ok = zero == 0 && (pos == 0 || neg == 0);
    let details = if ok {
        format!("{} distinct pairs, θ₊−θ₋ of constant sign", pos + neg)
    } else {
        format!("{pos} pairs with θ₊>θ₋, {neg} with θ₊<θ₋, {zero} intersecting")
    };
    Check::new("disjointness", ok, details)
        .stat("positive_pairs", pos as f64)
        .stat("negative_pairs", neg as f64)
        .stat("intersecting_pairs", zero as f64)
        .stat("same_fiber_pairs", same as f64)
        .stat(
            "min_abs_theta_gap",
            if min_gap.is_finite() { min_gap } else { 0.0 },
        )
}

/// Samples points, looks up their fibers and checks coverage, disjointness,
/// the graph condition and the stability of the sign.
pub fn verify_fibration(f: &Fibration, samples: usize, seed: u64) -> Report {
    let mut report = Report::new("fibration", seed)
        .tolerance("containment", 1e-7)
        .tolerance("graph_defect", 1e-7);
    let mut r = rng(seed);
    let mut planes = Vec::with_capacity(samples);
    let mut worst_containment = 0.0_f64;
    let mut worst_defect = 0.0_f64;
    let mut lookup_errors = Vec::new();
    for i in 0..samples {
        let x = random_unit_vector(&mut r, f.dim());
        match fiber(f, &x) {
            Ok(plane) => {
                worst_containment = worst_containment.max(plane.containment_residual(&x));
                if let Fibration::Graph(g) = f {
                    worst_defect = worst_defect.max(g.graph_defect(&plane));
                }
                planes.push(plane);
            }
            Err(e) => lookup_errors.push(format!("sample {i}: {e}")),
        }
    }
    let covered = lookup_errors.is_empty() && worst_containment < 1e-7;
    report.push(
        Check::new(
            "coverage",
            covered,
            if lookup_errors.is_empty() {
                format!("worst containment residual {worst_containment:.3e}")
            } else {
                lookup_errors.join("; ")
            },
        )
        .stat("max_containment_residual", worst_containment)
        .stat("lookup_failures", lookup_errors.len() as f64),
    );
    report.push(disjointness_check(&planes));
    if matches!(f, Fibration::Graph(_)) {
        report.push(
            Check::new(
                "graph_condition",
                worst_defect < 1e-7,
                format!("worst graph defect {worst_defect:.3e}"),
            )
            .stat("max_graph_defect", worst_defect),
        );
    }
    let signs: Vec<std::result::Result<Sign, String>> = (0..10)
        .map(|k| fibration_sign(f, seed.wrapping_add(k)).map_err(|e| e.to_string()))
        .collect();
    let stable = signs.iter().all(|s| s.is_ok() && *s == signs[0]);
    let details = match &signs[0] {
        Ok(s) if stable => format!("sign {s} on 10 resamples"),
        _ => format!("{signs:?}"),
    };
    let mut check = Check::new("sign_stability", stable, details);
    if let Ok(s) = &signs[0] {
        check = check.stat("sign", s.as_f64());
    }
    report.push(check);
    report
}

/// Planes `ψ₋(v) + ψ₊(f(v))` over `samples` domain points, half of them
/// clustered near the map's center. Used for negative controls where no
/// fibration exists.
pub fn graph_planes(g: &GraphFibration, samples: usize, seed: u64) -> Result<Vec<OrientedPlane>> {
    let mut r = rng(seed);
    let anchor = g.map().rotation().transpose() * g.map().center();
    (0..samples)
        .map(|i| {
            let noise = random_unit_vector(&mut r, 3);
            let noise = Vector3::new(noise[0], noise[1], noise[2]);
            let v = if i % 2 == 0 {
                noise
            } else {
                anchor + noise * (0.3 * r.random::<f64>())
            };
            g.plane_at(&v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{pi_minus, pi_plus};
    use crate::grassmann::psi_inverse;
    use crate::numkern::random_orthogonal;
    use crate::ocs::{conjugate, random_ocs, standard};
    use proptest::prelude::*;

    fn e(i: usize) -> Vector {
        let mut v = Vector::zeros(4);
        v[i] = 1.0;
        v
    }

    fn graph(seed: u64, lambda: f64, chirality: Chirality) -> GraphFibration {
        let mut r = rng(seed);
        let p = random_unit_vector(&mut r, 4);
        let c = random_unit_vector(&mut r, 3);
        let rot = random_orthogonal(3, Sign::Positive, seed + 1);
        let rot = Matrix3::from_fn(|i, k| rot[(i, k)]);
        let map = SphereMap::contraction(Vector3::new(c[0], c[1], c[2]), lambda, rot).unwrap();
        GraphFibration::new(&p, map, chirality).unwrap()
    }

    #[test]
    fn distance_decreasing_examples() {
        let c = SphereMap::constant(Vector3::x()).unwrap();
        assert_eq!(is_distance_decreasing(&c, 100, 0), (true, 0.0));
        let half = SphereMap::contraction(Vector3::z(), 0.5, Matrix3::identity()).unwrap();
        let (ok, ratio) = is_distance_decreasing(&half, 1000, 1);
        assert!(ok && ratio < 0.51 && ratio > 0.45, "{ratio}");
        let tight = SphereMap::contraction(Vector3::y(), 0.999, Matrix3::identity()).unwrap();
        assert!(is_distance_decreasing(&tight, 10_000, 2).0);
        let expanding = SphereMap::unchecked_contraction(Vector3::y(), 1.2);
        assert!(!is_distance_decreasing(&expanding, 1000, 3).0);
    }

    #[test]
    fn sphere_map_json() {
        let m: SphereMap =
            serde_json::from_str(r#"{"kind":"contraction","c":[0,0,1],"lambda":0.5}"#).unwrap();
        assert_eq!(m.lambda(), 0.5);
        let err =
            serde_json::from_str::<SphereMap>(r#"{"kind":"contraction","c":[0,0,1],"lambda":1.5}"#)
                .unwrap_err()
                .to_string();
        assert!(err.contains("`lambda`"), "{err}");
        let err = serde_json::from_str::<SphereMap>(r#"{"kind":"constant","c":[0,0,2]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("`c`"), "{err}");
    }

    #[test]
    fn rotate90_examples() {
        let h = Fibration::hopf(standard(2));
        assert_eq!(rotate90(&h, &e(0)).unwrap(), e(1));
        let g = Fibration::Graph(graph(4, 0.6, Chirality::Positive));
        let mut r = rng(4);
        for _ in 0..20 {
            let x = random_unit_vector(&mut r, 4);
            let y = rotate90(&g, &x).unwrap();
            assert!((y.norm() - 1.0).abs() < 1e-9 && y.dot(&x).abs() < 1e-9);
            let z = rotate90(&g, &y).unwrap();
            assert!((z + &x).amax() < 1e-8);
        }
    }

    #[test]
    fn constant_graph_is_linear() {
        let map = SphereMap::constant(Vector3::new(0.0, 0.6, 0.8)).unwrap();
        let g = Fibration::graph(
            &Vector::from_row_slice(&[0.5, 0.5, 0.5, 0.5]),
            map,
            Chirality::Positive,
        )
        .unwrap();
        let j = extract_linear_structure(&g, 20, 1).unwrap();
        assert_eq!(sign(&j).unwrap(), Sign::Positive);
        let contraction = Fibration::Graph(graph(5, 0.5, Chirality::Positive));
        assert!(matches!(
            extract_linear_structure(&contraction, 20, 1),
            Err(Error::NotLinear { .. })
        ));
        let k = random_ocs(2, Sign::Negative, 9);
        let back = extract_linear_structure(&Fibration::hopf(k.clone()), 20, 2).unwrap();
        assert!(max_abs(&(back.matrix() - k.matrix())) < 1e-8);
    }

    #[test]
    fn fibration_sign_examples() {
        assert_eq!(
            fibration_sign(&Fibration::hopf(standard(2)), 0).unwrap(),
            Sign::Positive
        );
        let reflect = Matrix::from_diagonal(&Vector::from_row_slice(&[-1., 1., 1., 1.]));
        let neg = conjugate(&standard(2), &reflect).unwrap();
        assert_eq!(
            fibration_sign(&Fibration::hopf(neg), 0).unwrap(),
            Sign::Negative
        );
        let map = SphereMap::constant(Vector3::z()).unwrap();
        let g = Fibration::graph(&e(0), map.clone(), Chirality::Positive).unwrap();
        assert_eq!(fibration_sign(&g, 0).unwrap(), Sign::Positive);
        let g = Fibration::graph(&e(0), map, Chirality::Negative).unwrap();
        assert_eq!(fibration_sign(&g, 0).unwrap(), Sign::Negative);
    }

    #[test]
    fn hopf_signs_match_complex_structure_signs() {
        for seed in 0..50u64 {
            let want = if seed % 2 == 0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            let j = random_ocs(2, want, seed);
            for k in 0..3 {
                assert_eq!(
                    fibration_sign(&Fibration::hopf(j.clone()), seed * 10 + k).unwrap(),
                    want
                );
            }
        }
    }

    #[test]
    fn phi_p_examples() {
        let p = phi_p(&e(0), &e(1), &e(1)).unwrap();
        assert!(plane_distance(&p, &OrientedPlane::standard(4, 0, 1)) < 1e-12);
        let mut r = rng(6);
        let base = random_unit_vector(&mut r, 4);
        let frame = perp_frame(&base);
        let mut seen = Vec::new();
        for _ in 0..100 {
            let u = crate::grassmann::from_frame(
                &frame,
                &std::array::from_fn(|_| rand::Rng::random::<f64>(&mut r) - 0.5),
            );
            let v = crate::grassmann::from_frame(
                &frame,
                &std::array::from_fn(|_| rand::Rng::random::<f64>(&mut r) - 0.5),
            );
            let (u, v) = (&u / u.norm(), &v / v.norm());
            let plane = phi_p(&base, &u, &v).unwrap();
            let w = omega(&plane);
            let want = psi(&base, &u, Side::Minus).unwrap() + psi(&base, &v, Side::Plus).unwrap();
            assert!((w - want).max_abs() < 1e-9);
            assert!((psi_inverse(&base, &pi_minus(&w), Side::Minus).unwrap() - &u).amax() < 1e-9);
            assert!((psi_inverse(&base, &pi_plus(&w), Side::Plus).unwrap() - &v).amax() < 1e-9);
            seen.push(plane);
        }
        for i in 0..seen.len() {
            for k in i + 1..seen.len() {
                assert!(plane_distance(&seen[i], &seen[k]) > 0.0);
            }
        }
        assert!(matches!(
            phi_p(&e(0), &e(0), &e(1)),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn hopf_through_examples() {
        let p = OrientedPlane::standard(4, 0, 1);
        assert!(
            max_abs(&(hopf_through(&p, Sign::Positive).matrix() - standard(2).matrix())) < 1e-15
        );
        let j = hopf_through(&p, Sign::Negative);
        assert!((j.apply(&e(0)) - e(1)).amax() < 1e-15);
        assert!((j.apply(&e(2)) + e(3)).amax() < 1e-15);
        let mut r = rng(7);
        for _ in 0..100 {
            let plane = OrientedPlane::new(
                &random_unit_vector(&mut r, 4),
                &random_unit_vector(&mut r, 4),
            )
            .unwrap();
            for want in [Sign::Positive, Sign::Negative] {
                let j = hopf_through(&plane, want);
                assert_eq!(sign(&j).unwrap(), want);
                assert!(plane_distance(&fiber_plane(&j, plane.u()), &plane) < 1e-9);
            }
        }
    }

    #[test]
    fn fiber_of_examples() {
        let h = Fibration::hopf(standard(2));
        assert!(
            plane_distance(
                &fiber(&h, &e(2)).unwrap(),
                &OrientedPlane::standard(4, 2, 3)
            ) < 1e-15
        );

        let c = Vector3::new(0.0, 0.6, 0.8);
        let p = Vector::from_row_slice(&[0.5, -0.5, 0.5, 0.5]);
        let g =
            GraphFibration::new(&p, SphereMap::constant(c).unwrap(), Chirality::Positive).unwrap();
        let plane = g.lookup(&p, FIBER_EPS, FIBER_MAX_ITER).unwrap();
        let want = OrientedPlane::new(&p, &g.embed(&c)).unwrap();
        assert!(plane_distance(&plane, &want) < 1e-9);
        assert!(g.graph_defect(&plane) < 1e-9);
    }

    #[test]
    fn fiber_lookup_converges_quickly_at_half() {
        let g = graph(8, 0.5, Chirality::Positive);
        let f = Fibration::Graph(g.clone());
        let mut r = rng(8);
        for _ in 0..100 {
            let x = random_unit_vector(&mut r, 4);
            let plane = fiber_of(&f, &x, 1e-12, 200).unwrap();
            assert!(plane.containment_residual(&x) < 1e-7);
            assert!(g.graph_defect(&plane) < 1e-7);
        }
    }

    #[test]
    fn new_formulation_round_trip() {
        for (seed, chirality) in [(10, Chirality::Positive), (11, Chirality::Negative)] {
            let g = graph(seed, 0.7, chirality);
            let f = Fibration::Graph(g.clone());
            let mut r = rng(seed);
            for _ in 0..50 {
                let x = random_unit_vector(&mut r, 4);
                let plane = fiber(&f, &x).unwrap();
                let dom = chirality.domain_side();
                let v = psi_inverse(g.p(), &dom.project(&omega(&plane)), dom).unwrap();
                let fv = g.embed(&g.map().apply(&g.coordinates(&v).normalize()));
                let expected = match chirality {
                    Chirality::Positive => phi_p(g.p(), &v, &fv).unwrap(),
                    Chirality::Negative => phi_p(g.p(), &fv, &v).unwrap(),
                };
                assert!(plane_distance(&plane, &expected) < 1e-7);
            }
        }
    }

    #[test]
    fn verify_fibration_examples() {
        let report = verify_fibration(&Fibration::hopf(standard(2)), 50, 0);
        assert!(report.passed(), "{report}");
        let g = Fibration::Graph(graph(12, 0.7, Chirality::Positive));
        let report = verify_fibration(&g, 50, 1);
        assert!(report.passed(), "{report}");
        let d = report.check("disjointness").unwrap();
        assert!(d.stats["positive_pairs"] == 0.0 || d.stats["negative_pairs"] == 0.0);
    }

    #[test]
    fn expanding_map_is_not_a_fibration() {
        let map = SphereMap::unchecked_contraction(Vector3::new(0.0, 0.0, 1.0), 1.2);
        let g = GraphFibration::unchecked(&e(0), map, Chirality::Positive).unwrap();
        let planes = graph_planes(&g, 60, 3).unwrap();
        assert!(!disjointness_check(&planes).passed());
        assert!(GraphFibration::new(&e(0), g.map().clone(), Chirality::Positive).is_err());
    }

    #[test]
    fn hopf_slices() {
        let s = hopf_slice_check(&standard(2), 50, 0).unwrap();
        assert_eq!(s.side, Side::Plus);
        let q = (Bivector::basis(0, 1) + Bivector::basis(2, 3)) * 0.5;
        assert!((s.point - q).max_abs() < 1e-12);
        assert!(s.spread < 1e-10);
        let neg = hopf_through(&OrientedPlane::standard(4, 0, 1), Sign::Negative);
        let s = hopf_slice_check(&neg, 50, 1).unwrap();
        assert_eq!(s.side, Side::Minus);
        assert!(s.spread < 1e-10);
    }

    #[test]
    fn fibration_json_round_trip() {
        let text = r#"{"variant":"graph","p":[1,0,0,0],"chirality":"negative",
            "map":{"kind":"contraction","c":[0,0,1],"lambda":0.5,"rotation":[[1,0,0],[0,1,0],[0,0,1]]}}"#;
        let f: Fibration = serde_json::from_str(text).unwrap();
        let again: Fibration = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        let x = Vector::from_row_slice(&[0.5, 0.5, 0.5, 0.5]);
        assert!(plane_distance(&fiber(&f, &x).unwrap(), &fiber(&again, &x).unwrap()) < 1e-15);
        let h = Fibration::hopf(standard(2));
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.starts_with(r#"{"variant":"hopf","J":"#));
        let bad = r#"{"variant":"graph","p":[2,0,0,0],"chirality":"positive","map":{"kind":"constant","c":[1,0,0]}}"#;
        assert!(serde_json::from_str::<Fibration>(bad)
            .unwrap_err()
            .to_string()
            .contains("`p`"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn lookups_contain_their_point(seed in any::<u64>(), lambda in 0.0f64..0.9, neg in any::<bool>()) {
            let chirality = if neg { Chirality::Negative } else { Chirality::Positive };
            let g = graph(seed, lambda, chirality);
            let f = Fibration::Graph(g.clone());
            let x = random_unit_vector(&mut rng(seed ^ 0x55), 4);
            let plane = fiber(&f, &x).unwrap();
            prop_assert!(plane.containment_residual(&x) < 1e-7);
            prop_assert!(g.graph_defect(&plane) < 1e-7);
        }
    }
}
