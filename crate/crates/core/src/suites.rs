//! Seeded verification suites, one per module plus `all`.
//!
//! Every sampled check draws from its own stream derived from the run seed,
//! so adding or reordering checks never perturbs the others.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{Matrix3, Vector3};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{
    darboux_decompose, inner, is_decomposable, omega, omega_inverse, pi_split, skew_normal_form,
    star, wedge22, Bivector, SkewForm,
};
use crate::gcfib::{
    disjointness_check, extract_linear_structure, fiber, fibration_sign, graph_planes,
    hopf_slice_check, hopf_through, is_distance_decreasing, phi_p, verify_fibration, Chirality,
    Fibration, GraphFibration, SphereMap,
};
use crate::grassmann::{
    intersects, orthogonal_complement, perp_frame, plane_distance, psi, psi_inverse, theta_pm,
    OrientedPlane, Side,
};
use crate::numkern::{
    det_sign, gaussian_matrix, gaussian_vector, max_abs, random_orthogonal, random_unit_vector,
    rng, Matrix, Sign, Vector,
};
use crate::ocs::{
    agreement_space, chart_pairs, conjugate, fiber_plane, invariance_residual, paired_bases,
    random_ocs, sign, standard, Mode,
};
use crate::quat::{
    conjugate_quat, counterexample_pair, detector_run, detector_witness_residual, fiber4,
    fibers_agree, l_i, l_j, l_k, nonuniqueness_report, one_shared_pair, oriented_agreements,
    quat_sign, random_quat, s3_counterexample, shared_uniqueness_probe, standard_quat,
    triple_kernel, validate_quat, Agreement, Plane4, QuatStructure,
};
use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Exterior,
    Grassmann,
    Ocs,
    Gcfib,
    Quat,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["exterior", "grassmann", "ocs", "gcfib", "quat", "all"];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "exterior" => Suite::Exterior,
            "grassmann" => Suite::Grassmann,
            "ocs" => Suite::Ocs,
            "gcfib" => Suite::Gcfib,
            "quat" => Suite::Quat,
            "all" => Suite::All,
            other => return Err(format!("unknown suite `{other}`")),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Suite::Exterior => 0,
            Suite::Grassmann => 1,
            Suite::Ocs => 2,
            Suite::Gcfib => 3,
            Suite::Quat => 4,
            Suite::All => 5,
        };
        f.write_str(Suite::NAMES[i])
    }
}

/// Run parameters. `tol` bounds the generic equality checks; checks with
/// their own pinned thresholds ignore it.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 300,
            seed: 0,
            tol: 1e-9,
        }
    }
}

/// Seed for trial `k` of stream `stream` (splitmix64 finalizer).
pub fn trial_seed(seed: u64, stream: u64, k: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(k.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(cfg: &SuiteConfig, id: u64) -> ChaCha8Rng {
    rng(trial_seed(cfg.seed, id, u64::MAX))
}

fn sign_of(bit: bool) -> Sign {
    if bit {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

/// Running maximum plus failure bookkeeping for one check.
#[derive(Default)]
struct Tally {
    total: usize,
    failures: usize,
    worst: f64,
    first: Option<String>,
}

impl Tally {
    fn value(&mut self, v: f64) {
        self.total += 1;
        if v.is_nan() {
            self.fail("NaN residual");
        } else {
            self.worst = self.worst.max(v);
        }
    }

    fn ok(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.fail(why());
        }
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.failures += 1;
        self.first.get_or_insert_with(|| why.into());
    }

    fn error<T>(&mut self, r: crate::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.total += 1;
                self.fail(e.to_string());
                None
            }
        }
    }

    fn bounded(self, name: &str, limit: f64, what: &str) -> Check {
        let ok = self.failures == 0 && self.worst < limit;
        let mut details = format!(
            "max {what} {:.3e} (limit {limit:.0e}) over {} samples",
            self.worst, self.total
        );
        if let Some(f) = &self.first {
            details.push_str(&format!("; {} failures, first: {f}", self.failures));
        }
        Check::new(name, ok, details)
            .stat("max", self.worst)
            .stat("limit", limit)
            .stat("samples", self.total as f64)
            .stat("failures", self.failures as f64)
    }

    fn counted(self, name: &str, what: &str) -> Check {
        let ok = self.failures == 0;
        let details = match &self.first {
            None => format!("{what} in all {} samples", self.total),
            Some(f) => format!(
                "{} of {} samples failed, first: {f}",
                self.failures, self.total
            ),
        };
        Check::new(name, ok, details)
            .stat("samples", self.total as f64)
            .stat("failures", self.failures as f64)
    }
}

fn random_plane(r: &mut ChaCha8Rng) -> OrientedPlane {
    loop {
        if let Ok(p) = OrientedPlane::new(&random_unit_vector(r, 4), &random_unit_vector(r, 4)) {
            return p;
        }
    }
}

fn random_bivector(r: &mut ChaCha8Rng) -> Bivector {
    let g = gaussian_vector(r, 6);
    Bivector::new(std::array::from_fn(|i| g[i]))
}

fn unit_perp(r: &mut ChaCha8Rng, p: &Vector) -> Vector {
    let g = gaussian_vector(r, p.len());
    let u = &g - p * p.dot(&g);
    u.normalize()
}

type SuiteFn = fn(&SuiteConfig) -> Vec<Check>;

/// Runs a suite and stamps its wall-clock time.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Report {
    let start = Instant::now();
    let mut report = Report::new(suite.to_string(), cfg.seed).tolerance("tol", cfg.tol);
    let parts: Vec<(&str, SuiteFn)> = match suite {
        Suite::Exterior => vec![("exterior", exterior_checks)],
        Suite::Grassmann => vec![("grassmann", grassmann_checks)],
        Suite::Ocs => vec![("ocs", ocs_checks)],
        Suite::Gcfib => vec![("gcfib", gcfib_checks)],
        Suite::Quat => vec![("quat", quat_checks)],
        Suite::All => vec![
            ("exterior", exterior_checks),
            ("grassmann", grassmann_checks),
            ("ocs", ocs_checks),
            ("gcfib", gcfib_checks),
            ("quat", quat_checks),
        ],
    };
    for (prefix, run) in parts {
        for mut c in run(cfg) {
            c.name = format!("{prefix}/{}", c.name);
            report.push(c);
        }
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

pub fn exterior_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.trials;
    let mut checks = Vec::new();

    let mut r = stream(cfg, 1);
    let mut t = Tally::default();
    for _ in 0..n {
        let (p, q) = (random_plane(&mut r), random_plane(&mut r));
        let g = [
            [p.u().dot(q.u()), p.u().dot(q.v())],
            [p.v().dot(q.u()), p.v().dot(q.v())],
        ];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        t.value((inner(&omega(&p), &omega(&q)) - det).abs());
    }
    checks.push(t.bounded(
        "inner_product_projection_determinant",
        1e-10,
        "|<ωP, ωQ> − det|",
    ));

    let mut r = stream(cfg, 2);
    let mut t = Tally::default();
    for _ in 0..n {
        let a = random_bivector(&mut r);
        t.value((star(&star(&a)) - a).max_abs());
    }
    checks.push(t.bounded("star_involution", 1e-14, "|**α − α|"));

    let mut r = stream(cfg, 3);
    let mut t = Tally::default();
    for _ in 0..n {
        let p = random_plane(&mut r);
        t.value((star(&omega(&p)) - omega(&orthogonal_complement(&p))).max_abs());
    }
    checks.push(t.bounded("star_is_complement", 1e-10, "|*ωP − ω(P⊥)|"));

    let mut r = stream(cfg, 4);
    let mut t = Tally::default();
    for _ in 0..n {
        let (a, b) = (random_bivector(&mut r), random_bivector(&mut r));
        t.value((wedge22(&a, &star(&b)) - inner(&a, &b)).abs() / (a.norm() * b.norm()));
    }
    checks.push(t.bounded("duality_pairing", 1e-12, "relative |α∧*β − <α,β>|"));

    let mut r = stream(cfg, 5);
    let mut shared = Tally::default();
    let mut separated = 0usize;
    for _ in 0..n {
        let w = random_unit_vector(&mut r, 4);
        let p = OrientedPlane::new(&w, &random_unit_vector(&mut r, 4));
        let q = OrientedPlane::new(&w, &random_unit_vector(&mut r, 4));
        if let (Some(p), Some(q)) = (shared.error(p), shared.error(q)) {
            shared.value(inner(&omega(&p), &star(&omega(&q))).abs());
        }
        let (p, q) = (random_plane(&mut r), random_plane(&mut r));
        if inner(&omega(&p), &star(&omega(&q))).abs() > 1e-6 {
            separated += 1;
        }
    }
    let fraction = separated as f64 / n.max(1) as f64;
    let ok = shared.failures == 0 && shared.worst < 1e-10 && fraction >= 0.99;
    checks.push(
        Check::new(
            "intersection_criterion",
            ok,
            format!(
                "sharing a vector: max |<ωP,*ωQ>| {:.3e}; independent pairs above 1e-6: {:.1}%",
                shared.worst,
                100.0 * fraction
            ),
        )
        .stat("max_shared", shared.worst)
        .stat("separated_fraction", fraction),
    );

    let mut r = stream(cfg, 6);
    let mut t = Tally::default();
    let mut converse = Tally::default();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..n {
        let (m, p) = pi_split(&omega(&random_plane(&mut r)));
        t.value((m.norm() - half).abs().max((p.norm() - half).abs()));
        let (m, p) = pi_split(&random_bivector(&mut r));
        let a = m * (half / m.norm()) + p * (half / p.norm());
        converse.ok(is_decomposable(&a, 1e-10), || {
            format!("{a} not decomposable")
        });
    }
    let mut c = t.bounded("sphere_product_image", 1e-12, "| ‖π±ωP‖ − 1/√2 |");
    if converse.failures > 0 {
        c = Check::new(c.name, false, converse.first.unwrap_or_default());
    }
    checks.push(c);

    let mut r = stream(cfg, 7);
    let mut t = Tally::default();
    for _ in 0..n {
        let p = random_plane(&mut r);
        if let Some(back) = t.error(omega_inverse(&omega(&p))) {
            t.value(plane_distance(&back, &p));
        }
    }
    checks.push(t.bounded("omega_inverse_round_trip", 1e-10, "plane distance"));

    let mut r = stream(cfg, 8);
    let mut t = Tally::default();
    let mut shape = Tally::default();
    let mut inputs: Vec<Bivector> = vec![
        Bivector::ZERO,
        Bivector::basis(0, 1) + Bivector::basis(2, 3),
        Bivector::basis(0, 1) - Bivector::basis(2, 3),
        Bivector::basis(0, 2) * 3.0,
    ];
    for k in 0..n {
        let a = random_bivector(&mut r);
        let (m, p) = pi_split(&a);
        inputs.push(match k % 5 {
            0 => p,
            1 => m,
            2 => omega(&random_plane(&mut r)) * (1.0 + 4.0 * (k as f64 / n as f64)),
            _ => a,
        });
    }
    for a in &inputs {
        let d = darboux_decompose(a);
        t.value((d.reconstruct() - *a).max_abs());
        let apart = inner(&omega(&d.p), &star(&omega(&d.q)));
        shape.ok(
            d.a >= d.b.abs() - 1e-12 && (apart - 1.0).abs() < 1e-9,
            || format!("a = {}, b = {}, <ωP,*ωQ> = {apart}", d.a, d.b),
        );
    }
    let mut c = t.bounded("darboux_reconstruction", cfg.tol, "|aωP + bωQ − α|");
    if shape.failures > 0 {
        c = Check::new(c.name, false, shape.first.unwrap_or_default());
    }
    checks.push(c);

    let mut r = stream(cfg, 9);
    let mut t = Tally::default();
    for k in 0..n {
        let (a, want) = match k % 3 {
            0 => (Matrix::zeros(4, 4), SkewForm::B0),
            1 => (
                (omega(&random_plane(&mut r)) * 2.5).to_skew_matrix(),
                SkewForm::B1,
            ),
            _ => {
                let g = gaussian_matrix(&mut r, 4, 4);
                (&g - g.transpose(), SkewForm::B2)
            }
        };
        match skew_normal_form(&a) {
            Ok((q, form)) => {
                let residual = max_abs(&(q.transpose() * &a * &q - form.matrix()));
                t.value(residual);
                if form != want {
                    t.fail(format!("classified {form:?}, expected {want:?}"));
                }
            }
            Err(e) => t.fail(e.to_string()),
        }
    }
    checks.push(t.bounded("skew_normal_form", 1e-9, "|QᵀAQ − B|"));
    checks
}

pub fn grassmann_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.trials;
    let mut checks = Vec::new();

    let mut r = stream(cfg, 20);
    let mut t = Tally::default();
    for _ in 0..(n / 30).max(1) {
        let p = random_unit_vector(&mut r, 4);
        let planes: Vec<OrientedPlane> = (0..50)
            .filter_map(|_| OrientedPlane::new(&p, &unit_perp(&mut r, &p)).ok())
            .collect();
        for i in 0..planes.len() {
            for k in i + 1..planes.len() {
                let (tm, tp) = theta_pm(&planes[i], &planes[k]);
                t.value((tm - tp).abs());
            }
        }
    }
    checks.push(t.bounded("planes_through_point_isometry", 1e-8, "|θ₋ − θ₊|"));

    let mut r = stream(cfg, 21);
    let mut t = Tally::default();
    for k in 0..n {
        let (p, q) = if k % 2 == 0 {
            let w = random_unit_vector(&mut r, 4);
            let p = OrientedPlane::new(&w, &random_unit_vector(&mut r, 4));
            let q = OrientedPlane::new(&random_unit_vector(&mut r, 4), &w);
            match (t.error(p), t.error(q)) {
                (Some(p), Some(q)) => (p, q),
                _ => continue,
            }
        } else {
            (random_plane(&mut r), random_plane(&mut r))
        };
        let (tm, tp) = theta_pm(&p, &q);
        let by_star = intersects(&p, &q, 1e-9);
        let by_theta = (tp - tm).abs() < 1e-7;
        t.ok(by_star == by_theta && by_star == (k % 2 == 0), || {
            format!("trial {k}: star test {by_star}, θ test {by_theta}")
        });
    }
    checks.push(t.counted("theta_intersection_criterion", "both criteria agree"));

    let mut r = stream(cfg, 22);
    let mut t = Tally::default();
    for _ in 0..n {
        let p = random_unit_vector(&mut r, 4);
        let u = unit_perp(&mut r, &p);
        for side in [Side::Minus, Side::Plus] {
            if let Some(a) = t.error(psi(&p, &u, side)) {
                if let Some(back) = t.error(psi_inverse(&p, &a, side)) {
                    t.value(
                        (back - &u)
                            .amax()
                            .max((a.norm() - std::f64::consts::FRAC_1_SQRT_2).abs()),
                    );
                }
            }
        }
    }
    checks.push(t.bounded("psi_round_trip", 1e-10, "|ψ⁻¹ψu − u|"));

    let mut r = stream(cfg, 23);
    let mut t = Tally::default();
    for _ in 0..n {
        let p = random_unit_vector(&mut r, 4);
        let [f1, f2, f3] = perp_frame(&p);
        let m = Matrix::from_columns(&[p, f1, f2, f3]);
        t.value(
            max_abs(&(m.transpose() * &m - Matrix::identity(4, 4)))
                .max((m.determinant() - 1.0).abs()),
        );
    }
    checks.push(t.bounded("perp_frame_positive_orthonormal", 1e-12, "frame residual"));
    checks
}

pub fn ocs_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.trials;
    let mut checks = Vec::new();

    let mut existence = Tally::default();
    let mut mod4 = Tally::default();
    let mut difference = Tally::default();
    let mut invariance = Tally::default();
    let mut min_gap = f64::INFINITY;
    for dim_n in 1..=5usize {
        for k in 0..n {
            let s = trial_seed(cfg.seed, 30 + dim_n as u64, k as u64);
            let opposite = k % 2 == 1;
            let sj = sign_of(s & 1 == 1);
            let sk = if opposite { -sj } else { sj };
            let j = random_ocs(dim_n, sj, s);
            let kk = random_ocs(dim_n, sk, s.wrapping_add(1));
            let (Some(sum), Some(diff)) = (
                mod4.error(agreement_space(&j, &kk, Mode::Sum)),
                difference.error(agreement_space(&j, &kk, Mode::Difference)),
            ) else {
                continue;
            };
            min_gap = min_gap.min(sum.spectral_gap).min(diff.spectral_gap);
            let want = if opposite { 2 } else { 0 };
            mod4.ok(sum.dimension % 4 == want, || {
                format!(
                    "n={dim_n} trial {k}: dim ker(J+K) = {} with opposite={opposite}",
                    sum.dimension
                )
            });
            if opposite {
                existence.ok(sum.dimension >= 2, || {
                    format!("n={dim_n} trial {k}: dim {}", sum.dimension)
                });
            }
            if opposite == (dim_n % 2 == 0) {
                difference.ok(diff.dimension >= 2, || {
                    format!("n={dim_n} trial {k}: dim ker(J−K) = {}", diff.dimension)
                });
            }
            for ker in [&sum, &diff] {
                if ker.dimension > 0 {
                    invariance.value(invariance_residual(&j, &ker.basis));
                }
            }
        }
    }
    for entry in chart_pairs() {
        let opposite = sign(&entry.j).ok() != sign(&entry.k).ok();
        if let Some(sum) = mod4.error(agreement_space(&entry.j, &entry.k, Mode::Sum)) {
            let want = if opposite { 2 } else { 0 };
            mod4.ok(sum.dimension % 4 == want, || {
                format!("{}: dim ker(J+K) = {}", entry.label, sum.dimension)
            });
        }
    }
    checks.push(existence.counted("opposite_signs_share_circle", "dim ker(J+K) ≥ 2"));
    checks.push(
        mod4.counted(
            "kernel_dimension_mod_4",
            "dim ker(J+K) ≡ 2 (opposite) or 0 (same) mod 4",
        )
        .stat(
            "min_spectral_gap",
            if min_gap.is_finite() { min_gap } else { -1.0 },
        ),
    );
    checks.push(difference.counted("difference_kernel_nontrivial", "dim ker(J−K) ≥ 2"));
    checks.push(invariance.bounded("kernel_invariance", 1e-8, "|(id − Π)JΠ|"));

    let mut r = stream(cfg, 40);
    let mut t = Tally::default();
    let i0 = standard(2);
    for _ in 0..n {
        let th = rand::Rng::random::<f64>(&mut r) * std::f64::consts::TAU;
        let (c, s) = (th.cos(), th.sin());
        let q = Matrix::from_row_slice(
            4,
            4,
            &[1., 0., 0., 0., 0., c, -s, 0., 0., s, c, 0., 0., 0., 0., -1.],
        );
        t.value((i0.matrix() * &q + &q * i0.matrix()).determinant().abs());
    }
    checks.push(t.bounded("base_case_determinant", 1e-10, "|det(I₀Q + QI₀)|"));

    let mut t = Tally::default();
    for k in 0..n {
        let s = trial_seed(cfg.seed, 41, k as u64);
        let dim_n = 1 + k % 5;
        let j = random_ocs(dim_n, sign_of(s & 1 == 1), s);
        if let (Some(a), Some(b)) = (t.error(sign(&j)), t.error(sign(&j.negated()))) {
            t.ok(b == a.pow_flip(dim_n), || {
                format!("n={dim_n}: sign(J) = {a}, sign(−J) = {b}")
            });
        }
    }
    checks.push(t.counted("sign_of_negative", "sign(−J) = (−1)ⁿ sign(J)"));

    let mut t = Tally::default();
    for k in 0..n {
        let s = trial_seed(cfg.seed, 42, k as u64);
        let dim_n = 1 + k % 5;
        let j = random_ocs(dim_n, sign_of(s & 1 == 1), s);
        let tm = random_orthogonal(2 * dim_n, sign_of(s & 2 == 2), s ^ 0xABCD);
        if let Some(c) = t.error(conjugate(&j, &tm)) {
            if let (Some(a), Some(b)) = (t.error(sign(&j)), t.error(sign(&c))) {
                let want = if det_sign(&tm) > 0 { a } else { -a };
                t.ok(b == want, || format!("sign(TJTᵀ) = {b}, expected {want}"));
            }
        }
    }
    checks.push(t.counted("conjugation_sign_rule", "sign(TJTᵀ) = det(T) sign(J)"));

    let mut r = stream(cfg, 43);
    let mut t = Tally::default();
    for k in 0..n {
        let dim_n = 1 + k % 4;
        let s = trial_seed(cfg.seed, 44, k as u64);
        let tm = random_orthogonal(2 * dim_n, sign_of(s & 1 == 1), s);
        let base = standard(dim_n);
        if let Some(j) = t.error(conjugate(&base, &tm)) {
            let p = random_unit_vector(&mut r, 2 * dim_n);
            if let Some(image) = t.error(fiber_plane(&base, &p).transform(&tm)) {
                t.value(plane_distance(&fiber_plane(&j, &(&tm * &p)), &image));
            }
        }
    }
    checks.push(t.bounded("correspondence_fibers", cfg.tol, "plane distance"));

    let mut r = stream(cfg, 45);
    let mut t = Tally::default();
    for k in 0..n {
        let dim_n = 1 + k % 4;
        let s = trial_seed(cfg.seed, 46, k as u64);
        let (sj, sk) = (sign_of(s & 1 == 1), sign_of(s & 2 == 2));
        let j = random_ocs(dim_n, sj, s);
        let kk = random_ocs(dim_n, sk, s.wrapping_add(7));
        let p = random_unit_vector(&mut r, 2 * dim_n);
        if let Some(pb) = t.error(paired_bases(&j, &kk, &p)) {
            t.value(
                pb.pattern_residual()
                    .max(pb.change_of_basis_residual())
                    .max(pb.standard_residual_e(&j))
                    .max(pb.standard_residual_f(&kk)),
            );
            let circle = pb.circle_residual();
            t.ok(circle < 1e-10, || format!("c² + s² residual {circle:e}"));
            let corner = pb.corner;
            t.ok((corner == Sign::Positive) == (sj == sk), || {
                format!("corner {corner} for signs {sj}, {sk}")
            });
        }
    }
    checks.push(t.bounded("paired_bases_pattern", cfg.tol, "|Q − ideal|"));

    let mut t = Tally::default();
    let mut dims = Vec::new();
    for entry in chart_pairs() {
        if let Some(k) = t.error(agreement_space(&entry.j, &entry.k, Mode::Difference)) {
            dims.push(k.dimension as f64);
            t.ok(
                k.dimension == entry.expected_dimension && k.dimension > 2,
                || {
                    format!(
                        "{}: dim {} expected {}",
                        entry.label, k.dimension, entry.expected_dimension
                    )
                },
            );
        }
    }
    let mut c = t.counted("chart_dimensions", "dim ker(J−K) matches {6, 4, 4, 6}");
    for (i, d) in dims.iter().enumerate() {
        c = c.stat(&format!("dimension_{i}"), *d);
    }
    checks.push(c);
    checks
}

fn graph_family(cfg: &SuiteConfig) -> Vec<GraphFibration> {
    let lambdas = [0.0, 0.3, 0.7, 0.95];
    (0..10u64)
        .map(|k| {
            let s = trial_seed(cfg.seed, 60, k);
            let mut r = rng(s);
            let p = random_unit_vector(&mut r, 4);
            let c = random_unit_vector(&mut r, 3);
            let rot = random_orthogonal(3, Sign::Positive, s ^ 1);
            let map = SphereMap::contraction(
                Vector3::new(c[0], c[1], c[2]),
                lambdas[k as usize % 4],
                Matrix3::from_fn(|i, j| rot[(i, j)]),
            )
            .expect("parameters are in range");
            let chirality = if k % 2 == 0 {
                Chirality::Positive
            } else {
                Chirality::Negative
            };
            GraphFibration::new(&p, map, chirality).expect("certified contraction")
        })
        .collect()
}

pub fn gcfib_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.trials;
    let mut checks = Vec::new();

    let mut r = stream(cfg, 50);
    let mut t = Tally::default();
    for _ in 0..n {
        let p = random_unit_vector(&mut r, 4);
        let (u, v) = (unit_perp(&mut r, &p), unit_perp(&mut r, &p));
        if let Some(plane) = t.error(phi_p(&p, &u, &v)) {
            let want = psi(&p, &u, Side::Minus).and_then(|a| Ok(a + psi(&p, &v, Side::Plus)?));
            if let Some(want) = t.error(want) {
                t.value((omega(&plane) - want).max_abs());
            }
        }
    }
    checks.push(t.bounded(
        "phi_omega_compatibility",
        cfg.tol,
        "|ω(φ(u,v)) − ψ₋(u) − ψ₊(v)|",
    ));

    let mut opposite = Tally::default();
    let mut same = Tally::default();
    for k in 0..n {
        let s = trial_seed(cfg.seed, 51, k as u64);
        let jp = random_ocs(2, Sign::Positive, s);
        let jm = random_ocs(2, Sign::Negative, s ^ 0x55);
        if let Some(ker) = opposite.error(agreement_space(&jp, &jm, Mode::Difference)) {
            opposite.ok(ker.dimension == 2, || {
                format!("trial {k}: dimension {}", ker.dimension)
            });
        }
        let sj = sign_of(s & 1 == 1);
        let j = random_ocs(2, sj, s ^ 0x77);
        let kk = if k % 10 == 0 {
            j.clone()
        } else {
            random_ocs(2, sj, s ^ 0x99)
        };
        if let Some(ker) = same.error(agreement_space(&j, &kk, Mode::Difference)) {
            let equal = max_abs(&(j.matrix() - kk.matrix())) < 1e-9;
            let ok = (ker.dimension == 0 && !equal) || (ker.dimension == 4 && equal);
            same.ok(ok, || {
                format!("trial {k}: dimension {}, equal {equal}", ker.dimension)
            });
        }
    }
    checks.push(opposite.counted("opposite_sign_share_one_circle", "dim ker(J⁺ − J⁻) = 2"));
    checks.push(same.counted(
        "same_sign_avoid",
        "dim ker(J − K) ∈ {0, 4}, 4 only when J = K",
    ));

    let mut t = Tally::default();
    let mut sides = Tally::default();
    for k in 0..n.min(100) {
        let s = trial_seed(cfg.seed, 52, k as u64);
        let want = sign_of(s & 1 == 1);
        let j = random_ocs(2, want, s);
        if let Some(slice) = t.error(hopf_slice_check(&j, 30, s)) {
            t.value(slice.spread);
            let side = if want == Sign::Positive {
                Side::Plus
            } else {
                Side::Minus
            };
            sides.ok(slice.side == side, || {
                format!("side {} for sign {want}", slice.side)
            });
        }
    }
    let mut c = t.bounded("hopf_slices", 1e-10, "spread");
    match hopf_slice_check(&standard(2), 30, cfg.seed) {
        Ok(s) => {
            let q = (Bivector::basis(0, 1) + Bivector::basis(2, 3)) * 0.5;
            let err = (s.point - q).max_abs();
            c = c.stat("standard_constant_error", err);
            if err >= 1e-12 || sides.failures > 0 {
                c = Check::new(
                    c.name,
                    false,
                    sides
                        .first
                        .unwrap_or_else(|| format!("standard constant off by {err:e}")),
                );
            }
        }
        Err(e) => c = Check::new(c.name, false, e.to_string()),
    }
    checks.push(c);

    let mut t = Tally::default();
    for k in 0..(n / 3).max(1) {
        let s = trial_seed(cfg.seed, 53, k as u64);
        let want = sign_of(s & 1 == 1);
        let f = Fibration::hopf(random_ocs(2, want, s));
        if let Some(got) = t.error(fibration_sign(&f, s)) {
            t.ok(got == want, || {
                format!("fibration sign {got}, structure sign {want}")
            });
        }
    }
    checks.push(t.counted("hopf_fibration_sign", "det[p Jp q Jq] matches sign(J)"));

    let mut r = stream(cfg, 54);
    let mut t = Tally::default();
    for _ in 0..n {
        let plane = random_plane(&mut r);
        for want in [Sign::Positive, Sign::Negative] {
            let j = hopf_through(&plane, want);
            t.value(plane_distance(&fiber_plane(&j, plane.u()), &plane));
            if let Some(got) = t.error(sign(&j)) {
                if got != want {
                    t.fail(format!("sign {got}, wanted {want}"));
                }
            }
        }
    }
    checks.push(t.bounded("hopf_through_plane", cfg.tol, "plane distance"));

    let family = graph_family(cfg);
    let lookups = n.clamp(1, 100);
    let mut containment = Tally::default();
    let mut defect = Tally::default();
    let mut round_trip = Tally::default();
    let mut disjoint = Tally::default();
    let mut chirality = Tally::default();
    for (idx, g) in family.iter().enumerate() {
        let f = Fibration::Graph(g.clone());
        let mut r = rng(trial_seed(cfg.seed, 61, idx as u64));
        let mut planes = Vec::with_capacity(lookups);
        for _ in 0..lookups {
            let x = random_unit_vector(&mut r, 4);
            let Some(plane) = containment.error(fiber(&f, &x)) else {
                continue;
            };
            containment.value(plane.containment_residual(&x));
            defect.value(g.graph_defect(&plane));
            let dom = g.chirality().domain_side();
            if let Some(v) = round_trip.error(psi_inverse(g.p(), &dom.project(&omega(&plane)), dom))
            {
                let fv = g.embed(&g.map().apply(&g.coordinates(&v).normalize()));
                let expected = match g.chirality() {
                    Chirality::Positive => phi_p(g.p(), &v, &fv),
                    Chirality::Negative => phi_p(g.p(), &fv, &v),
                };
                if let Some(e) = round_trip.error(expected) {
                    round_trip.value(plane_distance(&plane, &e));
                }
            }
            planes.push(plane);
        }
        let d = disjointness_check(&planes);
        disjoint.ok(d.passed(), || format!("fibration {idx}: {}", d.details));
        let want = g.chirality().sign();
        if let Some(got) = chirality.error(fibration_sign(&f, trial_seed(cfg.seed, 62, idx as u64)))
        {
            chirality.ok(got == want, || {
                format!("fibration {idx}: sign {got}, chirality {want}")
            });
        }
    }
    checks.push(containment.bounded("graph_fiber_containment", 1e-7, "|x − Πx|"));
    checks.push(defect.bounded("graph_condition", 1e-7, "|π_target − f̂(π_domain)|"));
    checks.push(round_trip.bounded("new_formulation_round_trip", 1e-7, "plane distance"));
    checks.push(disjoint.counted("graph_fiber_disjointness", "θ₊ − θ₋ of constant sign"));
    checks.push(chirality.counted(
        "graph_sign_matches_chirality",
        "fibration sign equals chirality",
    ));

    let mut t = Tally::default();
    for (k, lambda) in [0.0, 0.5, 0.95, 0.999].into_iter().enumerate() {
        match SphereMap::contraction(Vector3::z(), lambda, Matrix3::identity()) {
            Ok(m) => {
                let (ok, ratio) =
                    is_distance_decreasing(&m, 2000, trial_seed(cfg.seed, 63, k as u64));
                t.ok(ok, || format!("λ = {lambda} rejected with ratio {ratio}"));
            }
            Err(e) => t.fail(e.to_string()),
        }
    }
    let expanding = SphereMap::unchecked_contraction(Vector3::z(), 1.2);
    let (ok, ratio) = is_distance_decreasing(&expanding, 2000, cfg.seed);
    t.ok(!ok, || format!("λ = 1.2 accepted with ratio {ratio}"));
    checks.push(t.counted(
        "distance_decreasing_certificate",
        "contractions accepted, expansion rejected",
    ));

    let mut t = Tally::default();
    match GraphFibration::unchecked(
        &random_unit_vector(&mut stream(cfg, 64), 4),
        expanding,
        Chirality::Positive,
    ) {
        Ok(g) => {
            if let Some(planes) = t.error(graph_planes(&g, 60, cfg.seed)) {
                let d = disjointness_check(&planes);
                t.ok(!d.passed(), || {
                    "planes of an expanding map were disjoint".into()
                });
            }
        }
        Err(e) => t.fail(e.to_string()),
    }
    checks.push(t.counted(
        "expanding_map_not_fibration",
        "graph of an expanding map has crossing planes",
    ));

    let mut t = Tally::default();
    for (k, ch) in [Chirality::Positive, Chirality::Negative]
        .into_iter()
        .enumerate()
    {
        let mut r = rng(trial_seed(cfg.seed, 65, k as u64));
        let p = random_unit_vector(&mut r, 4);
        let c = random_unit_vector(&mut r, 3);
        let map = SphereMap::constant(Vector3::new(c[0], c[1], c[2])).expect("unit center");
        let Some(f) = t.error(Fibration::graph(&p, map, ch)) else {
            continue;
        };
        if let Some(j) = t.error(extract_linear_structure(&f, 24, cfg.seed)) {
            if let Some(s) = t.error(sign(&j)) {
                t.ok(s == ch.sign(), || {
                    format!("constant map gave sign {s} for {ch:?}")
                });
            }
        }
        let map = SphereMap::contraction(Vector3::new(c[0], c[1], c[2]), 0.5, Matrix3::identity())
            .expect("valid");
        if let Some(f) = t.error(Fibration::graph(&p, map, ch)) {
            let r = extract_linear_structure(&f, 24, cfg.seed);
            t.ok(matches!(r, Err(crate::Error::NotLinear { .. })), || {
                format!("{r:?}")
            });
        }
    }
    checks.push(t.counted(
        "linear_iff_hopf",
        "constant maps are linear, contractions are not",
    ));

    let mut t = Tally::default();
    let hopf = Fibration::hopf(random_ocs(2, Sign::Negative, cfg.seed));
    let graph = Fibration::Graph(family[2].clone());
    for (name, f) in [("hopf", &hopf), ("graph", &graph)] {
        let rep = verify_fibration(f, 40, cfg.seed);
        t.ok(rep.passed(), || {
            format!(
                "{name}: {}",
                rep.failures()
                    .map(|c| c.details.clone())
                    .collect::<Vec<_>>()
                    .join("; ")
            )
        });
    }
    checks.push(t.counted(
        "verify_fibration",
        "coverage, disjointness and sign stability",
    ));
    checks
}

pub fn quat_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let n = cfg.trials;
    let mut checks = Vec::new();

    for mut c in s3_counterexample().checks {
        c.name = format!("s7_nonexistence/{}", c.name);
        checks.push(c);
    }
    for mut c in nonuniqueness_report().checks {
        c.name = format!("s7_nonuniqueness/{}", c.name);
        checks.push(c);
    }

    let mut t = Tally::default();
    let mut witnesses = Tally::default();
    let mut min_dim = usize::MAX;
    for k in 0..n {
        let s = trial_seed(cfg.seed, 70, k as u64);
        let plus = random_quat(1, Sign::Positive, s);
        let minus = random_quat(1, Sign::Negative, s ^ 0x1234);
        match (quat_sign(&plus), quat_sign(&minus)) {
            (Ok(Sign::Positive), Ok(Sign::Negative)) => {}
            other => {
                t.fail(format!("trial {k}: signs {other:?}"));
                continue;
            }
        }
        if let Some(ker) = t.error(triple_kernel(&plus, &minus)) {
            min_dim = min_dim.min(ker.dimension);
            t.ok(ker.dimension >= 1, || {
                format!("trial {k}: triple kernel is trivial")
            });
        }
        if let Some(run) = witnesses.error(detector_run(&plus, &minus)) {
            witnesses.value(run.pattern_residual.max(run.witness_residual));
        }
    }
    checks.push(
        t.counted("detector_law", "triple kernel ≥ 1-dimensional")
            .stat(
                "min_dimension",
                if min_dim == usize::MAX {
                    -1.0
                } else {
                    min_dim as f64
                },
            ),
    );
    checks.push(witnesses.bounded("detector_witnesses", 1e-10, "witness and pattern residual"));

    let mut r = stream(cfg, 71);
    let mut t = Tally::default();
    for _ in 0..n {
        let th = rand::Rng::random::<f64>(&mut r) * std::f64::consts::TAU;
        t.value(detector_witness_residual(th.cos(), th.sin()));
    }
    checks.push(t.bounded("detector_witness_formula", 1e-10, "|(QL + LQ)w|"));

    let mut t = Tally::default();
    for k in 0..n {
        let s = trial_seed(cfg.seed, 72, k as u64);
        let want = sign_of(s & 1 == 1);
        let q = random_quat(1 + k % 2, want, s);
        if let Some(got) = t.error(quat_sign(&q)) {
            t.ok(got == want, || format!("quat_sign {got}, expected {want}"));
            for f in q.factors() {
                if let Some(fs) = t.error(sign(f)) {
                    t.ok(fs == got, || {
                        format!("factor sign {fs}, quaternionic sign {got}")
                    });
                }
            }
        }
    }
    checks.push(t.counted("sign_coherence", "quat_sign = sign(I) = sign(J) = sign(K)"));

    let mut r = stream(cfg, 73);
    let mut t = Tally::default();
    for k in 0..n {
        let s = trial_seed(cfg.seed, 74, k as u64);
        let dim_n = 1 + k % 2;
        let tm = random_orthogonal(4 * dim_n, sign_of(s & 1 == 1), s);
        let base = standard_quat(dim_n);
        if let Some(q) = t.error(conjugate_quat(&base, &tm)) {
            let p = random_unit_vector(&mut r, 4 * dim_n);
            if let (Some(a), Some(b)) =
                (t.error(fiber4(&base, &p)), t.error(fiber4(&q, &(&tm * &p))))
            {
                t.value(max_abs(&(&tm * a.frame() - b.frame())));
            }
        }
    }
    checks.push(t.bounded("conjugated_fibers_are_images", cfg.tol, "frame residual"));

    let mut t = Tally::default();
    for (name, i, j, k) in [
        ("(L_i, L_k, L_j)", l_i(), l_k(), l_j()),
        ("(L_i, L_j, -L_k)", l_i(), l_j(), -l_k()),
    ] {
        let r = validate_quat(&i, &j, &k, 1e-10);
        t.ok(
            matches!(r, Err(crate::Error::NotQuaternionic { .. })),
            || format!("{name} accepted"),
        );
    }
    let std = standard_quat(2);
    let id = Matrix::identity(8, 8);
    let exact = max_abs(&(std.i().matrix() * std.j().matrix() * std.k().matrix() + id));
    t.ok(exact == 0.0, || {
        format!("standard IJK + id residual {exact}")
    });
    checks.push(t.counted(
        "quaternion_identities",
        "bad triples rejected, standard exact",
    ));

    let (p, m) = counterexample_pair();
    checks.push(probe_check(
        "probe_counterexample_pair",
        &p,
        &m,
        n,
        cfg.seed,
        |found| found.is_empty(),
    ));
    let (one, two) = one_shared_pair();
    let first_block = {
        let basis: Vec<Vector> = (0..4)
            .map(|i| {
                let mut e = Vector::zeros(8);
                e[i] = 1.0;
                e
            })
            .collect();
        crate::numkern::projector(&basis, 8)
    };
    checks.push(probe_check(
        "probe_one_shared_fiber",
        &one,
        &two,
        n,
        cfg.seed,
        |found| {
            !found.is_empty()
                && found
                    .iter()
                    .all(|(_, f)| max_abs(&(f.projector() - &first_block)) < 1e-8)
        },
    ));

    let mut reflect = Matrix::identity(8, 8);
    reflect[(0, 0)] = -1.0;
    let mut t = Tally::default();
    let mut counts = [0usize; 3];
    if let Some(q) = t.error(conjugate_quat(&std, &reflect)) {
        let mut r = stream(cfg, 75);
        for _ in 0..n {
            if let Some(a) = t.error(fibers_agree(&std, &q, &random_unit_vector(&mut r, 8), 1e-8)) {
                counts[a as usize] += 1;
            }
        }
        if let Some(rep) = t.error(shared_uniqueness_probe(&std, &q, n, cfg.seed)) {
            t.ok(rep.passed(), || rep.to_string());
        }
    }
    checks.push(
        t.counted(
            "reflected_pair_at_most_one_shared_fiber",
            "oriented agreements lie on one 4-plane",
        )
        .stat(
            "agree_oriented",
            counts[Agreement::AgreeOriented as usize] as f64,
        )
        .stat(
            "agree_unoriented_only",
            counts[Agreement::AgreeUnorientedOnly as usize] as f64,
        )
        .stat("disagree", counts[Agreement::Disagree as usize] as f64),
    );
    checks
}

fn probe_check(
    name: &str,
    q1: &QuatStructure,
    q2: &QuatStructure,
    samples: usize,
    seed: u64,
    accept: impl Fn(&[(Vector, Plane4)]) -> bool,
) -> Check {
    let report = match shared_uniqueness_probe(q1, q2, samples, seed) {
        Ok(rep) => rep,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let found = match oriented_agreements(q1, q2, samples, seed) {
        Ok(f) => f,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let c = &report.checks[0];
    Check::new(name, c.passed() && accept(&found), c.details.clone())
        .stat("agreements", found.len() as f64)
        .stat("candidates", c.stats["candidates"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(0, 1, 0), trial_seed(0, 1, 1));
        assert_ne!(trial_seed(0, 1, 0), trial_seed(0, 2, 0));
        assert_ne!(trial_seed(0, 1, 0), trial_seed(1, 1, 0));
    }

    #[test]
    fn small_run_passes() {
        let cfg = SuiteConfig {
            trials: 12,
            ..SuiteConfig::default()
        };
        let report = run_suite(Suite::All, &cfg);
        assert!(report.passed(), "{report}");
        assert!(report.checks.len() >= 25);
    }
}
