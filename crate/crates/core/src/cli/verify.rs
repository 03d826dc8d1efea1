//! The property catalog run by `hyperball verify`.
//!
//! Every suite draws its cases from its own seeded stream, so reports are
//! reproducible and independent of scheduling. Thresholds scale with `tol`.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{
    caratheodory_distance, caratheodory_lower_bound, poincare_distance, BallPoint, MobiusMap,
};
use crate::classify::*;
use crate::families::{
    random_ball_point, random_xi, reducing_with, sample, unitary_with_eigvec, Family,
};
use crate::group::{form_operator, GElement};
use crate::linalg::{
    dot_unchecked, eig_2x2, gaussian_vector, hermitian_eig, orthonormalize_columns,
    random_unit_vector, random_unitary_from_rng, rank_one_update, Complex, ComplexMatrix,
    ComplexVector,
};

/// Failures kept per suite in the report.
const MAX_LISTED_FAILURES: usize = 5;
/// Smallest tolerance handed to decision procedures (predicates, classification).
/// Thresholds still scale with the configured `tol`.
pub const DECISION_TOL_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub dims: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    /// Cases per suite and dimension (some suites cap this).
    pub count: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            dims: vec![2, 8, 32],
            seed: super::DEFAULT_SEED,
            tol: super::DEFAULT_TOL,
            count: super::DEFAULT_VERIFY_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub dim: usize,
    pub case: usize,
    /// Seed of the case's generator, which reproduces its inputs.
    pub digest: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub threshold: f64,
    pub max_residual: f64,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Fixed-width table, one line per suite, then a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self
            .suites
            .iter()
            .map(|s| s.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>19}  {:>19}  result",
            "suite", "cases", "max_residual", "threshold"
        );
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<width$}  {:>7}  {:>19}  {:>19}  {}",
                s.name,
                s.cases,
                sci(s.max_residual),
                sci(s.threshold),
                if s.passed() { "PASS" } else { "FAIL" }
            );
            for f in &s.failures {
                let _ = writeln!(
                    out,
                    "    failure dim={} case={} input={} residual={}",
                    f.dim,
                    f.case,
                    f.digest,
                    sci(f.residual)
                );
            }
            if s.failure_count > s.failures.len() {
                let _ = writeln!(out, "    ... {} more", s.failure_count - s.failures.len());
            }
        }
        let failed = self.suites.iter().filter(|s| !s.passed()).count();
        let _ = writeln!(out, "{} suites, {} failed", self.suites.len(), failed);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

/// One random case: its generator plus the residuals it records.
pub struct Case {
    pub rng: ChaCha8Rng,
    pub dim: usize,
    pub tol: f64,
    pub index: usize,
    worst: f64,
}

impl Case {
    fn check(&mut self, residual: f64) {
        let r = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.worst = self.worst.max(r);
    }

    fn require(&mut self, ok: bool) {
        self.check(if ok { 0.0 } else { f64::INFINITY });
    }
}

type CaseFn = fn(&mut Case);

struct Suite {
    name: &'static str,
    /// Threshold as a multiple of `tol`.
    factor: f64,
    /// Upper bound on cases per dimension.
    cap: Option<usize>,
    /// Largest dimension the suite runs at.
    max_dim: Option<usize>,
    run: CaseFn,
}

const fn suite(name: &'static str, factor: f64, run: CaseFn) -> Suite {
    Suite {
        name,
        factor,
        cap: None,
        max_dim: None,
        run,
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn case_seed(seed: u64, name: &str, dim: usize, case: usize) -> u64 {
    let suite_seed = splitmix(seed ^ fnv1a(name.as_bytes()));
    splitmix(suite_seed ^ splitmix((dim as u64) << 32 | case as u64))
}

/// Names of every suite in the catalog, sorted.
pub fn suite_names() -> Vec<&'static str> {
    let mut names: Vec<_> = catalog().iter().map(|s| s.name).collect();
    names.sort_unstable();
    names
}

/// Runs the whole catalog.
pub fn run_catalog(cfg: &VerifyConfig) -> VerifyReport {
    run_selected(cfg, |_| true)
}

/// Runs the suites whose name satisfies `select`, merged by name.
pub fn run_selected(cfg: &VerifyConfig, select: impl Fn(&str) -> bool + Sync) -> VerifyReport {
    let start = Instant::now();
    let suites: Vec<Suite> = catalog().into_iter().filter(|s| select(s.name)).collect();
    let mut jobs = Vec::new();
    for (si, s) in suites.iter().enumerate() {
        for &dim in &cfg.dims {
            if s.max_dim.is_some_and(|m| dim > m) {
                continue;
            }
            let cases = s.cap.map_or(cfg.count, |c| c.min(cfg.count));
            jobs.extend((0..cases).map(|case| (si, dim, case)));
        }
    }
    let outcomes: Vec<(usize, usize, usize, u64, f64)> = jobs
        .par_iter()
        .map(|&(si, dim, index)| {
            let s = &suites[si];
            let seed = case_seed(cfg.seed, s.name, dim, index);
            let mut case = Case {
                rng: ChaCha8Rng::seed_from_u64(seed),
                dim,
                tol: cfg.tol.max(DECISION_TOL_FLOOR),
                index,
                worst: 0.0,
            };
            (s.run)(&mut case);
            (si, dim, index, seed, case.worst)
        })
        .collect();

    let mut results: Vec<SuiteResult> = suites
        .iter()
        .map(|s| SuiteResult {
            name: s.name,
            cases: 0,
            threshold: s.factor * cfg.tol,
            max_residual: 0.0,
            failure_count: 0,
            failures: Vec::new(),
        })
        .collect();
    for (si, dim, case, seed, residual) in outcomes {
        let r = &mut results[si];
        r.cases += 1;
        r.max_residual = r.max_residual.max(residual);
        if residual > r.threshold {
            r.failure_count += 1;
            if r.failures.len() < MAX_LISTED_FAILURES {
                r.failures.push(Failure {
                    dim,
                    case,
                    digest: format!("{seed:016x}"),
                    residual,
                });
            }
        }
    }
    results.sort_by(|a, b| a.name.cmp(b.name));
    VerifyReport {
        suites: results,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

fn catalog() -> Vec<Suite> {
    vec![
        suite("linalg.inner_hermitian", 0.01, linalg_inner),
        suite("linalg.random_unitary", 0.01, linalg_unitary),
        suite("linalg.rank_one_minors", 0.01, linalg_minors),
        Suite {
            cap: Some(334),
            ..suite("linalg.rank_one_spectrum", 1.0, linalg_rank_one_spectrum)
        },
        Suite {
            cap: Some(334),
            ..suite("linalg.positive_sqrt", 1.0, linalg_positive_sqrt)
        },
        Suite {
            cap: Some(334),
            ..suite(
                "linalg.hermitian_reconstruction",
                1.0,
                linalg_reconstruction,
            )
        },
        suite("linalg.eig_2x2_residual", 1.0, linalg_eig2),
        suite("ball.preservation", 0.0, ball_preservation),
        suite("ball.boundary_to_boundary", 1.0, ball_boundary),
        suite("ball.isometry_invariance", 10.0, ball_isometry),
        suite("ball.metric_axioms", 10.0, ball_metric),
        suite("ball.origin_distance", 0.01, ball_origin),
        suite("ball.sup_oracle", 10.0, ball_sup),
        suite("ball.disk_restriction", 1.0, ball_disk),
        suite("group.form_preservation", 1.0, group_form),
        suite("group.constraint_pair", 1.0, group_constraints),
        Suite {
            cap: Some(200),
            ..suite("group.homomorphism", 10.0, group_homomorphism)
        },
        suite("group.kernel_is_center", 1.0, group_kernel),
        suite("group.center_commutes", 1.0, group_center),
        suite("group.inverse", 0.1, group_inverse),
        suite("group.adjoint", 0.01, group_adjoint),
        suite("group.adjoint_in_group", 1.0, group_adjoint_form),
        suite("group.associativity", 10.0, group_assoc),
        suite("group.canonical_round_trip", 10.0, group_roundtrip),
        suite("group.unitary_selfadjoint_split", 1.0, group_split),
        suite("group.from_point", 1.0, group_from_point),
        suite("classify.reducing_oracle", 0.1, classify_oracle),
        suite("classify.reducing_identities", 1.0, classify_identities),
        suite("classify.normal", 100.0, classify_normal),
        suite("classify.involutory", 100.0, classify_involutory),
        Suite {
            cap: Some(334),
            ..suite("classify.selfadjoint_spectrum", 100.0, classify_selfadjoint)
        },
        suite(
            "classify.parabolic_discriminant",
            0.01,
            classify_parabolic_disc,
        ),
        suite(
            "classify.parabolic_fixed_point",
            1.0,
            classify_parabolic_point,
        ),
        suite(
            "classify.fixed_point_residual",
            1000.0,
            classify_fixed_residual,
        ),
        suite("classify.predicate_consistency", 0.0, classify_predicates),
        Suite {
            cap: Some(25),
            max_dim: Some(8),
            ..suite("classify.iteration_agreement", 0.0, classify_iteration)
        },
        suite("classify.reduction", 0.0, classify_reduction),
        suite("classify.unitary_equivalence", 0.01, classify_equivalence),
    ]
}

// helpers

fn rel(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}

fn any_family(case: &mut Case) -> GElement {
    let f = Family::ALL[case.index % Family::ALL.len()];
    sample(f, case.dim, &mut case.rng)
}

fn uniform(case: &mut Case) -> GElement {
    sample(Family::Uniform, case.dim, &mut case.rng)
}

fn point(case: &mut Case) -> BallPoint {
    random_ball_point(&mut case.rng, case.dim)
}

fn act_diff(f: &GElement, g: &GElement, x: &ComplexVector) -> f64 {
    match (f.act(x), g.act(x)) {
        (Ok(p), Ok(q)) => (&p - &q).max_abs(),
        _ => f64::INFINITY,
    }
}

fn compressed(t: &GElement) -> ComplexMatrix {
    // phase-stripped matrix restricted to span{(ξ/‖ξ‖, 0), e_{n+1}}
    let n = t.dim();
    let m = t.strip_phase().matrix();
    let e = t
        .xi()
        .normalized()
        .expect("nonzero xi")
        .extended(Complex::new(0.0, 0.0));
    let last = ComplexVector::basis(n + 1, n);
    let basis = [e, last];
    ComplexMatrix::from_fn(2, 2, |i, j| dot_unchecked(&m.mul_vec(&basis[j]), &basis[i]))
}

fn reducing_element(case: &mut Case) -> GElement {
    let f = [
        Family::Reducing,
        Family::Normal,
        Family::Involutory,
        Family::Parabolic,
    ][case.index % 4];
    sample(f, case.dim, &mut case.rng)
}

// linalg

fn linalg_inner(case: &mut Case) {
    let x = gaussian_vector(&mut case.rng, case.dim);
    let y = gaussian_vector(&mut case.rng, case.dim);
    let c = Complex::new(case.rng.random(), case.rng.random());
    let xy = dot_unchecked(&x, &y);
    case.check((xy - dot_unchecked(&y, &x).conj()).norm());
    // linear in the first slot, conjugate-linear in the second
    case.check(rel(
        (dot_unchecked(&x.scale(c), &y) - c * xy).norm(),
        xy.norm(),
    ));
    case.check(rel(
        (dot_unchecked(&x, &y.scale(c)) - c.conj() * xy).norm(),
        xy.norm(),
    ));
    let xx = dot_unchecked(&x, &x);
    case.check(xx.im.abs());
    case.require(xx.re >= 0.0);
}

fn linalg_unitary(case: &mut Case) {
    let u = random_unitary_from_rng(&mut case.rng, case.dim);
    case.check(u.unitarity_residual());
}

fn linalg_minors(case: &mut Case) {
    let n = case.dim;
    let xi = random_xi(&mut case.rng, n);
    let a = (1.0 + xi.norm_sqr()).sqrt();
    let d = &rank_one_update(Complex::new((a - 1.0) / xi.norm_sqr(), 0.0), &xi)
        - &ComplexMatrix::identity(n);
    let scale = d.max_abs().powi(2);
    for _ in 0..64 {
        let (i, k) = (case.rng.random_range(0..n), case.rng.random_range(0..n));
        let (j, l) = (case.rng.random_range(0..n), case.rng.random_range(0..n));
        let minor = d[(i, j)] * d[(k, l)] - d[(i, l)] * d[(k, j)];
        case.check(minor.norm() / scale);
    }
}

fn linalg_rank_one_spectrum(case: &mut Case) {
    let xi = random_xi(&mut case.rng, case.dim);
    let s = rank_one_update(Complex::new(1.0, 0.0), &xi);
    let Ok(eig) = hermitian_eig(&s, case.tol) else {
        return case.require(false);
    };
    let top = 1.0 + xi.norm_sqr();
    case.check((eig.values[0].re - top).abs() / top);
    for v in &eig.values[1..] {
        case.check((v.re - 1.0).abs() / top);
    }
}

fn linalg_positive_sqrt(case: &mut Case) {
    let g = uniform(case);
    let s = rank_one_update(Complex::new(1.0, 0.0), g.xi());
    let Ok(eig) = hermitian_eig(&s, case.tol) else {
        return case.require(false);
    };
    let root: Vec<Complex> = eig
        .values
        .iter()
        .map(|v| Complex::new(v.re.sqrt(), 0.0))
        .collect();
    let sqrt = &(&eig.vectors * &ComplexMatrix::from_diag(&root)) * &eig.vectors.adjoint();
    let a = g.a_operator();
    case.check(rel(sqrt.max_diff(&a), a.max_abs()));
    case.check(rel((&a * &a).max_diff(&s), s.max_abs()));
}

fn linalg_reconstruction(case: &mut Case) {
    let n = case.dim;
    let cols: Vec<ComplexVector> = (0..n).map(|_| gaussian_vector(&mut case.rng, n)).collect();
    let g = ComplexMatrix::from_columns(&cols);
    let h = (&g + &g.adjoint()).scale(Complex::new(0.5, 0.0));
    let Ok(eig) = hermitian_eig(&h, case.tol) else {
        return case.require(false);
    };
    let recon = &(&eig.vectors * &ComplexMatrix::from_diag(&eig.values)) * &eig.vectors.adjoint();
    case.check(rel(recon.max_diff(&h), h.max_abs()));
    case.check(eig.vectors.unitarity_residual());
    case.require(eig.values.windows(2).all(|w| w[0].re >= w[1].re));
}

fn linalg_eig2(case: &mut Case) {
    let m = ComplexMatrix::from_fn(2, 2, |_, _| {
        Complex::new(
            case.rng.random_range(-1.0..1.0),
            case.rng.random_range(-1.0..1.0),
        )
    });
    let eig = eig_2x2(&m);
    let scale = m.max_abs();
    for i in 0..eig.vectors.cols() {
        let v = eig.vector(i);
        let r = m.mul_vec(&v).axpy(-eig.values[i], &v).norm();
        case.check(rel(r, scale * v.norm()));
    }
    let trace = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    case.check(rel((eig.values[0] + eig.values[1] - trace).norm(), scale));
    case.check(rel(
        (eig.values[0] * eig.values[1] - det).norm(),
        scale * scale,
    ));
}

// ball

fn ball_preservation(case: &mut Case) {
    let g = uniform(case);
    let x = point(case);
    case.require(g.apply(&x).is_ok_and(|y| y.norm() < 1.0));
    let u = random_unitary_from_rng(&mut case.rng, case.dim);
    let f = MobiusMap::new(u, point(case).into_vector()).expect("unitary");
    case.require(f.apply(&x).is_ok_and(|y| y.norm() < 1.0));
}

fn ball_boundary(case: &mut Case) {
    let g = uniform(case);
    let x = random_unit_vector(&mut case.rng, case.dim);
    match g.to_mobius().apply_boundary(&x) {
        Ok(y) => case.check((y.norm() - 1.0).abs()),
        Err(_) => case.require(false),
    }
}

fn ball_isometry(case: &mut Case) {
    let g = uniform(case);
    let (x, y) = (point(case), point(case));
    let (Ok(gx), Ok(gy)) = (g.apply(&x), g.apply(&y)) else {
        return case.require(false);
    };
    case.check((caratheodory_distance(&gx, &gy) - caratheodory_distance(&x, &y)).abs());
}

fn ball_metric(case: &mut Case) {
    let (x, y, z) = (point(case), point(case), point(case));
    let dxy = caratheodory_distance(&x, &y);
    case.check((dxy - caratheodory_distance(&y, &x)).abs());
    case.check((caratheodory_distance(&x, &z) - dxy - caratheodory_distance(&y, &z)).max(0.0));
    case.check(caratheodory_distance(&x, &x));
    case.require(dxy >= 0.0);
}

fn ball_origin(case: &mut Case) {
    let y = point(case);
    let d = caratheodory_distance(&BallPoint::origin(case.dim), &y);
    case.check(rel((d - y.norm().atanh()).abs(), d));
}

fn ball_sup(case: &mut Case) {
    let (x, y) = (point(case), point(case));
    let closed = caratheodory_distance(&x, &y);
    let bound = caratheodory_lower_bound(&x, &y, 16, case.rng.random());
    case.check((closed - bound).abs());
}

fn ball_disk(case: &mut Case) {
    let disk = |rng: &mut ChaCha8Rng| {
        Complex::from_polar(
            0.98 * rng.random::<f64>().sqrt(),
            rng.random_range(0.0..TAU),
        )
    };
    let (z, w) = (disk(&mut case.rng), disk(&mut case.rng));
    let u = random_unit_vector(&mut case.rng, case.dim);
    let (Ok(x), Ok(y)) = (BallPoint::new(u.scale(z)), BallPoint::new(u.scale(w))) else {
        return case.require(false);
    };
    let Ok(rho) = poincare_distance(z, w) else {
        return case.require(false);
    };
    case.check((caratheodory_distance(&x, &y) - rho).abs());
}

// group

fn group_form(case: &mut Case) {
    let g = any_family(case);
    case.check(g.form_matrix().form_residual());
}

fn group_constraints(case: &mut Case) {
    let g = any_family(case);
    let a = g.a();
    case.check((a * a - 1.0 - g.xi().norm_sqr()).abs() / (a * a));
    // from the matrix alone: with B = e^{-iθ}M₁₁ and ζ = e^{-iθ}M₁₂,
    // B^*B = I + (B^*ζ)(B^*ζ)^*/a²
    let n = g.dim();
    let m = g.matrix();
    let unphase = Complex::from_polar(1.0, -g.theta());
    let b = m.block(0, 0, n, n).scale(unphase);
    let zeta = m.block(0, n, n, 1).column(0).scale(unphase);
    let a_m = (m[(n, n)] * unphase).re;
    let w = b.adjoint().mul_vec(&zeta);
    let rhs = rank_one_update(Complex::new(1.0 / (a_m * a_m), 0.0), &w);
    let lhs = &b.adjoint() * &b;
    case.check(rel(lhs.max_diff(&rhs), lhs.max_abs()));
}

fn group_homomorphism(case: &mut Case) {
    let (s, t) = (uniform(case), uniform(case));
    let Ok(st) = s.compose(&t) else {
        return case.require(false);
    };
    for _ in 0..20 {
        let x = point(case);
        match (st.apply(&x), t.apply(&x).and_then(|y| s.apply(&y))) {
            (Ok(p), Ok(q)) => case.check((p.vector() - q.vector()).max_abs()),
            _ => case.require(false),
        }
    }
}

fn group_kernel(case: &mut Case) {
    let t = uniform(case);
    let z = GElement::center(case.dim, case.rng.random_range(0.0..TAU));
    let Ok(zt) = z.compose(&t) else {
        return case.require(false);
    };
    let x = point(case).into_vector();
    case.check(act_diff(&zt, &t, &x));
}

fn group_center(case: &mut Case) {
    let t = uniform(case);
    let z = GElement::center(case.dim, case.rng.random_range(0.0..TAU)).matrix();
    let m = t.matrix();
    case.check(rel((&z * &m).max_diff(&(&m * &z)), m.max_abs()));
}

fn group_inverse(case: &mut Case) {
    let t = any_family(case);
    let id = ComplexMatrix::identity(case.dim + 1);
    let (m, mi) = (t.matrix(), t.inverse().matrix());
    case.check((&m * &mi).max_diff(&id));
    case.check((&mi * &m).max_diff(&id));
}

fn group_adjoint(case: &mut Case) {
    let t = any_family(case);
    case.check(t.adjoint_g().matrix().max_diff(&t.matrix().adjoint()));
}

fn group_adjoint_form(case: &mut Case) {
    let t = any_family(case);
    let adj = t.adjoint_g();
    case.check(adj.form_residual());
    // T^{-1} = A' T^* A'
    let ap = form_operator(case.dim);
    let via_form = &(&ap * adj.matrix()) * &ap;
    case.check(rel(
        via_form.max_diff(&t.inverse().matrix()),
        via_form.max_abs(),
    ));
}

fn group_assoc(case: &mut Case) {
    let (r, s, t) = (uniform(case), uniform(case), uniform(case));
    let left = r.compose(&s).and_then(|rs| rs.compose(&t));
    let right = s.compose(&t).and_then(|st| r.compose(&st));
    match (left, right) {
        (Ok(l), Ok(rr)) => {
            let (ml, mr) = (l.matrix(), rr.matrix());
            case.check(rel(ml.max_diff(&mr), ml.max_abs()));
        }
        _ => case.require(false),
    }
}

fn group_roundtrip(case: &mut Case) {
    let t = any_family(case);
    match t.form_matrix().canonicalize(case.tol) {
        Ok(c) => {
            let m = t.matrix();
            case.check(rel(c.matrix().max_diff(&m), m.max_abs()));
        }
        Err(_) => case.require(false),
    }
}

fn group_split(case: &mut Case) {
    let t = uniform(case);
    let (v, t1) = t.unitary_selfadjoint_split();
    case.require(is_unitary_elem(&v, 0.0));
    case.require(is_self_adjoint_elem(&t1, case.tol));
    let m = t.matrix();
    case.check(rel((&v.matrix() * &t1.matrix()).max_diff(&m), m.max_abs()));
}

fn group_from_point(case: &mut Case) {
    let x0 = point(case);
    let g = GElement::from_point(&x0);
    let f = MobiusMap::from_point(&x0);
    let x = point(case);
    match (g.apply(&x), f.apply(&x)) {
        (Ok(p), Ok(q)) => case.check((p.vector() - q.vector()).max_abs()),
        _ => case.require(false),
    }
    case.check(g.apply(&x0).map_or(f64::INFINITY, |p| p.norm()));
}

// classify

fn classify_oracle(case: &mut Case) {
    let t = reducing_element(case);
    let Ok(spec) = reducing_spectrum(&t, case.tol) else {
        return case.require(false);
    };
    let oracle = eig_2x2(&compressed(&t));
    let (o1, o2) = (oracle.values[0], oracle.values[1]);
    let scale = spec.lambda1.norm().max(spec.lambda2.norm());
    if spec.is_double_root() {
        // a double eigenvalue is only √ε-determined; its pair mean is well conditioned
        let mean = (spec.lambda1 + spec.lambda2 - o1 - o2) / 2.0;
        return case.check(rel(mean.norm(), scale));
    }
    let same = (spec.lambda1 - o1).norm().max((spec.lambda2 - o2).norm());
    let swapped = (spec.lambda1 - o2).norm().max((spec.lambda2 - o1).norm());
    case.check(rel(same.min(swapped), scale));
    if oracle.defective {
        return case.require(false);
    }
    // fixed-point coordinate kᵢ‖ξ‖ from the oracle eigenvector (y₀, y₁)
    let nx = spec.xi_norm;
    let coord = |i: usize| {
        let v = oracle.vector(i);
        v[0] / v[1]
    };
    let pair = if same <= swapped {
        [spec.k1, spec.k2]
    } else {
        [spec.k2, spec.k1]
    };
    for (i, k) in pair.iter().enumerate() {
        let want = k * nx;
        case.check(rel((coord(i) - want).norm(), want.norm()));
    }
}

fn classify_identities(case: &mut Case) {
    let t = reducing_element(case);
    let Ok(s) = reducing_spectrum(&t, case.tol) else {
        return case.require(false);
    };
    let nsq = s.xi_norm * s.xi_norm;
    case.check((s.lambda1 * s.lambda2 - s.r).norm());
    case.check(((s.k1 * s.xi_norm).norm() * (s.k2 * s.xi_norm).norm() - 1.0).abs());
    case.check(rel((s.k1 * s.k2 + s.r / nsq).norm(), 1.0 / nsq));
    let m = t.strip_phase().matrix();
    for (k, lambda) in [(s.k1, s.lambda1), (s.k2, s.lambda2)] {
        let y = t.xi().scale(k).extended(Complex::new(1.0, 0.0));
        let resid = m.mul_vec(&y).axpy(-lambda, &y).norm();
        case.check(resid / (m.max_abs() * y.norm()));
        case.check(rel((k * nsq + s.a - lambda).norm(), lambda.norm()));
    }
}

fn classify_normal(case: &mut Case) {
    let tol = case.tol;
    let normal = sample(Family::Normal, case.dim, &mut case.rng);
    let scale = normal.matrix().max_abs().powi(2);
    case.require(is_normal_elem(&normal, tol));
    case.check(normal_commutator_residual(&normal) / scale / 100.0);

    // a reducing element with r far from 1 is not normal, by either test
    let xi = random_xi(&mut case.rng, case.dim);
    let r = Complex::from_polar(1.0, case.rng.random_range(0.5..5.7));
    let other = reducing_with(case.rng.random_range(0.0..TAU), &xi, r);
    case.require(!is_normal_elem(&other, tol));
    case.require(normal_commutator_residual(&other) > 1e3 * tol * other.matrix().max_abs().powi(2));

    let Ok(s) = reducing_spectrum(&normal, tol) else {
        return case.require(false);
    };
    let (a, nx) = (normal.a(), normal.xi().norm());
    case.check(
        (s.lambda1 - (a + nx))
            .norm()
            .max((s.lambda2 - (a - nx)).norm())
            / a,
    );
    case.check((s.lambda1 * s.lambda2 - 1.0).norm());

    let c = dynamical_type(&normal, tol);
    case.require(c.kind == Kind::Hyperbolic && c.fixed_points.len() == 2);
    let e = normal.xi().scale_real(1.0 / nx);
    for fp in &c.fixed_points {
        let d = (&fp.point - &e).max_abs().min((&fp.point + &e).max_abs());
        case.check(d);
    }
}

fn classify_involutory(case: &mut Case) {
    let t = sample(Family::Involutory, case.dim, &mut case.rng);
    let c = dynamical_type(&t, case.tol);
    case.require(c.kind == Kind::Elliptic);
    let (a, nsq) = (t.a(), t.xi().norm_sqr());
    let want = t.xi().scale_real((1.0 - a) / nsq);
    let Some(fp) = c
        .fixed_points
        .iter()
        .find(|p| p.location == Location::Interior)
    else {
        return case.require(false);
    };
    case.check((&fp.point - &want).max_abs());
    case.check((fp.point.norm() - (a - 1.0) / nsq.sqrt()).abs());
    if let Ok(s) = reducing_spectrum(&t, case.tol) {
        case.check((s.lambda1 - 1.0).norm().min((s.lambda1 + 1.0).norm()));
    }
}

fn classify_selfadjoint(case: &mut Case) {
    // T Hermitian: its full spectrum is ±{a + ‖ξ‖, a - ‖ξ‖} plus ±1 on <ξ>^⊥
    let t = sample(Family::SelfAdjoint, case.dim, &mut case.rng);
    case.require(is_self_adjoint_elem(&t, case.tol));
    case.require(is_normal_elem(&t, case.tol));
    let m = t.matrix();
    let Ok(eig) = hermitian_eig(&m, case.tol) else {
        return case.require(false);
    };
    let sign = Complex::from_polar(1.0, t.theta()).re.signum();
    let (a, nx) = (t.a(), t.xi().norm());
    let mut expected = vec![sign * (a + nx), sign * (a - nx)];
    let u_eig = match hermitian_eig(t.unitary(), case.tol) {
        Ok(e) => e,
        Err(_) => return case.require(false),
    };
    // drop the eigenvalue 1 belonging to ξ itself
    let mut rest: Vec<f64> = u_eig.values.iter().map(|v| v.re).collect();
    if let Some(pos) = rest.iter().position(|v| (v - 1.0).abs() < 1e-6) {
        rest.remove(pos);
    }
    for v in &rest {
        case.check((v.abs() - 1.0).abs());
    }
    expected.extend(rest.iter().map(|v| sign * v));
    expected.sort_by(|x, y| y.total_cmp(x));
    let got: Vec<f64> = eig.values.iter().map(|v| v.re).collect();
    for (g, e) in got.iter().zip(&expected) {
        case.check((g - e).abs() / a);
    }
}

fn classify_parabolic_disc(case: &mut Case) {
    let t = sample(Family::Parabolic, case.dim, &mut case.rng);
    match reducing_spectrum(&t, case.tol) {
        Ok(s) => case.check(s.discriminant.norm()),
        Err(_) => case.require(false),
    }
}

fn classify_parabolic_point(case: &mut Case) {
    let t = sample(Family::Parabolic, case.dim, &mut case.rng);
    let c = dynamical_type(&t, case.tol);
    case.require(c.kind == Kind::Parabolic && c.fixed_points.len() == 1);
    let Some(s) = c.spectrum else {
        return case.require(false);
    };
    case.check(((s.double_k() * s.xi_norm).norm() - 1.0).abs());
    for fp in &c.fixed_points {
        case.check((fp.point.norm() - 1.0).abs());
    }
}

fn classify_fixed_residual(case: &mut Case) {
    let t = reducing_element(case);
    let c = dynamical_type(&t, case.tol);
    case.require(c.kind != Kind::Undetermined || c.fixed_points.is_empty());
    for fp in &c.fixed_points {
        match t.act(&fp.point) {
            Ok(y) => case.check((&y - &fp.point).max_abs() / 10.0),
            Err(_) => case.require(false),
        }
        case.check((dot_unchecked(&fp.point, t.xi()) + t.a() - fp.eigenvalue).norm());
    }
}

fn classify_predicates(case: &mut Case) {
    let tol = case.tol;
    let t = any_family(case);
    let sa = is_self_adjoint_elem(&t, tol);
    let inv = is_involutory_elem(&t, tol);
    let normal = is_normal_elem(&t, tol);
    let unitary = is_unitary_elem(&t, tol);
    case.require(!sa || normal);
    case.require(!unitary || normal);
    case.require(!(inv && !unitary && normal));
    // Uξ = ξ agrees with the commutator test
    let scale = t.matrix().max_abs().powi(2);
    let commutes = normal_commutator_residual(&t) <= 1e3 * tol * scale;
    case.require(commutes == normal);
}

fn classify_iteration(case: &mut Case) {
    let f = [Family::Normal, Family::Reducing, Family::Involutory][case.index % 3];
    let t = sample(f, case.dim, &mut case.rng);
    let closed = dynamical_type(&t, case.tol);
    let iterated = classify_by_iteration(&t, case.tol, DEFAULT_MAXIT);
    if iterated.kind != Kind::Undetermined {
        case.require(iterated.kind == closed.kind);
        for fp in &iterated.fixed_points {
            let near = closed
                .fixed_points
                .iter()
                .any(|c| (&c.point - &fp.point).max_abs() <= 1e-6);
            case.require(near);
        }
    }
}

fn invariant_subspace(case: &mut Case, xi: &ComplexVector) -> (ComplexMatrix, Vec<ComplexVector>) {
    // U = Q diag(W_K, W_⊥) Q^* with the first m columns of Q spanning K ∋ ξ
    let n = case.dim;
    let m = case.rng.random_range(1..n);
    let mut cols = vec![xi.normalized().expect("nonzero xi")];
    cols.extend((1..n).map(|_| gaussian_vector(&mut case.rng, n)));
    let q = orthonormalize_columns(&ComplexMatrix::from_columns(&cols));
    let mut inner = ComplexMatrix::zeros(n, n);
    inner.set_block(0, 0, &random_unitary_from_rng(&mut case.rng, m));
    inner.set_block(m, m, &random_unitary_from_rng(&mut case.rng, n - m));
    let u = (&(&q * &inner) * &q.adjoint()).polish_unitary();
    let basis = (0..m).map(|j| q.column(j)).collect();
    (u, basis)
}

fn classify_reduction(case: &mut Case) {
    let tol = case.tol;
    let reducing = sample(Family::Reducing, case.dim, &mut case.rng);
    let e = reducing.xi().normalized().expect("nonzero xi");
    case.require(reduces(&reducing, &[e], tol).unwrap_or(false));

    // uniform: reduces(T, <ξ>) iff ‖Uξ - rξ‖ <= tol‖ξ‖
    let t = uniform(case);
    let e = t.xi().normalized().expect("nonzero xi");
    let by_ratio = reducing_ratio(&t, tol).is_ok();
    case.require(reduces(&t, &[e], tol).unwrap_or(false) == by_ratio);

    // K + C reduces T for U-invariant K containing ξ
    let xi = random_xi(&mut case.rng, case.dim);
    let (u, basis) = invariant_subspace(case, &xi);
    let theta = case.rng.random_range(0.0..TAU);
    let Ok(t) = GElement::make(theta, u, xi) else {
        return case.require(false);
    };
    case.require(reduces(&t, &basis, tol).unwrap_or(false));
}

fn classify_equivalence(case: &mut Case) {
    let n = case.dim;
    let xi = random_xi(&mut case.rng, n);
    let minus_i = ComplexMatrix::identity(n).scale(Complex::new(-1.0, 0.0));
    let t = GElement::make(0.0, ComplexMatrix::identity(n), xi.clone()).expect("identity");
    case.require(check_unitary_equiv_inverse(&t, &minus_i, case.tol).unwrap_or(false));
    case.check(conjugation_residual(&t, &minus_i));
    let perturbed = GElement::make(std::f64::consts::FRAC_PI_2, ComplexMatrix::identity(n), xi)
        .expect("identity");
    case.require(!check_unitary_equiv_inverse(&perturbed, &minus_i, case.tol).unwrap_or(true));

    // self-adjoint elements with U = diag-in-frame signs: V = -U works too
    let q = random_unitary_from_rng(&mut case.rng, n);
    let xi = random_xi(&mut case.rng, n);
    let frame = orthonormalize_columns(&ComplexMatrix::from_columns(
        &std::iter::once(xi.normalized().expect("nonzero xi"))
            .chain((1..n).map(|j| q.column(j)))
            .collect::<Vec<_>>(),
    ));
    let signs: Vec<Complex> = (1..n)
        .map(|j| Complex::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let u = unitary_with_eigvec(
        &frame,
        Complex::new(1.0, 0.0),
        &ComplexMatrix::from_diag(&signs),
    );
    if let Ok(sa) = GElement::make(0.0, u.clone(), xi) {
        let v = u.scale(Complex::new(-1.0, 0.0));
        case.require(check_unitary_equiv_inverse(&sa, &v, 100.0 * case.tol).unwrap_or(false));
    }
}
