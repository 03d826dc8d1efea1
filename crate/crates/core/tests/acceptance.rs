//! Acceptance gate: one line per criterion, with the pinned tolerances.
//!
//! Each criterion combines fixed worked examples with the matching property
//! suites run at n ∈ {2, 8, 32} and 1000 cases per dimension.

use std::fs;
use std::path::Path;
use std::process::Command;

use hyperball::ball::{caratheodory_distance, caratheodory_lower_bound, BallPoint};
use hyperball::classify::*;
use hyperball::cli::verify::{run_selected, VerifyConfig, VerifyReport};
use hyperball::families::{reducing_with, sample, Family};
use hyperball::group::GElement;
use hyperball::linalg::{eig_2x2, Complex, ComplexMatrix, ComplexVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn bound(&mut self, label: &str, value: f64, limit: f64) {
        let ok = value <= limit;
        self.pass &= ok;
        self.details.push(format!(
            "{label} {value:.2e} <= {limit:.0e}{}",
            if ok { "" } else { " (violated)" }
        ));
    }

    fn holds(&mut self, label: &str, ok: bool) {
        self.pass &= ok;
        if !ok {
            self.details.push(format!("{label} (violated)"));
        }
    }

    fn suites(&mut self, names: &[&str]) {
        let report = catalog(names);
        for name in names {
            let s = report
                .suite(name)
                .unwrap_or_else(|| panic!("unknown suite {name}"));
            self.pass &= s.passed();
            self.details.push(format!(
                "{name}[{}] max {:.2e} <= {:.0e}{}",
                s.cases,
                s.max_residual,
                s.threshold,
                if s.passed() { "" } else { " (FAILED)" }
            ));
        }
    }
}

fn catalog(names: &[&str]) -> VerifyReport {
    let cfg = VerifyConfig {
        dims: vec![2, 8, 32],
        seed: 2024,
        tol: TOL,
        count: 1000,
    };
    run_selected(&cfg, |n| names.contains(&n))
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// ξ with ‖ξ‖ = 0.75, so a = 1.25.
fn xi_075() -> ComplexVector {
    ComplexVector::from_vec(vec![c(0.45, 0.0), c(0.0, 0.6)])
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    o.suites(&["group.form_preservation"]);
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let g = GElement::make(0.3, ComplexMatrix::identity(2), xi_075()).unwrap();
    o.bound("a(‖ξ‖=0.75) - 1.25", (g.a() - 1.25).abs(), 1e-15);
    o.suites(&["group.constraint_pair"]);
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    o.suites(&["group.homomorphism", "group.kernel_is_center"]);
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    o.suites(&["group.inverse", "group.adjoint"]);
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    // worked example: involution on <ξ>, a = 1.25
    let t = reducing_with(0.0, &xi_075(), c(-1.0, 0.0));
    let s = reducing_spectrum(&t, TOL).unwrap();
    let lambdas = (s.lambda1 - 1.0).norm().max((s.lambda2 + 1.0).norm());
    o.bound("λ = (1, -1)", lambdas, 1e-12);
    let ks = (s.k1 - c(-4.0 / 9.0, 0.0))
        .norm()
        .max((s.k2 - c(-4.0, 0.0)).norm());
    o.bound("k = (-4/9, -4)", ks, 1e-12);
    // the same numbers from the characteristic polynomial of the 2×2 compression
    let m = ComplexMatrix::from_rows(&[
        vec![c(-1.25, 0.0), c(-0.75, 0.0)],
        vec![c(0.75, 0.0), c(1.25, 0.0)],
    ]);
    let e = eig_2x2(&m);
    let mut vals: Vec<f64> = e.values.iter().map(|v| v.re).collect();
    vals.sort_by(f64::total_cmp);
    o.bound(
        "2x2 oracle",
        (vals[0] + 1.0).abs().max((vals[1] - 1.0).abs()),
        1e-12,
    );
    o.suites(&["classify.reducing_oracle", "classify.reducing_identities"]);
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let normal = GElement::make(0.0, ComplexMatrix::identity(2), xi_075()).unwrap();
    let s = reducing_spectrum(&normal, TOL).unwrap();
    o.bound(
        "normal λ = (2, 0.5)",
        (s.lambda1 - 2.0).norm().max((s.lambda2 - 0.5).norm()),
        1e-12,
    );
    o.holds(
        "normal ⇒ Hyperbolic",
        dynamical_type(&normal, TOL).kind == Kind::Hyperbolic,
    );
    let inv = reducing_with(0.0, &xi_075(), c(-1.0, 0.0));
    let ct = dynamical_type(&inv, TOL);
    o.holds("involutory ⇒ Elliptic", ct.kind == Kind::Elliptic);
    if let Some(fp) = ct.fixed_points.first() {
        o.bound(
            "interior point ‖x‖ - 1/3",
            (fp.point.norm() - 1.0 / 3.0).abs(),
            1e-12,
        );
    }
    o.suites(&[
        "classify.normal",
        "classify.involutory",
        "classify.predicate_consistency",
        "classify.selfadjoint_spectrum",
    ]);
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    // a = 1.25: cos arg r = 2/a² - 1 = 0.28, so r = 0.28 + 0.96i
    let t = reducing_with(0.0, &xi_075(), c(0.28, 0.96));
    let s = reducing_spectrum(&t, TOL).unwrap();
    o.bound("|disc|", s.discriminant.norm(), 1e-12);
    o.bound(
        "k - (-0.8 + 16/15 i)",
        (s.double_k() - c(-0.8, 16.0 / 15.0)).norm(),
        1e-12,
    );
    let ct = dynamical_type(&t, TOL);
    o.holds(
        "Parabolic",
        ct.kind == Kind::Parabolic && ct.fixed_points.len() == 1,
    );
    o.suites(&[
        "classify.parabolic_discriminant",
        "classify.parabolic_fixed_point",
    ]);
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let origin = BallPoint::origin(3);
    let y = BallPoint::new(ComplexVector::from_real(&[0.6, 0.0, 0.0])).unwrap();
    o.bound(
        "C(0, 0.6e₁) - ln 2",
        (caratheodory_distance(&origin, &y) - 2f64.ln()).abs(),
        1e-12,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut sup_excess = 0.0f64;
    for n in [2usize, 8, 32] {
        for _ in 0..200 {
            let x = hyperball::families::random_ball_point(&mut rng, n);
            let y = hyperball::families::random_ball_point(&mut rng, n);
            worst = worst
                .max((caratheodory_distance(&BallPoint::origin(n), &y) - y.norm().atanh()).abs());
            // random functionals alone stay below the closed form
            let bound = caratheodory_lower_bound(&x, &y, 8, 1);
            sup_excess = sup_excess.max(bound - caratheodory_distance(&x, &y));
        }
    }
    o.bound("C(0, y) - atanh‖y‖", worst, 1e-12);
    o.bound("sup oracle excess", sup_excess.max(0.0), 1e-9);
    o.suites(&[
        "ball.origin_distance",
        "ball.isometry_invariance",
        "ball.sup_oracle",
    ]);
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let n = 4;
    let xi = ComplexVector::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, -0.4), c(0.7, 0.0)]);
    let minus_i = ComplexMatrix::identity(n).scale(c(-1.0, 0.0));
    let t = GElement::make(0.0, ComplexMatrix::identity(n), xi.clone()).unwrap();
    o.holds(
        "V = -I accepted",
        check_unitary_equiv_inverse(&t, &minus_i, 1e-12).unwrap(),
    );
    o.bound(
        "conjugation residual",
        conjugation_residual(&t, &minus_i),
        1e-12,
    );
    let perturbed =
        GElement::make(std::f64::consts::FRAC_PI_2, ComplexMatrix::identity(n), xi).unwrap();
    o.holds(
        "θ = π/2 rejected",
        !check_unitary_equiv_inverse(&perturbed, &minus_i, 1e-12).unwrap(),
    );
    o.suites(&["classify.unitary_equivalence"]);
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut agree = true;
    for n in [2usize, 8, 32] {
        for f in [Family::Uniform, Family::Reducing, Family::Normal] {
            for _ in 0..50 {
                let t = sample(f, n, &mut rng);
                let e = t.xi().normalized().unwrap();
                agree &= reduces(&t, &[e], TOL).unwrap() == reducing_ratio(&t, TOL).is_ok();
            }
        }
    }
    o.holds("reduces(<ξ>) ⇔ Uξ = rξ", agree);
    o.suites(&["classify.reduction"]);
    o
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperball"));
    cmd.env_remove("HYPERBALL_TOL");
    cmd
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = bin()
        .args([
            "gen", "--family", "normal", "--dim", "3", "--count", "2", "--seed", "7", "--out", out,
        ])
        .status()
        .unwrap();
    o.holds("gen exit 0", status.success());
    for name in ["normal_0000.gel.json", "normal_0001.gel.json"] {
        let got = fs::read(dir.path().join(name)).unwrap_or_default();
        let want = fs::read(golden.join("normal_d3_s7").join(name)).unwrap();
        o.holds(&format!("golden {name}"), got == want);
    }
    let input = golden.join("normal_d3_s7/normal_0000.gel.json");
    let report = bin()
        .args(["classify", input.to_str().unwrap()])
        .output()
        .unwrap();
    let want = fs::read(golden.join("normal_0000.classify.json")).unwrap();
    o.holds(
        "golden classify report",
        report.stdout == want && report.status.code() == Some(0),
    );
    let dist = bin()
        .args([
            "dist",
            golden.join("origin.point.json").to_str().unwrap(),
            golden.join("y06.point.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    o.holds(
        "dist prints 0.693147180560",
        dist.stdout == b"0.693147180560\n",
    );

    let corrupt = dir.path().join("corrupt.json");
    fs::write(&corrupt, "{").unwrap();
    o.holds(
        "corrupt input exits 2",
        exit_code(&["classify", corrupt.to_str().unwrap()]) == 2,
    );
    let outside = dir.path().join("outside.json");
    fs::write(&outside, r#"{"v":{"dim":1,"data":[[1.5,0.0]]}}"#).unwrap();
    let p = outside.to_str().unwrap();
    o.holds("out-of-ball exits 4", exit_code(&["dist", p, p]) == 4);
    let violation = dir.path().join("violation.json");
    fs::write(
        &violation,
        r#"{"M":{"rows":2,"cols":2,"data":[[2,0],[0,0],[0,0],[1,0]]}}"#,
    )
    .unwrap();
    o.holds(
        "form violation exits 4",
        exit_code(&["classify", violation.to_str().unwrap()]) == 4,
    );
    let rot = GElement::make(
        0.0,
        ComplexMatrix::from_diag(&[Complex::from_polar(1.0, 0.7), Complex::from_polar(1.0, 1.9)]),
        ComplexVector::from_real(&[0.05, 0.03]),
    )
    .unwrap();
    let rot_path = dir.path().join("rot.gel.json");
    fs::write(&rot_path, serde_json::to_string(&rot).unwrap()).unwrap();
    o.holds(
        "undetermined exits 3",
        exit_code(&["classify", rot_path.to_str().unwrap()]) == 3,
    );

    let verify = bin().arg("verify").output().unwrap();
    let text = String::from_utf8_lossy(&verify.stdout);
    let summary = text
        .lines()
        .rev()
        .find(|l| l.contains("suites,"))
        .unwrap_or("");
    o.holds("hyperball verify exits 0", verify.status.code() == Some(0));
    o.details.push(format!("verify: {summary}"));
    o
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("form invariance", criterion_1),
        ("constraint pair", criterion_2),
        ("homomorphism and kernel", criterion_3),
        ("closed-form inverse and adjoint", criterion_4),
        ("reducing spectra", criterion_5),
        ("special classes", criterion_6),
        ("parabolic family", criterion_7),
        ("metric", criterion_8),
        ("unitary equivalence to the inverse", criterion_9),
        ("reduction", criterion_10),
        ("CLI determinism and exit codes", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name}: {}",
            i + 1,
            outcome.details.join("; ")
        );
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
