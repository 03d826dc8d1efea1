use std::f64::consts::TAU;

use hyperball::ball::{caratheodory_distance, poincare_distance, BallPoint, MobiusMap};
use hyperball::classify::*;
use hyperball::families::{random_ball_point, random_xi, sample, Family};
use hyperball::group::{FormMatrix, GElement};
use hyperball::linalg::{
    eig_2x2, gaussian_vector, hermitian_eig, inner, random_unitary, Complex, ComplexMatrix,
    ComplexVector,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(96)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn inner_is_hermitian_and_sesquilinear(seed: u64, n in 1usize..12, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let mut r = rng(seed);
        let x = gaussian_vector(&mut r, n);
        let y = gaussian_vector(&mut r, n);
        let c = Complex::new(re, im);
        let xy = inner(&x, &y).unwrap();
        prop_assert!((xy - inner(&y, &x).unwrap().conj()).norm() < 1e-14);
        prop_assert!((inner(&x.scale(c), &y).unwrap() - c * xy).norm() < 1e-12);
        prop_assert!((inner(&x, &y.scale(c)).unwrap() - c.conj() * xy).norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary(seed: u64, n in 1usize..24) {
        prop_assert!(random_unitary(n, seed).unitarity_residual() <= 1e-12);
    }

    #[test]
    fn hermitian_eig_reconstructs(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let cols: Vec<ComplexVector> = (0..n).map(|_| gaussian_vector(&mut r, n)).collect();
        let g = ComplexMatrix::from_columns(&cols);
        let h = &g + &g.adjoint();
        let e = hermitian_eig(&h, 1e-10).unwrap();
        let back = &(&e.vectors * &ComplexMatrix::from_diag(&e.values)) * &e.vectors.adjoint();
        prop_assert!(back.max_diff(&h) <= 1e-10 * h.max_abs().max(1.0));
        prop_assert!(e.values.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn eig_2x2_satisfies_trace_and_determinant(vals in prop::array::uniform8(-3.0..3.0f64)) {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex::new(vals[0], vals[1]), Complex::new(vals[2], vals[3])],
            vec![Complex::new(vals[4], vals[5]), Complex::new(vals[6], vals[7])],
        ]);
        let e = eig_2x2(&m);
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let s = m.max_abs().max(1.0);
        prop_assert!((e.values[0] + e.values[1] - tr).norm() <= 1e-12 * s);
        prop_assert!((e.values[0] * e.values[1] - det).norm() <= 1e-12 * s * s);
    }

    #[test]
    fn mobius_maps_preserve_the_ball(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let x0 = random_ball_point(&mut r, n);
        let x = random_ball_point(&mut r, n);
        let f = MobiusMap::new(random_unitary(n, seed), x0.vector().clone()).unwrap();
        prop_assert!(f.apply(&x).unwrap().norm() < 1.0);
        prop_assert!(MobiusMap::from_point(&x0).apply(&x0).unwrap().norm() < 1e-14);
    }

    #[test]
    fn distance_is_a_metric(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let (x, y, z) = (random_ball_point(&mut r, n), random_ball_point(&mut r, n), random_ball_point(&mut r, n));
        let dxy = caratheodory_distance(&x, &y);
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - caratheodory_distance(&y, &x)).abs() <= 1e-9);
        prop_assert!(caratheodory_distance(&x, &z) <= dxy + caratheodory_distance(&y, &z) + 1e-9);
        prop_assert!(caratheodory_distance(&x, &x) <= 1e-12);
    }

    #[test]
    fn distance_is_invariant_under_the_group(seed: u64, n in 2usize..10) {
        let mut r = rng(seed);
        let g = sample(Family::Uniform, n, &mut r);
        let (x, y) = (random_ball_point(&mut r, n), random_ball_point(&mut r, n));
        let d = caratheodory_distance(&x, &y);
        let dg = caratheodory_distance(&g.apply(&x).unwrap(), &g.apply(&y).unwrap());
        prop_assert!((d - dg).abs() <= 1e-9);
    }

    #[test]
    fn complex_lines_carry_the_poincare_distance(seed: u64, n in 1usize..8, z in (0.0..0.95f64, 0.0..TAU), w in (0.0..0.95f64, 0.0..TAU)) {
        let mut r = rng(seed);
        let u = gaussian_vector(&mut r, n).normalized().unwrap();
        let (z, w) = (Complex::from_polar(z.0, z.1), Complex::from_polar(w.0, w.1));
        let x = BallPoint::new(u.scale(z)).unwrap();
        let y = BallPoint::new(u.scale(w)).unwrap();
        prop_assert!((caratheodory_distance(&x, &y) - poincare_distance(z, w).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn every_family_preserves_the_form(seed: u64, n in 2usize..10, f in family()) {
        let g = sample(f, n, &mut rng(seed));
        prop_assert!(g.form_matrix().preserves_form(1e-10));
        prop_assert!((g.a() * g.a() - 1.0 - g.xi().norm_sqr()).abs() <= 1e-10 * g.a() * g.a());
    }

    #[test]
    fn inverse_and_adjoint_closed_forms(seed: u64, n in 2usize..10, f in family()) {
        let g = sample(f, n, &mut rng(seed));
        let id = ComplexMatrix::identity(n + 1);
        prop_assert!((&g.matrix() * &g.inverse().matrix()).max_diff(&id) <= 1e-11);
        prop_assert!((&g.inverse().matrix() * &g.matrix()).max_diff(&id) <= 1e-11);
        prop_assert!(g.adjoint_g().matrix().max_diff(&g.matrix().adjoint()) <= 1e-12);
    }

    #[test]
    fn phi_is_a_homomorphism(seed: u64, n in 2usize..10) {
        let mut r = rng(seed);
        let s = sample(Family::Uniform, n, &mut r);
        let t = sample(Family::Uniform, n, &mut r);
        let st = s.compose(&t).unwrap();
        for _ in 0..5 {
            let x = random_ball_point(&mut r, n);
            let lhs = st.apply(&x).unwrap();
            let rhs = s.apply(&t.apply(&x).unwrap()).unwrap();
            prop_assert!((lhs.vector() - rhs.vector()).max_abs() <= 1e-9);
        }
    }

    #[test]
    fn center_acts_trivially(seed: u64, n in 2usize..10, theta in 0.0..TAU) {
        let mut r = rng(seed);
        let t = sample(Family::Uniform, n, &mut r);
        let zt = GElement::center(n, theta).compose(&t).unwrap();
        let x = random_ball_point(&mut r, n);
        prop_assert!((zt.apply(&x).unwrap().vector() - t.apply(&x).unwrap().vector()).max_abs() <= 1e-10);
    }

    #[test]
    fn canonicalize_recovers_the_element(seed: u64, n in 2usize..10, f in family()) {
        let g = sample(f, n, &mut rng(seed));
        let back = FormMatrix::new(g.matrix()).unwrap().canonicalize(1e-10).unwrap();
        prop_assert!(back.matrix().max_diff(&g.matrix()) <= 1e-9);
        prop_assert!(back.unitary().unitarity_residual() <= 1e-12);
    }

    #[test]
    fn serde_round_trip_is_exact(seed: u64, n in 2usize..10, f in family()) {
        let mut r = rng(seed);
        let g = sample(f, n, &mut r);
        let text = serde_json::to_string(&g).unwrap();
        let back: GElement = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let p = random_ball_point(&mut r, n);
        let back: BallPoint = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn reported_fixed_points_are_fixed(seed: u64, n in 2usize..8, f in prop::sample::select(vec![Family::Normal, Family::Reducing, Family::Involutory, Family::Parabolic, Family::SelfAdjoint])) {
        let g = sample(f, n, &mut rng(seed));
        let c = dynamical_type(&g, 1e-10);
        prop_assert_eq!(c.method, Method::ClosedForm);
        for fp in &c.fixed_points {
            let y = g.act(&fp.point).unwrap();
            prop_assert!((&y - &fp.point).max_abs() <= 1e-8, "{f}: {:?}", c.kind);
        }
    }

    #[test]
    fn special_classes_have_their_types(seed: u64, n in 2usize..8) {
        let mut r = rng(seed);
        prop_assert_eq!(dynamical_type(&sample(Family::Normal, n, &mut r), 1e-10).kind, Kind::Hyperbolic);
        prop_assert_eq!(dynamical_type(&sample(Family::Involutory, n, &mut r), 1e-10).kind, Kind::Elliptic);
        prop_assert_eq!(dynamical_type(&sample(Family::Parabolic, n, &mut r), 1e-10).kind, Kind::Parabolic);
        prop_assert_eq!(dynamical_type(&sample(Family::Unitary, n, &mut r), 1e-10).kind, Kind::Elliptic);
    }

    #[test]
    fn reducing_spectrum_identities(seed: u64, n in 2usize..8) {
        let g = sample(Family::Reducing, n, &mut rng(seed));
        let s = reducing_spectrum(&g, 1e-10).unwrap();
        prop_assert!((s.lambda1 * s.lambda2 - s.r).norm() <= 1e-10);
        prop_assert!(((s.k1 * s.xi_norm).norm() * (s.k2 * s.xi_norm).norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn xi_line_reduces_exactly_when_u_scales_xi(seed: u64, n in 2usize..8) {
        let mut r = rng(seed);
        let t = sample(Family::Uniform, n, &mut r);
        let e = t.xi().normalized().unwrap();
        prop_assert_eq!(reduces(&t, &[e], 1e-10).unwrap(), reducing_ratio(&t, 1e-10).is_ok());
        let t = sample(Family::Reducing, n, &mut r);
        let e = t.xi().normalized().unwrap();
        prop_assert!(reduces(&t, &[e], 1e-10).unwrap());
    }

    #[test]
    fn minus_identity_inverts_pure_translations(seed: u64, n in 2usize..10) {
        let xi = random_xi(&mut rng(seed), n);
        let t = GElement::make(0.0, ComplexMatrix::identity(n), xi).unwrap();
        let v = ComplexMatrix::identity(n).scale(Complex::new(-1.0, 0.0));
        prop_assert!(check_unitary_equiv_inverse(&t, &v, 1e-12).unwrap());
        prop_assert!(conjugation_residual(&t, &v) <= 1e-12);
    }
}
