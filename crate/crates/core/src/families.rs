//! Seeded generators for random elements of `G`, one per special class.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::ball::BallPoint;
use crate::error::Error;
use crate::group::GElement;
use crate::linalg::{
    gaussian_vector, orthonormalize_columns, random_unit_vector, random_unitary_from_rng, Complex,
    ComplexMatrix, ComplexVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Arbitrary `θ`, Haar `U`, random `ξ`.
    Uniform,
    /// `Uξ = ξ`.
    Normal,
    /// `θ ∈ {0, π}`, `U` a Hermitian involution fixing `ξ`.
    SelfAdjoint,
    /// `θ ∈ {0, π}`, `U` a Hermitian involution with `Uξ = -ξ`.
    Involutory,
    /// `Uξ = rξ` for random `|r| = 1`.
    Reducing,
    /// `Uξ = rξ` with `cos arg r = 2/a² - 1`, so the discriminant vanishes.
    Parabolic,
    /// `ξ = 0`.
    Unitary,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Uniform,
        Family::Normal,
        Family::SelfAdjoint,
        Family::Involutory,
        Family::Reducing,
        Family::Parabolic,
        Family::Unitary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Normal => "normal",
            Family::SelfAdjoint => "selfadjoint",
            Family::Involutory => "involutory",
            Family::Reducing => "reducing",
            Family::Parabolic => "parabolic",
            Family::Unitary => "unitary",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown family {s:?}")))
    }
}

/// Random `ξ` with norm uniform in `[0.1, 2]`.
pub fn random_xi<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    let norm = rng.random_range(0.1..2.0);
    random_unit_vector(rng, n).scale_real(norm)
}

/// Uniform point of `B` (radius distributed as `t^{1/2n}`), kept off the sphere.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BallPoint {
    let radius = rng.random::<f64>().powf(1.0 / (2.0 * n as f64)) * 0.98;
    BallPoint::new(random_unit_vector(rng, n).scale_real(radius)).expect("radius < 1")
}

/// Unitary with first column `e`.
fn frame_with<R: Rng + ?Sized>(rng: &mut R, e: &ComplexVector) -> ComplexMatrix {
    let n = e.dim();
    let mut cols = vec![e.clone()];
    cols.extend((1..n).map(|_| gaussian_vector(rng, n)));
    orthonormalize_columns(&ComplexMatrix::from_columns(&cols))
}

/// `U = Q diag(r, W) Q^*` where `Q e₁ = e`, i.e. `U e = r e`, `U` acts as `W` on `e^⊥`.
pub fn unitary_with_eigvec(
    frame: &ComplexMatrix,
    r: Complex,
    rest: &ComplexMatrix,
) -> ComplexMatrix {
    let n = frame.rows();
    let mut inner = ComplexMatrix::zeros(n, n);
    inner[(0, 0)] = r;
    if n > 1 {
        inner.set_block(1, 1, rest);
    }
    let u = &(frame * &inner) * &frame.adjoint();
    u.polish_unitary()
}

/// Diagonal of `±1` with both signs present whenever there is room for them.
fn random_signs<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Complex> {
    let mut signs: Vec<Complex> = (0..m)
        .map(|_| Complex::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
        .collect();
    if m >= 2 {
        signs[0] = Complex::new(1.0, 0.0);
        signs[1] = Complex::new(-1.0, 0.0);
    }
    signs
}

fn phase_point<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::from_polar(1.0, rng.random_range(0.0..TAU))
}

/// Draws one element of `family` in dimension `n >= 2`.
pub fn sample<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> GElement {
    assert!(n >= 2, "families need dim >= 2");
    let make = |theta, u, xi| GElement::make(theta, u, xi).expect("generated U is unitary");
    match family {
        Family::Uniform => {
            let theta = rng.random_range(0.0..TAU);
            let u = random_unitary_from_rng(rng, n);
            make(theta, u, random_xi(rng, n))
        }
        Family::Unitary => {
            let theta = rng.random_range(0.0..TAU);
            let u = random_unitary_from_rng(rng, n);
            make(theta, u, ComplexVector::zeros(n))
        }
        Family::Normal | Family::Reducing => {
            let theta = rng.random_range(0.0..TAU);
            let xi = random_xi(rng, n);
            let q = frame_with(rng, &xi.normalized().expect("nonzero xi"));
            let r = if family == Family::Normal {
                Complex::new(1.0, 0.0)
            } else {
                phase_point(rng)
            };
            let w = random_unitary_from_rng(rng, n - 1);
            make(theta, unitary_with_eigvec(&q, r, &w), xi)
        }
        Family::SelfAdjoint | Family::Involutory => {
            let theta = if rng.random_bool(0.5) { 0.0 } else { PI };
            let xi = random_xi(rng, n);
            let q = frame_with(rng, &xi.normalized().expect("nonzero xi"));
            let r = if family == Family::SelfAdjoint {
                1.0
            } else {
                -1.0
            };
            let w = ComplexMatrix::from_diag(&random_signs(rng, n - 1));
            make(theta, unitary_with_eigvec(&q, Complex::new(r, 0.0), &w), xi)
        }
        Family::Parabolic => {
            let theta = rng.random_range(0.0..TAU);
            let a: f64 = rng.random_range(1.05..3.0);
            let xi = random_unit_vector(rng, n).scale_real((a * a - 1.0).sqrt());
            let angle = (2.0 / (a * a) - 1.0).acos();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let r = Complex::from_polar(1.0, sign * angle);
            let q = frame_with(rng, &xi.normalized().expect("nonzero xi"));
            let w = random_unitary_from_rng(rng, n - 1);
            make(theta, unitary_with_eigvec(&q, r, &w), xi)
        }
    }
}

/// The element with `U = I` on `<ξ>^⊥`, `Uξ = rξ` and the given `ξ`.
pub fn reducing_with(theta: f64, xi: &ComplexVector, r: Complex) -> GElement {
    let n = xi.dim();
    let e = xi.normalized().expect("nonzero xi");
    let u = ComplexMatrix::from_fn(n, n, |i, j| {
        let p = e[i] * e[j].conj();
        let id = if i == j { 1.0 } else { 0.0 };
        r * p + (Complex::new(id, 0.0) - p)
    });
    GElement::make(theta, u, xi.clone()).expect("rank-one phase change is unitary")
}
