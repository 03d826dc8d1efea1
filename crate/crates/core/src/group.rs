//! The group `G` of bijective operators on `C^n + C` preserving
//! `𝒜((x, λ), (y, μ)) = <x, y> - λ μ̄`, i.e. `M^* A' M = A'` with `A' = diag(I, -1)`.
//!
//! Elements are stored in canonical form `(θ, U, ξ)`, standing for
//!
//! ```text
//!   e^{iθ} [[ U A, U ξ ],
//!           [ ξ^*,  a  ]]      a = sqrt(1 + ‖ξ‖²),  A = I + (a - 1)/‖ξ‖² ξ ξ^*
//! ```
//!
//! `A` is the positive square root of `I + ξ ξ^*`: it fixes `<ξ>^⊥` and
//! scales `ξ` by `a`. The matrix is materialized on demand.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::ball::{BallPoint, MobiusMap, SINGULAR_EPS};
use crate::error::{Error, Result};
use crate::linalg::{
    dot_unchecked, rank_one_update, Complex, ComplexMatrix, ComplexVector, ONE, UNITARY_TOL,
};

/// Tolerance used when canonicalizing exact products in [`GElement::compose`].
pub const COMPOSE_TOL: f64 = 1e-9;

/// Canonical-form element `e^{iθ}[[UA, Uξ], [<·, ξ>, a]]` of `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GElementRepr", into = "GElementRepr")]
pub struct GElement {
    theta: f64,
    u: ComplexMatrix,
    xi: ComplexVector,
    a: f64,
}

#[derive(Serialize, Deserialize)]
struct GElementRepr {
    theta: f64,
    #[serde(rename = "U")]
    u: ComplexMatrix,
    xi: ComplexVector,
}

impl TryFrom<GElementRepr> for GElement {
    type Error = Error;
    fn try_from(r: GElementRepr) -> Result<Self> {
        if !r.theta.is_finite() {
            return Err(Error::InvalidData("theta must be finite".into()));
        }
        GElement::make(r.theta, r.u, r.xi)
    }
}

impl From<GElement> for GElementRepr {
    fn from(g: GElement) -> Self {
        GElementRepr {
            theta: g.theta,
            u: g.u,
            xi: g.xi,
        }
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn phase(theta: f64) -> Complex {
    Complex::from_polar(1.0, theta)
}

/// `I + c ξ ξ^*` scaled so that `ξ ↦ s ξ`, identity on `<ξ>^⊥`.
fn rank_one_scaling(xi: &ComplexVector, s: f64) -> ComplexMatrix {
    let nsq = xi.norm_sqr();
    if nsq == 0.0 {
        return ComplexMatrix::identity(xi.dim());
    }
    rank_one_update(Complex::new((s - 1.0) / nsq, 0.0), xi)
}

impl GElement {
    /// Canonical element from `(θ, U, ξ)`. `θ` is reduced to `[0, 2π)`.
    pub fn make(theta: f64, u: ComplexMatrix, xi: ComplexVector) -> Result<Self> {
        if !u.is_square() || u.rows() != xi.dim() {
            return Err(Error::DimError {
                expected: xi.dim(),
                found: u.rows(),
            });
        }
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let a = (1.0 + xi.norm_sqr()).sqrt();
        Ok(GElement {
            theta: normalize_angle(theta),
            u,
            xi,
            a,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::center(n, 0.0)
    }

    /// Central element `e^{iθ} I`.
    pub fn center(n: usize, theta: f64) -> Self {
        Self::make(theta, ComplexMatrix::identity(n), ComplexVector::zeros(n))
            .expect("identity is unitary")
    }

    /// Preimage of `f_{x0}`: `θ = 0`, `U = I`, `ξ = -a x0` with `a = 1/sqrt(1 - ‖x0‖²)`.
    pub fn from_point(x0: &BallPoint) -> Self {
        let a = 1.0 / (1.0 - x0.vector().norm_sqr()).sqrt();
        let xi = x0.vector().scale_real(-a);
        let n = x0.dim();
        GElement {
            theta: 0.0,
            u: ComplexMatrix::identity(n),
            xi,
            a: a.max(1.0),
        }
    }

    /// Preimage `[[U, 0], [0, 1]]` of the unitary map `x ↦ Ux`.
    pub fn from_unitary(u: ComplexMatrix) -> Result<Self> {
        let n = u.rows();
        Self::make(0.0, u, ComplexVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn xi(&self) -> &ComplexVector {
        &self.xi
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// The positive operator `A = sqrt(I + ξ ξ^*)`.
    pub fn a_operator(&self) -> ComplexMatrix {
        rank_one_scaling(&self.xi, self.a)
    }

    /// `A^{-1} = I + (1/a - 1)/‖ξ‖² ξ ξ^*`.
    pub fn a_inverse(&self) -> ComplexMatrix {
        rank_one_scaling(&self.xi, 1.0 / self.a)
    }

    /// Same `(U, ξ)` with `θ = 0`. Acts on `B` identically.
    pub fn strip_phase(&self) -> Self {
        GElement {
            theta: 0.0,
            ..self.clone()
        }
    }

    /// The `(n+1) x (n+1)` matrix `e^{iθ}[[UA, Uξ], [ξ^*, a]]`.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let ph = phase(self.theta);
        let ua = &self.u * &self.a_operator();
        let uxi = self.u.mul_vec(&self.xi);
        let mut m = ComplexMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ph * ua[(i, j)];
            }
            m[(i, n)] = ph * uxi[i];
            m[(n, i)] = ph * self.xi[i].conj();
        }
        m[(n, n)] = ph * self.a;
        m
    }

    pub fn form_matrix(&self) -> FormMatrix {
        FormMatrix::new(self.matrix()).expect("canonical matrix is square")
    }

    /// `canonicalize(matrix(self) · matrix(other))`.
    pub fn compose(&self, other: &GElement) -> Result<GElement> {
        if self.dim() != other.dim() {
            return Err(Error::DimError {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        FormMatrix::new(&self.matrix() * &other.matrix())?.canonicalize(COMPOSE_TOL)
    }

    /// Closed form `e^{-iθ}[[(UA)^*, -ξ], [-<·, Uξ>, a]]`, returned canonically
    /// as `(-θ, U^*, -Uξ)`.
    pub fn inverse(&self) -> GElement {
        let xi = -&self.u.mul_vec(&self.xi);
        GElement {
            theta: normalize_angle(-self.theta),
            u: self.u.adjoint(),
            xi,
            a: self.a,
        }
    }

    /// Closed form `e^{-iθ}[[(UA)^*, ξ], [<·, Uξ>, a]]`.
    pub fn adjoint_g(&self) -> FormMatrix {
        let n = self.dim();
        let ph = phase(-self.theta);
        let ua_star = (&self.u * &self.a_operator()).adjoint();
        let uxi = self.u.mul_vec(&self.xi);
        let mut m = ComplexMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ph * ua_star[(i, j)];
            }
            m[(i, n)] = ph * self.xi[i];
            m[(n, i)] = ph * uxi[i].conj();
        }
        m[(n, n)] = ph * self.a;
        FormMatrix { m }
    }

    /// `(V, T₁)` with `V = [[e^{iθ}U, 0], [0, 1]]`-class unitary element and
    /// `T₁ = make(0, I, ξ)` self-adjoint, `V ∘ T₁ = self`.
    ///
    /// `V` carries the phase as `make(θ, U, 0)`, which acts on `B` as `U`.
    pub fn unitary_selfadjoint_split(&self) -> (GElement, GElement) {
        let n = self.dim();
        let v = GElement {
            theta: self.theta,
            u: self.u.clone(),
            xi: ComplexVector::zeros(n),
            a: 1.0,
        };
        let t1 = GElement {
            theta: 0.0,
            u: ComplexMatrix::identity(n),
            xi: self.xi.clone(),
            a: self.a,
        };
        (v, t1)
    }

    /// The factorization `φ(self) = U ∘ f_{x0}` with `x0 = -ξ/a`.
    pub fn to_mobius(&self) -> MobiusMap {
        let x0 = self.xi.scale_real(-1.0 / self.a);
        MobiusMap::new(self.u.clone(), x0).expect("canonical element has unitary U and ‖ξ/a‖ < 1")
    }

    /// `φ(self)(x) = U(Ax + ξ)/(<x, ξ> + a)`, valid on the closed ball.
    pub fn act(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimError {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let denom = dot_unchecked(x, &self.xi) + self.a;
        if denom.norm() < SINGULAR_EPS {
            return Err(Error::NearSingular {
                denominator: denom.norm(),
            });
        }
        let top = &self.a_operator().mul_vec(x) + &self.xi;
        Ok(self.u.mul_vec(&top).scale(denom.inv()))
    }

    /// `φ(self)` applied to an interior point.
    pub fn apply(&self, x: &BallPoint) -> Result<BallPoint> {
        BallPoint::new(self.act(x.vector())?)
    }
}

/// A raw `(n+1) x (n+1)` matrix that is meant to preserve the form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct FormMatrix {
    m: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(rename = "M")]
    m: ComplexMatrix,
}

impl TryFrom<FormRepr> for FormMatrix {
    type Error = Error;
    fn try_from(r: FormRepr) -> Result<Self> {
        FormMatrix::new(r.m)
    }
}

impl From<FormMatrix> for FormRepr {
    fn from(f: FormMatrix) -> Self {
        FormRepr { m: f.m }
    }
}

/// `diag(I_n, -1)`.
pub fn form_operator(n: usize) -> ComplexMatrix {
    let mut d = vec![ONE; n + 1];
    d[n] = -ONE;
    ComplexMatrix::from_diag(&d)
}

impl FormMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() < 2 {
            return Err(Error::InvalidData(format!(
                "form matrix must be square of size >= 2, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(FormMatrix { m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    /// Dimension `n` of the ball (the matrix is `(n+1) x (n+1)`).
    pub fn dim(&self) -> usize {
        self.m.rows() - 1
    }

    /// `max |M^* A' M - A'|`.
    pub fn form_residual(&self) -> f64 {
        let j = form_operator(self.dim());
        (&(&self.m.adjoint() * &j) * &self.m).max_diff(&j)
    }

    pub fn preserves_form(&self, tol: f64) -> bool {
        self.form_residual() <= tol
    }

    /// Linear-fractional action `x ↦ (P x + q)/(<x, r> + t)` of the blocks
    /// `[[P, q], [r^*, t]]`.
    pub fn act(&self, x: &ComplexVector) -> Result<ComplexVector> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::DimError {
                expected: n,
                found: x.dim(),
            });
        }
        let y = self.m.mul_vec(&x.extended(ONE));
        let denom = y[n];
        if denom.norm() < SINGULAR_EPS {
            return Err(Error::NearSingular {
                denominator: denom.norm(),
            });
        }
        let inv = denom.inv();
        Ok(ComplexVector::from_vec(
            y.as_slice()[..n].iter().map(|z| z * inv).collect(),
        ))
    }

    /// Recovers `(θ, U, ξ)` from a form-preserving matrix.
    pub fn canonicalize(&self, tol: f64) -> Result<GElement> {
        let residual = self.form_residual();
        if residual > tol {
            return Err(Error::FormViolation { residual });
        }
        let n = self.dim();
        let t = self.m[(n, n)];
        if t.norm() < 1.0 - tol {
            return Err(Error::FormViolation {
                residual: 1.0 - t.norm(),
            });
        }
        let theta = normalize_angle(t.arg());
        let unphase = phase(-theta);
        let xi =
            ComplexVector::from_vec((0..n).map(|j| (unphase * self.m[(n, j)]).conj()).collect());
        let a = (1.0 + xi.norm_sqr()).sqrt();
        let a_inv = rank_one_scaling(&xi, 1.0 / a);
        let top_left = self.m.block(0, 0, n, n).scale(unphase);
        let u_raw = &top_left * &a_inv;
        let unitarity = u_raw.unitarity_residual();
        if unitarity > tol {
            return Err(Error::ReconstructionError {
                residual: unitarity,
            });
        }
        let u = u_raw.polish_unitary();
        let elem = GElement { theta, u, xi, a };

        let top_right = ComplexVector::from_vec((0..n).map(|i| self.m[(i, n)]).collect());
        let want = elem.u.mul_vec(&elem.xi).scale(phase(theta));
        let tr_residual = (&top_right - &want).max_abs();
        if tr_residual > tol {
            return Err(Error::ReconstructionError {
                residual: tr_residual,
            });
        }
        let round_trip = elem.matrix().max_diff(&self.m);
        if round_trip > 10.0 * tol {
            return Err(Error::ReconstructionError {
                residual: round_trip,
            });
        }
        Ok(elem)
    }
}
