//! Structural predicates, spectra on the reducing subspace `<ξ> + C`, fixed
//! points and the elliptic / hyperbolic / parabolic classification.
//!
//! `x ∈ B̄` is fixed by `φ(T)` iff `(x, 1)` is an eigenvector of the
//! phase-stripped matrix, with eigenvalue `<x, ξ> + a`. When `Uξ = rξ` the
//! eigenvectors on `<ξ> + C` are `(kξ, 1)` with `k` a root of
//! `‖ξ‖² k² + a(1 - r) k - r = 0`, which gives everything in closed form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GElement;
use crate::linalg::{dot_unchecked, Complex, ComplexMatrix, ComplexVector, UNITARY_TOL};

/// Points with `‖x‖ < 1 - BOUNDARY_BAND` are interior, `|‖x‖ - 1| <= BOUNDARY_BAND` boundary.
pub const BOUNDARY_BAND: f64 = 1e-8;
/// `|disc| <= PARABOLIC_TOL · a²` is treated as a double root.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// Default iteration budget for the fixed-point fallback.
pub const DEFAULT_MAXIT: usize = 100_000;
/// Boundary limits of `T` and `T^{-1}` closer than this are taken as one point.
const MERGE_TOL: f64 = 1e-3;

fn phase_is_real(theta: f64, tol: f64) -> bool {
    let s = theta.sin().abs();
    s <= tol
}

/// `ξ = 0`.
pub fn is_unitary_elem(t: &GElement, tol: f64) -> bool {
    t.xi().norm() <= tol
}

/// `Uξ = ξ`.
pub fn is_normal_elem(t: &GElement, tol: f64) -> bool {
    let xi_norm = t.xi().norm();
    if xi_norm == 0.0 {
        return true;
    }
    (&t.unitary().mul_vec(t.xi()) - t.xi()).norm() <= tol * xi_norm
}

/// `max |M^* M - M M^*|` of the full matrix.
pub fn normal_commutator_residual(t: &GElement) -> f64 {
    let m = t.matrix();
    let ms = m.adjoint();
    (&ms * &m).max_diff(&(&m * &ms))
}

/// `T = T^*`. When true, `Uξ = ξ`, `U² = I` and `θ ∈ {0, π}` hold as well.
pub fn is_self_adjoint_elem(t: &GElement, tol: f64) -> bool {
    let holds = t.adjoint_g().matrix().max_diff(&t.matrix()) <= tol;
    if holds {
        debug_assert!(self_adjoint_structure_holds(t, 10.0 * tol));
    }
    holds
}

fn u_squared_residual(t: &GElement) -> f64 {
    let u = t.unitary();
    (u * u).max_diff(&ComplexMatrix::identity(t.dim()))
}

fn self_adjoint_structure_holds(t: &GElement, tol: f64) -> bool {
    let fixes_xi = (&t.unitary().mul_vec(t.xi()) - t.xi()).max_abs() <= tol;
    fixes_xi && u_squared_residual(t) <= tol && phase_is_real(t.theta(), tol)
}

/// `T² = I`. When true, `Uξ = -ξ` and `U² = I` hold as well.
pub fn is_involutory_elem(t: &GElement, tol: f64) -> bool {
    let m = t.matrix();
    let holds = (&m * &m).max_diff(&ComplexMatrix::identity(t.dim() + 1)) <= tol;
    if holds {
        debug_assert!({
            let flips = (&t.unitary().mul_vec(t.xi()) + t.xi()).max_abs() <= 10.0 * tol;
            flips && u_squared_residual(t) <= 10.0 * tol
        });
    }
    holds
}

/// Closed-form eigendata on `<ξ> + C` for an element with `Uξ = rξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialSpectrum {
    pub r: Complex,
    pub lambda1: Complex,
    pub lambda2: Complex,
    pub k1: Complex,
    pub k2: Complex,
    pub discriminant: Complex,
    pub xi_norm: f64,
    pub a: f64,
}

impl SpecialSpectrum {
    pub fn is_double_root(&self) -> bool {
        self.discriminant.norm() <= PARABOLIC_TOL * self.a * self.a
    }

    /// The repeated root `k = a(r - 1)/(2‖ξ‖²)` at zero discriminant.
    pub fn double_k(&self) -> Complex {
        (self.r - 1.0) * self.a / (2.0 * self.xi_norm * self.xi_norm)
    }
}

/// Extracts `r = <Uξ, ξ>/‖ξ‖²` and checks `‖Uξ - rξ‖ <= tol ‖ξ‖`.
pub fn reducing_ratio(t: &GElement, tol: f64) -> Result<Complex> {
    let xi = t.xi();
    let nsq = xi.norm_sqr();
    if nsq == 0.0 {
        return Err(Error::NotReducing { residual: 0.0 });
    }
    let uxi = t.unitary().mul_vec(xi);
    let r = dot_unchecked(&uxi, xi) / nsq;
    let residual = uxi.axpy(-r, xi).norm();
    if residual > tol * nsq.sqrt() {
        return Err(Error::NotReducing { residual });
    }
    Ok(r)
}

/// `λ₁,₂ = (a(r+1) ± √D)/2`, `k₁,₂ = (a(r-1) ± √D)/(2‖ξ‖²)`, `D = a²(r+1)² - 4r`,
/// with the principal square root.
///
/// The phase `θ` is ignored: the values describe the phase-stripped element.
pub fn reducing_spectrum(t: &GElement, tol: f64) -> Result<SpecialSpectrum> {
    let r = reducing_ratio(t, tol)?;
    let a = t.a();
    let xi_norm = t.xi().norm();
    let rp1 = r + 1.0;
    let disc = rp1 * rp1 * (a * a) - r * 4.0;
    let sq = disc.sqrt();
    let two_nsq = 2.0 * xi_norm * xi_norm;
    Ok(SpecialSpectrum {
        r,
        lambda1: (rp1 * a + sq) / 2.0,
        lambda2: (rp1 * a - sq) / 2.0,
        k1: ((r - 1.0) * a + sq) / two_nsq,
        k2: ((r - 1.0) * a - sq) / two_nsq,
        discriminant: disc,
        xi_norm,
        a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Location {
    Interior,
    Boundary,
}

impl Location {
    /// `None` inside the undecidable band between interior and boundary.
    pub fn of_norm(norm: f64) -> Option<Self> {
        if norm < 1.0 - BOUNDARY_BAND {
            Some(Location::Interior)
        } else if (norm - 1.0).abs() <= BOUNDARY_BAND {
            Some(Location::Boundary)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointRecord {
    pub point: ComplexVector,
    pub location: Location,
    pub eigenvalue: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    Iteration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    pub fixed_points: Vec<FixedPointRecord>,
    pub method: Method,
    pub spectrum: Option<SpecialSpectrum>,
}

fn record(t: &GElement, point: ComplexVector, location: Location) -> FixedPointRecord {
    let eigenvalue = dot_unchecked(&point, t.xi()) + t.a();
    FixedPointRecord {
        point,
        location,
        eigenvalue,
    }
}

/// Fixed points from the closed form, or `None` if `<ξ>` does not reduce `U`.
fn closed_form_fixed_points(
    t: &GElement,
    tol: f64,
) -> Option<(Vec<FixedPointRecord>, Option<SpecialSpectrum>)> {
    if t.xi().norm() == 0.0 {
        let origin = ComplexVector::zeros(t.dim());
        return Some((vec![record(t, origin, Location::Interior)], None));
    }
    let spec = reducing_spectrum(t, tol).ok()?;
    let ks: Vec<Complex> = if spec.is_double_root() {
        vec![spec.double_k()]
    } else {
        vec![spec.k1, spec.k2]
    };
    let points = ks
        .into_iter()
        .filter_map(|k| {
            let p = t.xi().scale(k);
            let loc = Location::of_norm(p.norm())?;
            Some(record(t, p, loc))
        })
        .collect();
    Some((points, Some(spec)))
}

/// Fixed points of `φ(T)` in the closed ball.
///
/// Closed form when `ξ = 0` or `Uξ = rξ`; otherwise the iteration fallback,
/// which may find nothing.
pub fn fixed_points(t: &GElement, tol: f64) -> Vec<FixedPointRecord> {
    match closed_form_fixed_points(t, tol) {
        Some((pts, _)) => pts,
        None => classify_by_iteration(t, tol, DEFAULT_MAXIT).fixed_points,
    }
}

/// Elliptic / hyperbolic / parabolic type of `φ(T)`.
pub fn dynamical_type(t: &GElement, tol: f64) -> Classification {
    let t = t.strip_phase();
    let Some((points, spectrum)) = closed_form_fixed_points(&t, tol) else {
        return classify_by_iteration(&t, tol, DEFAULT_MAXIT);
    };
    let interior = points.iter().any(|p| p.location == Location::Interior);
    let boundary = points
        .iter()
        .filter(|p| p.location == Location::Boundary)
        .count();
    let kind = match spectrum {
        _ if interior => Kind::Elliptic,
        Some(s) if s.is_double_root() && boundary == 1 => Kind::Parabolic,
        Some(s) if !s.is_double_root() && boundary == 2 => Kind::Hyperbolic,
        _ => Kind::Undetermined,
    };
    Classification {
        kind,
        fixed_points: points,
        method: Method::ClosedForm,
        spectrum,
    }
}

/// Iterates `x ← φ(T)(x)` from `start`.
///
/// Interior convergence: a step below `tol` with `‖x‖ < 1 - 10 tol`. Boundary
/// convergence: `1 - ‖x‖ <= 10 tol` with the direction moving by at most
/// `10 tol`. A period-2 orbit stops the run early.
pub fn iterate_to_fixed_point(
    t: &GElement,
    start: &ComplexVector,
    tol: f64,
    maxit: usize,
) -> Result<FixedPointRecord> {
    let t = t.strip_phase();
    let m = t.form_matrix();
    let mut prev: Option<ComplexVector> = None;
    let mut x = start.clone();
    for _ in 0..maxit {
        let next = m.act(&x)?;
        let step = (&next - &x).norm();
        let norm = next.norm();
        if step <= tol && norm < 1.0 - 10.0 * tol {
            return Ok(record(&t, next, Location::Interior));
        }
        if 1.0 - norm <= 10.0 * tol {
            if let (Some(d1), Some(d0)) = (next.normalized(), x.normalized()) {
                if (&d1 - &d0).norm() <= 10.0 * tol {
                    return Ok(record(&t, d1, Location::Boundary));
                }
            }
        }
        if let Some(p) = &prev {
            if step > tol && (&next - p).norm() <= tol {
                return Err(Error::NoConvergence { iterations: 0 });
            }
        }
        prev = Some(std::mem::replace(&mut x, next));
    }
    Err(Error::NoConvergence { iterations: maxit })
}

/// Classification from forward and backward orbits of the origin.
pub fn classify_by_iteration(t: &GElement, tol: f64, maxit: usize) -> Classification {
    let t = t.strip_phase();
    let origin = ComplexVector::zeros(t.dim());
    let undetermined = |fixed_points| Classification {
        kind: Kind::Undetermined,
        fixed_points,
        method: Method::Iteration,
        spectrum: None,
    };
    let forward = match iterate_to_fixed_point(&t, &origin, tol, maxit) {
        Ok(r) => r,
        Err(_) => return undetermined(vec![]),
    };
    if forward.location == Location::Interior {
        return Classification {
            kind: Kind::Elliptic,
            fixed_points: vec![forward],
            method: Method::Iteration,
            spectrum: None,
        };
    }
    let inv = t.inverse();
    let backward = match iterate_to_fixed_point(&inv, &origin, tol, maxit) {
        Ok(r) if r.location == Location::Boundary => record(&t, r.point, Location::Boundary),
        _ => return undetermined(vec![forward]),
    };
    let (kind, fixed_points) = if (&forward.point - &backward.point).norm() <= MERGE_TOL {
        (Kind::Parabolic, vec![forward])
    } else {
        (Kind::Hyperbolic, vec![forward, backward])
    };
    Classification {
        kind,
        fixed_points,
        method: Method::Iteration,
        spectrum: None,
    }
}

/// Does `T` map `K + C` and its orthogonal complement into themselves?
pub fn reduces(t: &GElement, k_basis: &[ComplexVector], tol: f64) -> Result<bool> {
    let n = t.dim();
    for (i, v) in k_basis.iter().enumerate() {
        if v.dim() != n {
            return Err(Error::DimError {
                expected: n,
                found: v.dim(),
            });
        }
        for (j, w) in k_basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            let residual = (dot_unchecked(v, w) - want).norm();
            if residual > tol {
                return Err(Error::BadBasis { residual });
            }
        }
    }
    // projector onto K + C
    let mut p = ComplexMatrix::zeros(n + 1, n + 1);
    for v in k_basis {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    p[(n, n)] = Complex::new(1.0, 0.0);
    let q = &ComplexMatrix::identity(n + 1) - &p;
    let m = t.matrix();
    let scale = m.max_abs().max(1.0);
    let leak_out = (&(&q * &m) * &p).max_abs();
    let leak_in = (&(&p * &m) * &q).max_abs();
    Ok(leak_out <= tol * scale && leak_in <= tol * scale)
}

/// Checks `(UA)^* = V^{-1} UA V`, `Vξ = V^{-1}ξ = -Uξ` and `θ ∈ πZ`.
pub fn check_unitary_equiv_inverse(t: &GElement, v: &ComplexMatrix, tol: f64) -> Result<bool> {
    let residual = v.unitarity_residual();
    if residual > tol.max(UNITARY_TOL) {
        return Err(Error::NotUnitary { residual });
    }
    if v.rows() != t.dim() {
        return Err(Error::DimError {
            expected: t.dim(),
            found: v.rows(),
        });
    }
    let ua = t.unitary() * &t.a_operator();
    let v_inv = v.adjoint();
    let conj_ok = (&(&v_inv * &ua) * v).max_diff(&ua.adjoint()) <= tol;
    let minus_uxi = -&t.unitary().mul_vec(t.xi());
    let v_ok = (&v.mul_vec(t.xi()) - &minus_uxi).max_abs() <= tol;
    let v_inv_ok = (&v_inv.mul_vec(t.xi()) - &minus_uxi).max_abs() <= tol;
    let theta_ok = phase_is_real(t.theta(), tol);
    Ok(conj_ok && v_ok && v_inv_ok && theta_ok)
}

/// `max |diag(V^{-1}, 1) M diag(V, 1) - M^{-1}|`.
pub fn conjugation_residual(t: &GElement, v: &ComplexMatrix) -> f64 {
    let one = Complex::new(1.0, 0.0);
    let left = v.adjoint().bordered(one);
    let right = v.bordered(one);
    (&(&left * &t.matrix()) * &right).max_diff(&t.inverse().matrix())
}
