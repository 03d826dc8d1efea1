//! The unit ball `B` of `C^n`: points, Möbius maps `U ∘ f_{x0}`, the Poincaré
//! distance on the disk and the Carathéodory distance on `B`.
//!
//! The Poincaré distance is normalized as `ρ(z, w) = atanh |(z - w)/(1 - z w̄)|`,
//! so `ρ(0, t) = atanh t`. With that normalization the Carathéodory distance
//! on `B` is `atanh ‖f_x(y)‖`; [`caratheodory_lower_bound`] estimates the
//! supremum definition independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    dot_unchecked, random_unit_vector, Complex, ComplexMatrix, ComplexVector, ONE, UNITARY_TOL,
};

/// Points closer than this to the unit sphere are rejected as interior points.
pub const BOUNDARY_EPS: f64 = 1e-12;
/// Smallest admissible `|1 - <x, x0>|` in a Möbius evaluation.
pub const SINGULAR_EPS: f64 = 1e-14;
/// Unit-norm slack for boundary points.
pub const SPHERE_TOL: f64 = 1e-10;

/// A point of the open unit ball, `‖v‖ < 1 - BOUNDARY_EPS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BallPointRepr", into = "BallPointRepr")]
pub struct BallPoint {
    v: ComplexVector,
}

#[derive(Serialize, Deserialize)]
struct BallPointRepr {
    v: ComplexVector,
}

impl TryFrom<BallPointRepr> for BallPoint {
    type Error = Error;
    fn try_from(r: BallPointRepr) -> Result<Self> {
        BallPoint::new(r.v)
    }
}

impl From<BallPoint> for BallPointRepr {
    fn from(p: BallPoint) -> Self {
        BallPointRepr { v: p.v }
    }
}

impl BallPoint {
    pub fn new(v: ComplexVector) -> Result<Self> {
        check_interior(&v)?;
        Ok(BallPoint { v })
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint {
            v: ComplexVector::zeros(dim),
        }
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.v
    }

    pub fn into_vector(self) -> ComplexVector {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }
}

fn check_interior(v: &ComplexVector) -> Result<()> {
    let norm = v.norm();
    if norm < 1.0 - BOUNDARY_EPS {
        Ok(())
    } else {
        Err(Error::OutOfBall { norm })
    }
}

/// Matrix of `T_{x0}(x) = <x, x0>/(1 + s) x0 + s x` with `s = sqrt(1 - ‖x0‖²)`.
pub fn t_operator(x0: &ComplexVector) -> Result<ComplexMatrix> {
    let norm_sqr = x0.norm_sqr();
    if norm_sqr >= 1.0 {
        return Err(Error::OutOfBall {
            norm: norm_sqr.sqrt(),
        });
    }
    let s = (1.0 - norm_sqr).sqrt();
    let coef = 1.0 / (1.0 + s);
    let n = x0.dim();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { s } else { 0.0 };
        Complex::new(diag, 0.0) + x0[i] * x0[j].conj() * coef
    }))
}

/// The automorphism `x ↦ U f_{x0}(x)` of `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MobiusRepr", into = "MobiusRepr")]
pub struct MobiusMap {
    u: ComplexMatrix,
    x0: ComplexVector,
    t: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct MobiusRepr {
    #[serde(rename = "U")]
    u: ComplexMatrix,
    x0: ComplexVector,
}

impl TryFrom<MobiusRepr> for MobiusMap {
    type Error = Error;
    fn try_from(r: MobiusRepr) -> Result<Self> {
        MobiusMap::new(r.u, r.x0)
    }
}

impl From<MobiusMap> for MobiusRepr {
    fn from(m: MobiusMap) -> Self {
        MobiusRepr { u: m.u, x0: m.x0 }
    }
}

impl MobiusMap {
    pub fn new(u: ComplexMatrix, x0: ComplexVector) -> Result<Self> {
        if u.rows() != x0.dim() || !u.is_square() {
            return Err(Error::DimError {
                expected: x0.dim(),
                found: u.rows(),
            });
        }
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let t = t_operator(&x0)?;
        Ok(MobiusMap { u, x0, t })
    }

    /// `f_{x0}` itself (`U = I`).
    pub fn from_point(x0: &BallPoint) -> Self {
        let n = x0.dim();
        MobiusMap::new(ComplexMatrix::identity(n), x0.vector().clone())
            .expect("interior point and identity are valid")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_point(&BallPoint::origin(n))
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn base_point(&self) -> &ComplexVector {
        &self.x0
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    /// `U T_{x0}((x - x0)/(1 - <x, x0>))` for any `x` where the denominator is safe.
    fn eval(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimError {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let denom = ONE - dot_unchecked(x, &self.x0);
        if denom.norm() < SINGULAR_EPS {
            return Err(Error::NearSingular {
                denominator: denom.norm(),
            });
        }
        let shifted = (x - &self.x0).scale(denom.inv());
        Ok(self.u.mul_vec(&self.t.mul_vec(&shifted)))
    }

    pub fn apply(&self, x: &BallPoint) -> Result<BallPoint> {
        let y = self.eval(x.vector())?;
        // automorphisms keep interior points interior; only rounding at the
        // very edge of the admissible band can push the image out
        BallPoint::new(y)
    }

    /// Evaluates the map on a point of the unit sphere.
    pub fn apply_boundary(&self, x: &ComplexVector) -> Result<ComplexVector> {
        let norm = x.norm();
        if (norm - 1.0).abs() > SPHERE_TOL {
            return Err(Error::InvalidData(format!(
                "boundary point must have unit norm, got {norm}"
            )));
        }
        let denom = (ONE - dot_unchecked(x, &self.x0)).norm();
        if denom < 1e-12 {
            return Err(Error::NearSingular { denominator: denom });
        }
        self.eval(x)
    }
}

/// `ρ(z, w) = atanh |(z - w)/(1 - z w̄)|` on the unit disk.
pub fn poincare_distance(z: Complex, w: Complex) -> Result<f64> {
    for p in [z, w] {
        if p.norm() >= 1.0 {
            return Err(Error::OutOfBall { norm: p.norm() });
        }
    }
    let q = (z - w) / (ONE - z * w.conj());
    Ok(q.norm().min(1.0).atanh())
}

/// Carathéodory distance on `B`: `atanh ‖f_x(y)‖`.
pub fn caratheodory_distance(x: &BallPoint, y: &BallPoint) -> f64 {
    let f = MobiusMap::from_point(x);
    let image = f
        .eval(y.vector())
        .expect("interior points are never singular");
    image.norm().min(1.0).atanh()
}

/// Lower estimate of `sup_f ρ(f(x), f(y))` over the test family
/// `z ↦ <f_x(z), u>` for `trials` random unit `u` plus `u = f_x(y)/‖f_x(y)‖`.
pub fn caratheodory_lower_bound(x: &BallPoint, y: &BallPoint, trials: usize, seed: u64) -> f64 {
    let f = MobiusMap::from_point(x);
    let fx = f.eval(x.vector()).expect("interior point");
    let fy = f.eval(y.vector()).expect("interior point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut functionals: Vec<ComplexVector> = (0..trials)
        .map(|_| random_unit_vector(&mut rng, x.dim()))
        .collect();
    functionals.extend(fy.normalized());

    functionals
        .iter()
        .filter_map(|u| poincare_distance(dot_unchecked(&fx, u), dot_unchecked(&fy, u)).ok())
        .fold(0.0, f64::max)
}
