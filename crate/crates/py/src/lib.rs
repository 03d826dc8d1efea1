//! Python bindings: `import pyhyperball`.

use hyperball::ball::{self, BallPoint};
use hyperball::classify::dynamical_type;
use hyperball::cli::classification_json;
use hyperball::families::{self, Family};
use hyperball::group::{FormMatrix, GElement};
use hyperball::linalg::{self, Complex, ComplexMatrix, ComplexVector, DEFAULT_TOL};
use hyperball::Error;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Rows = Vec<Vec<Complex>>;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: Rows) -> PyResult<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err(
            "matrix rows must be non-empty and of equal length",
        ));
    }
    ComplexMatrix::try_new(r, c, rows.into_iter().flatten().collect()).map_err(err)
}

fn rows_of(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).into_vec()).collect()
}

fn vector(v: Vec<Complex>) -> PyResult<ComplexVector> {
    ComplexVector::try_new(v).map_err(err)
}

fn point(v: Vec<Complex>) -> PyResult<BallPoint> {
    BallPoint::new(vector(v)?).map_err(err)
}

/// An element `e^{iθ}[[UA, Uξ], [<·, ξ>, a]]` of the group preserving the
/// indefinite form on `C^n + C`.
#[pyclass(name = "GElement", module = "pyhyperball")]
struct PyGElement {
    inner: GElement,
}

#[pymethods]
impl PyGElement {
    #[new]
    fn new(theta: f64, u: Rows, xi: Vec<Complex>) -> PyResult<Self> {
        let inner = GElement::make(theta, matrix_from_rows(u)?, vector(xi)?).map_err(err)?;
        Ok(PyGElement { inner })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyGElement {
            inner: GElement::identity(n),
        }
    }

    /// The element acting on the ball as the Möbius map sending `x0` to 0.
    #[staticmethod]
    fn from_point(x0: Vec<Complex>) -> PyResult<Self> {
        Ok(PyGElement {
            inner: GElement::from_point(&point(x0)?),
        })
    }

    /// Canonical element of an `(n+1)x(n+1)` form-preserving matrix.
    #[staticmethod]
    #[pyo3(signature = (m, tol = DEFAULT_TOL))]
    fn from_matrix(m: Rows, tol: f64) -> PyResult<Self> {
        let form = FormMatrix::new(matrix_from_rows(m)?).map_err(err)?;
        Ok(PyGElement {
            inner: form.canonicalize(tol).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyGElement { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("element serializes")
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn unitary(&self) -> Rows {
        rows_of(self.inner.unitary())
    }

    #[getter]
    fn xi(&self) -> Vec<Complex> {
        self.inner.xi().as_slice().to_vec()
    }

    fn matrix(&self) -> Rows {
        rows_of(&self.inner.matrix())
    }

    fn form_residual(&self) -> f64 {
        self.inner.form_matrix().form_residual()
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyGElement) -> PyResult<Self> {
        Ok(PyGElement {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn inverse(&self) -> Self {
        PyGElement {
            inner: self.inner.inverse(),
        }
    }

    /// `φ(self)(x)` for `x` in the closed ball.
    fn act(&self, x: Vec<Complex>) -> PyResult<Vec<Complex>> {
        Ok(self.inner.act(&vector(x)?).map_err(err)?.into_vec())
    }

    /// Classification report as a JSON string.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn classify(&self, tol: f64) -> String {
        let report = classification_json(&dynamical_type(&self.inner, tol));
        serde_json::to_string(&report).expect("report serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "GElement(dim={}, theta={}, |xi|={})",
            self.inner.dim(),
            self.inner.theta(),
            self.inner.xi().norm()
        )
    }
}

/// Carathéodory distance between two points of the open unit ball.
#[pyfunction]
fn caratheodory_distance(x: Vec<Complex>, y: Vec<Complex>) -> PyResult<f64> {
    let (x, y) = (point(x)?, point(y)?);
    if x.dim() != y.dim() {
        return Err(err(Error::DimError {
            expected: x.dim(),
            found: y.dim(),
        }));
    }
    Ok(ball::caratheodory_distance(&x, &y))
}

/// Poincaré distance on the unit disk.
#[pyfunction]
fn poincare_distance(z: Complex, w: Complex) -> PyResult<f64> {
    ball::poincare_distance(z, w).map_err(err)
}

/// Seeded Haar-like random unitary as a list of rows.
#[pyfunction]
fn random_unitary(n: usize, seed: u64) -> Rows {
    rows_of(&linalg::random_unitary(n, seed))
}

/// Random element of a named family (`uniform`, `normal`, `selfadjoint`,
/// `involutory`, `reducing`, `parabolic`, `unitary`).
#[pyfunction]
fn sample(family: &str, dim: usize, seed: u64) -> PyResult<PyGElement> {
    let family: Family = family.parse().map_err(err)?;
    if dim < 2 {
        return Err(PyValueError::new_err("dim must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(PyGElement {
        inner: families::sample(family, dim, &mut rng),
    })
}

#[pymodule]
fn pyhyperball(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGElement>()?;
    m.add_function(wrap_pyfunction!(caratheodory_distance, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_distance, m)?)?;
    m.add_function(wrap_pyfunction!(random_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
