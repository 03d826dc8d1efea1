use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dot_unchecked, gaussian_vector, Complex, ComplexMatrix, ComplexVector, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Relative size of `|disc|` below which a 2x2 matrix counts as having a double eigenvalue.
const DOUBLE_ROOT_TOL: f64 = 1e-14;

/// Eigenvalues paired with unit-norm eigenvector columns.
///
/// `defective` is only ever set by [`eig_2x2`]: the repeated eigenvalue is
/// listed twice in `values` while `vectors` holds its single eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<Complex>,
    pub vectors: ComplexMatrix,
    pub defective: bool,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> ComplexVector {
        self.vectors.column(i)
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Eigenvalues come back in descending order (stable for ties).
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimError {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let scale = m.max_abs();
    let herm = m.hermitian_residual();
    if herm > tol * scale {
        return Err(Error::NotHermitian { residual: herm });
    }
    let n = m.rows();
    // symmetrize so rounding in the input cannot stall the sweeps
    let mut h = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let target = f64::EPSILON * h.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(j, j)].re.total_cmp(&h[(i, i)].re));
    let values = order
        .iter()
        .map(|&i| Complex::new(h[(i, i)].re, 0.0))
        .collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        values,
        vectors,
        defective: false,
    })
}

/// Annihilates `h[p][q]` with `J = D R D^*`, where `D = diag(1, e^{-i phi})`
/// removes the phase of the off-diagonal entry and `R` is a real rotation.
fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = h[(p, q)];
    let b = apq.norm();
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    if b == 0.0 || b <= f64::EPSILON * 1e-3 * (app.abs() * aqq.abs()).sqrt() {
        h[(p, q)] = ZERO;
        h[(q, p)] = ZERO;
        return;
    }
    let phase = apq / b;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
    let j_pq = phase * s;
    let j_qp = -phase.conj() * s;
    let n = h.rows();

    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * c + hkq * j_qp;
        h[(k, q)] = hkp * j_pq + hkq * c;
    }
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = hpk * c + hqk * j_qp.conj();
        h[(q, k)] = hpk * j_pq.conj() + hqk * c;
    }
    h[(p, q)] = ZERO;
    h[(q, p)] = ZERO;
    h[(p, p)] = Complex::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex::new(h[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * c;
    }
}

/// Quadratic-formula eigensolve of a general 2x2 complex matrix.
///
/// `values[0]` uses the `+` branch of the principal square root of the
/// discriminant. A double eigenvalue with a one-dimensional eigenspace sets
/// `defective` and returns a single eigenvector column.
pub fn eig_2x2(m: &ComplexMatrix) -> EigenDecomposition {
    assert!(m.rows() == 2 && m.cols() == 2, "eig_2x2 needs a 2x2 matrix");
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let disc = (a - d) * (a - d) + b * c * 4.0;

    if disc.norm() <= DOUBLE_ROOT_TOL * scale * scale {
        let lambda = (a + d) * 0.5;
        if b.norm() <= DOUBLE_ROOT_TOL * scale && c.norm() <= DOUBLE_ROOT_TOL * scale {
            return EigenDecomposition {
                values: vec![lambda, lambda],
                vectors: ComplexMatrix::identity(2),
                defective: false,
            };
        }
        let v = eigvec_2x2(a, b, c, d, lambda).unwrap_or_else(|| ComplexVector::basis(2, 0));
        return EigenDecomposition {
            values: vec![lambda, lambda],
            vectors: ComplexMatrix::from_columns(&[v]),
            defective: true,
        };
    }

    let sq = disc.sqrt();
    let l1 = (a + d + sq) * 0.5;
    let l2 = (a + d - sq) * 0.5;
    let v1 = eigvec_2x2(a, b, c, d, l1).unwrap_or_else(|| ComplexVector::basis(2, 0));
    let v2 = eigvec_2x2(a, b, c, d, l2).unwrap_or_else(|| ComplexVector::basis(2, 1));
    EigenDecomposition {
        values: vec![l1, l2],
        vectors: ComplexMatrix::from_columns(&[v1, v2]),
        defective: false,
    }
}

/// Null vector of `[[a - l, b], [c, d - l]]`, taken from the better-scaled row.
fn eigvec_2x2(a: Complex, b: Complex, c: Complex, d: Complex, l: Complex) -> Option<ComplexVector> {
    let from_top = ComplexVector::from_vec(vec![b, l - a]);
    let from_bottom = ComplexVector::from_vec(vec![l - d, c]);
    let v = if from_top.norm() >= from_bottom.norm() {
        from_top
    } else {
        from_bottom
    };
    (v.norm() > 0.0).then(|| v.scale_real(1.0 / v.norm()))
}

/// Dominant eigenpair by power iteration from a seeded Gaussian start.
///
/// Converged when `||Mv - lambda v|| <= tol ||M||_F`. A spectrum whose largest
/// moduli tie (e.g. a generic unitary) yields `NoConvergence`.
pub fn power_iteration(
    m: &ComplexMatrix,
    tol: f64,
    maxit: usize,
    seed: u64,
) -> Result<(Complex, ComplexVector)> {
    if !m.is_square() {
        return Err(Error::DimError {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = gaussian_vector(&mut rng, m.rows());
    v = v.scale_real(1.0 / v.norm());
    let bound = tol * m.frobenius();
    for _ in 0..maxit {
        let w = m.mul_vec(&v);
        let lambda = dot_unchecked(&w, &v);
        let resid = w.axpy(-lambda, &v).norm();
        if resid <= bound {
            return Ok((lambda, v));
        }
        let wn = w.norm();
        if wn == 0.0 {
            return Ok((ZERO, v));
        }
        v = w.scale_real(1.0 / wn);
    }
    Err(Error::NoConvergence { iterations: maxit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unitary, rank_one_update, ONE};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        ComplexMatrix::from_fn(n, n, |i, j| g[(i, j)] + g[(j, i)].conj())
    }

    #[test]
    fn diagonal_input() {
        let m = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 0.0)]);
        let e = hermitian_eig(&m, 1e-10).unwrap();
        assert_eq!(e.values, vec![c(3.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(e.vectors, ComplexMatrix::identity(2));

        let swapped = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let e = hermitian_eig(&swapped, 1e-10).unwrap();
        assert_eq!(e.values, vec![c(3.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(e.vector(0), ComplexVector::basis(2, 1));
    }

    #[test]
    fn rank_one_spectrum() {
        // ||xi|| = 0.75 -> a^2 = 1.5625
        let xi = ComplexVector::from_vec(vec![c(0.45, 0.0), c(0.0, 0.6), c(0.0, 0.0)]);
        assert!((xi.norm() - 0.75).abs() < 1e-15);
        let s = rank_one_update(ONE, &xi);
        let e = hermitian_eig(&s, 1e-10).unwrap();
        assert!((e.values[0].re - 1.5625).abs() < 1e-12);
        for v in &e.values[1..] {
            assert!((v.re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_random_hermitian() {
        for seed in 0..20 {
            let m = random_hermitian(8, seed);
            let e = hermitian_eig(&m, 1e-10).unwrap();
            let lam = ComplexMatrix::from_diag(&e.values);
            let rec = &(&e.vectors * &lam) * &e.vectors.adjoint();
            assert!(rec.max_diff(&m) <= 1e-10 * m.max_abs().max(1.0));
            assert!(e.vectors.unitarity_residual() < 1e-12);
            for w in e.values.windows(2) {
                assert!(w[0].re >= w[1].re);
            }
            for (i, lam) in e.values.iter().enumerate() {
                let v = e.vector(i);
                let r = m.mul_vec(&v).axpy(-lam, &v).norm();
                assert!(r <= 100.0 * 1e-10 * m.max_abs());
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]);
        assert!(matches!(
            hermitian_eig(&m, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_2x2_examples() {
        let e = eig_2x2(&ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)]));
        assert_eq!(e.values, vec![c(2.0, 0.0), c(0.5, 0.0)]);
        assert!(!e.defective);

        let j = eig_2x2(&ComplexMatrix::from_rows(&[
            vec![ONE, ONE],
            vec![ZERO, ONE],
        ]));
        assert!(j.defective);
        assert_eq!(j.values, vec![ONE, ONE]);
        assert_eq!(j.vectors.cols(), 1);
        assert!((j.vector(0)[1]).norm() < 1e-15);

        let s = eig_2x2(&ComplexMatrix::identity(2).scale(c(0.0, 2.0)));
        assert!(!s.defective);
        assert_eq!(s.vectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn eig_2x2_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = ComplexMatrix::from_fn(2, 2, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let e = eig_2x2(&m);
            for i in 0..2 {
                let v = e.vector(i);
                let r = m.mul_vec(&v).axpy(-e.values[i], &v).norm();
                assert!(r < 1e-12, "residual {r}");
            }
        }
    }

    #[test]
    fn power_iteration_examples() {
        let m = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        let (l, _) = power_iteration(&m, 1e-10, 1000, 1).unwrap();
        assert!((l - c(2.0, 0.0)).norm() < 1e-9);

        let u = random_unitary(6, 9);
        assert!(matches!(
            power_iteration(&u, 1e-10, 2000, 1),
            Err(Error::NoConvergence { .. })
        ));
    }
}
