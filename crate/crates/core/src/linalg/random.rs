use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{dot_unchecked, Complex, ComplexMatrix, ComplexVector};

/// Standard complex Gaussian vector: real and imaginary parts `N(0, 1/2)`.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector::from_vec(
        (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(re * s, im * s)
            })
            .collect(),
    )
}

/// Uniformly distributed point on the unit sphere of `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    loop {
        let g = gaussian_vector(rng, n);
        if let Some(u) = g.normalized() {
            return u;
        }
    }
}

/// Gram-Schmidt on the columns of `m`, with one reorthogonalization pass.
///
/// Returns the `Q` factor of `m = QR` where `R` has positive real diagonal.
/// Columns must be linearly independent.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let mut cols: Vec<ComplexVector> = (0..m.cols()).map(|j| m.column(j)).collect();
    for j in 0..cols.len() {
        let mut v = cols[j].clone();
        for _ in 0..2 {
            for q in &cols[..j] {
                let p = dot_unchecked(&v, q);
                v = v.axpy(-p, q);
            }
        }
        cols[j] = v
            .normalized()
            .expect("orthonormalize_columns: linearly dependent columns");
    }
    ComplexMatrix::from_columns(&cols)
}

/// Haar-distributed unitary drawn from `rng`.
pub fn random_unitary_from_rng<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let cols: Vec<ComplexVector> = (0..n).map(|_| gaussian_vector(rng, n)).collect();
    orthonormalize_columns(&ComplexMatrix::from_columns(&cols))
}

/// Deterministic Haar unitary for a given seed.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    assert!(n >= 1, "random_unitary: n must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_from_rng(&mut rng, n)
}
