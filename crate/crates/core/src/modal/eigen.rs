//! Dense real nonsymmetric eigensolver: eigenvalues from a real Schur
//! decomposition, eigenvectors by shifted complex inverse iteration.
//!
//! The contract is residual-based, not algorithmic: every returned pair
//! (s, v) with ‖v‖ = 1 satisfies ‖A·v − s·v‖ ≤ `RESIDUAL_TOL`·‖A‖_F.
//! Conjugate partners are emitted as exact complex conjugates, and each
//! vector's largest component is rotated to the positive real axis so the
//! output is deterministic.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Residual bound enforced on every eigenpair, relative to ‖A‖_F.
pub const RESIDUAL_TOL: f64 = 1e-8;

const MAX_QR_ITERATIONS: usize = 100_000;

/// Eigenvalues sorted by ascending |Im|, conjugates adjacent (positive
/// imaginary part first); `vectors.column(j)` pairs with `values[j]`.
#[derive(Debug, Clone)]
pub struct ComplexEigen {
    pub values: Vec<Complex<f64>>,
    pub vectors: DMatrix<Complex<f64>>,
}

/// Full complex eigendecomposition of a dense real matrix.
pub fn complex_eigen(a: &DMatrix<f64>) -> Result<ComplexEigen> {
    assert_eq!(a.nrows(), a.ncols(), "eigenproblem needs a square matrix");
    let n = a.nrows();
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, MAX_QR_ITERATIONS)
        .ok_or(Error::EigenNoConvergence)?;
    let mut values: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| {
        (x.im.abs(), x.re, -x.im)
            .partial_cmp(&(y.im.abs(), y.re, -y.im))
            .expect("finite eigenvalues")
    });

    let scale = a.norm();
    let a_complex: DMatrix<Complex<f64>> = a.map(|x| Complex::new(x, 0.0));
    let mut vectors = DMatrix::<Complex<f64>>::zeros(n, n);

    let mut j = 0;
    while j < n {
        let lambda = values[j];
        let conj_adjacent = lambda.im > 0.0
            && j + 1 < n
            && (values[j + 1] - lambda.conj()).norm() <= 1e-12 * lambda.norm().max(1.0);
        let v = inverse_iteration(&a_complex, a, lambda, scale)?;
        vectors.set_column(j, &v);
        if conj_adjacent {
            vectors.set_column(j + 1, &v.map(|z| z.conj()));
            j += 2;
        } else {
            j += 1;
        }
    }

    Ok(ComplexEigen { values, vectors })
}

/// 2-norm residual ‖A·v − s·v‖ of a candidate pair (assumes ‖v‖ = 1).
pub fn pair_residual(a: &DMatrix<f64>, s: Complex<f64>, v: &DVector<Complex<f64>>) -> f64 {
    let av = DVector::from_fn(a.nrows(), |r, _| {
        let mut acc = Complex::new(0.0, 0.0);
        for c in 0..a.ncols() {
            acc += v[c] * a[(r, c)];
        }
        acc
    });
    (av - v * s).norm()
}

fn inverse_iteration(
    a_complex: &DMatrix<Complex<f64>>,
    a: &DMatrix<f64>,
    lambda: Complex<f64>,
    scale: f64,
) -> Result<DVector<Complex<f64>>> {
    let n = a_complex.nrows();
    let target = RESIDUAL_TOL * scale;
    let mut best: Option<(f64, DVector<Complex<f64>>)> = None;

    // The unshifted factorization almost always succeeds (partial pivoting
    // of a numerically singular matrix produces a tiny pivot, not a zero
    // one); perturbed shifts cover exact singularity and slow starts.
    'shifts: for &delta in &[0.0, 1e-12, 1e-8] {
        let shift = lambda + Complex::new(delta * scale.max(1.0), delta * scale.max(1.0));
        let mut shifted = a_complex.clone();
        for d in 0..n {
            shifted[(d, d)] -= shift;
        }
        let lu = shifted.lu();
        let mut v = DVector::from_element(n, Complex::new(1.0 / (n as f64).sqrt(), 0.0));
        for _ in 0..3 {
            let Some(next) = lu.solve(&v) else {
                continue 'shifts;
            };
            let norm = next.norm();
            if !norm.is_finite() || norm == 0.0 {
                continue 'shifts;
            }
            v = next / Complex::new(norm, 0.0);
            let res = pair_residual(a, lambda, &v);
            if best.as_ref().map_or(true, |(b, _)| res < *b) {
                best = Some((res, v.clone()));
            }
            if res <= 0.1 * target {
                break 'shifts;
            }
        }
    }

    match best {
        Some((res, v)) if res <= target => Ok(normalize_phase(v)),
        _ => Err(Error::EigenNoConvergence),
    }
}

/// Rotate so the largest-modulus component lies on the positive real axis.
fn normalize_phase(mut v: DVector<Complex<f64>>) -> DVector<Complex<f64>> {
    let mut max_idx = 0;
    let mut max_norm = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > max_norm {
            max_norm = m;
            max_idx = i;
        }
    }
    let pivot = v[max_idx];
    if pivot.norm() > 0.0 {
        let phase = pivot / Complex::new(pivot.norm(), 0.0);
        // dividing by a unit-modulus phase keeps the vector normalized
        v /= phase;
    }
    v
}
