//! Cyclic Jacobi eigendecomposition for small complex Hermitian matrices.
//!
//! Each sweep annihilates every off-diagonal element once with a complex
//! plane rotation; convergence is quadratic and a handful of sweeps settles
//! anything up to 8x8 to machine precision. No external solver, bit-stable
//! output for identical input.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::tol;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix: eigenvalues in descending
/// order, eigenvectors as the matching columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// Rebuild sum_i f(lambda_i) v_i v_i^dag.
    pub fn recompose(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors.get(i, k);
                for j in 0..n {
                    let vj = self.vectors.get(j, k).conj();
                    let add = vi * vj * Complex::new(w, T::zero());
                    out.set(i, j, out.get(i, j) + add);
                }
            }
        }
        out
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, eigenvalues sorted
/// descending. Errors if the input deviates from Hermiticity by more than
/// the accepted slack.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermiticity_error();
    if deviation > T::of(tol::HERMITIAN_INPUT) {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }

    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::<T>::identity(n);

    // Quadratic convergence: stop once every off-diagonal modulus sits at
    // round-off relative to the matrix scale.
    let threshold = (a.max_abs() + T::one()) * T::epsilon() * T::of(n as f64);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite eigenvalues"));

    let sorted_values: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(Eigen { values: sorted_values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let eig = hermitian_eig(m)?;
    Ok(*eig.values.last().expect("nonempty spectrum"))
}

/// One complex Jacobi rotation annihilating A[p][q], accumulated into `v`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r < T::min_positive_value() {
        return;
    }
    // Unit phase of the pivot; the rotation G has
    //   G[p][p] = c, G[p][q] = s*phase, G[q][p] = -s*conj(phase), G[q][q] = c.
    let phase = apq / Complex::new(r, T::zero());
    let diff = a.get(p, p).re - a.get(q, q).re;
    let theta = diff / (T::of(2.0) * r);
    // Smaller root of t^2 - 2*theta*t - 1 = 0 keeps the rotation angle
    // below pi/4 for stability.
    let t = {
        let tt = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            tt
        } else {
            -tt
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    let n = a.rows();
    let cc = Complex::new(c, T::zero());
    let sc = Complex::new(s, T::zero());

    // Right multiplication A <- A G.
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * cc - akq * sc * phase.conj());
        a.set(k, q, akp * sc * phase + akq * cc);
    }
    // Left multiplication A <- G^dag A.
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * cc - aqk * sc * phase);
        a.set(q, k, apk * sc * phase.conj() + aqk * cc);
    }
    // Accumulate eigenvectors V <- V G.
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * cc - vkq * sc * phase.conj());
        v.set(k, q, vkp * sc * phase + vkq * cc);
    }
    // Pin the annihilated pair to exact zero.
    a.set(p, q, Complex::new(T::zero(), T::zero()));
    a.set(q, p, Complex::new(T::zero(), T::zero()));
}
