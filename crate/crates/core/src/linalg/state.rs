//! Density operators and pure states over labeled tensor factors.
//!
//! Subsystem ordering is fixed across the crate: index 0 is the system S,
//! index 1 the apparatus A, index 2 the environment E.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::eig::{hermitian_eig, min_eigenvalue};
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::tol;

/// Hermitian, unit-trace, positive-semidefinite operator on a tensor
/// product of subsystems. Invariants are checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    dims: Vec<usize>,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validate and wrap a matrix as a density operator on the given factors.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix<T>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDensity(
                "subsystem dimensions must all be at least 2".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::InvalidDensity(format!(
                "matrix is {}x{} but the factors multiply to {total}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > T::of(tol::HERMITICITY) {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {:.3e})",
                herm.as_f64()
            )));
        }
        let trace = matrix.trace();
        if (trace.re - T::one()).abs() > T::of(tol::UNIT_TRACE) {
            return Err(Error::InvalidDensity(format!(
                "trace {:.12} is not 1",
                trace.re.as_f64()
            )));
        }
        let lo = min_eigenvalue(&matrix)?;
        if lo < T::of(tol::PSD_FLOOR) {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:.3e}",
                lo.as_f64()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Single-qubit state from Bloch coordinates (I + r n.sigma)/2.
    pub fn from_bloch(r: T, theta: T, phi: T) -> Result<Self> {
        if r < T::zero() || r > T::one() {
            return Err(Error::OutOfRange {
                what: "Bloch radius",
                value: r.as_f64(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        let (nx, ny, nz) = (
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        );
        let half = T::of(0.5);
        let m = ComplexMatrix::identity(2)
            .add(&ComplexMatrix::pauli_x().scale_re(nx))
            .add(&ComplexMatrix::pauli_y().scale_re(ny))
            .add(&ComplexMatrix::pauli_z().scale_re(nz))
            .scale_re(half);
        Self::new(vec![2], m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Trace out every factor not named in `keep`; the kept factors stay in
    /// ascending index order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let reduced = partial_trace_matrix(&self.matrix, &self.dims, keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        let dims = kept.iter().map(|&i| self.dims[i]).collect();
        Self::new(dims, reduced)
    }
}

/// Partial trace on a raw square matrix over the given factor dimensions.
/// Exposed separately so callers can reduce non-normalized operators
/// (e.g. measurement branches) as well.
pub fn partial_trace_matrix<T: Real>(
    matrix: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total: usize = dims.iter().product();
    assert_eq!(matrix.rows(), total, "matrix does not match the factors");
    assert!(matrix.is_square());

    if keep.is_empty() {
        return Err(Error::InvalidIndexSet("empty keep set".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidIndexSet("duplicate subsystem index".into()));
    }
    if kept.iter().any(|&i| i >= dims.len()) {
        return Err(Error::InvalidIndexSet(format!(
            "index out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    // Flat offsets contributed by each composite sub-index.
    let offsets = |subset: &[usize]| -> Vec<usize> {
        let size: usize = subset.iter().map(|&i| dims[i]).product();
        let mut out = Vec::with_capacity(size);
        for mut flat in 0..size {
            let mut offset = 0;
            for &i in subset.iter().rev() {
                offset += (flat % dims[i]) * strides[i];
                flat /= dims[i];
            }
            out.push(offset);
        }
        out
    };
    let kept_offsets = offsets(&kept);
    let traced_offsets = if traced.is_empty() { vec![0] } else { offsets(&traced) };

    let kd = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for (a, &ra) in kept_offsets.iter().enumerate() {
        for (b, &cb) in kept_offsets.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &off in &traced_offsets {
                acc += matrix.get(ra + off, cb + off);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Trace distance (1/2)||a - b||_1 between two density operators.
pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    if a.dims() != b.dims() {
        return Err(Error::Dimension(format!(
            "trace distance between factors {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let diff = a.matrix().sub(b.matrix());
    let eig = hermitian_eig(&diff)?;
    Ok(eig.values.iter().map(|v| v.abs()).sum::<T>() * T::of(0.5))
}

/// Normalized state vector over labeled tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    dims: Vec<usize>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Validate and wrap an amplitude vector.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidState(
                "subsystem dimensions must all be at least 2".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for total dimension {total}",
                amplitudes.len()
            )));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt();
        if (norm - T::one()).abs() > T::of(tol::STATE_NORM) {
            return Err(Error::InvalidState(format!(
                "norm {:.12} is not 1",
                norm.as_f64()
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state |index> on the given factors.
    pub fn basis(dims: Vec<usize>, index: usize) -> Self {
        let total: usize = dims.iter().product();
        assert!(index < total, "basis index out of range");
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); total];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Tensor product of two pure states; factor labels concatenate.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let total = self.amplitudes.len() * other.amplitudes.len();
        if total > crate::linalg::matrix::MAX_DIM {
            return Err(Error::TooLarge { rows: total, cols: total });
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amplitudes = Vec::with_capacity(total);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self::new(dims, amplitudes)
    }

    /// Projector |psi><psi| as a density operator, renormalized so the trace
    /// is exactly one.
    pub fn density(&self) -> DensityOperator<T> {
        let n = self.amplitudes.len();
        let norm_sqr: T = self.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = self.amplitudes[i] * self.amplitudes[j].conj()
                    / Complex::new(norm_sqr, T::zero());
                m.set(i, j, v);
            }
        }
        DensityOperator::new(self.dims.clone(), m)
            .expect("projector of a normalized vector is a valid state")
    }
}
