//! Entropic and entanglement quantities: von Neumann entropy, Wootters
//! concurrence, entanglement of formation, and the accessible information
//! the environment holds about the system.
//!
//! Accessible information comes in two independent routes: the production
//! path through the purity identity E_SA = S(rho_S) - J_SE of the tripartite
//! pure state, and a brute-force maximization over projective measurements
//! on the environment that serves as its oracle. All entropies are in bits.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, min_eigenvalue, partial_trace_matrix, ComplexMatrix, DensityOperator,
    PureState,
};
use crate::scalar::Real;
use crate::tol;

/// Generalized measurement: positive elements summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm<T> {
    elements: Vec<ComplexMatrix<T>>,
}

impl<T: Real> Povm<T> {
    pub fn new(elements: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let dim = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::InvalidPovm("elements of mixed dimension".into()));
            }
            if e.hermiticity_error() > T::of(tol::HERMITICITY) {
                return Err(Error::InvalidPovm("element not Hermitian".into()));
            }
            if min_eigenvalue(e)? < T::of(tol::POVM_PSD_FLOOR) {
                return Err(Error::InvalidPovm("element not positive".into()));
            }
            sum = sum.add(e);
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > T::of(tol::POVM_COMPLETENESS) {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {:.3e}",
                defect.as_f64()
            )));
        }
        Ok(Self { elements })
    }

    /// Rank-one projective pair along the Bloch direction (theta, phi).
    pub fn projective_pair(theta: T, phi: T) -> Result<Self> {
        let (up, down) = bloch_pair(theta, phi);
        let proj = |v: &[Complex<T>; 2]| {
            let mut m = ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    m.set(i, j, v[i] * v[j].conj());
                }
            }
            m
        };
        Self::new(vec![proj(&up), proj(&down)])
    }

    pub fn elements(&self) -> &[ComplexMatrix<T>] {
        &self.elements
    }
}

/// Orthonormal qubit basis along the Bloch direction (theta, phi).
fn bloch_pair<T: Real>(theta: T, phi: T) -> ([Complex<T>; 2], [Complex<T>; 2]) {
    let half = T::of(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    let phase = Complex::new(phi.cos(), phi.sin());
    let up = [
        Complex::new(c, T::zero()),
        phase * Complex::new(s, T::zero()),
    ];
    let down = [
        -phase.conj() * Complex::new(s, T::zero()),
        Complex::new(c, T::zero()),
    ];
    (up, down)
}

/// One sampled instant of the information flow: entropy of the system,
/// entanglement of formation with the apparatus, accessible information of
/// the environment. For a pure tripartite state these satisfy
/// E_SA + J_SE = S_S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoPoint<T> {
    pub t: T,
    pub s_s: T,
    pub e_sa: T,
    pub j_se: T,
}

impl<T: Real> InfoPoint<T> {
    /// Validate ranges (clamping round-off within 1e-9 into [0, 1]) and the
    /// purity identity.
    pub fn new(t: T, s_s: T, e_sa: T, j_se: T) -> Result<Self> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        let clamp = |what: &'static str, x: T| -> Result<T> {
            let slack = T::of(tol::INFO_CLAMP);
            if x < -slack || x > T::one() + slack {
                return Err(Error::OutOfRange {
                    what,
                    value: x.as_f64(),
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            Ok(x.max(T::zero()).min(T::one()))
        };
        let point = Self {
            t,
            s_s: clamp("S_S", s_s)?,
            e_sa: clamp("E_SA", e_sa)?,
            j_se: clamp("J_SE", j_se)?,
        };
        let defect = (point.e_sa + point.j_se - point.s_s).abs();
        if defect > T::of(tol::INFO_CLAMP) {
            return Err(Error::OutOfRange {
                what: "E_SA + J_SE - S_S",
                value: defect.as_f64(),
                lo: 0.0,
                hi: tol::INFO_CLAMP,
            });
        }
        Ok(point)
    }
}

/// Binary entropy in bits, with 0 log 0 = 0.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let term = |v: T| {
        if v <= T::zero() {
            T::zero()
        } else {
            -v * v.log2()
        }
    };
    term(x) + term(T::one() - x)
}

/// Entropy of a Hermitian unit-trace matrix from its spectrum; round-off
/// negatives above the floor are clamped to zero.
fn entropy_of_matrix<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let eig = hermitian_eig(m)?;
    let mut total = T::zero();
    for &lambda in &eig.values {
        if lambda <= T::zero() {
            if lambda < -T::of(tol::ENTROPY_CLAMP) {
                return Err(Error::InvalidDensity(format!(
                    "eigenvalue {:.3e} below the positivity floor",
                    lambda.as_f64()
                )));
            }
            continue;
        }
        total -= lambda * lambda.log2();
    }
    Ok(total)
}

/// Von Neumann entropy S(rho) = -tr(rho log2 rho) in bits.
pub fn von_neumann_entropy<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    entropy_of_matrix(rho.matrix())
}

/// Wootters concurrence of a two-qubit state, through the Hermitian form:
/// the spectrum of sqrt(rho) rho~ sqrt(rho) with rho~ = (Y(x)Y) rho* (Y(x)Y).
pub fn concurrence<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    if rho.dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "concurrence needs two qubits, got factors {:?}",
            rho.dims()
        )));
    }
    let yy = ComplexMatrix::pauli_y().tensor(&ComplexMatrix::pauli_y())?;
    let spin_flipped = yy.mul(&rho.matrix().conj()).mul(&yy);

    // Pin spectrum entries at round-off to exact zero before square roots:
    // sqrt turns O(eps) noise on a true zero into O(sqrt(eps)).
    let noise_floor = |top: T| top.max(T::zero()) * T::epsilon() * T::of(64.0);

    let eig_rho = hermitian_eig(rho.matrix())?;
    let floor_rho = noise_floor(eig_rho.values[0]);
    let sqrt_rho =
        eig_rho.recompose(|x| if x <= floor_rho { T::zero() } else { x.sqrt() });
    let core = sqrt_rho.mul(&spin_flipped).mul(&sqrt_rho);
    let eig = hermitian_eig(&core)?;
    let floor_core = noise_floor(eig.values[0]);
    let roots: Vec<T> = eig
        .values
        .iter()
        .map(|&x| if x <= floor_core { T::zero() } else { x.sqrt() })
        .collect();
    let c = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(c.max(T::zero()))
}

/// Entanglement of formation in ebits from the concurrence:
/// E = h((1 + sqrt(1 - C^2))/2).
pub fn eof<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    let c = concurrence(rho)?;
    let arg = (T::one() + (T::one() - c * c).max(T::zero()).sqrt()) * T::of(0.5);
    Ok(binary_entropy(arg))
}

/// Accessible information of the environment about the system through the
/// purity identity: J_SE = S(rho_S) - E(rho_SA) for a pure S-A-E state.
pub fn accessible_info_kw<T: Real>(sae: &PureState<T>) -> Result<T> {
    if sae.dims() != [2, 2, 2] {
        return Err(Error::Dimension(format!(
            "needs a pure state on three qubits, got factors {:?}",
            sae.dims()
        )));
    }
    let rho = sae.density();
    let s_s = von_neumann_entropy(&rho.partial_trace(&[0])?)?;
    let e_sa = eof(&rho.partial_trace(&[0, 1])?)?;
    Ok(s_s - e_sa)
}

/// Classical information about S extracted by one fixed measurement on E:
/// S(rho_S) - sum_i p_i S(rho_S given outcome i).
pub fn accessible_info_with_povm<T: Real>(
    rho_se: &DensityOperator<T>,
    povm: &Povm<T>,
) -> Result<T> {
    if rho_se.dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "needs a system-environment qubit pair, got factors {:?}",
            rho_se.dims()
        )));
    }
    let s_s = entropy_of_matrix(&partial_trace_matrix(rho_se.matrix(), &[2, 2], &[0])?)?;
    let identity = ComplexMatrix::identity(2);
    let mut conditional = T::zero();
    for element in povm.elements() {
        if element.rows() != 2 {
            return Err(Error::InvalidPovm(
                "measurement must act on the environment qubit".into(),
            ));
        }
        let m = identity.tensor(element)?;
        let branch = m.mul(rho_se.matrix()).mul(&m.adjoint());
        let weight = branch.trace().re;
        if weight <= T::of(1e-14) {
            continue;
        }
        let cond = partial_trace_matrix(&branch, &[2, 2], &[0])?
            .scale_re(T::one() / weight);
        conditional += weight * entropy_of_matrix(&cond)?;
    }
    Ok(s_s - conditional)
}

/// Lower bound on the accessible information by direct search: a grid over
/// Bloch-angle projective pairs on the environment followed by simplex
/// refinement around the best grid point. For the rank-two states arising
/// from amplitude damping the projective optimum attains the POVM optimum,
/// so this serves as the oracle for [`accessible_info_kw`].
pub fn accessible_info_bruteforce<T: Real>(
    rho_se: &DensityOperator<T>,
    grid: usize,
) -> Result<T> {
    if rho_se.dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "needs a system-environment qubit pair, got factors {:?}",
            rho_se.dims()
        )));
    }
    if grid < 64 {
        return Err(Error::TooFew { what: "angular grid points", min: 64, got: grid });
    }
    let objective = |theta: T, phi: T| -> Result<T> {
        accessible_info_with_povm(rho_se, &Povm::projective_pair(theta, phi)?)
    };

    let pi = T::of(std::f64::consts::PI);
    let d_theta = pi / T::of((grid - 1) as f64);
    let d_phi = T::of(2.0) * pi / T::of(grid as f64);
    let mut best = (T::zero(), T::zero(), T::neg_infinity());
    for i in 0..grid {
        let theta = d_theta * T::of(i as f64);
        for j in 0..grid {
            let phi = d_phi * T::of(j as f64);
            let value = objective(theta, phi)?;
            if value > best.2 {
                best = (theta, phi, value);
            }
        }
    }
    let refined = nelder_mead_max(&objective, [best.0, best.1], [d_theta, d_phi])?;
    Ok(refined.max(best.2))
}

/// Two-dimensional Nelder-Mead ascent; deterministic given the seed point.
fn nelder_mead_max<T: Real>(
    f: &impl Fn(T, T) -> Result<T>,
    start: [T; 2],
    scale: [T; 2],
) -> Result<T> {
    let eval = |x: [T; 2]| -> Result<T> { f(x[0], x[1]) };
    let mut simplex = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut values = [eval(simplex[0])?, eval(simplex[1])?, eval(simplex[2])?];

    for _ in 0..200 {
        // Order descending by value (maximization).
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite objective"));
        let (bi, mi, wi) = (order[0], order[1], order[2]);

        let spread = values[bi] - values[wi];
        let diameter = (0..2)
            .map(|k| {
                let lo = simplex[0][k].min(simplex[1][k]).min(simplex[2][k]);
                let hi = simplex[0][k].max(simplex[1][k]).max(simplex[2][k]);
                hi - lo
            })
            .fold(T::zero(), T::max);
        if spread < T::of(1e-13) || diameter < T::of(1e-8) {
            break;
        }

        let centroid = [
            (simplex[bi][0] + simplex[mi][0]) * T::of(0.5),
            (simplex[bi][1] + simplex[mi][1]) * T::of(0.5),
        ];
        let shifted = |coef: T| {
            [
                centroid[0] + coef * (centroid[0] - simplex[wi][0]),
                centroid[1] + coef * (centroid[1] - simplex[wi][1]),
            ]
        };

        let reflected = shifted(T::one());
        let fr = eval(reflected)?;
        if fr > values[bi] {
            let expanded = shifted(T::of(2.0));
            let fe = eval(expanded)?;
            if fe > fr {
                simplex[wi] = expanded;
                values[wi] = fe;
            } else {
                simplex[wi] = reflected;
                values[wi] = fr;
            }
        } else if fr > values[mi] {
            simplex[wi] = reflected;
            values[wi] = fr;
        } else {
            let contracted = shifted(T::of(-0.5));
            let fc = eval(contracted)?;
            if fc > values[wi] {
                simplex[wi] = contracted;
                values[wi] = fc;
            } else {
                // Shrink toward the best vertex.
                for k in [mi, wi] {
                    simplex[k] = [
                        (simplex[k][0] + simplex[bi][0]) * T::of(0.5),
                        (simplex[k][1] + simplex[bi][1]) * T::of(0.5),
                    ];
                    values[k] = eval(simplex[k])?;
                }
            }
        }
    }
    Ok(values[0].max(values[1]).max(values[2]))
}
