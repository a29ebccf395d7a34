//! Amplitude-damping dynamics of the apparatus qubit.
//!
//! A Lorentzian reservoir of width `lambda` coupled with strength `gamma0`
//! drives the apparatus through an amplitude-damping channel. The damping
//! probability `p(t)` and the decay rate `gamma(t)` are evaluated in closed
//! form; both regimes share one bracket function
//!
//! ```text
//! B(t) = cosh(d t/2) + (lambda/d) sinh(d t/2),   d^2 = lambda^2 - 2 gamma0 lambda,
//! ```
//!
//! which turns trigonometric for `d^2 < 0` (the oscillatory regime,
//! `lambda < 2 gamma0`). Then `1 - p(t) = exp(-lambda t) B(t)^2` and
//! `gamma(t) = gamma0 lambda t sc(y) / B(t)` with `sc` the sinc-like ratio of
//! the regime. Everything downstream (entanglement, information flow, the
//! non-Markovianity measure) is computed from `p(t)`; `gamma` is only
//! reported, never integrated, because it has poles exactly where `p = 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, ComplexMatrix, DensityOperator, PureState};
use crate::scalar::Real;
use crate::tol;

/// Decay rate at one instant; the denominator of the closed form vanishes
/// at isolated times where `p = 1`, reported as a pole rather than a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayRate<T> {
    Finite(T),
    Pole,
}

impl<T: Real> DecayRate<T> {
    pub fn is_pole(&self) -> bool {
        matches!(self, DecayRate::Pole)
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            DecayRate::Finite(g) => Some(*g),
            DecayRate::Pole => None,
        }
    }
}

/// Reservoir parameters. `gamma0` sets the time unit (fixed to 1 here),
/// `lambda_ratio` is the spectral width over `gamma0`, and `omega0` is the
/// transition frequency, which the closed forms never use; it is carried
/// for completeness only.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec<T> {
    gamma0: T,
    lambda_ratio: T,
    omega0: T,
}

impl<T: Real> BathSpec<T> {
    /// Reservoir with spectral width `lambda_ratio * gamma0`, in units where
    /// `gamma0 = 1`.
    pub fn new(lambda_ratio: T) -> Result<Self> {
        if lambda_ratio <= T::zero() || !lambda_ratio.is_finite() {
            return Err(Error::OutOfRange {
                what: "lambda_ratio",
                value: lambda_ratio.as_f64(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self {
            gamma0: T::one(),
            lambda_ratio,
            omega0: T::one(),
        })
    }

    pub fn gamma0(&self) -> T {
        self.gamma0
    }

    pub fn lambda_ratio(&self) -> T {
        self.lambda_ratio
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    fn lambda(&self) -> T {
        self.lambda_ratio * self.gamma0
    }

    /// d^2 = lambda^2 - 2 gamma0 lambda; negative in the oscillatory regime.
    pub fn d_squared(&self) -> T {
        let l = self.lambda();
        l * l - T::of(2.0) * self.gamma0 * l
    }

    /// True when `lambda < 2 gamma0`, where the decay rate oscillates and
    /// takes negative values.
    pub fn is_oscillatory(&self) -> bool {
        self.lambda_ratio < T::of(2.0)
    }

    /// Oscillatory-regime bracket cos(y) + (lambda t/2) sinc(y), y = |d| t/2.
    /// Its zeros are exactly the times where p = 1 and gamma diverges.
    fn bracket_osc(&self, t: T) -> T {
        debug_assert!(self.is_oscillatory());
        let ad = (-self.d_squared()).sqrt();
        let y = ad * t * T::of(0.5);
        y.cos() + self.lambda() * t * T::of(0.5) * sinc(y)
    }

    /// exp(-lambda t / 2) B(t); squaring it gives 1 - p(t) without overflow
    /// in either regime.
    fn scaled_bracket(&self, t: T) -> T {
        let z = self.lambda() * t * T::of(0.5);
        let d2 = self.d_squared();
        if d2 < T::zero() {
            (-z).exp() * self.bracket_osc(t)
        } else {
            let y = d2.sqrt() * t * T::of(0.5);
            if y < T::of(20.0) {
                (-z).exp() * (y.cosh() + self.lambda() * t * T::of(0.5) * sinhc(y))
            } else {
                // Fused exponentials; both arguments are <= 0 since y < z.
                let ratio = self.lambda() / d2.sqrt();
                let half = T::of(0.5);
                half * (T::one() + ratio) * (y - z).exp()
                    + half * (T::one() - ratio) * (-y - z).exp()
            }
        }
    }

    /// 1 - p(t), computed directly to avoid cancellation near p = 1.
    pub fn one_minus_p(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        let sb = self.scaled_bracket(t);
        Ok(sb * sb)
    }

    /// Damping probability p(t), clamped to [0, 1] within round-off.
    pub fn p_of_t(&self, t: T) -> Result<T> {
        let omp = self.one_minus_p(t)?;
        let mut p = T::one() - omp;
        let clamp = T::of(tol::PROB_CLAMP);
        if p < T::zero() && p > -clamp {
            p = T::zero();
        }
        if p > T::one() && p < T::one() + clamp {
            p = T::one();
        }
        Ok(p)
    }

    /// Decay rate gamma(t) in units of gamma0, or a pole marker where the
    /// bracket vanishes.
    pub fn gamma_of_t(&self, t: T) -> Result<DecayRate<T>> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        let l = self.lambda();
        let d2 = self.d_squared();
        if d2 < T::zero() {
            let ad = (-d2).sqrt();
            let y = ad * t * T::of(0.5);
            let b = self.bracket_osc(t);
            if b.abs() < T::of(tol::POLE_BRACKET) {
                return Ok(DecayRate::Pole);
            }
            Ok(DecayRate::Finite(self.gamma0 * l * t * sinc(y) / b))
        } else {
            // gamma = 2 g0 l tanh(y) / (d + l tanh(y)) rewritten through
            // tanhc so d -> 0 stays finite; the denominator is >= 1.
            let y = d2.sqrt() * t * T::of(0.5);
            let th = tanhc(y);
            let denom = T::one() + l * t * T::of(0.5) * th;
            Ok(DecayRate::Finite(self.gamma0 * l * t * th / denom))
        }
    }

    /// Times in (0, t_end) where the bracket vanishes (gamma poles, p = 1),
    /// located by bisection on sign changes. Empty in the Markovian regime.
    pub fn poles_in(&self, t_end: T) -> Vec<T> {
        if !self.is_oscillatory() || t_end <= T::zero() {
            return Vec::new();
        }
        let ad = (-self.d_squared()).sqrt();
        // Bracket zeros are spaced 2*pi/|d| apart; sample well below that.
        let dt = T::of(std::f64::consts::PI / 8.0) / ad;
        let mut poles = Vec::new();
        let mut t_prev = T::zero();
        let mut b_prev = self.bracket_osc(t_prev);
        let mut t = dt;
        while t_prev < t_end {
            let t_hi = t.min(t_end);
            let b = self.bracket_osc(t_hi);
            if (b_prev > T::zero()) != (b > T::zero()) {
                poles.push(self.bisect_bracket(t_prev, t_hi));
            }
            t_prev = t_hi;
            b_prev = b;
            t += dt;
        }
        poles
    }

    fn bisect_bracket(&self, mut lo: T, mut hi: T) -> T {
        let mut b_lo = self.bracket_osc(lo);
        for _ in 0..200 {
            let mid = (lo + hi) * T::of(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            let b_mid = self.bracket_osc(mid);
            if (b_lo > T::zero()) == (b_mid > T::zero()) {
                lo = mid;
                b_lo = b_mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) * T::of(0.5)
    }

    /// Snapshot of the channel at time `t`.
    pub fn channel_at(&self, t: T) -> Result<ChannelPoint<T>> {
        let p = self.p_of_t(t)?;
        let gamma = self.gamma_of_t(t)?;
        let (m1, m2) = kraus_at(p)?;
        let dilation = dilation_at(p)?;
        let point = ChannelPoint { t, p, gamma, kraus: (m1, m2), dilation };
        debug_assert!(point.completeness_error().as_f64() < tol::KRAUS_COMPLETENESS);
        debug_assert!(point.unitarity_error().as_f64() < tol::DILATION_UNITARITY);
        Ok(point)
    }

    /// Map between two times of the evolution, Lambda(t2, 0) = Lambda(t2, t1)
    /// Lambda(t1, 0). For amplitude damping the composition stays in the
    /// family with parameter p21 = 1 - (1 - p2)/(1 - p1), which leaves [0, 1]
    /// exactly where the channel loses CP-divisibility.
    pub fn intermediate_map(&self, t1: T, t2: T) -> Result<IntermediateMap<T>> {
        if t1 < T::zero() {
            return Err(Error::NegativeTime(t1.as_f64()));
        }
        if t2 <= t1 {
            return Err(Error::OutOfRange {
                what: "t2 (must exceed t1)",
                value: t2.as_f64(),
                lo: t1.as_f64(),
                hi: f64::INFINITY,
            });
        }
        let omp1 = self.one_minus_p(t1)?;
        if omp1 < T::of(tol::PROB_CLAMP) {
            return Err(Error::UndefinedIntermediateMap(t1.as_f64()));
        }
        let omp2 = self.one_minus_p(t2)?;
        let survival = omp2 / omp1; // 1 - p21, always >= 0
        let p21 = T::one() - survival;

        // Choi matrix assembled from the action on basis operators; valid as
        // a linear map even when p21 < 0.
        let root = survival.sqrt();
        let mut choi = ComplexMatrix::zeros(4, 4);
        let re = |x: T| Complex::new(x, T::zero());
        choi.set(0, 0, re(T::one()));
        choi.set(0, 3, re(root));
        choi.set(3, 0, re(root));
        choi.set(2, 2, re(p21));
        choi.set(3, 3, re(survival));

        let map = IntermediateMap { t1, t2, p21, choi };
        debug_assert!(map.choi.hermiticity_error().as_f64() < tol::HERMITICITY);
        debug_assert!((map.choi.trace().re.as_f64() - 2.0).abs() < tol::CHOI_TRACE);
        Ok(map)
    }

    /// Fourth-order fixed-step integration of the master equation
    /// d rho/dt = gamma(t) (s- rho s+ - {s+ s-, rho}/2) for a single qubit.
    ///
    /// In the oscillatory regime the grid never touches a gamma pole: the
    /// integration runs piecewise between pole windows and the state is
    /// carried across each window by the closed-form damping map, which is
    /// finite there even though gamma is not.
    pub fn integrate_master_equation(
        &self,
        rho0: &DensityOperator<T>,
        t_end: T,
        steps: usize,
    ) -> Result<DensityOperator<T>> {
        if rho0.dims() != [2] {
            return Err(Error::Dimension(format!(
                "master equation integrates a single qubit, got factors {:?}",
                rho0.dims()
            )));
        }
        if steps < 100 {
            return Err(Error::TooFew { what: "integration steps", min: 100, got: steps });
        }
        if t_end < T::zero() {
            return Err(Error::NegativeTime(t_end.as_f64()));
        }
        if t_end == T::zero() {
            return Ok(rho0.clone());
        }

        let h = t_end / T::of(steps as f64);
        let skip = T::of(4.0) * h;

        // Alternating run/jump pieces along [0, t_end].
        enum Piece<T> {
            Run(T, T),
            Jump(T, T),
        }
        let mut pieces = Vec::new();
        let mut cursor = T::zero();
        for pole in self.poles_in(t_end) {
            let a = (pole - skip).max(cursor);
            let b = (pole + skip).min(t_end);
            if a > cursor {
                pieces.push(Piece::Run(cursor, a));
            }
            pieces.push(Piece::Jump(a, b));
            cursor = b;
        }
        if cursor < t_end {
            pieces.push(Piece::Run(cursor, t_end));
        }

        let mut rho = rho0.matrix().clone();
        for piece in pieces {
            match piece {
                Piece::Run(a, b) => {
                    let span = b - a;
                    let n = (span / h).ceil().as_f64() as usize;
                    let n = n.max(1);
                    let hh = span / T::of(n as f64);
                    let mut t = a;
                    for _ in 0..n {
                        rho = self.rk4_step(&rho, t, hh)?;
                        t += hh;
                    }
                }
                Piece::Jump(a, b) => {
                    let omp_a = self.one_minus_p(a)?;
                    if omp_a <= T::zero() {
                        return Err(Error::PoleCrossed(a.as_f64()));
                    }
                    let survival = self.one_minus_p(b)? / omp_a;
                    rho = formal_damping(&rho, survival);
                }
            }
        }
        DensityOperator::new(vec![2], rho)
    }

    fn rk4_step(&self, rho: &ComplexMatrix<T>, t: T, h: T) -> Result<ComplexMatrix<T>> {
        let half = T::of(0.5);
        let k1 = self.lindblad_rhs(t, rho)?;
        let k2 = self.lindblad_rhs(t + h * half, &rho.add(&k1.scale_re(h * half)))?;
        let k3 = self.lindblad_rhs(t + h * half, &rho.add(&k2.scale_re(h * half)))?;
        let k4 = self.lindblad_rhs(t + h, &rho.add(&k3.scale_re(h)))?;
        let sixth = h / T::of(6.0);
        let sum = k1
            .add(&k2.scale_re(T::of(2.0)))
            .add(&k3.scale_re(T::of(2.0)))
            .add(&k4);
        Ok(rho.add(&sum.scale_re(sixth)))
    }

    fn lindblad_rhs(&self, t: T, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let gamma = match self.gamma_of_t(t)? {
            DecayRate::Finite(g) => g,
            DecayRate::Pole => return Err(Error::PoleCrossed(t.as_f64())),
        };
        let lower = ComplexMatrix::unit(2, 0, 1); // sigma-
        let raise = ComplexMatrix::unit(2, 1, 0); // sigma+
        let number = raise.mul(&lower);
        let sandwich = lower.mul(rho).mul(&raise);
        let anti = number.mul(rho).add(&rho.mul(&number)).scale_re(T::of(0.5));
        Ok(sandwich.sub(&anti).scale_re(gamma))
    }
}

/// Amplitude-damping map with survival factor `1 - q` applied in closed
/// form; valid for any real q <= 1.
fn formal_damping<T: Real>(rho: &ComplexMatrix<T>, survival: T) -> ComplexMatrix<T> {
    let q = T::one() - survival;
    let root = Complex::new(survival.max(T::zero()).sqrt(), T::zero());
    let mut out = rho.clone();
    out.set(0, 0, rho.get(0, 0) + rho.get(1, 1) * Complex::new(q, T::zero()));
    out.set(0, 1, rho.get(0, 1) * root);
    out.set(1, 0, rho.get(1, 0) * root);
    out.set(1, 1, rho.get(1, 1) * Complex::new(survival, T::zero()));
    out
}

/// Kraus pair of the amplitude-damping channel at damping probability `p`:
/// M1 = diag(1, sqrt(1-p)), M2 with the single entry sqrt(p) at (0, 1).
pub fn kraus_at<T: Real>(p: T) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    check_probability(p)?;
    let mut m1 = ComplexMatrix::identity(2);
    m1.set(1, 1, Complex::new((T::one() - p).sqrt(), T::zero()));
    let mut m2 = ComplexMatrix::zeros(2, 2);
    m2.set(0, 1, Complex::new(p.sqrt(), T::zero()));
    Ok((m1, m2))
}

/// Unitary dilation of the damping channel on apparatus (x) environment,
/// basis order |00>, |01>, |10>, |11>:
///
/// ```text
/// U|00> = |00>,    U|10> = sqrt(1-p)|10> + sqrt(p)|01>,
/// ```
///
/// completed to a rotation by arcsin(sqrt(p)) in the |01>,|10> plane and the
/// identity on |00>, |11>. Tracing out the second factor after acting on
/// rho (x) |0><0| reproduces the Kraus map.
pub fn dilation_at<T: Real>(p: T) -> Result<ComplexMatrix<T>> {
    check_probability(p)?;
    let c = (T::one() - p).sqrt();
    let s = p.sqrt();
    let re = |x: T| Complex::new(x, T::zero());
    let mut u = ComplexMatrix::zeros(4, 4);
    u.set(0, 0, re(T::one()));
    u.set(1, 1, re(c));
    u.set(1, 2, re(s));
    u.set(2, 1, re(-s));
    u.set(2, 2, re(c));
    u.set(3, 3, re(T::one()));
    Ok(u)
}

/// Apply an operator-sum map sum_i M_i rho M_i^dag.
pub fn apply_channel<T: Real>(
    kraus: &[ComplexMatrix<T>],
    rho: &DensityOperator<T>,
) -> Result<DensityOperator<T>> {
    let n = rho.matrix().rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for m in kraus {
        out = out.add(&m.mul(rho.matrix()).mul(&m.adjoint()));
    }
    DensityOperator::new(rho.dims().to_vec(), out)
}

/// Evolve a tripartite S (x) A (x) E pure state, with E starting in its
/// ground state, by the dilation unitary acting on A (x) E.
pub fn evolve_tripartite<T: Real>(initial: &PureState<T>, p: T) -> Result<PureState<T>> {
    if initial.dims() != [2, 2, 2] {
        return Err(Error::Dimension(format!(
            "tripartite evolution needs factors [2, 2, 2], got {:?}",
            initial.dims()
        )));
    }
    let amps = initial.amplitudes();
    let excited: T = amps
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx % 2 == 1)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if excited.sqrt() > T::of(tol::ENV_GROUND) {
        return Err(Error::EnvironmentExcited);
    }
    let u = dilation_at(p)?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; 8];
    for s in 0..2 {
        for j in 0..4 {
            let mut acc = zero;
            for k in 0..4 {
                acc += u.get(j, k) * amps[s * 4 + k];
            }
            out[s * 4 + j] = acc;
        }
    }
    PureState::new(vec![2, 2, 2], out)
}

/// The channel at one instant: damping probability, decay rate, Kraus pair
/// and the dilation unitary on apparatus (x) environment.
#[derive(Debug, Clone)]
pub struct ChannelPoint<T> {
    pub t: T,
    pub p: T,
    pub gamma: DecayRate<T>,
    pub kraus: (ComplexMatrix<T>, ComplexMatrix<T>),
    pub dilation: ComplexMatrix<T>,
}

impl<T: Real> ChannelPoint<T> {
    /// Max entrywise deviation of M1^dag M1 + M2^dag M2 from the identity.
    pub fn completeness_error(&self) -> T {
        let (m1, m2) = &self.kraus;
        let sum = m1.adjoint().mul(m1).add(&m2.adjoint().mul(m2));
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// Max entrywise deviation of U^dag U from the identity.
    pub fn unitarity_error(&self) -> T {
        self.dilation
            .adjoint()
            .mul(&self.dilation)
            .max_abs_diff(&ComplexMatrix::identity(4))
    }
}

/// Composition map between two times with its Choi matrix. The map is CP
/// exactly when the Choi matrix is positive semidefinite, i.e. when the
/// composition parameter lies in [0, 1].
#[derive(Debug, Clone)]
pub struct IntermediateMap<T> {
    pub t1: T,
    pub t2: T,
    pub p21: T,
    pub choi: ComplexMatrix<T>,
}

impl<T: Real> IntermediateMap<T> {
    pub fn min_choi_eigenvalue(&self) -> Result<T> {
        min_eigenvalue(&self.choi)
    }

    pub fn is_cp(&self) -> Result<bool> {
        Ok(self.min_choi_eigenvalue()? >= T::of(tol::CP_FLOOR))
    }
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if p < T::zero() || p > T::one() || !p.is_finite() {
        return Err(Error::OutOfRange {
            what: "damping probability",
            value: p.as_f64(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// sin(y)/y, series below 1e-4 where the direct quotient loses digits.
fn sinc<T: Real>(y: T) -> T {
    if y.abs() < T::of(1e-4) {
        let y2 = y * y;
        T::one() - y2 / T::of(6.0) + y2 * y2 / T::of(120.0)
    } else {
        y.sin() / y
    }
}

/// sinh(y)/y.
fn sinhc<T: Real>(y: T) -> T {
    if y.abs() < T::of(1e-4) {
        let y2 = y * y;
        T::one() + y2 / T::of(6.0) + y2 * y2 / T::of(120.0)
    } else {
        y.sinh() / y
    }
}

/// tanh(y)/y.
fn tanhc<T: Real>(y: T) -> T {
    if y.abs() < T::of(1e-4) {
        let y2 = y * y;
        T::one() - y2 / T::of(3.0) + y2 * y2 * T::of(2.0 / 15.0)
    } else {
        y.tanh() / y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    use crate::linalg::trace_distance;

    type M = ComplexMatrix<f64>;

    fn bath(lambda_ratio: f64) -> BathSpec<f64> {
        BathSpec::new(lambda_ratio).unwrap()
    }

    fn bell_sa_with_ground_env() -> PureState<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex::new(0.0, 0.0); 8];
        amps[0b010] = Complex::new(s, 0.0); // |01>_SA |0>_E
        amps[0b100] = Complex::new(s, 0.0); // |10>_SA |0>_E
        PureState::new(vec![2, 2, 2], amps).unwrap()
    }

    /// Find t with p(t) = target by bisection; p must be increasing on [lo, hi].
    fn invert_p(bath: &BathSpec<f64>, target: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if bath.p_of_t(mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn p_vanishes_at_time_zero() {
        assert_eq!(bath(3.0).p_of_t(0.0).unwrap(), 0.0);
        assert_eq!(bath(0.1).p_of_t(0.0).unwrap(), 0.0);
    }

    #[test]
    fn p_matches_high_precision_reference() {
        // Closed form at lambda/gamma0 = 3, gamma0 t = 1, evaluated with
        // 40-digit arithmetic beforehand.
        let p = bath(3.0).p_of_t(1.0).unwrap();
        assert!((p - 0.5234922219080558).abs() < 1e-12, "p = {p}");
    }

    #[test]
    fn p_reaches_one_at_the_first_bracket_zero() {
        // Root-find the oscillatory bracket independently of poles_in.
        let b = bath(0.1);
        let ad = (2.0 * 0.1 - 0.01f64).sqrt();
        let f = |t: f64| (ad * t / 2.0).cos() + (0.1 / ad) * (ad * t / 2.0).sin();
        let (mut lo, mut hi) = (7.0, 9.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_star = 0.5 * (lo + hi);
        assert_eq!(b.p_of_t(t_star).unwrap(), 1.0);
    }

    #[test]
    fn p_is_continuous_at_the_regime_boundary() {
        // d^2 = 0 at lambda_ratio = 2; the two branches must agree.
        let below = bath(2.0 - 1e-9).p_of_t(1.5).unwrap();
        let at = bath(2.0).p_of_t(1.5).unwrap();
        let above = bath(2.0 + 1e-9).p_of_t(1.5).unwrap();
        assert!((below - at).abs() < 1e-9);
        assert!((above - at).abs() < 1e-9);
    }

    #[test]
    fn p_stays_finite_for_very_long_times() {
        let p = bath(3.0).p_of_t(5000.0).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn gamma_vanishes_at_time_zero() {
        assert_eq!(bath(3.0).gamma_of_t(0.0).unwrap(), DecayRate::Finite(0.0));
        assert_eq!(bath(0.1).gamma_of_t(0.0).unwrap(), DecayRate::Finite(0.0));
    }

    #[test]
    fn gamma_approaches_the_markovian_plateau() {
        // tanh -> 1 limit: 2 gamma0 lambda / (d + lambda) at lambda_ratio 3.
        let g = bath(3.0).gamma_of_t(40.0).unwrap().finite().unwrap();
        assert!((g - 1.2679491924311227).abs() < 1e-9, "gamma = {g}");
    }

    #[test]
    fn gamma_goes_negative_in_the_oscillatory_regime() {
        // Between the first pole (~8.24) and the first zero (~14.41).
        let g = bath(0.1).gamma_of_t(10.0).unwrap().finite().unwrap();
        assert!(g < 0.0, "gamma = {g}");
    }

    #[test]
    fn gamma_rejects_negative_time() {
        assert!(matches!(
            bath(3.0).gamma_of_t(-0.5),
            Err(Error::NegativeTime(_))
        ));
        assert!(matches!(bath(3.0).p_of_t(-0.5), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn poles_match_the_analytic_zeros() {
        let b = bath(0.1);
        let ad = (2.0 * 0.1 - 0.01f64).sqrt();
        let first = 2.0 * (std::f64::consts::PI - (ad / 0.1).atan()) / ad;
        let second = first + 2.0 * std::f64::consts::PI / ad;
        let poles = b.poles_in(30.0);
        assert_eq!(poles.len(), 2);
        assert!((poles[0] - first).abs() < 1e-9);
        assert!((poles[1] - second).abs() < 1e-9);
        assert!(bath(3.0).poles_in(100.0).is_empty());
    }

    #[test]
    fn markovian_p_is_nondecreasing_and_gamma_nonnegative() {
        let b = bath(3.0);
        let mut prev = 0.0;
        for k in 0..=400 {
            let t = 10.0 * k as f64 / 400.0;
            let p = b.p_of_t(t).unwrap();
            assert!(p >= prev - 1e-12);
            assert!(b.gamma_of_t(t).unwrap().finite().unwrap() >= 0.0);
            prev = p;
        }
    }

    #[test]
    fn sign_of_dp_dt_follows_gamma() {
        // dp/dt = gamma (1 - p): central differences against the closed form
        // in both regimes, away from gamma zeros.
        for lambda in [3.0, 0.1] {
            let b = bath(lambda);
            let t_max = 30.0;
            let n = 6000;
            let h = t_max / n as f64;
            for k in 1..n {
                let t = k as f64 * h;
                let gamma = match b.gamma_of_t(t).unwrap() {
                    DecayRate::Finite(g) => g,
                    DecayRate::Pole => continue,
                };
                if gamma.abs() <= 1e-6 {
                    continue;
                }
                let dp = b.p_of_t(t + h).unwrap() - b.p_of_t(t - h).unwrap();
                let expected = gamma * (1.0 - b.p_of_t(t).unwrap());
                assert!(
                    dp.signum() == expected.signum() || dp == 0.0,
                    "sign mismatch at lambda={lambda}, t={t}: dp={dp}, gamma={gamma}"
                );
            }
        }
    }

    #[test]
    fn kraus_identity_and_full_decay() {
        let (m1, m2) = kraus_at(0.0f64).unwrap();
        assert_eq!(m1.max_abs_diff(&M::identity(2)), 0.0);
        assert_eq!(m2.max_abs(), 0.0);

        let (m1, m2) = kraus_at(1.0f64).unwrap();
        assert_eq!(m1.max_abs_diff(&M::diag(&[1.0, 0.0])), 0.0);
        assert_eq!(m2.max_abs_diff(&M::unit(2, 0, 1)), 0.0);
    }

    #[test]
    fn kraus_at_half_damping() {
        let (m1, _) = kraus_at(0.5f64).unwrap();
        assert!((m1.get(1, 1).re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kraus_completeness_along_the_evolution() {
        let b = bath(0.1);
        for k in 0..=50 {
            let point = b.channel_at(30.0 * k as f64 / 50.0).unwrap();
            assert!(point.completeness_error() < 1e-15);
            assert!(point.unitarity_error() < 1e-15);
        }
    }

    #[test]
    fn kraus_rejects_invalid_probability() {
        assert!(matches!(kraus_at(1.5f64), Err(Error::OutOfRange { .. })));
        assert!(matches!(kraus_at(-0.1f64), Err(Error::OutOfRange { .. })));
        assert!(matches!(dilation_at(2.0f64), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn dilation_limits() {
        let u = dilation_at(0.0f64).unwrap();
        assert_eq!(u.max_abs_diff(&M::identity(4)), 0.0);

        // Full damping swaps the excitation into the environment.
        let u = dilation_at(1.0f64).unwrap();
        assert_eq!(u.get(1, 2).re, 1.0); // |10> -> |01>
        assert_eq!(u.get(2, 2).norm(), 0.0);
    }

    #[test]
    fn dilation_traces_to_the_kraus_map() {
        // 200 random apparatus states across a p grid, compared entrywise.
        let mut rng = StdRng::seed_from_u64(11);
        let ground = PureState::<f64>::basis(vec![2], 0).density();
        for _ in 0..200 {
            let (r, theta, phi) = (
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(0.0..2.0 * std::f64::consts::PI),
            );
            let rho_a = DensityOperator::from_bloch(r, theta, phi).unwrap();
            for k in 0..=10 {
                let p = k as f64 / 10.0;
                let u = dilation_at(p).unwrap();
                let joint = rho_a.matrix().tensor(ground.matrix()).unwrap();
                let evolved = u.mul(&joint).mul(&u.adjoint());
                let traced =
                    crate::linalg::partial_trace_matrix(&evolved, &[2, 2], &[0]).unwrap();

                let (m1, m2) = kraus_at(p).unwrap();
                let direct = apply_channel(&[m1, m2], &rho_a).unwrap();
                assert!(traced.max_abs_diff(direct.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn dilation_half_damping_on_excited_input() {
        let rho_a = PureState::<f64>::basis(vec![2], 1).density();
        let (m1, m2) = kraus_at(0.5).unwrap();
        let out = apply_channel(&[m1, m2], &rho_a).unwrap();
        assert!(out.matrix().max_abs_diff(&M::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn evolve_identity_at_zero_damping() {
        let init = bell_sa_with_ground_env();
        let out = evolve_tripartite(&init, 0.0).unwrap();
        assert_eq!(out.amplitudes(), init.amplitudes());
    }

    #[test]
    fn evolve_full_damping_separates_sa() {
        let out = evolve_tripartite(&bell_sa_with_ground_env(), 1.0).unwrap();
        let rho_sa = out.density().partial_trace(&[0, 1]).unwrap();
        let mut want = M::zeros(4, 4);
        want.set(0, 0, Complex::new(0.5, 0.0));
        want.set(2, 2, Complex::new(0.5, 0.0));
        assert!(rho_sa.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn evolved_sa_coherence_follows_the_closed_form() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let out = evolve_tripartite(&bell_sa_with_ground_env(), p).unwrap();
            let rho_sa = out.density().partial_trace(&[0, 1]).unwrap();
            // <01| rho_SA |10> = sqrt(1-p)/2
            let coh = rho_sa.matrix().get(1, 2);
            assert!((coh.re - 0.5 * (1.0 - p).sqrt()).abs() < 1e-14);
            assert!(coh.im.abs() < 1e-15);
        }
    }

    #[test]
    fn evolved_se_coherence_at_half_damping() {
        let out = evolve_tripartite(&bell_sa_with_ground_env(), 0.5).unwrap();
        let rho_se = out.density().partial_trace(&[0, 2]).unwrap();
        // <10| rho_SE |01> = sqrt(p)/2 at p = 1/2.
        let coh = rho_se.matrix().get(2, 1);
        assert!((coh.re - 0.5f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn evolve_rejects_excited_environment() {
        let mut amps = vec![Complex::new(0.0, 0.0); 8];
        amps[1] = Complex::new(1.0, 0.0); // |00>_SA |1>_E
        let state = PureState::new(vec![2, 2, 2], amps).unwrap();
        assert!(matches!(
            evolve_tripartite(&state, 0.3),
            Err(Error::EnvironmentExcited)
        ));
    }

    #[test]
    fn evolve_rejects_wrong_factors() {
        let state = PureState::<f64>::basis(vec![2, 2], 0);
        assert!(matches!(
            evolve_tripartite(&state, 0.3),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn ground_state_is_stationary() {
        let b = bath(3.0);
        let rho0 = PureState::<f64>::basis(vec![2], 0).density();
        let out = b.integrate_master_equation(&rho0, 5.0, 500).unwrap();
        assert!(trace_distance(&rho0, &out).unwrap() < 1e-12);
    }

    #[test]
    fn excited_population_matches_the_closed_form() {
        let b = bath(3.0);
        let rho0 = PureState::<f64>::basis(vec![2], 1).density();
        let out = b.integrate_master_equation(&rho0, 1.0, 1000).unwrap();
        let pop = out.matrix().get(1, 1).re;
        let want = 1.0 - b.p_of_t(1.0).unwrap(); // ~0.4765
        assert!((pop - want).abs() < 1e-9, "pop = {pop}, want = {want}");
    }

    #[test]
    fn plus_state_coherence_matches_the_closed_form() {
        let b = bath(3.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(
            vec![2],
            vec![Complex::new(s, 0.0), Complex::new(s, 0.0)],
        )
        .unwrap()
        .density();
        let out = b.integrate_master_equation(&plus, 1.0, 1000).unwrap();
        let want = 0.5 * (1.0 - b.p_of_t(1.0).unwrap()).sqrt();
        assert!((out.matrix().get(0, 1).norm() - want).abs() < 1e-9);
    }

    #[test]
    fn integrator_is_fourth_order() {
        let b = bath(3.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(
            vec![2],
            vec![Complex::new(s, 0.0), Complex::new(s, 0.0)],
        )
        .unwrap()
        .density();
        let p = b.p_of_t(1.0).unwrap();
        let (m1, m2) = kraus_at(p).unwrap();
        let exact = apply_channel(&[m1, m2], &plus).unwrap();

        let coarse = b.integrate_master_equation(&plus, 1.0, 100).unwrap();
        let fine = b.integrate_master_equation(&plus, 1.0, 200).unwrap();
        let err_coarse = trace_distance(&coarse, &exact).unwrap();
        let err_fine = trace_distance(&fine, &exact).unwrap();
        assert!(
            err_coarse >= 8.0 * err_fine,
            "halving the step gave {err_coarse} -> {err_fine}"
        );
    }

    #[test]
    fn pole_skip_integration_tracks_the_kraus_form() {
        let b = bath(0.1);
        let rho0 = PureState::<f64>::basis(vec![2], 1).density();
        // Crosses the first pole near t = 8.24.
        let steps = 1200;
        let out = b.integrate_master_equation(&rho0, 12.0, steps).unwrap();
        let p = b.p_of_t(12.0).unwrap();
        let (m1, m2) = kraus_at(p).unwrap();
        let exact = apply_channel(&[m1, m2], &rho0).unwrap();
        let dist = trace_distance(&out, &exact).unwrap();
        assert!(dist < 1e-4, "trace distance {dist}");
    }

    #[test]
    fn integrator_rejects_bad_input() {
        let b = bath(3.0);
        let rho0 = PureState::<f64>::basis(vec![2], 0).density();
        assert!(matches!(
            b.integrate_master_equation(&rho0, 1.0, 50),
            Err(Error::TooFew { .. })
        ));
        let pair = PureState::<f64>::basis(vec![2, 2], 0).density();
        assert!(matches!(
            b.integrate_master_equation(&pair, 1.0, 200),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn intermediate_map_composition_parameter() {
        let b = bath(3.0);
        let t1 = invert_p(&b, 0.2, 0.0, 10.0);
        let t2 = invert_p(&b, 0.5, 0.0, 10.0);
        let map = b.intermediate_map(t1, t2).unwrap();
        // 1 - (1 - 0.5)/(1 - 0.2) = 0.375 from the composition algebra.
        assert!((map.p21 - 0.375).abs() < 1e-9, "p21 = {}", map.p21);
        assert!(map.is_cp().unwrap());
    }

    #[test]
    fn intermediate_map_identity_when_p_returns() {
        // Oscillatory regime: p(t1) on the falling branch equals p(t2) on
        // the next rising branch, so the in-between map is the identity.
        let b = bath(0.1);
        let t1 = 10.0;
        let target = b.p_of_t(t1).unwrap();
        let (mut lo, mut hi) = (14.5, 22.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if b.p_of_t(mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t2 = 0.5 * (lo + hi);
        let map = b.intermediate_map(t1, t2).unwrap();
        assert!(map.p21.abs() < 1e-9);
        assert!(map.is_cp().unwrap());
    }

    #[test]
    fn intermediate_map_detects_nondivisibility() {
        let b = bath(0.1);
        // p decreases on (8.24, 14.41).
        let map = b.intermediate_map(9.0, 12.0).unwrap();
        assert!(map.p21 < 0.0);
        assert!(!map.is_cp().unwrap());
        let lowest = map.min_choi_eigenvalue().unwrap();
        assert!(lowest < -1e-9);
        // The Choi spectrum is {2 - p21, 1 - p21... , p21, 0}; its floor is p21.
        assert!((lowest - map.p21).abs() < 1e-12);
    }

    #[test]
    fn intermediate_map_undefined_at_full_damping() {
        let b = bath(0.1);
        let pole = b.poles_in(10.0)[0];
        assert!(matches!(
            b.intermediate_map(pole, pole + 1.0),
            Err(Error::UndefinedIntermediateMap(_))
        ));
        assert!(matches!(
            b.intermediate_map(2.0, 1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn choi_of_a_valid_channel_is_psd() {
        let b = bath(3.0);
        let map = b.intermediate_map(0.0, 1.0).unwrap();
        assert!(map.min_choi_eigenvalue().unwrap() >= -1e-9);
        assert!((map.choi.trace().re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_negative_gamma_matches_negative_p21() {
        // On grid steps where gamma < 0 at both ends, the in-between map
        // parameter is negative, and positive where gamma > 0 at both ends.
        let b = bath(0.1);
        let n = 600;
        let h = 30.0 / n as f64;
        for k in 0..n {
            let (t1, t2) = (k as f64 * h, (k + 1) as f64 * h);
            if t1 == 0.0 {
                continue;
            }
            let g1 = b.gamma_of_t(t1).unwrap().finite();
            let g2 = b.gamma_of_t(t2).unwrap().finite();
            let (Some(g1), Some(g2)) = (g1, g2) else { continue };
            if b.one_minus_p(t1).unwrap() < tol::PROB_CLAMP {
                continue;
            }
            let map = b.intermediate_map(t1, t2).unwrap();
            if g1 < -1e-9 && g2 < -1e-9 {
                assert!(map.p21 < 0.0, "t = {t1}");
            } else if g1 > 1e-9 && g2 > 1e-9 {
                assert!(map.p21 > 0.0, "t = {t1}");
            }
        }
    }

    #[test]
    fn bath_rejects_nonpositive_width() {
        assert!(BathSpec::<f64>::new(0.0).is_err());
        assert!(BathSpec::<f64>::new(-1.0).is_err());
    }

    #[test]
    fn regime_flag() {
        assert!(bath(0.1).is_oscillatory());
        assert!(bath(1.99).is_oscillatory());
        assert!(!bath(2.0).is_oscillatory());
        assert!(!bath(3.0).is_oscillatory());
    }

    #[test]
    fn closed_forms_hold_at_f32() {
        let b = BathSpec::<f32>::new(3.0).unwrap();
        assert!((b.p_of_t(1.0).unwrap() - 0.5234922).abs() < 1e-5);
    }
}
