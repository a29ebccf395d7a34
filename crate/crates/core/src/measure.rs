//! The non-Markovianity measure: summed growth of the system-apparatus
//! entanglement along the evolution, maximized over initial states.
//!
//! Trajectories start from a purification of a Bloch-parameterized apparatus
//! state; the measure depends only on the Bloch radius, which
//! [`angle_invariance_check`] verifies numerically, so the optimization
//! sweeps a radius grid with the polar angles pinned to zero.

use num_complex::Complex;

use crate::dynamics::{evolve_tripartite, BathSpec, DecayRate};
use crate::error::{Error, Result};
use crate::info::{accessible_info_kw, eof, von_neumann_entropy, InfoPoint};
use crate::linalg::{hermitian_eig, DensityOperator, PureState};
use crate::scalar::Real;
use crate::tol;

/// Default grids matching the regimes: the oscillatory horizon covers the
/// first two revivals at lambda_ratio = 0.1.
pub mod defaults {
    use crate::dynamics::BathSpec;
    use crate::scalar::Real;

    pub const STEPS: usize = 3000;
    pub const T_MAX_MARKOVIAN: f64 = 10.0;
    pub const T_MAX_OSCILLATORY: f64 = 30.0;

    /// Horizon for the bath's regime.
    pub fn t_max_for<T: Real>(bath: &BathSpec<T>) -> T {
        if bath.is_oscillatory() {
            T::of(T_MAX_OSCILLATORY)
        } else {
            T::of(T_MAX_MARKOVIAN)
        }
    }

    /// Radius grid {0, 0.05, ..., 1}.
    pub fn r_grid<T: Real>() -> Vec<T> {
        (0..=20).map(|k| T::of(k as f64 * 0.05)).collect()
    }
}

/// Bloch parameterization (r, theta, phi) of the initial apparatus state
/// (I + r n.sigma)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec<T> {
    r: T,
    theta: T,
    phi: T,
}

impl<T: Real> InitialStateSpec<T> {
    pub fn new(r: T, theta: T, phi: T) -> Result<Self> {
        if r < T::zero() || r > T::one() || !r.is_finite() {
            return Err(Error::OutOfRange {
                what: "Bloch radius",
                value: r.as_f64(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self { r, theta, phi })
    }

    /// Radius-only spec with the polar angles at zero.
    pub fn radial(r: T) -> Result<Self> {
        Self::new(r, T::zero(), T::zero())
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }
}

/// One trajectory sample: information quantities plus the channel numbers.
#[derive(Debug, Clone, Copy)]
pub struct SamplePoint<T> {
    pub info: InfoPoint<T>,
    pub p: T,
    pub gamma: DecayRate<T>,
}

/// Uniformly sampled trajectory of the information flow.
#[derive(Debug, Clone)]
pub struct TimeSeries<T> {
    ts: Vec<T>,
    points: Vec<SamplePoint<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(ts: Vec<T>, points: Vec<SamplePoint<T>>) -> Result<Self> {
        if ts.len() != points.len() {
            return Err(Error::Dimension(format!(
                "{} times against {} samples",
                ts.len(),
                points.len()
            )));
        }
        if ts.len() >= 2 {
            let h = ts[1] - ts[0];
            if h <= T::zero() {
                return Err(Error::Dimension("time grid must increase".into()));
            }
            for w in ts.windows(2) {
                if ((w[1] - w[0]) - h).abs() > T::of(tol::GRID_UNIFORMITY) {
                    return Err(Error::Dimension("time grid must be uniform".into()));
                }
            }
        }
        Ok(Self { ts, points })
    }

    pub fn ts(&self) -> &[T] {
        &self.ts
    }

    pub fn points(&self) -> &[SamplePoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// Value of the measure with the detected growth intervals; `argmax_r` is
/// set when the value came out of a radius optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult<T> {
    pub value: T,
    pub intervals: Vec<(T, T)>,
    pub argmax_r: Option<T>,
}

/// Purify a Bloch-parameterized apparatus state into a two-qubit S (x) A
/// pure state whose apparatus marginal reproduces it.
pub fn purify<T: Real>(spec: &InitialStateSpec<T>) -> Result<PureState<T>> {
    let rho_a = DensityOperator::from_bloch(spec.r, spec.theta, spec.phi)?;
    let eig = hermitian_eig(rho_a.matrix())?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 4];
    for s in 0..2 {
        let weight = Complex::new(eig.values[s].max(T::zero()).sqrt(), T::zero());
        for a in 0..2 {
            amps[s * 2 + a] = weight * eig.vectors.get(a, s);
        }
    }
    let state = PureState::new(vec![2, 2], amps)?;
    debug_assert!(
        state
            .density()
            .partial_trace(&[1])
            .map(|m| m.matrix().max_abs_diff(rho_a.matrix()).as_f64() < 1e-12)
            .unwrap_or(false),
        "purification must reproduce the apparatus marginal"
    );
    Ok(state)
}

/// Sample the information flow on a uniform grid: the purified initial
/// state is sent through the dilation at p(t) for each grid time, recording
/// entanglement of formation, accessible information, p and gamma.
pub fn trajectory<T: Real>(
    bath: &BathSpec<T>,
    spec: &InitialStateSpec<T>,
    t_max: T,
    steps: usize,
) -> Result<TimeSeries<T>> {
    if steps < 200 {
        return Err(Error::TooFew { what: "trajectory steps", min: 200, got: steps });
    }
    if t_max <= T::zero() {
        return Err(Error::OutOfRange {
            what: "t_max",
            value: t_max.as_f64(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let initial = purify(spec)?.tensor(&PureState::basis(vec![2], 0))?;
    let h = t_max / T::of(steps as f64);

    let mut ts = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = h * T::of(k as f64);
        let p = bath.p_of_t(t)?;
        let gamma = bath.gamma_of_t(t)?;
        let evolved = evolve_tripartite(&initial, p)?;
        let rho = evolved.density();
        let s_s = von_neumann_entropy(&rho.partial_trace(&[0])?)?;
        let e_sa = eof(&rho.partial_trace(&[0, 1])?)?;
        let j_se = accessible_info_kw(&evolved)?;
        ts.push(t);
        points.push(SamplePoint {
            info: InfoPoint::new(t, s_s, e_sa, j_se)?,
            p,
            gamma,
        });
    }
    TimeSeries::new(ts, points)
}

/// Sum the growth of E_SA over the series: maximal runs of rising samples
/// contribute their telescoped increase, which equals the integral of the
/// positive part of dE/dt at grid resolution.
pub fn measure_from_series<T: Real>(series: &TimeSeries<T>) -> Result<MeasureResult<T>> {
    if series.len() < 3 {
        return Err(Error::SeriesTooShort(series.len()));
    }
    let rise = T::of(tol::RISE);
    let e = |k: usize| series.points()[k].info.e_sa;

    let mut value = T::zero();
    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for k in 0..series.len() - 1 {
        let growing = e(k + 1) - e(k) > rise;
        if growing && run_start.is_none() {
            run_start = Some(k);
        }
        if !growing {
            if let Some(start) = run_start.take() {
                value += e(k) - e(start);
                intervals.push((series.ts()[start], series.ts()[k]));
            }
        }
    }
    if let Some(start) = run_start {
        let last = series.len() - 1;
        value += e(last) - e(start);
        intervals.push((series.ts()[start], series.ts()[last]));
    }
    Ok(MeasureResult { value, intervals, argmax_r: None })
}

/// Per-radius measure values over a radius grid (theta = phi = 0 by the
/// angle invariance), in the order given.
pub fn measure_profile<T: Real>(
    bath: &BathSpec<T>,
    t_max: T,
    steps: usize,
    r_grid: &[T],
) -> Result<Vec<(T, MeasureResult<T>)>> {
    if r_grid.is_empty() {
        return Err(Error::EmptyGrid("radius grid"));
    }
    let mut out = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let spec = InitialStateSpec::radial(r)?;
        let series = trajectory(bath, &spec, t_max, steps)?;
        out.push((r, measure_from_series(&series)?));
    }
    Ok(out)
}

/// The measure itself: maximize the summed entanglement growth over the
/// radius grid. Ties break toward the smaller radius.
pub fn measure<T: Real>(
    bath: &BathSpec<T>,
    t_max: T,
    steps: usize,
    r_grid: &[T],
) -> Result<MeasureResult<T>> {
    let profile = measure_profile(bath, t_max, steps, r_grid)?;
    let mut order: Vec<usize> = (0..profile.len()).collect();
    order.sort_by(|&a, &b| {
        profile[a]
            .0
            .partial_cmp(&profile[b].0)
            .expect("finite radii")
    });
    let mut best: Option<(T, &MeasureResult<T>)> = None;
    for idx in order {
        let (r, result) = &profile[idx];
        if best.is_none_or(|(_, b)| result.value > b.value) {
            best = Some((*r, result));
        }
    }
    let (r, result) = best.expect("nonempty grid");
    Ok(MeasureResult {
        value: result.value,
        intervals: result.intervals.clone(),
        argmax_r: Some(r),
    })
}

/// Extend the horizon, doubling from the regime default, until the measure
/// changes by less than `tol_change` between horizons or the cap of 16
/// defaults is reached. Returns the converged result and the horizon used.
/// The step density per unit time is kept at the default grid's.
pub fn measure_with_converged_horizon<T: Real>(
    bath: &BathSpec<T>,
    spec: &InitialStateSpec<T>,
    tol_change: T,
) -> Result<(MeasureResult<T>, T)> {
    let base = defaults::t_max_for(bath);
    let density = T::of(defaults::STEPS as f64) / base;
    let mut t_max = base;
    let mut previous: Option<T> = None;
    loop {
        let steps = (density * t_max).ceil().as_f64() as usize;
        let series = trajectory(bath, spec, t_max, steps.max(200))?;
        let result = measure_from_series(&series)?;
        if let Some(prev) = previous {
            if (result.value - prev).abs() < tol_change || t_max >= base * T::of(16.0) {
                return Ok((result, t_max));
            }
        }
        previous = Some(result.value);
        t_max *= T::of(2.0);
    }
}

/// Spread of the measure over random purification angles at a fixed radius;
/// the value must not depend on theta or phi, so the spread is round-off.
pub fn angle_invariance_check<T: Real>(
    bath: &BathSpec<T>,
    r: T,
    samples: usize,
) -> Result<T> {
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    if samples < 8 {
        return Err(Error::TooFew { what: "angle samples", min: 8, got: samples });
    }
    let t_max = defaults::t_max_for(bath);
    let mut rng = StdRng::seed_from_u64(0x0a11_ce5d);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for _ in 0..samples {
        let theta = T::of(rng.random_range(0.0..std::f64::consts::PI));
        let phi = T::of(rng.random_range(0.0..2.0 * std::f64::consts::PI));
        let spec = InitialStateSpec::new(r, theta, phi)?;
        let series = trajectory(bath, &spec, t_max, defaults::STEPS)?;
        let value = measure_from_series(&series)?.value;
        lo = lo.min(value);
        hi = hi.max(value);
    }
    Ok(hi - lo)
}
