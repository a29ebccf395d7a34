//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).

use std::time::Instant;

use nonmarkov::dynamics::{apply_channel, evolve_tripartite, kraus_at, BathSpec};
use nonmarkov::info::{accessible_info_bruteforce, accessible_info_kw, concurrence};
use nonmarkov::linalg::trace_distance;
use nonmarkov::measure::{
    defaults, measure, measure_from_series, purify, trajectory, InitialStateSpec, TimeSeries,
};
use nonmarkov::{Bath64, PureState64};

fn bath(lambda_ratio: f64) -> Bath64 {
    BathSpec::new(lambda_ratio).unwrap()
}

fn series(lambda_ratio: f64, t_max: f64, steps: usize) -> TimeSeries<f64> {
    trajectory(
        &bath(lambda_ratio),
        &InitialStateSpec::radial(0.0).unwrap(),
        t_max,
        steps,
    )
    .unwrap()
}

fn report(name: &str, pass: bool, details: &str) {
    println!(
        "[acceptance] {name}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name}: {details}");
}

#[test]
fn criterion_1_markovian_monotonicity() {
    let clock = Instant::now();
    let series = series(3.0, 10.0, 2000);
    let points = series.points();

    let mut worst_e_rise = f64::NEG_INFINITY;
    let mut worst_j_fall = f64::NEG_INFINITY;
    for w in points.windows(2) {
        worst_e_rise = worst_e_rise.max(w[1].info.e_sa - w[0].info.e_sa);
        worst_j_fall = worst_j_fall.max(w[0].info.j_se - w[1].info.j_se);
    }
    let value = measure_from_series(&series).unwrap().value;
    let elapsed = clock.elapsed().as_secs_f64();

    report(
        "criterion 1, markovian monotonicity",
        worst_e_rise <= 1e-10 && worst_j_fall <= 1e-10 && value == 0.0 && elapsed < 5.0,
        &format!(
            "max E rise {worst_e_rise:.2e}, max J fall {worst_j_fall:.2e}, N = {value}, {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_2_non_markovian_revival() {
    let clock = Instant::now();
    let series = series(0.1, 30.0, 3000);
    let result = measure_from_series(&series).unwrap();
    let points = series.points();
    let ts = series.ts();
    let h = ts[1] - ts[0];

    let mut revival_inside_backflow = !result.intervals.is_empty();
    for &(start, end) in &result.intervals {
        for (k, &t) in ts.iter().enumerate() {
            if t < start - 0.5 * h || t > end + 0.5 * h {
                continue;
            }
            let nearby_negative = [k.saturating_sub(1), k, k + 1]
                .iter()
                .filter_map(|&i| points.get(i))
                .filter_map(|pt| pt.gamma.finite())
                .any(|g| g < 0.0);
            revival_inside_backflow &= nearby_negative;
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();

    report(
        "criterion 2, non-markovian revival",
        !result.intervals.is_empty()
            && result.value > 1e-3
            && revival_inside_backflow
            && elapsed < 10.0,
        &format!(
            "N = {:.6}, {} interval(s), backflow overlap {}, {elapsed:.2}s",
            result.value,
            result.intervals.len(),
            revival_inside_backflow
        ),
    );
}

#[test]
fn criterion_3_boundary_values() {
    let markovian = series(3.0, 10.0, 2000);
    let first = markovian.points().first().unwrap().info;
    let last = markovian.points().last().unwrap().info;

    report(
        "criterion 3, boundary values",
        (first.e_sa - 1.0).abs() < 1e-9
            && first.j_se.abs() < 1e-9
            && last.e_sa.abs() < 5e-3
            && (last.j_se - 1.0).abs() < 5e-3,
        &format!(
            "E(0) = {:.12}, J(0) = {:.3e}, E(10) = {:.3e}, 1 - J(10) = {:.3e}",
            first.e_sa,
            first.j_se,
            last.e_sa,
            1.0 - last.j_se
        ),
    );
}

#[test]
fn criterion_4_rate_duality() {
    let mut worst_step = f64::NEG_INFINITY;
    let mut worst_drift = f64::NEG_INFINITY;
    for (lambda, t_max, steps) in [(3.0, 10.0, 2000), (0.1, 30.0, 3000)] {
        let series = series(lambda, t_max, steps);
        let points = series.points();
        for w in points.windows(2) {
            let de = w[1].info.e_sa - w[0].info.e_sa;
            let dj = w[1].info.j_se - w[0].info.j_se;
            worst_step = worst_step.max((de + dj).abs());
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for pt in points {
            lo = lo.min(pt.info.s_s);
            hi = hi.max(pt.info.s_s);
        }
        worst_drift = worst_drift.max(hi - lo);
    }

    report(
        "criterion 4, rate duality",
        worst_step < 1e-9 && worst_drift < 1e-10,
        &format!("max |dE + dJ| = {worst_step:.2e}, S_S spread = {worst_drift:.2e}"),
    );
}

#[test]
fn criterion_5_initial_state_optimization() {
    let clock = Instant::now();
    let r_grid: Vec<f64> = defaults::r_grid();

    let mut optimum_at_zero = true;
    let mut details = String::new();
    for lambda in [0.1, 0.5, 1.0] {
        let b = bath(lambda);
        let t_max = defaults::t_max_for(&b);
        let result = measure(&b, t_max, defaults::STEPS, &r_grid).unwrap();
        optimum_at_zero &= result.argmax_r == Some(0.0) && result.value > 0.0;
        details.push_str(&format!("N({lambda}) = {:.6} at r = 0; ", result.value));
    }

    let mut markovian_flat_zero = true;
    for lambda in [2.5, 3.0] {
        let b = bath(lambda);
        let t_max = defaults::t_max_for(&b);
        for &r in &r_grid {
            let spec = InitialStateSpec::radial(r).unwrap();
            let traj = trajectory(&b, &spec, t_max, defaults::STEPS).unwrap();
            markovian_flat_zero &= measure_from_series(&traj).unwrap().value == 0.0;
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();

    report(
        "criterion 5, initial-state optimization",
        optimum_at_zero && markovian_flat_zero && elapsed < 180.0,
        &format!("{details}markovian sweep all zero: {markovian_flat_zero}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_6_oracle_equivalences() {
    // (a) integrator against the Kraus closed form.
    let excited = PureState64::basis(vec![2], 1).density();
    let mut worst_markovian = 0.0f64;
    let mut worst_oscillatory = 0.0f64;
    for (lambda, t_max, worst) in [
        (3.0, 10.0, &mut worst_markovian),
        (0.1, 30.0, &mut worst_oscillatory),
    ] {
        let b = bath(lambda);
        for k in 1..=20 {
            let t = t_max * k as f64 / 20.0;
            let steps = ((2000.0 * t / t_max) as usize).max(200);
            let integrated = b.integrate_master_equation(&excited, t, steps).unwrap();
            let (m1, m2) = kraus_at(b.p_of_t(t).unwrap()).unwrap();
            let closed = apply_channel(&[m1, m2], &excited).unwrap();
            *worst = worst.max(trace_distance(&integrated, &closed).unwrap());
        }
    }

    // (b) brute-force accessible information against the identity route.
    let initial = purify(&InitialStateSpec::radial(0.0).unwrap())
        .unwrap()
        .tensor(&PureState64::basis(vec![2], 0))
        .unwrap();
    let mut worst_gap = 0.0f64;
    for (lambda, t_max) in [(3.0, 10.0), (0.1, 30.0)] {
        let b = bath(lambda);
        for k in 1..=10 {
            let t = t_max * k as f64 / 10.0;
            let evolved = evolve_tripartite(&initial, b.p_of_t(t).unwrap()).unwrap();
            let kw = accessible_info_kw(&evolved).unwrap();
            let rho_se = evolved.density().partial_trace(&[0, 2]).unwrap();
            let bf = accessible_info_bruteforce(&rho_se, 64).unwrap();
            assert!(bf <= kw + 1e-9);
            worst_gap = worst_gap.max((kw - bf).abs());
        }
    }

    // (c) concurrence against its closed form sqrt(1 - p).
    let mut worst_concurrence = 0.0f64;
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let evolved = evolve_tripartite(&initial, p).unwrap();
        let rho_sa = evolved.density().partial_trace(&[0, 1]).unwrap();
        let c = concurrence(&rho_sa).unwrap();
        worst_concurrence = worst_concurrence.max((c - (1.0 - p).sqrt()).abs());
    }

    report(
        "criterion 6, oracle equivalences",
        worst_markovian < 1e-6
            && worst_oscillatory < 1e-4
            && worst_gap < 5e-3
            && worst_concurrence < 1e-9,
        &format!(
            "integrator {worst_markovian:.2e}/{worst_oscillatory:.2e}, \
             info gap {worst_gap:.2e}, concurrence {worst_concurrence:.2e}"
        ),
    );
}

#[test]
fn criterion_7_divisibility_witness() {
    // Oscillatory: every step with decreasing p is witnessed by a negative
    // Choi eigenvalue of the in-between map.
    let b = bath(0.1);
    let osc = series(0.1, 30.0, 3000);
    let ts = osc.ts();
    let points = osc.points();
    let mut witnessed = true;
    let mut decreasing_steps = 0usize;
    for k in 0..points.len() - 1 {
        if points[k + 1].p < points[k].p {
            decreasing_steps += 1;
            let map = b.intermediate_map(ts[k], ts[k + 1]).unwrap();
            witnessed &= map.min_choi_eigenvalue().unwrap() < -1e-9;
        }
    }

    // Markovian: every in-between map on the grid is CP.
    let b = bath(3.0);
    let mark = series(3.0, 10.0, 2000);
    let mut all_cp = true;
    for k in 0..mark.ts().len() - 1 {
        let map = b.intermediate_map(mark.ts()[k], mark.ts()[k + 1]).unwrap();
        all_cp &= map.min_choi_eigenvalue().unwrap() >= -1e-9;
    }

    report(
        "criterion 7, divisibility witness",
        decreasing_steps > 0 && witnessed && all_cp,
        &format!(
            "{decreasing_steps} decreasing steps all witnessed: {witnessed}, markovian all CP: {all_cp}"
        ),
    );
}
