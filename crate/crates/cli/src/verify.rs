//! The `verify` subcommand: every closed form is driven against its
//! independent oracle and the deviations are reported against the
//! tolerances of the owning layer.

use nonmarkov::dynamics::{apply_channel, evolve_tripartite, kraus_at};
use nonmarkov::info::{accessible_info_bruteforce, accessible_info_kw};
use nonmarkov::linalg::trace_distance;
use nonmarkov::measure::{purify, trajectory, InitialStateSpec};
use nonmarkov::{Bath64, PureState64};

use crate::config::{CliResult, RunConfig};

pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub bound: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation < self.bound
    }
}

/// Run the oracle suite at the configured reservoir width. `inject_fault`
/// poisons the first deviation so the harness itself can be exercised.
pub fn run_checks(config: &RunConfig, inject_fault: bool) -> CliResult<Vec<Check>> {
    let bath: Bath64 = config.bath()?;
    let oscillatory = bath.is_oscillatory();
    let mut checks = Vec::new();

    // Integrator against the Kraus closed form at 20 sampled times.
    let excited = PureState64::basis(vec![2], 1).density();
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let t = config.t_max * k as f64 / 20.0;
        let steps = ((config.steps as f64 * t / config.t_max) as usize).max(200);
        let integrated = bath.integrate_master_equation(&excited, t, steps)?;
        let (m1, m2) = kraus_at(bath.p_of_t(t)?)?;
        let closed = apply_channel(&[m1, m2], &excited)?;
        worst = worst.max(trace_distance(&integrated, &closed)?);
    }
    if inject_fault {
        worst += 1.0;
    }
    checks.push(Check {
        name: "master equation vs kraus closed form",
        deviation: worst,
        bound: if oscillatory { 1e-4 } else { 1e-6 },
    });

    // Brute-force accessible information against the identity route.
    let initial = purify(&InitialStateSpec::radial(config.r)?)?
        .tensor(&PureState64::basis(vec![2], 0))?;
    let mut worst_gap = 0.0f64;
    let mut worst_excess = 0.0f64;
    for k in 1..=10 {
        let t = config.t_max * k as f64 / 10.0;
        let evolved = evolve_tripartite(&initial, bath.p_of_t(t)?)?;
        let kw = accessible_info_kw(&evolved)?;
        let rho_se = evolved.density().partial_trace(&[0, 2])?;
        let bf = accessible_info_bruteforce(&rho_se, 64)?;
        worst_gap = worst_gap.max((kw - bf).abs());
        worst_excess = worst_excess.max(bf - kw);
    }
    checks.push(Check {
        name: "brute-force info vs identity route (gap)",
        deviation: worst_gap,
        bound: 5e-3,
    });
    checks.push(Check {
        name: "brute-force info never exceeds the bound",
        deviation: worst_excess,
        bound: 1e-9,
    });

    // Rate duality along the configured trajectory.
    let series = trajectory(
        &bath,
        &InitialStateSpec::radial(config.r)?,
        config.t_max,
        config.steps,
    )?;
    let points = series.points();
    let mut worst_step = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in points.windows(2) {
        let de = w[1].info.e_sa - w[0].info.e_sa;
        let dj = w[1].info.j_se - w[0].info.j_se;
        worst_step = worst_step.max((de + dj).abs());
    }
    for pt in points {
        lo = lo.min(pt.info.s_s);
        hi = hi.max(pt.info.s_s);
    }
    checks.push(Check {
        name: "entanglement/information rate duality",
        deviation: worst_step,
        bound: 1e-9,
    });
    checks.push(Check {
        name: "system entropy invariance",
        deviation: hi - lo,
        bound: 1e-10,
    });

    // Divisibility through the Choi spectrum of in-between maps.
    if oscillatory {
        // Every step with decreasing p must be witnessed by a Choi
        // eigenvalue below -1e-9; report the worst (largest) witness.
        let mut worst_witness = f64::NEG_INFINITY;
        for (pair, times) in points.windows(2).zip(series.ts().windows(2)) {
            if pair[0].p >= 1.0 {
                continue; // map undefined where the channel is fully damped
            }
            if pair[1].p < pair[0].p {
                let map = bath.intermediate_map(times[0], times[1])?;
                worst_witness = worst_witness.max(map.min_choi_eigenvalue()?);
            }
        }
        // Vacuously satisfied when the horizon ends before any backflow.
        checks.push(Check {
            name: "non-CP witness on every p-decreasing step",
            deviation: worst_witness,
            bound: -1e-9,
        });
    } else {
        let mut worst_negative = 0.0f64;
        for (pair, times) in points.windows(2).zip(series.ts().windows(2)) {
            if pair[0].p >= 1.0 {
                continue;
            }
            let map = bath.intermediate_map(times[0], times[1])?;
            worst_negative = worst_negative.min(map.min_choi_eigenvalue()?);
        }
        checks.push(Check {
            name: "all intermediate maps CP (min Choi eigenvalue)",
            deviation: -worst_negative,
            bound: 1e-9,
        });
    }

    Ok(checks)
}
