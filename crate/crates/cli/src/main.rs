//! Command-line front end: trajectory CSVs, the non-Markovianity measure,
//! parameter sweeps and oracle cross-checks.

mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nonmarkov::measure::{
    defaults, measure_from_series, measure_profile, trajectory, InitialStateSpec,
    MeasureResult,
};
use nonmarkov::Bath64;

use config::{CliError, CliResult, FileConfig, Resolver, RunConfig};
use output::{fixed, rate_cell, sig, CsvSink};

const TRAJECTORY_HEADER: &str = "t_gamma0,p,gamma_over_gamma0,E_SA,J_SE";

#[derive(Parser)]
#[command(
    name = "nonmarkov",
    version,
    about = "Amplitude-damped qubit dynamics and an entanglement-based \
             non-Markovianity measure",
    after_help = "Exit codes: 0 success, 1 runtime failure, 2 usage error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Reservoir spectral width over gamma0 (oscillatory regime below 2).
    #[arg(long)]
    lambda_ratio: Option<f64>,
    /// Horizon in units of 1/gamma0; defaults to 10 (markovian) or 30
    /// (oscillatory).
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of uniform grid steps (at least 200).
    #[arg(long)]
    steps: Option<usize>,
    /// Significant digits in CSV cells and summary values (default 9).
    #[arg(long)]
    precision: Option<usize>,
    /// Output path for the CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain key=value file mirroring the flags; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one trajectory and emit t, p, gamma, E_SA, J_SE rows.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Bloch radius of the initial apparatus state (0 = maximally
        /// entangled start).
        #[arg(long)]
        r: Option<f64>,
    },
    /// Maximize the summed entanglement growth over a radius grid.
    Measure {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated radii in [0, 1]; default 0, 0.05, ..., 1.
        #[arg(long)]
        r_grid: Option<String>,
    },
    /// Tabulate the measure over a lambda_ratio x radius grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated reservoir widths (required).
        #[arg(long)]
        lambda_grid: Option<String>,
        /// Comma-separated radii in [0, 1]; default 0, 0.05, ..., 1.
        #[arg(long)]
        r_grid: Option<String>,
    },
    /// Run every closed form against its independent oracle.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Bloch radius for the trajectory-based checks.
        #[arg(long)]
        r: Option<f64>,
        /// Poison the first check to exercise the failure path.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { common, r } => cmd_simulate(common, r),
        Command::Measure { common, r_grid } => cmd_measure(common, r_grid.as_deref()),
        Command::Sweep { common, lambda_grid, r_grid } => {
            cmd_sweep(common, lambda_grid.as_deref(), r_grid.as_deref())
        }
        Command::Verify { common, r, inject_fault } => cmd_verify(common, r, inject_fault),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_run(common: &CommonArgs, r: Option<f64>) -> CliResult<(RunConfig, FileConfig)> {
    let file = FileConfig::load(common.config.as_deref())?;
    let run = Resolver::new(&file).run_config(
        common.lambda_ratio,
        common.t_max,
        common.steps,
        r,
        common.precision,
        common.out.clone(),
    )?;
    Ok((run, file))
}

fn summary(sink: &CsvSink, lines: &[String]) {
    for line in lines {
        if sink.summary_to_stderr() {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
}

fn interval_text(intervals: &[(f64, f64)], digits: usize) -> String {
    intervals
        .iter()
        .map(|(a, b)| format!("[{}, {}]", sig(*a, digits), sig(*b, digits)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_simulate(common: CommonArgs, r: Option<f64>) -> CliResult<ExitCode> {
    let (run, _) = resolve_run(&common, r)?;
    let bath: Bath64 = run.bath()?;
    let spec = InitialStateSpec::radial(run.r)?;
    let series = trajectory(&bath, &spec, run.t_max, run.steps)?;
    let result = measure_from_series(&series)?;

    let mut sink = CsvSink::open(run.out.as_deref())?;
    sink.header(TRAJECTORY_HEADER)?;
    for (t, pt) in series.ts().iter().zip(series.points()) {
        sink.row(&[
            sig(*t, run.precision),
            sig(pt.p, run.precision),
            rate_cell(pt.gamma, run.precision),
            sig(pt.info.e_sa, run.precision),
            sig(pt.info.j_se, run.precision),
        ])?;
    }

    let mut lines = vec![
        format!(
            "lambda_ratio = {}, t_max = {}, steps = {}, r = {}",
            run.lambda_ratio, run.t_max, run.steps, run.r
        ),
        format!("growth intervals detected: {}", result.intervals.len()),
        format!("N = {}", fixed(result.value, run.precision)),
    ];
    if !result.intervals.is_empty() {
        lines.push(format!(
            "intervals: {}",
            interval_text(&result.intervals, run.precision)
        ));
    }
    summary(&sink, &lines);
    sink.finish()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_measure(common: CommonArgs, r_grid: Option<&str>) -> CliResult<ExitCode> {
    let (run, file) = resolve_run(&common, None)?;
    let resolver = Resolver::new(&file);
    let grid = resolver
        .grid(r_grid, "r-grid", Some((0.0, 1.0)))?
        .unwrap_or_else(defaults::r_grid);

    let bath: Bath64 = run.bath()?;
    let profile = measure_profile(&bath, run.t_max, run.steps, &grid)?;
    let best = pick_best(&profile);

    let mut lines = vec![
        format!(
            "lambda_ratio = {}, t_max = {}, steps = {}, r_grid = {} point(s)",
            run.lambda_ratio,
            run.t_max,
            run.steps,
            grid.len()
        ),
        format!("N = {}", fixed(best.value, run.precision)),
        format!("argmax r = {}", best.argmax_r.expect("radius optimization")),
    ];
    if best.intervals.is_empty() {
        lines.push("growth intervals at the optimum: none".to_string());
    } else {
        lines.push(format!(
            "growth intervals at the optimum: {}",
            interval_text(&best.intervals, run.precision)
        ));
    }
    for line in &lines {
        println!("{line}");
    }

    if run.out.is_some() {
        let mut sink = CsvSink::open(run.out.as_deref())?;
        sink.header("r,N")?;
        for (r, result) in &profile {
            sink.row(&[sig(*r, run.precision), sig(result.value, run.precision)])?;
        }
        sink.finish()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn pick_best(profile: &[(f64, MeasureResult<f64>)]) -> MeasureResult<f64> {
    // Ties break toward the smaller radius; the profile is sorted ascending.
    let mut best: Option<(f64, &MeasureResult<f64>)> = None;
    for (r, result) in profile {
        if best.is_none_or(|(_, b)| result.value > b.value) {
            best = Some((*r, result));
        }
    }
    let (r, result) = best.expect("nonempty profile");
    MeasureResult {
        value: result.value,
        intervals: result.intervals.clone(),
        argmax_r: Some(r),
    }
}

fn cmd_sweep(
    common: CommonArgs,
    lambda_grid: Option<&str>,
    r_grid: Option<&str>,
) -> CliResult<ExitCode> {
    let (run, file) = resolve_run(&common, None)?;
    let resolver = Resolver::new(&file);
    let lambdas = resolver
        .grid(lambda_grid, "lambda-grid", None)?
        .ok_or_else(|| CliError::Usage("--lambda-grid is required for sweep".into()))?;
    let radii = resolver
        .grid(r_grid, "r-grid", Some((0.0, 1.0)))?
        .unwrap_or_else(defaults::r_grid);

    // An explicit horizon (flag or config file) applies to every lambda;
    // otherwise each lambda gets its regime default.
    let explicit_t_max =
        (common.t_max.is_some() || file.has("t-max")).then_some(run.t_max);

    let mut sink = CsvSink::open(run.out.as_deref())?;
    sink.header("lambda_ratio,r,N")?;
    let mut rows = 0usize;
    for &lambda in &lambdas {
        let bath = Bath64::new(lambda)?;
        let t_max = explicit_t_max.unwrap_or_else(|| defaults::t_max_for(&bath));
        for &r in &radii {
            let spec = InitialStateSpec::radial(r)?;
            let series = trajectory(&bath, &spec, t_max, run.steps)?;
            let value = measure_from_series(&series)?.value;
            sink.row(&[
                sig(lambda, run.precision),
                sig(r, run.precision),
                sig(value, run.precision),
            ])?;
            rows += 1;
        }
    }
    summary(
        &sink,
        &[format!(
            "sweep: {} lambda value(s) x {} radius value(s) = {rows} row(s)",
            lambdas.len(),
            radii.len()
        )],
    );
    sink.finish()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(common: CommonArgs, r: Option<f64>, inject_fault: bool) -> CliResult<ExitCode> {
    let (run, _) = resolve_run(&common, r)?;
    let checks = verify::run_checks(&run, inject_fault)?;

    println!(
        "verifying at lambda_ratio = {}, t_max = {}, steps = {}, r = {}",
        run.lambda_ratio, run.t_max, run.steps, run.r
    );
    let mut all_pass = true;
    for check in &checks {
        let verdict = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "{:<46} deviation {:>12} (bound {:>9})  {verdict}",
            check.name,
            sig(check.deviation, 3),
            sig(check.bound, 2),
        );
        all_pass &= check.passed();
    }
    if all_pass {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Runtime("verification failed".into()))
    }
}
