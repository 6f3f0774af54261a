//! Orchestration: wire a built scenario through equilibrium, simulation,
//! monitoring, and serialization, and map failures to process exit codes.
//!
//! Runs start from the pre-disturbance equilibrium with all controllable
//! loads off, so every transient in the output is attributable to the
//! declared disturbance schedule. The energy column and the dissipation
//! report are computed against the post-disturbance equilibrium the system
//! settles into.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{
    lyapunov_value, overshoot_metrics, solve_equilibrium, verify_dissipation, AnalysisError,
    DissipationReport, EquilibriumPoint,
};
use crate::output::{events_csv, fmt_f64, omega_svg, trajectory_csv, MetricsTable};
use crate::scenario::{build, variant, BuiltScenario, LoadVariant, Scenario, ScenarioError};
use crate::solver::{
    chattering_report, min_dwell_time, simulate, HybridState, SolverError, Trajectory,
};
use crate::storage::{derive_storage, StorageFunction};
use crate::supply::SupplyError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Supply(#[from] SupplyError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl RunError {
    /// Process exit code: 1 for scenario/IO problems, 2 for numerical
    /// failures, 3 for a failed post-run assertion.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Scenario(_) | RunError::Io(_) => 1,
            RunError::Analysis(_) | RunError::Solver(_) | RunError::Supply(_) => 2,
            RunError::CheckFailed(_) => 3,
        }
    }
}

/// Everything a simulation run produces in memory.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    /// equilibrium the closed loop settles into after the disturbances
    pub equilibrium: EquilibriumPoint,
    pub trajectory: Trajectory,
    /// per-sample energy value when monitoring is enabled
    pub energy: Option<Vec<f64>>,
    /// per-bus quadratic storages when derivable for every bus
    pub storages: Option<Vec<StorageFunction>>,
    pub dissipation: Option<DissipationReport>,
}

/// Hybrid initial condition: continuous state at the equilibrium of the
/// base (pre-disturbance) loads, all discrete load states off.
pub fn initial_state(built: &BuiltScenario) -> Result<HybridState, RunError> {
    let mut base = built.system.clone();
    base.disturbances.clear();
    let eq = solve_equilibrium(&base, &built.participation)?;
    Ok(HybridState {
        t: 0.0,
        ell: 0,
        continuous: eq.state(),
        sigma: vec![0; built.system.network.n_buses()],
    })
}

/// Attempt per-bus storage synthesis; monitoring falls back to the supply
/// rate when any bus lacks a certificate at the configured margin.
fn try_storages(built: &BuiltScenario) -> Option<Vec<StorageFunction>> {
    let mut out = Vec::with_capacity(built.system.supplies.len());
    for model in &built.system.supplies {
        match derive_storage(model, built.monitor.storage_epsilon) {
            Ok(s) => out.push(s),
            Err(_) => return None,
        }
    }
    Some(out)
}

/// Run the scenario end to end: equilibrium, simulation, and (when
/// enabled) energy monitoring.
pub fn run_simulation(built: &BuiltScenario) -> Result<SimulationOutcome, RunError> {
    let init = initial_state(built)?;
    let equilibrium = solve_equilibrium(&built.system, &built.participation)?;
    let trajectory = simulate(&built.system, &init, &built.config)?;

    let (energy, storages, dissipation) = if built.monitor.lyapunov {
        let storages = try_storages(built);
        let energy: Vec<f64> = trajectory
            .samples
            .iter()
            .map(|s| {
                lyapunov_value(
                    &built.system.network,
                    &s.state,
                    &equilibrium,
                    storages.as_deref(),
                )
                .total
            })
            .collect();
        let report = verify_dissipation(
            &built.system,
            &trajectory,
            &equilibrium,
            storages.as_deref(),
        );
        (Some(energy), storages, Some(report))
    } else {
        (None, None, None)
    };

    Ok(SimulationOutcome {
        equilibrium,
        trajectory,
        energy,
        storages,
        dissipation,
    })
}

/// Post-run assertions behind the `--check` flag: the grid frequency must
/// be back inside the settling band at the horizon and, when monitored,
/// the energy function must never have increased beyond tolerance.
pub fn check_outcome(built: &BuiltScenario, outcome: &SimulationOutcome) -> Result<(), RunError> {
    let last = outcome
        .trajectory
        .samples
        .last()
        .ok_or_else(|| RunError::CheckFailed("empty trajectory".into()))?;
    let band = built.monitor.band;
    for (j, &w) in last.state.omega.iter().enumerate() {
        if w.abs() > band {
            return Err(RunError::CheckFailed(format!(
                "bus {} frequency {:.3e} rad/s outside the {band} rad/s band at t = {}",
                built.system.network.buses[j].id, w, last.t
            )));
        }
    }
    if let Some(report) = &outcome.dissipation {
        if report.flow_violations > 0 || report.jump_violations > 0 {
            return Err(RunError::CheckFailed(format!(
                "energy function increased: {} flow and {} jump violations (worst {:.3e})",
                report.flow_violations, report.jump_violations, report.max_flow_increase
            )));
        }
    }
    Ok(())
}

/// Files written by a simulation run.
#[derive(Debug, Clone)]
pub struct RunPaths {
    pub trajectory: PathBuf,
    pub events: PathBuf,
    pub metrics: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Build the metrics table for a finished run: overshoot, dwell-time,
/// chattering, terminal frequency, and monitor results.
pub fn metrics_table(built: &BuiltScenario, outcome: &SimulationOutcome) -> MetricsTable {
    let net = &built.system.network;
    let mut table = MetricsTable::new();
    table.add_overshoot(net, &overshoot_metrics(&outcome.trajectory, built.monitor.band));
    table.add_dwell(net, &min_dwell_time(&outcome.trajectory, &built.system));
    table.add_chatter(
        net,
        &chattering_report(
            &outcome.trajectory,
            built.config.chatter_window,
            built.config.chatter_count,
        ),
    );
    if let Some(last) = outcome.trajectory.samples.last() {
        let worst = last.state.omega.iter().fold(0.0_f64, |a, w| a.max(w.abs()));
        table.push_f64("terminal_max_abs_omega", None, worst);
        table.push("jump_count", None, last.ell.to_string());
    }
    table.push_f64("equilibrium_residual", None, outcome.equilibrium.residual);
    if let Some(report) = &outcome.dissipation {
        table.push("monitor_mode", None, report.mode.as_str().to_string());
        table.push(
            "dissipation_violations",
            None,
            (report.flow_violations + report.jump_violations).to_string(),
        );
        table.push_f64("max_energy_increase", None, report.max_flow_increase);
    }
    table
}

/// Serialize a finished run into `<out_dir>/<name>_{trajectory,events,
/// metrics}.csv` and optionally an SVG frequency plot.
pub fn write_outputs(
    built: &BuiltScenario,
    outcome: &SimulationOutcome,
    out_dir: &Path,
    svg: bool,
) -> Result<RunPaths, RunError> {
    std::fs::create_dir_all(out_dir)?;
    let net = &built.system.network;
    let stem = |suffix: &str| out_dir.join(format!("{}_{suffix}", built.name));

    let trajectory = stem("trajectory.csv");
    std::fs::write(
        &trajectory,
        trajectory_csv(net, &outcome.trajectory, outcome.energy.as_deref()),
    )?;
    let events = stem("events.csv");
    std::fs::write(&events, events_csv(net, &outcome.trajectory))?;
    let metrics = stem("metrics.csv");
    std::fs::write(&metrics, metrics_table(built, outcome).to_csv())?;
    let svg = if svg {
        let path = stem("omega.svg");
        std::fs::write(
            &path,
            omega_svg(net, &outcome.trajectory, &built.name),
        )?;
        Some(path)
    } else {
        None
    };
    Ok(RunPaths {
        trajectory,
        events,
        metrics,
        svg,
    })
}

/// Aggregate numbers for one row of the comparison table.
#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub variant: LoadVariant,
    /// worst frequency excursion over all buses (rad/s)
    pub peak_abs_omega: f64,
    /// latest settling time over all buses; None if some bus never settles
    pub settling_time: Option<f64>,
    pub jump_count: u64,
    pub terminal_max_abs_omega: f64,
    /// true when every controllable load is off at the horizon
    pub loads_released: bool,
}

fn summarize(
    which: LoadVariant,
    built: &BuiltScenario,
    outcome: &SimulationOutcome,
) -> CompareSummary {
    let over = overshoot_metrics(&outcome.trajectory, built.monitor.band);
    let peak_abs_omega = over.iter().fold(0.0_f64, |a, o| a.max(o.peak_abs_omega));
    let settling_time = over
        .iter()
        .map(|o| o.settling_time)
        .try_fold(0.0_f64, |a, t| t.map(|t| a.max(t)));
    let last = outcome.trajectory.samples.last();
    CompareSummary {
        variant: which,
        peak_abs_omega,
        settling_time,
        jump_count: last.map(|s| s.ell).unwrap_or(0),
        terminal_max_abs_omega: last
            .map(|s| s.state.omega.iter().fold(0.0_f64, |a, w| a.max(w.abs())))
            .unwrap_or(0.0),
        loads_released: last
            .map(|s| s.sigma.iter().all(|&x| x == 0) && s.demand.iter().all(|&d| d == 0.0))
            .unwrap_or(true),
    }
}

fn run_variant(base: &Scenario, which: LoadVariant) -> Result<CompareSummary, RunError> {
    let scenario = variant(base, which);
    let built = build(&scenario)?;
    let outcome = run_simulation(&built)?;
    Ok(summarize(which, &built, &outcome))
}

/// Simulate the scenario under all three load-policy variants and collect
/// one summary row each. Rows are returned in a fixed order regardless of
/// completion order, so the table is deterministic. Set the
/// `GRIDSWITCH_THREADS` environment variable to a value above 1 to run the
/// variants concurrently.
pub fn compare(base: &Scenario) -> Result<Vec<CompareSummary>, RunError> {
    const VARIANTS: [LoadVariant; 3] = [
        LoadVariant::NoLoads,
        LoadVariant::Switching,
        LoadVariant::Hysteresis,
    ];
    let threads: usize = std::env::var("GRIDSWITCH_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);
    if threads > 1 {
        let mut results: Vec<Option<Result<CompareSummary, RunError>>> =
            (0..VARIANTS.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            for (slot, which) in results.iter_mut().zip(VARIANTS) {
                scope.spawn(move || *slot = Some(run_variant(base, which)));
            }
        });
        results
            .into_iter()
            .map(|r| r.expect("variant thread completed"))
            .collect()
    } else {
        VARIANTS.iter().map(|&w| run_variant(base, w)).collect()
    }
}

/// Render comparison rows as a CSV table.
pub fn compare_csv(rows: &[CompareSummary]) -> String {
    let mut out = String::from(
        "variant,peak_abs_omega,settling_time,jump_count,terminal_max_abs_omega,loads_released\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.variant.as_str(),
            fmt_f64(r.peak_abs_omega),
            r.settling_time.map(fmt_f64).unwrap_or_default(),
            r.jump_count,
            fmt_f64(r.terminal_max_abs_omega),
            r.loads_released as u8,
        ));
    }
    out
}
