//! Command-line front end: simulate scenario files, solve equilibria,
//! check supply passivity, print run metrics, and compare load policies.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gridswitch::analysis::{security_check, solve_equilibrium};
use gridswitch::output::fmt_f64;
use gridswitch::run::{
    check_outcome, compare, compare_csv, metrics_table, run_simulation, write_outputs, RunError,
};
use gridswitch::scenario::{
    build, parse_scenario, BuiltScenario, ModeSection, Scenario, SlidingSection,
};
use gridswitch::supply::{check_passivity, default_freq_grid};

#[derive(Parser)]
#[command(name = "gridswitch", version, about = "Power-network frequency control with switched loads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Filippov,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum SlidingArg {
    EquivalentControl,
    StrictEvent,
}

/// Solver settings that override what the scenario file declares.
#[derive(Args)]
struct Overrides {
    /// integration step (s)
    #[arg(long)]
    dt: Option<f64>,
    /// simulation horizon (s)
    #[arg(long)]
    t_end: Option<f64>,
    /// switching-load semantics
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// treatment of sliding motion on switching surfaces
    #[arg(long, value_enum)]
    sliding: Option<SlidingArg>,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) {
        if let Some(dt) = self.dt {
            s.solver.dt = dt;
        }
        if let Some(t_end) = self.t_end {
            s.solver.t_end = t_end;
        }
        if let Some(mode) = self.mode {
            s.solver.mode = match mode {
                ModeArg::Filippov => ModeSection::Filippov,
                ModeArg::Hybrid => ModeSection::Hybrid,
            };
        }
        if let Some(sliding) = self.sliding {
            s.solver.sliding = match sliding {
                SlidingArg::EquivalentControl => SlidingSection::EquivalentControl,
                SlidingArg::StrictEvent => SlidingSection::StrictEvent,
            };
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scenario and write trajectory, event, and metric files
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// assert frequency restoration and energy decrease after the run
        #[arg(long)]
        check: bool,
        /// also write an SVG plot of the bus frequencies
        #[arg(long)]
        svg: bool,
        /// output directory
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Solve the post-disturbance equilibrium and check line security
    Equilibrium { scenario: PathBuf },
    /// Check each supply's passivity margin over a frequency sweep
    Passivity {
        scenario: PathBuf,
        /// required excess passivity margin
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
    },
    /// Run the scenario and print the metrics table to stdout
    Report {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate no-load, switching, and hysteresis variants side by side
    Compare {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, RunError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_scenario(&text)?)
}

fn load_built(path: &PathBuf, overrides: Option<&Overrides>) -> Result<BuiltScenario, RunError> {
    let mut scenario = load(path)?;
    if let Some(o) = overrides {
        o.apply(&mut scenario);
    }
    Ok(build(&scenario)?)
}

fn cmd_simulate(
    path: &PathBuf,
    overrides: &Overrides,
    check: bool,
    svg: bool,
    out_dir: &PathBuf,
) -> Result<(), RunError> {
    let built = load_built(path, Some(overrides))?;
    let outcome = run_simulation(&built)?;
    let paths = write_outputs(&built, &outcome, out_dir, svg)?;
    println!("wrote {}", paths.trajectory.display());
    println!("wrote {}", paths.events.display());
    println!("wrote {}", paths.metrics.display());
    if let Some(p) = &paths.svg {
        println!("wrote {}", p.display());
    }
    if let Some(report) = &outcome.dissipation {
        println!(
            "monitor: {} mode, {} violations",
            report.mode.as_str(),
            report.flow_violations + report.jump_violations
        );
    }
    if check {
        check_outcome(&built, &outcome)?;
        println!("check: ok");
    }
    Ok(())
}

fn cmd_equilibrium(path: &PathBuf) -> Result<(), RunError> {
    let built = load_built(path, None)?;
    let eq = solve_equilibrium(&built.system, &built.participation)?;
    println!("residual,{}", fmt_f64(eq.residual));
    for (j, b) in built.system.network.buses.iter().enumerate() {
        println!("s_star_{},{}", b.id, fmt_f64(eq.s_star[j]));
    }
    for (l, line) in built.system.network.lines.iter().enumerate() {
        println!(
            "eta_star_{}_{},{}",
            built.system.network.buses[line.from].id,
            built.system.network.buses[line.to].id,
            fmt_f64(eq.eta_star[l])
        );
    }
    let sec = security_check(&eq);
    println!("secure,{}", sec.all_ok as u8);
    Ok(())
}

fn cmd_passivity(path: &PathBuf, epsilon: f64) -> Result<(), RunError> {
    let built = load_built(path, None)?;
    let grid = default_freq_grid();
    println!("bus,min_real_part,verdict,note");
    let mut all_pass = true;
    for (j, model) in built.system.supplies.iter().enumerate() {
        let cert = check_passivity(model, epsilon, &grid)?;
        all_pass &= cert.verdict;
        println!(
            "{},{},{},{}",
            built.system.network.buses[j].id,
            fmt_f64(cert.min_real_part),
            if cert.verdict { "pass" } else { "fail" },
            cert.validity_note,
        );
    }
    if !all_pass {
        return Err(RunError::CheckFailed(
            "one or more supplies failed the passivity sweep".into(),
        ));
    }
    Ok(())
}

fn cmd_report(path: &PathBuf, overrides: &Overrides) -> Result<(), RunError> {
    let built = load_built(path, Some(overrides))?;
    let outcome = run_simulation(&built)?;
    print!("{}", metrics_table(&built, &outcome).to_csv());
    Ok(())
}

fn cmd_compare(path: &PathBuf, overrides: &Overrides) -> Result<(), RunError> {
    let mut scenario = load(path)?;
    overrides.apply(&mut scenario);
    // variants rewrite the mode themselves; validate the base early for a
    // clear error message
    build(&scenario)?;
    let rows = compare(&scenario)?;
    print!("{}", compare_csv(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            scenario,
            overrides,
            check,
            svg,
            out_dir,
        } => cmd_simulate(scenario, overrides, *check, *svg, out_dir),
        Command::Equilibrium { scenario } => cmd_equilibrium(scenario),
        Command::Passivity { scenario, epsilon } => cmd_passivity(scenario, *epsilon),
        Command::Report {
            scenario,
            overrides,
        } => cmd_report(scenario, overrides),
        Command::Compare {
            scenario,
            overrides,
        } => cmd_compare(scenario, overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
