//! Run the bundled two-bus scenario and print a condensed account of the
//! transient: the load step, the hysteretic engage/release events, and the
//! restored frequency at the horizon.

use gridswitch::run::{run_simulation, write_outputs};
use gridswitch::scenario::{build, parse_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/two_bus.toml");
    let scenario = parse_scenario(&std::fs::read_to_string(path)?)?;
    let built = build(&scenario)?;

    let outcome = run_simulation(&built)?;
    println!("scenario: {}", built.name);
    println!(
        "equilibrium residual: {:.2e}",
        outcome.equilibrium.residual
    );

    for e in &outcome.trajectory.events {
        println!(
            "t = {:7.4} s  bus {}  {}",
            e.t,
            built.system.network.buses[e.bus].id,
            e.kind.as_str()
        );
    }

    let last = outcome.trajectory.samples.last().unwrap();
    let worst = last
        .state
        .omega
        .iter()
        .fold(0.0_f64, |a, w| a.max(w.abs()));
    println!("terminal max |omega|: {worst:.2e} rad/s at t = {} s", last.t);
    println!(
        "all loads released: {}",
        last.sigma.iter().all(|&s| s == 0)
    );

    let dir = std::env::temp_dir().join("gridswitch_two_bus");
    let paths = write_outputs(&built, &outcome, &dir, true)?;
    println!("trajectory written to {}", paths.trajectory.display());
    println!("plot written to {}", paths.svg.unwrap().display());
    Ok(())
}
