//! Simulation and analysis toolkit for secondary frequency control in power
//! networks with on-off and hysteretic load-side participation.
//!
//! The toolkit models a lossless power network (swing dynamics in
//! angle-difference coordinates) closed with a general class of passive
//! continuous supply dynamics and discrete controllable loads. Two load
//! policies are supported:
//!
//! * instantaneous on-off switching, treated as a Filippov differential
//!   inclusion with optional equivalent-control sliding on the threshold
//!   surfaces, and
//! * hysteretic switching, treated as a hybrid system with flow and jump
//!   sets on a hybrid time domain.
//!
//! On top of the simulator sit analysis tools: equilibrium computation,
//! passivity certification of the supply dynamics (frequency-sweep positive
//! realness plus closed-form gain conditions), quadratic storage-function
//! synthesis, Lyapunov/dissipation monitoring along trajectories, dwell-time
//! measurement, chattering detection, and overshoot metrics.
//!
//! Scenarios are described in TOML files; results are emitted as CSV (and
//! optionally SVG). See the `examples/` directory for one runnable example
//! per major capability, and the `gridswitch` binary for the subcommand CLI.

pub mod analysis;
pub mod loads;
pub mod net;
pub mod output;
pub mod run;
pub mod scenario;
pub mod solver;
pub mod storage;
pub mod supply;

pub use net::{Bus, ContinuousState, Line, Network};
pub use run::{run_simulation, RunError, SimulationOutcome};
pub use scenario::{build, parse_scenario, BuiltScenario, Scenario, ScenarioError};
pub use solver::{simulate, HybridState, SolverConfig, System, Trajectory};
pub use supply::SupplyModel;
