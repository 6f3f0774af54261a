//! Scenario files: schema, parsing, validation, and load-mode variants.
//!
//! A scenario is a TOML document describing the network, per-bus supply
//! dynamics and load policies, a disturbance schedule, solver settings, and
//! monitor flags. The schema is closed: unknown keys are rejected so typos
//! fail loudly. Parsing is purely structural; [`build`] performs the
//! semantic checks (threshold ordering, mode/load consistency, at least one
//! frequency-restoring supply) and assembles the simulatable system.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::loads::{HystereticLoad, SwitchingLoad};
use crate::net::{build_network, Bus, NetError, NetworkSpec};
use crate::solver::{
    Disturbance, LoadPolicy, Mode, SlidingTreatment, SolverConfig, System,
};
use crate::supply::{
    GovernorParams, LinearStateSpace, SupplyError, SupplyModel, TransferFunction,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Supply(#[from] SupplyError),
}

/// Units in which load thresholds are declared; converted to rad/s
/// internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdUnit {
    Hz,
    #[default]
    RadS,
}

impl ThresholdUnit {
    fn to_rad_s(self, v: f64) -> f64 {
        match self {
            ThresholdUnit::Hz => v * 2.0 * std::f64::consts::PI,
            ThresholdUnit::RadS => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupplySection {
    StaticDamping {
        d: f64,
    },
    PiLag {
        k: f64,
        #[serde(default)]
        k_tilde: f64,
        d: f64,
        tau_beta: f64,
    },
    PiSecondOrder {
        k: f64,
        d: f64,
        tau_beta: f64,
        tau_gamma: f64,
    },
    StateSpace {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
        #[serde(default)]
        dff: f64,
    },
    /// rational model, coefficients in ascending powers of s
    TransferFunction {
        num: Vec<f64>,
        den: Vec<f64>,
    },
    /// turbine-governor transfer function with named time constants
    Governor {
        #[serde(default = "governor_default_t_s")]
        t_s: f64,
        #[serde(default = "governor_default_t_3")]
        t_3: f64,
        #[serde(default = "governor_default_t_c")]
        t_c: f64,
        #[serde(default = "governor_default_t_4")]
        t_4: f64,
        #[serde(default = "governor_default_t_5")]
        t_5: f64,
        k: f64,
        d: f64,
    },
}

fn governor_default_t_s() -> f64 {
    GovernorParams::default().t_s
}
fn governor_default_t_3() -> f64 {
    GovernorParams::default().t_3
}
fn governor_default_t_c() -> f64 {
    GovernorParams::default().t_c
}
fn governor_default_t_4() -> f64 {
    GovernorParams::default().t_4
}
fn governor_default_t_5() -> f64 {
    GovernorParams::default().t_5
}

impl SupplySection {
    pub fn to_model(&self) -> Result<SupplyModel, ScenarioError> {
        let model = match self {
            SupplySection::StaticDamping { d } => SupplyModel::StaticDamping { d: *d },
            SupplySection::PiLag {
                k,
                k_tilde,
                d,
                tau_beta,
            } => SupplyModel::PiLag {
                k: *k,
                k_tilde: *k_tilde,
                d: *d,
                tau_beta: *tau_beta,
            },
            SupplySection::PiSecondOrder {
                k,
                d,
                tau_beta,
                tau_gamma,
            } => SupplyModel::PiSecondOrder {
                k: *k,
                d: *d,
                tau_beta: *tau_beta,
                tau_gamma: *tau_gamma,
            },
            SupplySection::StateSpace { a, b, c, dff } => {
                let n = a.len();
                if a.iter().any(|row| row.len() != n) || b.len() != n || c.len() != n {
                    return Err(ScenarioError::Schema(format!(
                        "state-space dimensions inconsistent: A is {n}x?, B has {}, C has {}",
                        b.len(),
                        c.len()
                    )));
                }
                SupplyModel::StateSpace(LinearStateSpace {
                    a: nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]),
                    b: nalgebra::DVector::from_row_slice(b),
                    c: nalgebra::DVector::from_row_slice(c),
                    dff: *dff,
                })
            }
            SupplySection::TransferFunction { num, den } => {
                SupplyModel::TransferFunction(TransferFunction {
                    num: num.clone(),
                    den: den.clone(),
                })
            }
            SupplySection::Governor {
                t_s,
                t_3,
                t_c,
                t_4,
                t_5,
                k,
                d,
            } => SupplyModel::governor(&GovernorParams {
                t_s: *t_s,
                t_3: *t_3,
                t_c: *t_c,
                t_4: *t_4,
                t_5: *t_5,
                k: *k,
                d: *d,
            }),
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSection {
    #[default]
    None,
    Switching {
        d_up: f64,
        d_down: f64,
        omega_up: f64,
        omega_down: f64,
        #[serde(default)]
        unit: ThresholdUnit,
    },
    Hysteresis {
        d_up: f64,
        omega1: f64,
        omega0: f64,
        #[serde(default)]
        unit: ThresholdUnit,
    },
}

impl LoadSection {
    pub fn to_policy(&self) -> Result<LoadPolicy, ScenarioError> {
        match self {
            LoadSection::None => Ok(LoadPolicy::None),
            LoadSection::Switching {
                d_up,
                d_down,
                omega_up,
                omega_down,
                unit,
            } => {
                let l = SwitchingLoad {
                    d_up: *d_up,
                    d_down: *d_down,
                    omega_up: unit.to_rad_s(*omega_up),
                    omega_down: unit.to_rad_s(*omega_down),
                };
                l.validate()
                    .map_err(|e| ScenarioError::Schema(e.to_string()))?;
                Ok(LoadPolicy::Switching(l))
            }
            LoadSection::Hysteresis {
                d_up,
                omega1,
                omega0,
                unit,
            } => {
                let l = HystereticLoad {
                    d_up: *d_up,
                    omega1: unit.to_rad_s(*omega1),
                    omega0: unit.to_rad_s(*omega0),
                };
                l.validate()
                    .map_err(|e| ScenarioError::Schema(e.to_string()))?;
                Ok(LoadPolicy::Hysteretic(l))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusSection {
    pub id: u32,
    pub inertia: f64,
    #[serde(default)]
    pub base_load: f64,
    pub supply: SupplySection,
    #[serde(default)]
    pub load: LoadSection,
    /// secondary-control participation weight; when omitted everywhere the
    /// burden splits equally over frequency-restoring buses
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSection {
    pub from: u32,
    pub to: u32,
    pub susceptance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSection {
    pub bus: u32,
    pub t: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSection {
    Filippov,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlidingSection {
    EquivalentControl,
    StrictEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub dt: f64,
    pub event_tol: f64,
    pub t_end: f64,
    pub mode: ModeSection,
    pub sliding: SlidingSection,
    pub chatter_window: f64,
    pub chatter_count: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        SolverSection {
            dt: c.dt,
            event_tol: c.event_tol,
            t_end: c.t_end,
            mode: ModeSection::Hybrid,
            sliding: SlidingSection::EquivalentControl,
            chatter_window: c.chatter_window,
            chatter_count: c.chatter_count,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            event_tol: self.event_tol,
            t_end: self.t_end,
            mode: match self.mode {
                ModeSection::Filippov => Mode::Filippov,
                ModeSection::Hybrid => Mode::Hybrid,
            },
            sliding: match self.sliding {
                SlidingSection::EquivalentControl => SlidingTreatment::EquivalentControl,
                SlidingSection::StrictEvent => SlidingTreatment::StrictEvent,
            },
            chatter_window: self.chatter_window,
            chatter_count: self.chatter_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorSection {
    /// evaluate the energy function along the run and include it in the CSV
    pub lyapunov: bool,
    /// settling band for overshoot metrics (rad/s)
    pub band: f64,
    /// storage margin used when deriving quadratic storages
    pub storage_epsilon: f64,
}

impl Default for MonitorSection {
    fn default() -> Self {
        MonitorSection {
            lyapunov: true,
            band: 1e-3,
            storage_epsilon: 1e-3,
        }
    }
}

fn default_base_mva() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_base_mva")]
    pub base_mva: f64,
    #[serde(rename = "bus")]
    pub buses: Vec<BusSection>,
    #[serde(default, rename = "line")]
    pub lines: Vec<LineSection>,
    #[serde(default, rename = "disturbance")]
    pub disturbances: Vec<DisturbanceSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub monitor: MonitorSection,
}

/// Parse a scenario document. Malformed TOML is a syntax error; well-formed
/// TOML that does not fit the closed schema is a schema error.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let value: toml::Value =
        toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    value
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Schema(e.to_string()))
}

/// Serialize back to TOML; `parse(serialize(s))` is semantically `s`.
pub fn serialize_scenario(s: &Scenario) -> Result<String, ScenarioError> {
    toml::to_string_pretty(s).map_err(|e| ScenarioError::Schema(e.to_string()))
}

/// Assembled, validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub name: String,
    pub system: System,
    pub config: SolverConfig,
    pub monitor: MonitorSection,
    /// per-bus secondary-control weights (normalized downstream)
    pub participation: Vec<f64>,
}

/// Semantic validation and assembly. Transfer-function supplies are
/// realized to state space here so the result is directly simulatable.
pub fn build(scenario: &Scenario) -> Result<BuiltScenario, ScenarioError> {
    if scenario.buses.is_empty() {
        return Err(ScenarioError::Semantic("scenario declares no buses".into()));
    }
    let net_spec = NetworkSpec {
        buses: scenario
            .buses
            .iter()
            .map(|b| Bus {
                id: b.id,
                inertia: b.inertia,
                base_load: b.base_load,
            })
            .collect(),
        lines: scenario
            .lines
            .iter()
            .map(|l| (l.from, l.to, l.susceptance))
            .collect(),
    };
    let network = build_network(&net_spec)?;

    let mut supplies = Vec::with_capacity(scenario.buses.len());
    let mut loads = Vec::with_capacity(scenario.buses.len());
    for b in &scenario.buses {
        supplies.push(b.supply.to_model()?.realized()?);
        loads.push(b.load.to_policy()?);
    }
    if !supplies.iter().any(|s| s.restores_frequency()) {
        return Err(ScenarioError::Semantic(
            "no supply model restores frequency: declare at least one integrator bus".into(),
        ));
    }
    let mode = scenario.solver.mode;
    for (b, load) in scenario.buses.iter().zip(&loads) {
        match (load, mode) {
            (LoadPolicy::Hysteretic(_), ModeSection::Filippov) => {
                return Err(ScenarioError::Semantic(format!(
                    "bus {} declares a hysteresis load but the solver mode is filippov",
                    b.id
                )));
            }
            (LoadPolicy::Switching(_), ModeSection::Hybrid) => {
                return Err(ScenarioError::Semantic(format!(
                    "bus {} declares a switching load but the solver mode is hybrid",
                    b.id
                )));
            }
            _ => {}
        }
    }

    let mut disturbances = Vec::with_capacity(scenario.disturbances.len());
    for d in &scenario.disturbances {
        if d.t < 0.0 {
            return Err(ScenarioError::Semantic(format!(
                "disturbance time must be nonnegative, got {}",
                d.t
            )));
        }
        let bus = network.bus_index(d.bus).ok_or_else(|| {
            ScenarioError::Semantic(format!("disturbance references unknown bus id {}", d.bus))
        })?;
        disturbances.push(Disturbance {
            t: d.t,
            bus,
            delta: d.delta,
        });
    }

    // participation: explicit weights win; otherwise equal split over
    // frequency-restoring buses
    let explicit = scenario.buses.iter().any(|b| b.participation.is_some());
    let participation: Vec<f64> = if explicit {
        scenario
            .buses
            .iter()
            .map(|b| b.participation.unwrap_or(0.0))
            .collect()
    } else {
        let count = supplies.iter().filter(|s| s.restores_frequency()).count() as f64;
        supplies
            .iter()
            .map(|s| if s.restores_frequency() { 1.0 / count } else { 0.0 })
            .collect()
    };
    for (b, (w, s)) in scenario
        .buses
        .iter()
        .zip(participation.iter().zip(&supplies))
    {
        if *w < 0.0 {
            return Err(ScenarioError::Semantic(format!(
                "bus {} has negative participation weight {w}",
                b.id
            )));
        }
        if *w > 0.0 && !s.restores_frequency() {
            return Err(ScenarioError::Semantic(format!(
                "bus {} has positive participation but its supply has no integral action",
                b.id
            )));
        }
    }
    if participation.iter().sum::<f64>() <= 0.0 {
        return Err(ScenarioError::Semantic(
            "participation weights sum to zero".into(),
        ));
    }

    Ok(BuiltScenario {
        name: scenario.name.clone(),
        system: System {
            network,
            supplies,
            loads,
            disturbances,
        },
        config: scenario.solver.to_config(),
        monitor: scenario.monitor.clone(),
        participation,
    })
}

/// Load-policy variants for side-by-side comparison of the same scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadVariant {
    /// controllable loads removed
    NoLoads,
    /// instantaneous on-off switching at the outer thresholds
    Switching,
    /// hysteretic switching with the inner threshold at 0.15 of the outer
    Hysteresis,
}

impl LoadVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            LoadVariant::NoLoads => "none",
            LoadVariant::Switching => "switching",
            LoadVariant::Hysteresis => "hysteresis",
        }
    }
}

/// Ratio of the release threshold to the engage threshold used when
/// deriving a hysteresis variant from a switching load.
pub const HYSTERESIS_BAND_RATIO: f64 = 0.15;

/// Rewrite the scenario's load sections (and solver mode) for a comparison
/// variant. Thresholds transfer symmetrically: a hysteretic load maps to a
/// switching load with thresholds +-omega1, and a switching load maps to a
/// hysteretic one with omega1 = omega_up and omega0 = 0.15 omega1.
pub fn variant(base: &Scenario, which: LoadVariant) -> Scenario {
    let mut s = base.clone();
    for b in &mut s.buses {
        b.load = match (&b.load, which) {
            (LoadSection::None, _) => LoadSection::None,
            (_, LoadVariant::NoLoads) => LoadSection::None,
            (
                LoadSection::Hysteresis {
                    d_up,
                    omega1,
                    unit,
                    ..
                },
                LoadVariant::Switching,
            ) => LoadSection::Switching {
                d_up: *d_up,
                d_down: -d_up,
                omega_up: *omega1,
                omega_down: -omega1,
                unit: *unit,
            },
            (l @ LoadSection::Switching { .. }, LoadVariant::Switching) => l.clone(),
            (
                LoadSection::Switching {
                    d_up,
                    omega_up,
                    unit,
                    ..
                },
                LoadVariant::Hysteresis,
            ) => LoadSection::Hysteresis {
                d_up: *d_up,
                omega1: *omega_up,
                omega0: HYSTERESIS_BAND_RATIO * omega_up,
                unit: *unit,
            },
            (l @ LoadSection::Hysteresis { .. }, LoadVariant::Hysteresis) => l.clone(),
        };
    }
    let any_switching = s
        .buses
        .iter()
        .any(|b| matches!(b.load, LoadSection::Switching { .. }));
    let any_hysteresis = s
        .buses
        .iter()
        .any(|b| matches!(b.load, LoadSection::Hysteresis { .. }));
    s.solver.mode = if any_hysteresis {
        ModeSection::Hybrid
    } else if any_switching {
        ModeSection::Filippov
    } else {
        s.solver.mode
    };
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "minimal"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2
"#;

    #[test]
    fn minimal_scenario_parses_and_builds() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.name, "minimal");
        assert_eq!(s.base_mva, 100.0);
        let built = build(&s).unwrap();
        assert_eq!(built.system.network.n_buses(), 1);
        assert_eq!(built.participation, vec![1.0]);
        assert_eq!(built.config.dt, 1e-3);
    }

    #[test]
    fn unknown_key_is_a_schema_error() {
        let text = format!("{MINIMAL}\nvoltage_dynamics = true\n");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Schema(_))
        ));
    }

    #[test]
    fn malformed_toml_is_a_syntax_error() {
        assert!(matches!(
            parse_scenario("name = \"unterminated"),
            Err(ScenarioError::Syntax(_))
        ));
    }

    #[test]
    fn threshold_ordering_is_rejected() {
        let text = r#"
name = "bad"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2
[bus.load]
kind = "hysteresis"
d_up = 0.25
omega1 = 0.01
omega0 = 0.05
"#;
        let s = parse_scenario(text).unwrap();
        assert!(matches!(build(&s), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn hysteresis_load_requires_hybrid_mode() {
        let text = r#"
name = "bad-mode"

[solver]
mode = "filippov"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2
[bus.load]
kind = "hysteresis"
d_up = 0.25
omega1 = 0.05
omega0 = 0.0075
"#;
        let s = parse_scenario(text).unwrap();
        assert!(matches!(build(&s), Err(ScenarioError::Semantic(_))));
    }

    #[test]
    fn no_integrator_bus_is_semantic_error() {
        let text = r#"
name = "all-damping"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "static_damping"
d = 0.5
"#;
        let s = parse_scenario(text).unwrap();
        assert!(matches!(build(&s), Err(ScenarioError::Semantic(_))));
    }

    #[test]
    fn hz_thresholds_convert() {
        let text = r#"
name = "hz"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2
[bus.load]
kind = "hysteresis"
d_up = 0.25
omega1 = 0.05
omega0 = 0.0075
unit = "hz"
"#;
        let s = parse_scenario(text).unwrap();
        let built = build(&s).unwrap();
        match &built.system.loads[0] {
            LoadPolicy::Hysteretic(l) => {
                approx::assert_relative_eq!(l.omega1, 0.05 * 2.0 * std::f64::consts::PI);
                approx::assert_relative_eq!(l.omega0, 0.0075 * 2.0 * std::f64::consts::PI);
            }
            other => panic!("unexpected load {other:?}"),
        }
    }

    #[test]
    fn round_trip_preserves_semantics() {
        let text = r#"
name = "rt"
base_mva = 50.0

[solver]
dt = 0.002
t_end = 10.0
mode = "hybrid"

[monitor]
band = 0.002

[[bus]]
id = 1
inertia = 2.0
base_load = 0.1
participation = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.5
k_tilde = 0.3
d = 0.5
tau_beta = 0.2

[[bus]]
id = 2
inertia = 1.0
[bus.supply]
kind = "static_damping"
d = 0.5
[bus.load]
kind = "hysteresis"
d_up = 0.25
omega1 = 0.05
omega0 = 0.0075

[[line]]
from = 1
to = 2
susceptance = 5.0

[[disturbance]]
bus = 2
t = 1.0
delta = 0.2
"#;
        let s = parse_scenario(text).unwrap();
        let serialized = serialize_scenario(&s).unwrap();
        let s2 = parse_scenario(&serialized).unwrap();
        assert_eq!(s, s2);
    }

    const WITH_LOAD: &str = r#"
name = "variant-base"

[solver]
mode = "hybrid"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2
[bus.load]
kind = "hysteresis"
d_up = 0.25
omega1 = 0.05
omega0 = 0.0075
"#;

    #[test]
    fn variants_rewrite_loads_and_mode() {
        let base = parse_scenario(WITH_LOAD).unwrap();
        let none = variant(&base, LoadVariant::NoLoads);
        assert!(matches!(none.buses[0].load, LoadSection::None));

        let sw = variant(&base, LoadVariant::Switching);
        assert_eq!(sw.solver.mode, ModeSection::Filippov);
        match &sw.buses[0].load {
            LoadSection::Switching {
                d_up,
                d_down,
                omega_up,
                omega_down,
                ..
            } => {
                assert_eq!(*d_up, 0.25);
                assert_eq!(*d_down, -0.25);
                assert_eq!(*omega_up, 0.05);
                assert_eq!(*omega_down, -0.05);
            }
            other => panic!("unexpected load {other:?}"),
        }

        // switching -> hysteresis applies the 0.15 band ratio
        let hy = variant(&sw, LoadVariant::Hysteresis);
        assert_eq!(hy.solver.mode, ModeSection::Hybrid);
        match &hy.buses[0].load {
            LoadSection::Hysteresis { omega1, omega0, .. } => {
                assert_eq!(*omega1, 0.05);
                approx::assert_relative_eq!(*omega0, 0.0075);
            }
            other => panic!("unexpected load {other:?}"),
        }
        // round-trip back to the same hysteresis parameters builds fine
        build(&hy).unwrap();
    }

    #[test]
    fn governor_supply_parses_with_defaults() {
        let text = r#"
name = "gov"

[[bus]]
id = 1
inertia = 1.0
[bus.supply]
kind = "pi_lag"
k = 1.0
d = 0.5
tau_beta = 0.2

[[bus]]
id = 2
inertia = 1.0
[bus.supply]
kind = "governor"
k = 25.0
d = 1.0

[[line]]
from = 1
to = 2
susceptance = 5.0
"#;
        let s = parse_scenario(text).unwrap();
        let built = build(&s).unwrap();
        // realized to a 3-state model at build time
        assert_eq!(built.system.supplies[1].order(), 3);
        assert!(!built.system.supplies[1].restores_frequency());
    }
}
