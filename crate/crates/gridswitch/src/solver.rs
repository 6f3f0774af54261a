//! Closed-loop integration of the network with discrete load policies.
//!
//! The solver advances the swing dynamics plus supply states with a
//! fixed-step classical Runge-Kutta scheme and splits steps exactly at
//! disturbance times and at localized events. Two discrete semantics are
//! supported:
//!
//! * `Filippov` mode for on-off switching loads. Threshold crossings are
//!   localized by bisection; when the vector fields on both sides of a
//!   threshold surface point toward it, the `EquivalentControl` treatment
//!   holds the frequency on the surface with the unique demand value from
//!   the set-valued relaxation, while the `StrictEvent` treatment always
//!   applies the branch value sampled at the start of each base step, which
//!   reproduces chattering as a rapid event sequence with period ~2 dt.
//! * `Hybrid` mode for hysteretic loads. Discrete jumps are localized to the
//!   threshold crossing, increment the jump counter of the hybrid time
//!   domain, and leave the continuous state untouched.
//!
//! Trajectories are sampled on the base time grid and at every event, and
//! carry enough per-bus information (demand, supply, frequency derivative)
//! for downstream dwell-time, chattering, and energy-monitoring analysis.

use thiserror::Error;

use crate::loads::{
    hysteresis_flow_set, hysteretic_demand, switching_demand, HystereticLoad, SwitchingLoad,
};
use crate::net::{swing_rhs, ContinuousState, NetError, Network};
use crate::supply::{supply_flow, SupplyError, SupplyModel};

/// Controllable-demand policy attached to a bus.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadPolicy {
    None,
    Switching(SwitchingLoad),
    Hysteretic(HystereticLoad),
}

/// Step change of the frequency-independent load at one bus.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    pub t: f64,
    /// internal bus index
    pub bus: usize,
    /// per-unit load added at time t
    pub delta: f64,
}

/// Fully assembled closed-loop system: network, per-bus supply dynamics
/// (already realized to simulatable form), per-bus load policies, and the
/// disturbance schedule.
#[derive(Debug, Clone)]
pub struct System {
    pub network: Network,
    pub supplies: Vec<SupplyModel>,
    pub loads: Vec<LoadPolicy>,
    pub disturbances: Vec<Disturbance>,
}

impl System {
    pub fn supply_orders(&self) -> Vec<usize> {
        self.supplies.iter().map(|s| s.order()).collect()
    }

    /// Effective frequency-independent load vector at time t.
    pub fn effective_load(&self, t: f64) -> Vec<f64> {
        let mut p_l: Vec<f64> = self.network.buses.iter().map(|b| b.base_load).collect();
        for d in &self.disturbances {
            if d.t <= t + 1e-12 {
                p_l[d.bus] += d.delta;
            }
        }
        p_l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Filippov,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlidingTreatment {
    EquivalentControl,
    StrictEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// base integration step (s)
    pub dt: f64,
    /// threshold localization tolerance (rad/s)
    pub event_tol: f64,
    /// horizon (s)
    pub t_end: f64,
    pub mode: Mode,
    pub sliding: SlidingTreatment,
    /// window length for the chattering detector (s)
    pub chatter_window: f64,
    /// switch-count threshold within one window
    pub chatter_count: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            event_tol: 1e-9,
            t_end: 30.0,
            mode: Mode::Hybrid,
            sliding: SlidingTreatment::EquivalentControl,
            chatter_window: 1.0,
            chatter_count: 50,
        }
    }
}

/// Point on a hybrid time domain: flow time, jump count, continuous state,
/// and the per-bus discrete states (0 for buses without hysteretic loads).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub t: f64,
    pub ell: u64,
    pub continuous: ContinuousState,
    pub sigma: Vec<i8>,
}

/// Trajectory sample: state plus the per-bus power bookkeeping needed by the
/// analysis tools. `demand` holds the applied controllable demand, which
/// during sliding is the equivalent-control value from the relaxation
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub ell: u64,
    pub state: ContinuousState,
    pub sigma: Vec<i8>,
    pub demand: Vec<f64>,
    pub supply: Vec<f64>,
    pub omega_dot: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// hysteretic jump engaging a load (sigma 0 -> +-1)
    JumpOn,
    /// hysteretic jump releasing a load (sigma +-1 -> 0)
    JumpOff,
    /// switching-load branch change across a threshold surface
    FilippovCross,
    SlidingEnter,
    SlidingExit,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::JumpOn => "jump-on",
            EventKind::JumpOff => "jump-off",
            EventKind::FilippovCross => "filippov-cross",
            EventKind::SlidingEnter => "sliding-enter",
            EventKind::SlidingExit => "sliding-exit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    /// jump count after the event
    pub ell: u64,
    pub bus: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial discrete state of bus {bus} is not in the flow set")]
    InvalidInitialSigma { bus: usize },
    #[error("state left the numerical validity region at t = {t}")]
    NumericalBlowup { t: f64 },
    #[error("threshold function does not change sign across the step")]
    NoSignChange,
    #[error("event bisection failed to converge")]
    MaxBisectionsExceeded,
    #[error("threshold surface at bus {bus} is not attracting")]
    NotAttracting { bus: usize },
    #[error("event detected inside the step at t = {t}; localize before accepting")]
    StepRejected { t: f64 },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Supply(#[from] SupplyError),
}

/// Which threshold surface a sliding bus is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Surface {
    Upper,
    Lower,
}

/// Result of one vector-field evaluation.
struct FlowEval {
    deriv: ContinuousState,
    demand: Vec<f64>,
    supply: Vec<f64>,
}

/// Localized event candidate inside a step.
#[derive(Debug, Clone, Copy)]
enum Pending {
    /// hysteretic jump at the outer (engage) or inner (release) threshold
    HybridJump { bus: usize, outer: bool },
    /// switching-load threshold crossing
    Crossing { bus: usize, surface: Surface },
}

struct Engine<'a> {
    sys: &'a System,
    cfg: &'a SolverConfig,
    p_l: Vec<f64>,
    sigma: Vec<i8>,
    ell: u64,
    /// demand value of the current branch per switching bus
    branch: Vec<f64>,
    sliding: Vec<Option<Surface>>,
}

impl<'a> Engine<'a> {
    fn eval(&self, st: &ContinuousState) -> Result<FlowEval, SolverError> {
        let n = self.sys.network.n_buses();
        let mut supply = vec![0.0; n];
        let mut xs_dot = Vec::with_capacity(n);
        for j in 0..n {
            let (xd, sj) = supply_flow(&self.sys.supplies[j], &st.x_s[j], st.omega[j])?;
            xs_dot.push(xd);
            supply[j] = sj;
        }
        let mut demand = vec![0.0; n];
        for j in 0..n {
            demand[j] = match &self.sys.loads[j] {
                LoadPolicy::None => 0.0,
                LoadPolicy::Hysteretic(l) => hysteretic_demand(l, self.sigma[j]),
                LoadPolicy::Switching(_) => {
                    if self.sliding[j].is_some() {
                        0.0 // replaced by the equivalent control below
                    } else {
                        self.branch[j]
                    }
                }
            };
        }
        let (eta_dot, mut omega_dot) = swing_rhs(
            &self.sys.network,
            &st.eta,
            &st.omega,
            &self.p_l,
            &supply,
            &demand,
        )?;
        // pinned buses: the equivalent demand absorbs the residual
        // acceleration exactly, holding the frequency on the surface
        for j in 0..n {
            if self.sliding[j].is_some() {
                demand[j] = self.sys.network.buses[j].inertia * omega_dot[j];
                omega_dot[j] = 0.0;
            }
        }
        Ok(FlowEval {
            deriv: ContinuousState {
                eta: eta_dot,
                omega: omega_dot,
                x_s: xs_dot,
            },
            demand,
            supply,
        })
    }

    /// One classical Runge-Kutta step of length h under the frozen discrete
    /// configuration.
    fn rk4(&self, st: &ContinuousState, h: f64) -> Result<ContinuousState, SolverError> {
        let k1 = self.eval(st)?.deriv;
        let mut s2 = st.clone();
        s2.axpy(h / 2.0, &k1);
        let k2 = self.eval(&s2)?.deriv;
        let mut s3 = st.clone();
        s3.axpy(h / 2.0, &k2);
        let k3 = self.eval(&s3)?.deriv;
        let mut s4 = st.clone();
        s4.axpy(h, &k3);
        let k4 = self.eval(&s4)?.deriv;
        let mut out = st.clone();
        out.axpy(h / 6.0, &k1);
        out.axpy(h / 3.0, &k2);
        out.axpy(h / 3.0, &k3);
        out.axpy(h / 6.0, &k4);
        Ok(out)
    }

    /// Threshold function of a pending event, in rad/s.
    fn threshold_value(&self, p: &Pending, st: &ContinuousState) -> f64 {
        match *p {
            Pending::HybridJump { bus, outer } => {
                let l = match &self.sys.loads[bus] {
                    LoadPolicy::Hysteretic(l) => l,
                    _ => unreachable!("hybrid event on non-hysteretic bus"),
                };
                if outer {
                    st.omega[bus].abs() - l.omega1
                } else {
                    st.omega[bus].abs() - l.omega0
                }
            }
            Pending::Crossing { bus, surface } => {
                let l = match &self.sys.loads[bus] {
                    LoadPolicy::Switching(l) => l,
                    _ => unreachable!("crossing event on non-switching bus"),
                };
                match surface {
                    Surface::Upper => st.omega[bus] - l.omega_up,
                    Surface::Lower => st.omega[bus] - l.omega_down,
                }
            }
        }
    }

    /// Event functions armed under the current discrete configuration.
    fn armed_events(&self) -> Vec<Pending> {
        let mut out = Vec::new();
        for (j, load) in self.sys.loads.iter().enumerate() {
            match load {
                LoadPolicy::Hysteretic(_) if self.cfg.mode == Mode::Hybrid => {
                    if self.sigma[j] == 0 {
                        out.push(Pending::HybridJump { bus: j, outer: true });
                    } else {
                        out.push(Pending::HybridJump {
                            bus: j,
                            outer: false,
                        });
                    }
                }
                LoadPolicy::Switching(_)
                    if self.cfg.mode == Mode::Filippov
                        && self.cfg.sliding == SlidingTreatment::EquivalentControl
                        && self.sliding[j].is_none() =>
                {
                    out.push(Pending::Crossing {
                        bus: j,
                        surface: Surface::Upper,
                    });
                    out.push(Pending::Crossing {
                        bus: j,
                        surface: Surface::Lower,
                    });
                }
                _ => {}
            }
        }
        out
    }

    /// Abort when the trajectory leaves the numerical validity region:
    /// stability guarantees are local, so divergence is a reportable outcome.
    fn guard(&self, st: &ContinuousState, t: f64) -> Result<(), SolverError> {
        const ETA_LIMIT: f64 = std::f64::consts::PI - 0.01;
        if st.eta.iter().any(|e| e.abs() > ETA_LIMIT) || st.max_norm() > 1e6 {
            return Err(SolverError::NumericalBlowup { t });
        }
        Ok(())
    }

    fn record(&self, traj: &mut Trajectory, t: f64, st: &ContinuousState) -> Result<(), SolverError> {
        let ev = self.eval(st)?;
        traj.samples.push(Sample {
            t,
            ell: self.ell,
            state: st.clone(),
            sigma: self.sigma.clone(),
            demand: ev.demand,
            supply: ev.supply,
            omega_dot: ev.deriv.omega,
        });
        Ok(())
    }

    /// Advance from t0 to t1 with event localization, recording samples at
    /// every event and at t1.
    fn advance_span(
        &mut self,
        state: &mut ContinuousState,
        t0: f64,
        t1: f64,
        traj: &mut Trajectory,
    ) -> Result<(), SolverError> {
        let mut t_cur = t0;
        loop {
            let h = t1 - t_cur;
            if h <= 1e-15 {
                return Ok(());
            }
            let end = self.rk4(state, h)?;
            match self.first_event(state, &end, h)? {
                Some((theta, ev_state, pendings)) => {
                    let t_e = t_cur + theta * h;
                    *state = ev_state;
                    self.process_events(state, t_e, &pendings, traj)?;
                    self.guard(state, t_e)?;
                    if t_e <= t_cur {
                        // localization collapsed onto the span start; the
                        // discrete update above still changed the armed set,
                        // so retrying the span makes progress
                        continue;
                    }
                    t_cur = t_e;
                }
                None => {
                    *state = end;
                    self.check_sliding_exit(state, t1, traj)?;
                    self.guard(state, t1)?;
                    self.record(traj, t1, state)?;
                    return Ok(());
                }
            }
        }
    }

    /// Scan all armed event functions for sign changes over the step and
    /// localize the earliest; returns the crossing fraction, the state
    /// there, and every event enabled at that point (ascending bus order).
    #[allow(clippy::type_complexity)]
    fn first_event(
        &self,
        start: &ContinuousState,
        end: &ContinuousState,
        h: f64,
    ) -> Result<Option<(f64, ContinuousState, Vec<Pending>)>, SolverError> {
        let armed = self.armed_events();
        let mut best: Option<(f64, ContinuousState, usize)> = None;
        for (k, p) in armed.iter().enumerate() {
            let g0 = self.threshold_value(p, start);
            let g1 = self.threshold_value(p, end);
            // points already within tolerance of the surface are not
            // crossings (prevents refiring just after an event)
            if g0.abs() <= self.cfg.event_tol || g0.signum() == g1.signum() {
                continue;
            }
            let located = locate_event(
                |theta| {
                    if theta == 0.0 {
                        Ok(start.clone())
                    } else {
                        self.rk4(start, theta * h)
                    }
                },
                |st| self.threshold_value(p, st),
                self.cfg.event_tol,
            );
            match located {
                Ok((theta, st)) => {
                    if best.as_ref().map_or(true, |(bt, _, _)| theta < *bt) {
                        best = Some((theta, st, k));
                    }
                }
                Err(SolverError::NoSignChange) => continue,
                Err(e) => return Err(e),
            }
        }
        let (theta, st, _) = match best {
            Some(b) => b,
            None => return Ok(None),
        };
        // gather everything enabled at the localized point for deterministic
        // simultaneous processing
        let mut at_point: Vec<Pending> = armed
            .iter()
            .copied()
            .filter(|p| {
                let g0 = self.threshold_value(p, start);
                g0.abs() > self.cfg.event_tol
                    && self.threshold_value(p, &st).abs() <= self.cfg.event_tol
            })
            .collect();
        at_point.sort_by_key(|p| match *p {
            Pending::HybridJump { bus, .. } | Pending::Crossing { bus, .. } => bus,
        });
        Ok(Some((theta, st, at_point)))
    }

    /// Apply the discrete consequences of localized events: hysteretic
    /// jumps (incrementing the jump counter one bus at a time), sliding
    /// entries, and branch changes.
    fn process_events(
        &mut self,
        state: &mut ContinuousState,
        t: f64,
        pendings: &[Pending],
        traj: &mut Trajectory,
    ) -> Result<(), SolverError> {
        // pre-event sample so jumps show both sides of the hybrid instant
        let any_jump = pendings
            .iter()
            .any(|p| matches!(p, Pending::HybridJump { .. }));
        if any_jump {
            self.record(traj, t, state)?;
        }
        for p in pendings {
            match *p {
                Pending::HybridJump { bus, outer } => {
                    let new_sigma = if outer {
                        if state.omega[bus] > 0.0 {
                            1
                        } else {
                            -1
                        }
                    } else {
                        0
                    };
                    let kind = if new_sigma == 0 {
                        EventKind::JumpOff
                    } else {
                        EventKind::JumpOn
                    };
                    self.sigma[bus] = new_sigma;
                    self.ell += 1;
                    traj.events.push(Event {
                        t,
                        ell: self.ell,
                        bus,
                        kind,
                    });
                }
                Pending::Crossing { bus, surface } => {
                    let l = match &self.sys.loads[bus] {
                        LoadPolicy::Switching(l) => *l,
                        _ => unreachable!(),
                    };
                    // equivalent demand decides between sliding and a clean
                    // branch change: both one-sided fields agree with it
                    let v = self.equivalent_demand_at(state, bus)?;
                    let (slide_lo, slide_hi, surf_omega) = match surface {
                        Surface::Upper => (0.0, l.d_up, l.omega_up),
                        Surface::Lower => (l.d_down, 0.0, l.omega_down),
                    };
                    if slide_lo < v && v < slide_hi {
                        self.sliding[bus] = Some(surface);
                        state.omega[bus] = surf_omega;
                        traj.events.push(Event {
                            t,
                            ell: self.ell,
                            bus,
                            kind: EventKind::SlidingEnter,
                        });
                    } else {
                        // field pushes through: pick the branch it agrees with
                        self.branch[bus] = if v >= slide_hi {
                            match surface {
                                Surface::Upper => l.d_up,
                                Surface::Lower => 0.0,
                            }
                        } else {
                            match surface {
                                Surface::Upper => 0.0,
                                Surface::Lower => l.d_down,
                            }
                        };
                        traj.events.push(Event {
                            t,
                            ell: self.ell,
                            bus,
                            kind: EventKind::FilippovCross,
                        });
                    }
                }
            }
        }
        // post-event sample under the updated discrete configuration
        self.record(traj, t, state)?;
        Ok(())
    }

    /// Demand value that would zero the bus acceleration, with the bus's own
    /// controllable demand removed.
    fn equivalent_demand_at(
        &self,
        state: &ContinuousState,
        bus: usize,
    ) -> Result<f64, SolverError> {
        let saved_branch = self.branch[bus];
        let saved_sliding = self.sliding[bus];
        // evaluate with this bus's demand forced to zero
        let mut probe = Engine {
            sys: self.sys,
            cfg: self.cfg,
            p_l: self.p_l.clone(),
            sigma: self.sigma.clone(),
            ell: self.ell,
            branch: self.branch.clone(),
            sliding: self.sliding.clone(),
        };
        probe.branch[bus] = 0.0;
        probe.sliding[bus] = None;
        let ev = probe.eval(state)?;
        let _ = (saved_branch, saved_sliding);
        Ok(self.sys.network.buses[bus].inertia * ev.deriv.omega[bus])
    }

    /// Leave the surface when the equivalent demand exits the relaxation
    /// interval; checked at sample boundaries.
    fn check_sliding_exit(
        &mut self,
        state: &mut ContinuousState,
        t: f64,
        traj: &mut Trajectory,
    ) -> Result<(), SolverError> {
        for bus in 0..self.sys.network.n_buses() {
            let surface = match self.sliding[bus] {
                Some(s) => s,
                None => continue,
            };
            let l = match &self.sys.loads[bus] {
                LoadPolicy::Switching(l) => *l,
                _ => unreachable!(),
            };
            let v = self.equivalent_demand_at(state, bus)?;
            let (lo, hi) = match surface {
                Surface::Upper => (0.0, l.d_up),
                Surface::Lower => (l.d_down, 0.0),
            };
            if v < lo || v > hi {
                self.sliding[bus] = None;
                self.branch[bus] = if v > hi {
                    match surface {
                        Surface::Upper => l.d_up,
                        Surface::Lower => 0.0,
                    }
                } else {
                    match surface {
                        Surface::Upper => 0.0,
                        Surface::Lower => l.d_down,
                    }
                };
                traj.events.push(Event {
                    t,
                    ell: self.ell,
                    bus,
                    kind: EventKind::SlidingExit,
                });
            }
        }
        Ok(())
    }

    /// Strict-event branch refresh at the start of a base step.
    fn refresh_branches(&mut self, state: &ContinuousState, t: f64, traj: &mut Trajectory) {
        for (j, load) in self.sys.loads.iter().enumerate() {
            if let LoadPolicy::Switching(l) = load {
                let new = switching_demand(l, state.omega[j]);
                if new != self.branch[j] {
                    self.branch[j] = new;
                    traj.events.push(Event {
                        t,
                        ell: self.ell,
                        bus: j,
                        kind: EventKind::FilippovCross,
                    });
                }
            }
        }
    }
}

/// Bisection localization of a threshold crossing along a parametrized
/// flow: `flow_to(theta)` must reproduce the step start at theta = 0 and
/// the step end at theta = 1. Returns the first parameter where the
/// threshold function magnitude falls below `tol` on the crossing.
pub fn locate_event<S>(
    flow_to: impl Fn(f64) -> Result<S, SolverError>,
    threshold: impl Fn(&S) -> f64,
    tol: f64,
) -> Result<(f64, S), SolverError> {
    let s0 = flow_to(0.0)?;
    let s1 = flow_to(1.0)?;
    let g0 = threshold(&s0);
    let g1 = threshold(&s1);
    if g0 == 0.0 || g0.signum() == g1.signum() {
        // includes grazing contact: no sign change, step stands
        return Err(SolverError::NoSignChange);
    }
    if g1.abs() <= tol {
        return Ok((1.0, s1));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut g_lo = g0;
    for _ in 0..128 {
        let mid = 0.5 * (lo + hi);
        let sm = flow_to(mid)?;
        let gm = threshold(&sm);
        if gm.abs() <= tol {
            return Ok((mid, sm));
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    Err(SolverError::MaxBisectionsExceeded)
}

/// One flow step with the discrete configuration frozen from `state`.
/// Returns the candidate next continuous state, or `StepRejected` when an
/// armed threshold function changes sign inside the step (the caller must
/// then localize, e.g. via [`simulate`]'s event loop).
pub fn integrate_flow(
    sys: &System,
    cfg: &SolverConfig,
    state: &HybridState,
    dt: f64,
) -> Result<ContinuousState, SolverError> {
    let eng = Engine {
        sys,
        cfg,
        p_l: sys.effective_load(state.t),
        sigma: state.sigma.clone(),
        ell: state.ell,
        branch: initial_branches(sys, &state.continuous),
        sliding: vec![None; sys.network.n_buses()],
    };
    let end = eng.rk4(&state.continuous, dt)?;
    for p in eng.armed_events() {
        let g0 = eng.threshold_value(&p, &state.continuous);
        let g1 = eng.threshold_value(&p, &end);
        if g0.abs() > cfg.event_tol && g0.signum() != g1.signum() {
            return Err(SolverError::StepRejected { t: state.t });
        }
    }
    Ok(end)
}

/// Equivalent-control demand for a bus pinned on a threshold surface,
/// after verifying that both one-sided vector fields point toward it.
/// The demand context of the other buses is frozen from `state`/`sigma`.
pub fn sliding_demand(
    sys: &System,
    cfg: &SolverConfig,
    state: &HybridState,
    bus: usize,
) -> Result<f64, SolverError> {
    let l = match &sys.loads[bus] {
        LoadPolicy::Switching(l) => *l,
        _ => {
            return Err(SolverError::InvalidConfig(format!(
                "bus {bus} has no switching load"
            )))
        }
    };
    let eng = Engine {
        sys,
        cfg,
        p_l: sys.effective_load(state.t),
        sigma: state.sigma.clone(),
        ell: state.ell,
        branch: initial_branches(sys, &state.continuous),
        sliding: vec![None; sys.network.n_buses()],
    };
    let v = eng.equivalent_demand_at(&state.continuous, bus)?;
    let on_upper = (state.continuous.omega[bus] - l.omega_up).abs() <= cfg.event_tol;
    let (lo, hi) = if on_upper {
        (0.0, l.d_up)
    } else {
        (l.d_down, 0.0)
    };
    if lo < v && v < hi {
        Ok(v)
    } else {
        Err(SolverError::NotAttracting { bus })
    }
}

fn initial_branches(sys: &System, state: &ContinuousState) -> Vec<f64> {
    sys.loads
        .iter()
        .enumerate()
        .map(|(j, l)| match l {
            LoadPolicy::Switching(sw) => switching_demand(sw, state.omega[j]),
            _ => 0.0,
        })
        .collect()
}

fn validate(sys: &System, init: &HybridState, cfg: &SolverConfig) -> Result<(), SolverError> {
    if !(cfg.dt > 0.0) || !(cfg.event_tol > 0.0) || !(cfg.t_end > 0.0) {
        return Err(SolverError::InvalidConfig(format!(
            "dt, event_tol, t_end must be positive, got {}, {}, {}",
            cfg.dt, cfg.event_tol, cfg.t_end
        )));
    }
    let n = sys.network.n_buses();
    if sys.supplies.len() != n || sys.loads.len() != n || init.sigma.len() != n {
        return Err(SolverError::InvalidConfig(format!(
            "per-bus vectors must have length {n}"
        )));
    }
    for (j, load) in sys.loads.iter().enumerate() {
        match (load, cfg.mode) {
            (LoadPolicy::Hysteretic(_), Mode::Filippov) => {
                return Err(SolverError::InvalidConfig(format!(
                    "bus {j} has a hysteretic load; it requires hybrid mode"
                )));
            }
            (LoadPolicy::Switching(_), Mode::Hybrid) => {
                return Err(SolverError::InvalidConfig(format!(
                    "bus {j} has a switching load; it requires filippov mode"
                )));
            }
            _ => {}
        }
    }
    for (j, load) in sys.loads.iter().enumerate() {
        match load {
            LoadPolicy::Hysteretic(l) => {
                if !hysteresis_flow_set(l, init.continuous.omega[j]).contains(&init.sigma[j]) {
                    return Err(SolverError::InvalidInitialSigma { bus: j });
                }
            }
            _ => {
                if init.sigma[j] != 0 {
                    return Err(SolverError::InvalidInitialSigma { bus: j });
                }
            }
        }
    }
    Ok(())
}

/// Integrate the closed loop over [t0, t_end]. The trajectory is sampled on
/// the base step grid, at disturbance instants, and at every localized
/// event; runs are deterministic for a fixed system and configuration.
pub fn simulate(
    sys: &System,
    init: &HybridState,
    cfg: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    validate(sys, init, cfg)?;
    let mut disturbances = sys.disturbances.clone();
    disturbances.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap().then(a.bus.cmp(&b.bus)));

    let mut eng = Engine {
        sys,
        cfg,
        p_l: sys.network.buses.iter().map(|b| b.base_load).collect(),
        sigma: init.sigma.clone(),
        ell: init.ell,
        branch: initial_branches(sys, &init.continuous),
        sliding: vec![None; sys.network.n_buses()],
    };
    let mut state = init.continuous.clone();
    let mut traj = Trajectory {
        samples: Vec::new(),
        events: Vec::new(),
    };

    let t0 = init.t;
    let mut dist_idx = 0;
    // apply disturbances due at or before the start
    while dist_idx < disturbances.len() && disturbances[dist_idx].t <= t0 + 1e-12 {
        let d = &disturbances[dist_idx];
        eng.p_l[d.bus] += d.delta;
        dist_idx += 1;
    }
    eng.guard(&state, t0)?;
    eng.record(&mut traj, t0, &state)?;

    let mut k: u64 = 0; // completed base steps, for drift-free grid times
    let mut t = t0;
    let t_end = t0 + cfg.t_end;
    while t < t_end - 1e-12 {
        if cfg.mode == Mode::Filippov && cfg.sliding == SlidingTreatment::StrictEvent {
            eng.refresh_branches(&state, t, &mut traj);
        }
        let grid_next = t0 + (k + 1) as f64 * cfg.dt;
        let mut t_target = grid_next.min(t_end);
        if dist_idx < disturbances.len() && disturbances[dist_idx].t < t_target - 1e-12 {
            t_target = disturbances[dist_idx].t;
        }
        eng.advance_span(&mut state, t, t_target, &mut traj)?;
        t = t_target;
        if t >= grid_next - 1e-12 {
            k += 1;
        }
        while dist_idx < disturbances.len() && disturbances[dist_idx].t <= t + 1e-12 {
            let d = &disturbances[dist_idx];
            eng.p_l[d.bus] += d.delta;
            dist_idx += 1;
        }
    }
    Ok(traj)
}

/// Per-bus chattering verdict over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatterBus {
    pub bus: usize,
    pub flagged: bool,
    /// number of sliding intervals entered
    pub sliding_intervals: usize,
    /// total discrete switches (branch changes and hysteretic jumps)
    pub switch_count: usize,
    /// maximum switches within any window of the configured length
    pub max_switches_in_window: usize,
}

/// Flags a bus when a sliding interval exists (the relaxation absorbed an
/// infinitely fast switching motion) or when the switch count inside some
/// time window exceeds the threshold (explicit rapid switching).
pub fn chattering_report(traj: &Trajectory, window: f64, count: usize) -> Vec<ChatterBus> {
    let n_buses = traj
        .samples
        .first()
        .map(|s| s.state.omega.len())
        .unwrap_or(0);
    (0..n_buses)
        .map(|bus| {
            let switch_times: Vec<f64> = traj
                .events
                .iter()
                .filter(|e| {
                    e.bus == bus
                        && matches!(
                            e.kind,
                            EventKind::FilippovCross | EventKind::JumpOn | EventKind::JumpOff
                        )
                })
                .map(|e| e.t)
                .collect();
            let sliding_intervals = traj
                .events
                .iter()
                .filter(|e| e.bus == bus && e.kind == EventKind::SlidingEnter)
                .count();
            let mut max_in_window = 0usize;
            let mut lo = 0usize;
            for hi in 0..switch_times.len() {
                while switch_times[hi] - switch_times[lo] > window {
                    lo += 1;
                }
                max_in_window = max_in_window.max(hi - lo + 1);
            }
            ChatterBus {
                bus,
                flagged: sliding_intervals > 0 || max_in_window > count,
                sliding_intervals,
                switch_count: switch_times.len(),
                max_switches_in_window: max_in_window,
            }
        })
        .collect()
}

/// Dwell-time measurement for one bus with at least two hysteretic jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct DwellBus {
    pub bus: usize,
    /// smallest observed gap between consecutive jumps (s)
    pub min_gap: f64,
    /// threshold band divided by the observed peak |omega_dot| (s)
    pub analytic_bound: f64,
    pub switch_count: usize,
}

/// Measured minimum inter-switch time per bus against the analytic bound
/// (threshold separation over peak frequency slew). Buses with fewer than
/// two jumps carry no measurable gap and are omitted.
pub fn min_dwell_time(traj: &Trajectory, sys: &System) -> Vec<DwellBus> {
    let mut out = Vec::new();
    for (bus, load) in sys.loads.iter().enumerate() {
        let l = match load {
            LoadPolicy::Hysteretic(l) => l,
            _ => continue,
        };
        let times: Vec<f64> = traj
            .events
            .iter()
            .filter(|e| e.bus == bus && matches!(e.kind, EventKind::JumpOn | EventKind::JumpOff))
            .map(|e| e.t)
            .collect();
        if times.len() < 2 {
            continue;
        }
        let min_gap = times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let max_slew = traj
            .samples
            .iter()
            .map(|s| s.omega_dot[bus].abs())
            .fold(0.0f64, f64::max);
        out.push(DwellBus {
            bus,
            min_gap,
            analytic_bound: (l.omega1 - l.omega0) / max_slew,
            switch_count: times.len(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_network, Bus, NetworkSpec};
    use approx::assert_relative_eq;

    fn single_bus(
        inertia: f64,
        base_load: f64,
        supply: SupplyModel,
        load: LoadPolicy,
        disturbances: Vec<Disturbance>,
    ) -> System {
        System {
            network: build_network(&NetworkSpec {
                buses: vec![Bus {
                    id: 1,
                    inertia,
                    base_load,
                }],
                lines: vec![],
            })
            .unwrap(),
            supplies: vec![supply],
            loads: vec![load],
            disturbances,
        }
    }

    fn rest_state(sys: &System) -> HybridState {
        HybridState {
            t: 0.0,
            ell: 0,
            continuous: ContinuousState::zeros(&sys.network, &sys.supply_orders()),
            sigma: vec![0; sys.network.n_buses()],
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let sys = single_bus(
            1.0,
            0.0,
            SupplyModel::StaticDamping { d: 0.5 },
            LoadPolicy::None,
            vec![],
        );
        let cfg = SolverConfig {
            t_end: 1.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        assert!(traj.events.is_empty());
        let last = traj.samples.last().unwrap();
        assert_eq!(last.state.omega[0], 0.0);
        assert_eq!(last.ell, 0);
    }

    #[test]
    fn single_bus_matches_exact_linear_solution() {
        // M w' = -p_l - D w with p_l = -0.1: w(t) = (0.1/D)(1 - exp(-D t/M))
        let (d, p) = (0.5, -0.1);
        let sys = single_bus(
            1.0,
            p,
            SupplyModel::StaticDamping { d },
            LoadPolicy::None,
            vec![],
        );
        let cfg = SolverConfig {
            dt: 0.01,
            t_end: 2.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        for s in &traj.samples {
            let exact = (0.1 / d) * (1.0 - (-d * s.t).exp());
            assert_relative_eq!(s.state.omega[0], exact, epsilon = 1e-10);
        }
        // one small step raises omega by ~ 0.1 dt / M
        let first = &traj.samples[1];
        assert_relative_eq!(first.state.omega[0], 0.001, max_relative = 3e-3);
    }

    #[test]
    fn richardson_step_halving_shows_fourth_order() {
        // smooth two-bus transient; terminal error vs a fine reference
        // should drop ~16x when dt halves
        let net = build_network(&NetworkSpec {
            buses: vec![
                Bus {
                    id: 1,
                    inertia: 2.0,
                    base_load: 0.1,
                },
                Bus {
                    id: 2,
                    inertia: 1.0,
                    base_load: -0.1,
                },
            ],
            lines: vec![(1, 2, 5.0)],
        })
        .unwrap();
        let sys = System {
            network: net,
            supplies: vec![
                SupplyModel::StaticDamping { d: 0.5 },
                SupplyModel::StaticDamping { d: 0.5 },
            ],
            loads: vec![LoadPolicy::None, LoadPolicy::None],
            disturbances: vec![],
        };
        let run = |dt: f64| {
            let cfg = SolverConfig {
                dt,
                t_end: 1.0,
                mode: Mode::Filippov,
                ..SolverConfig::default()
            };
            simulate(&sys, &rest_state(&sys), &cfg)
                .unwrap()
                .samples
                .last()
                .unwrap()
                .state
                .clone()
        };
        let reference = run(1.0 / 1024.0);
        let err = |st: &ContinuousState| {
            let mut e: f64 = 0.0;
            for (a, b) in st.omega.iter().zip(&reference.omega) {
                e = e.max((a - b).abs());
            }
            for (a, b) in st.eta.iter().zip(&reference.eta) {
                e = e.max((a - b).abs());
            }
            e
        };
        let e1 = err(&run(1.0 / 16.0));
        let e2 = err(&run(1.0 / 32.0));
        let ratio = e1 / e2;
        assert!(
            (10.0..40.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio} (e1={e1:.3e}, e2={e2:.3e})"
        );
    }

    #[test]
    fn locate_event_linear_crossing() {
        // scalar "state" moving linearly from -1 to +1; crossing at 0.5
        let (theta, s) = locate_event(
            |th| Ok::<f64, SolverError>(-1.0 + 2.0 * th),
            |x| *x,
            1e-9,
        )
        .unwrap();
        assert!((theta - 0.5).abs() < 1e-9);
        assert!(s.abs() <= 1e-9);
    }

    #[test]
    fn locate_event_grazing_is_no_sign_change() {
        // parabola touching zero from below: no sign change at endpoints
        let r = locate_event(
            |th| Ok::<f64, SolverError>(-(th - 0.5).powi(2)),
            |x| *x,
            1e-12,
        );
        assert!(matches!(r, Err(SolverError::NoSignChange)));
    }

    #[test]
    fn hysteretic_jump_on_localized() {
        // power surplus 0.28 with D = 1: omega(t) = 0.28 (1 - e^{-t});
        // engages at omega1 = 0.05, settles at 0.03 inside the dead band
        let load = HystereticLoad {
            d_up: 0.25,
            omega1: 0.05,
            omega0: 0.02,
        };
        let sys = single_bus(
            1.0,
            -0.28,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Hysteretic(load),
            vec![],
        );
        let cfg = SolverConfig {
            t_end: 10.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        assert_eq!(traj.events.len(), 1);
        let ev = &traj.events[0];
        assert_eq!(ev.kind, EventKind::JumpOn);
        assert_eq!(ev.ell, 1);
        // analytic crossing time of the linear first-order response
        let t_expect = -(1.0f64 - 0.05 / 0.28).ln();
        assert_relative_eq!(ev.t, t_expect, epsilon = 1e-6);
        let last = traj.samples.last().unwrap();
        assert_eq!(last.sigma[0], 1);
        assert_eq!(last.ell, 1);
        assert_relative_eq!(last.state.omega[0], 0.03, epsilon = 1e-5);
        // jump leaves the continuous state unchanged: consecutive samples at
        // the event time agree exactly
        let at_event: Vec<&Sample> = traj.samples.iter().filter(|s| s.t == ev.t).collect();
        assert_eq!(at_event.len(), 2);
        assert_eq!(at_event[0].state, at_event[1].state);
        assert_eq!(at_event[0].ell + 1, at_event[1].ell);
        assert_eq!(at_event[0].sigma[0], 0);
        assert_eq!(at_event[1].sigma[0], 1);
    }

    #[test]
    fn hysteresis_cycle_and_dwell_bound() {
        // surplus appears, load engages; surplus removed at t = 5, load
        // releases at the inner threshold on the way back down
        let load = HystereticLoad {
            d_up: 0.25,
            omega1: 0.05,
            omega0: 0.02,
        };
        let sys = single_bus(
            1.0,
            -0.28,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Hysteretic(load),
            vec![Disturbance {
                t: 5.0,
                bus: 0,
                delta: 0.28,
            }],
        );
        let cfg = SolverConfig {
            t_end: 12.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        let kinds: Vec<EventKind> = traj.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::JumpOn, EventKind::JumpOff]);
        assert_eq!(traj.samples.last().unwrap().ell, 2);
        // flow-set membership at every sample (within localization slack)
        for s in &traj.samples {
            let relaxed = HystereticLoad {
                omega1: load.omega1 + 2.0 * cfg.event_tol,
                omega0: (load.omega0 - 2.0 * cfg.event_tol).max(0.0),
                ..load
            };
            assert!(
                hysteresis_flow_set(&relaxed, s.state.omega[0]).contains(&s.sigma[0]),
                "sigma {} outside flow set at omega {}",
                s.sigma[0],
                s.state.omega[0]
            );
        }
        let dwell = min_dwell_time(&traj, &sys);
        assert_eq!(dwell.len(), 1);
        assert_eq!(dwell[0].switch_count, 2);
        assert!(dwell[0].min_gap >= dwell[0].analytic_bound);
        // no chattering flags for the hysteretic run
        let chatter = chattering_report(&traj, cfg.chatter_window, cfg.chatter_count);
        assert!(chatter.iter().all(|c| !c.flagged));
    }

    fn sliding_scenario() -> System {
        // surplus 0.1 with D = 1 pushes omega toward 0.1, across the
        // threshold 0.05 where M wdot|_{d=0} = 0.05 lies in (0, 0.25):
        // attracting surface, sliding with v = 0.05
        single_bus(
            1.0,
            -0.1,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Switching(SwitchingLoad {
                d_up: 0.25,
                d_down: -0.25,
                omega_up: 0.05,
                omega_down: -0.05,
            }),
            vec![Disturbance {
                t: 3.0,
                bus: 0,
                delta: 0.12,
            }],
        )
    }

    #[test]
    fn equivalent_control_slides_then_exits() {
        let sys = sliding_scenario();
        let cfg = SolverConfig {
            t_end: 6.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        let kinds: Vec<EventKind> = traj.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::SlidingEnter, EventKind::SlidingExit]);
        let t_enter = traj.events[0].t;
        let t_exit = traj.events[1].t;
        assert!(t_enter < 1.0 && (t_exit - 3.0).abs() < 2.0 * cfg.dt);
        // while sliding: omega pinned, demand equals the equivalent control
        for s in &traj.samples {
            if s.t > t_enter + cfg.dt && s.t < t_exit - cfg.dt {
                assert_eq!(s.state.omega[0], 0.05);
                assert_relative_eq!(s.demand[0], 0.05, epsilon = 1e-12);
                assert_eq!(s.omega_dot[0], 0.0);
            }
        }
        // after the exit the dead-zone branch decays toward -0.02
        let last = traj.samples.last().unwrap();
        assert!(last.state.omega[0] < 0.0 && last.state.omega[0] > -0.05);
        assert_eq!(last.demand[0], 0.0);
        // chattering detector: sliding interval flags the bus
        let chatter = chattering_report(&traj, cfg.chatter_window, cfg.chatter_count);
        assert!(chatter[0].flagged && chatter[0].sliding_intervals == 1);
    }

    #[test]
    fn strict_event_mode_chatters() {
        let sys = sliding_scenario();
        let cfg = SolverConfig {
            t_end: 3.0,
            mode: Mode::Filippov,
            sliding: SlidingTreatment::StrictEvent,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        let chatter = chattering_report(&traj, cfg.chatter_window, cfg.chatter_count);
        assert!(
            chatter[0].flagged && chatter[0].max_switches_in_window > cfg.chatter_count,
            "expected rapid switching, saw {} in window",
            chatter[0].max_switches_in_window
        );
        // the trajectory hovers near the surface instead of sliding exactly
        let late: Vec<&Sample> = traj.samples.iter().filter(|s| s.t > 2.0).collect();
        for s in &late {
            assert!((s.state.omega[0] - 0.05).abs() < 5e-3);
        }
    }

    #[test]
    fn non_attracting_surface_is_crossed() {
        // surplus 0.4: at the surface M wdot|_0 = 0.35 > d_up, both fields
        // push upward; clean crossing onto the upper branch
        let sys = single_bus(
            1.0,
            -0.4,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Switching(SwitchingLoad {
                d_up: 0.25,
                d_down: -0.25,
                omega_up: 0.05,
                omega_down: -0.05,
            }),
            vec![],
        );
        let cfg = SolverConfig {
            t_end: 8.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        assert_eq!(traj.events.len(), 1);
        assert_eq!(traj.events[0].kind, EventKind::FilippovCross);
        let last = traj.samples.last().unwrap();
        assert_relative_eq!(last.state.omega[0], 0.15, epsilon = 1e-4);
        assert_eq!(last.demand[0], 0.25);
        // the operation-level check agrees: not attracting at the surface
        let mut at_surface = rest_state(&sys);
        at_surface.continuous.omega[0] = 0.05;
        assert!(matches!(
            sliding_demand(&sys, &cfg, &at_surface, 0),
            Err(SolverError::NotAttracting { bus: 0 })
        ));
    }

    #[test]
    fn sliding_demand_value_on_attracting_surface() {
        let sys = sliding_scenario();
        let cfg = SolverConfig {
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let mut at_surface = rest_state(&sys);
        at_surface.continuous.omega[0] = 0.05;
        let v = sliding_demand(&sys, &cfg, &at_surface, 0).unwrap();
        assert_relative_eq!(v, 0.05, epsilon = 1e-12);
    }

    #[test]
    fn integrate_flow_rejects_steps_containing_events() {
        let load = HystereticLoad {
            d_up: 0.25,
            omega1: 0.05,
            omega0: 0.02,
        };
        let sys = single_bus(
            1.0,
            -0.28,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Hysteretic(load),
            vec![],
        );
        let cfg = SolverConfig::default();
        let mut st = rest_state(&sys);
        // small step well inside the dead band: accepted
        assert!(integrate_flow(&sys, &cfg, &st, 1e-3).is_ok());
        // giant step across the engage threshold: rejected
        st.continuous.omega[0] = 0.049;
        assert!(matches!(
            integrate_flow(&sys, &cfg, &st, 1.0),
            Err(SolverError::StepRejected { .. })
        ));
    }

    #[test]
    fn validation_errors() {
        let sys = single_bus(
            1.0,
            0.0,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Hysteretic(HystereticLoad {
                d_up: 0.25,
                omega1: 0.05,
                omega0: 0.02,
            }),
            vec![],
        );
        // hysteretic load rejected in filippov mode
        let cfg = SolverConfig {
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        assert!(matches!(
            simulate(&sys, &rest_state(&sys), &cfg),
            Err(SolverError::InvalidConfig(_))
        ));
        // engaged sigma at rest frequency is outside the flow set
        let cfg = SolverConfig::default();
        let mut bad = rest_state(&sys);
        bad.sigma[0] = 1;
        assert!(matches!(
            simulate(&sys, &bad, &cfg),
            Err(SolverError::InvalidInitialSigma { bus: 0 })
        ));
    }

    #[test]
    fn blowup_guard_trips_on_angle_divergence() {
        // absurd power imbalance on a weak line drives |eta| past the guard
        let net = build_network(&NetworkSpec {
            buses: vec![
                Bus {
                    id: 1,
                    inertia: 1.0,
                    base_load: 5.0,
                },
                Bus {
                    id: 2,
                    inertia: 1.0,
                    base_load: -5.0,
                },
            ],
            lines: vec![(1, 2, 0.5)],
        })
        .unwrap();
        let sys = System {
            network: net,
            supplies: vec![
                SupplyModel::StaticDamping { d: 0.1 },
                SupplyModel::StaticDamping { d: 0.1 },
            ],
            loads: vec![LoadPolicy::None, LoadPolicy::None],
            disturbances: vec![],
        };
        let cfg = SolverConfig {
            t_end: 20.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        assert!(matches!(
            simulate(&sys, &rest_state(&sys), &cfg),
            Err(SolverError::NumericalBlowup { .. })
        ));
    }

    #[test]
    fn deterministic_repeatability() {
        let sys = sliding_scenario();
        let cfg = SolverConfig {
            t_end: 4.0,
            mode: Mode::Filippov,
            ..SolverConfig::default()
        };
        let a = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        let b = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hybrid_time_domain_is_lexicographically_ordered() {
        let load = HystereticLoad {
            d_up: 0.25,
            omega1: 0.05,
            omega0: 0.02,
        };
        let sys = single_bus(
            1.0,
            -0.28,
            SupplyModel::StaticDamping { d: 1.0 },
            LoadPolicy::Hysteretic(load),
            vec![Disturbance {
                t: 5.0,
                bus: 0,
                delta: 0.28,
            }],
        );
        let cfg = SolverConfig {
            t_end: 12.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &rest_state(&sys), &cfg).unwrap();
        for w in traj.samples.windows(2) {
            let a = (&w[0].t, w[0].ell);
            let b = (&w[1].t, w[1].ell);
            assert!(a < b, "samples out of hybrid-time order: {a:?} !< {b:?}");
        }
    }
}
