//! Equilibrium computation, security checks, Lyapunov/dissipation
//! monitoring, and overshoot metrics.
//!
//! Equilibria have zero frequency deviation on every bus and zero
//! controllable demand; the total frequency-independent load is balanced by
//! the integrator (secondary-control) buses according to declared
//! participation weights, and the line angles solve the resulting lossless
//! flow problem. The energy function used for monitoring is the kinetic
//! term plus the path-integral potential of the line flows, optionally
//! augmented with quadratic storage terms for the supply dynamics.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::net::{line_flows, swing_rhs, ContinuousState, NetError, Network};
use crate::solver::{System, Trajectory};
use crate::storage::StorageFunction;
use crate::supply::{supply_flow, SupplyError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no equilibrium found: flow equations unsolvable from every Newton seed")]
    NoEquilibriumFound,
    #[error("no supply model restores frequency: equilibrium would need nonzero frequency")]
    NonzeroFrequencyRequired,
    #[error("invalid participation weights: {0}")]
    BadParticipation(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Supply(#[from] SupplyError),
}

/// Zero-frequency rest point of the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPoint {
    pub eta_star: Vec<f64>,
    /// identically zero; kept explicit for report output
    pub omega_star: Vec<f64>,
    pub x_s_star: Vec<Vec<f64>>,
    pub s_star: Vec<f64>,
    /// per-line equilibrium flows
    pub p_star: Vec<f64>,
    /// max-norm of the closed-loop vector field at the point
    pub residual: f64,
}

impl EquilibriumPoint {
    pub fn state(&self) -> ContinuousState {
        ContinuousState {
            eta: self.eta_star.clone(),
            omega: self.omega_star.clone(),
            x_s: self.x_s_star.clone(),
        }
    }
}

/// Equal split of the secondary-control burden over integrator buses.
pub fn default_participation(sys: &System) -> Vec<f64> {
    let flags: Vec<bool> = sys.supplies.iter().map(|s| s.restores_frequency()).collect();
    let count = flags.iter().filter(|f| **f).count().max(1);
    flags
        .iter()
        .map(|f| if *f { 1.0 / count as f64 } else { 0.0 })
        .collect()
}

/// Solve the rest-point equations with the post-disturbance loads and
/// consistent line angles (zero cycle sums).
pub fn solve_equilibrium(
    sys: &System,
    participation: &[f64],
) -> Result<EquilibriumPoint, AnalysisError> {
    let eta0 = vec![0.0; sys.network.n_lines()];
    solve_equilibrium_anchored(sys, participation, &eta0)
}

/// Like [`solve_equilibrium`], but searches within the affine family
/// `eta = eta0 + E theta` so that the cycle sums of `eta0` (conserved by the
/// flow) are preserved; pass a trajectory's initial angles to obtain the
/// equilibrium its energy function should be anchored to.
pub fn solve_equilibrium_anchored(
    sys: &System,
    participation: &[f64],
    eta0: &[f64],
) -> Result<EquilibriumPoint, AnalysisError> {
    let net = &sys.network;
    let n = net.n_buses();
    let m = net.n_lines();
    if participation.len() != n {
        return Err(AnalysisError::BadParticipation(format!(
            "expected {n} weights, got {}",
            participation.len()
        )));
    }
    let restoring: Vec<bool> = sys.supplies.iter().map(|s| s.restores_frequency()).collect();
    if !restoring.iter().any(|f| *f) {
        return Err(AnalysisError::NonzeroFrequencyRequired);
    }
    let sum: f64 = participation.iter().sum();
    if participation.iter().any(|w| *w < 0.0) || sum <= 0.0 {
        return Err(AnalysisError::BadParticipation(
            "weights must be nonnegative with positive sum".into(),
        ));
    }
    for j in 0..n {
        if participation[j] > 0.0 && !restoring[j] {
            return Err(AnalysisError::BadParticipation(format!(
                "bus index {j} has positive weight but its supply cannot hold power at rest"
            )));
        }
    }

    let p_l = sys.effective_load(f64::INFINITY);
    let total: f64 = p_l.iter().sum();
    let s_star: Vec<f64> = participation.iter().map(|w| w / sum * total).collect();
    // net injection each bus must push into the lines
    let q: Vec<f64> = (0..n).map(|j| s_star[j] - p_l[j]).collect();

    let theta = newton_flow_angles(net, eta0, &q)?;
    let eta_star: Vec<f64> = (0..m)
        .map(|l| eta0[l] + theta[net.lines[l].from] - theta[net.lines[l].to])
        .collect();
    let p_star = line_flows(net, &eta_star);

    let mut x_s_star = Vec::with_capacity(n);
    for j in 0..n {
        x_s_star.push(sys.supplies[j].equilibrium_state(s_star[j])?);
    }

    // independent residual: evaluate the full closed-loop vector field
    let mut s_check = vec![0.0; n];
    let mut residual: f64 = 0.0;
    for j in 0..n {
        let (xd, sj) = supply_flow(&sys.supplies[j], &x_s_star[j], 0.0)?;
        s_check[j] = sj;
        for v in xd {
            residual = residual.max(v.abs());
        }
    }
    let omega_star = vec![0.0; n];
    let (eta_dot, omega_dot) = swing_rhs(
        net,
        &eta_star,
        &omega_star,
        &p_l,
        &s_check,
        &vec![0.0; n],
    )?;
    for v in eta_dot.iter().chain(&omega_dot) {
        residual = residual.max(v.abs());
    }
    if residual > 1e-8 {
        return Err(AnalysisError::NoEquilibriumFound);
    }

    Ok(EquilibriumPoint {
        eta_star,
        omega_star,
        x_s_star,
        s_star,
        p_star,
        residual,
    })
}

/// Newton iteration (with deterministic multi-start) for bus angles theta
/// such that the flows B sin(eta0 + E theta) absorb the injections q.
fn newton_flow_angles(
    net: &Network,
    eta0: &[f64],
    q: &[f64],
) -> Result<Vec<f64>, AnalysisError> {
    let n = net.n_buses();
    if n == 1 {
        return if q[0].abs() <= 1e-10 {
            Ok(vec![0.0])
        } else {
            Err(AnalysisError::NoEquilibriumFound)
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x71ab_3c04);
    let mut seeds: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for _ in 0..6 {
        seeds.push((0..n).map(|_| rng.gen_range(-0.4..0.4)).collect());
    }

    'seed: for seed in seeds {
        let mut theta = seed;
        theta[0] = 0.0; // reference bus
        for _ in 0..60 {
            let eta: Vec<f64> = net
                .lines
                .iter()
                .enumerate()
                .map(|(l, line)| eta0[l] + theta[line.from] - theta[line.to])
                .collect();
            let flows = line_flows(net, &eta);
            let mut r = q.to_vec();
            for (l, line) in net.lines.iter().enumerate() {
                r[line.from] -= flows[l];
                r[line.to] += flows[l];
            }
            let worst = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if worst <= 1e-10 {
                return Ok(theta);
            }
            // reduced weighted-Laplacian Newton step (reference bus pinned)
            let mut lap = DMatrix::zeros(n - 1, n - 1);
            for (l, line) in net.lines.iter().enumerate() {
                let c = line.susceptance * eta[l].cos();
                let (a, b) = (line.from, line.to);
                if a > 0 {
                    lap[(a - 1, a - 1)] += c;
                }
                if b > 0 {
                    lap[(b - 1, b - 1)] += c;
                }
                if a > 0 && b > 0 {
                    lap[(a - 1, b - 1)] -= c;
                    lap[(b - 1, a - 1)] -= c;
                }
            }
            let rhs = DVector::from_iterator(n - 1, r[1..].iter().copied());
            let step = match lap.lu().solve(&rhs) {
                Some(s) => s,
                None => continue 'seed,
            };
            if !step.iter().all(|v| v.is_finite()) {
                continue 'seed;
            }
            for j in 1..n {
                theta[j] += step[j - 1];
            }
        }
    }
    Err(AnalysisError::NoEquilibriumFound)
}

/// Per-line verdict of the strict angle-security condition |eta*| < pi/2.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    /// (line index, equilibrium angle, within limits)
    pub per_line: Vec<(usize, f64, bool)>,
    pub all_ok: bool,
}

pub fn security_check(eq: &EquilibriumPoint) -> SecurityReport {
    let per_line: Vec<(usize, f64, bool)> = eq
        .eta_star
        .iter()
        .enumerate()
        .map(|(l, &e)| (l, e, e.abs() < std::f64::consts::FRAC_PI_2))
        .collect();
    let all_ok = per_line.iter().all(|(_, _, ok)| *ok);
    SecurityReport { per_line, all_ok }
}

/// Energy-function decomposition at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovValue {
    /// kinetic term (1/2) sum M_j omega_j^2
    pub v_f: f64,
    /// line potential relative to the equilibrium angles
    pub v_p: f64,
    /// per-bus storage terms (empty when no storages supplied)
    pub v_s: Vec<f64>,
    pub total: f64,
}

/// Evaluate the energy function. The potential term is the closed form of
/// the path integral of (sin phi - sin eta*) scaled by the susceptance:
/// B [(cos eta* - cos eta) - sin eta* (eta - eta*)].
pub fn lyapunov_value(
    network: &Network,
    state: &ContinuousState,
    eq: &EquilibriumPoint,
    storages: Option<&[StorageFunction]>,
) -> LyapunovValue {
    let v_f = 0.5
        * network
            .buses
            .iter()
            .zip(&state.omega)
            .map(|(b, w)| b.inertia * w * w)
            .sum::<f64>();
    let mut v_p = 0.0;
    for (l, line) in network.lines.iter().enumerate() {
        let (e, e_star) = (state.eta[l], eq.eta_star[l]);
        v_p += line.susceptance * ((e_star.cos() - e.cos()) - e_star.sin() * (e - e_star));
    }
    let v_s: Vec<f64> = match storages {
        Some(st) => st
            .iter()
            .enumerate()
            .map(|(j, s)| s.with_shift(&eq.x_s_star[j]).value(&state.x_s[j]))
            .collect(),
        None => Vec::new(),
    };
    let total = v_f + v_p + v_s.iter().sum::<f64>();
    LyapunovValue {
        v_f,
        v_p,
        v_s,
        total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorMode {
    /// full energy function with storage terms; nonincreasing along flow
    Storage,
    /// kinetic + potential only, bounded by the integrated supply rate
    SupplyRate,
}

impl MonitorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MonitorMode::Storage => "storage",
            MonitorMode::SupplyRate => "supply-rate",
        }
    }
}

/// Dissipation monitoring along a trajectory. Violations are reported, not
/// raised: they indicate either leaving the local validity region or a
/// defective storage matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationReport {
    pub mode: MonitorMode,
    /// worst per-step energy increase along flow beyond what the mode
    /// permits (0 when the bound always held)
    pub max_flow_increase: f64,
    /// worst |energy change| across a jump
    pub max_jump_increase: f64,
    pub flow_violations: usize,
    pub jump_violations: usize,
}

/// Check energy decrease along flow samples and exact invariance across
/// jumps. With storages for every bus the full energy function must be
/// nonincreasing step by step; otherwise the kinetic + potential part is
/// checked against the trapezoidal integral of the passivity supply rate.
pub fn verify_dissipation(
    sys: &System,
    traj: &Trajectory,
    eq: &EquilibriumPoint,
    storages: Option<&[StorageFunction]>,
) -> DissipationReport {
    let mode = if storages.is_some() {
        MonitorMode::Storage
    } else {
        MonitorMode::SupplyRate
    };
    let mut max_flow_increase: f64 = 0.0;
    let mut max_jump_increase: f64 = 0.0;
    let mut flow_violations = 0usize;
    let mut jump_violations = 0usize;

    for w in traj.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let va = lyapunov_value(&sys.network, &a.state, eq, storages).total;
        let vb = lyapunov_value(&sys.network, &b.state, eq, storages).total;
        if b.ell != a.ell {
            // jump instant: the energy depends only on the continuous state,
            // which the jump leaves untouched
            let change = (vb - va).abs();
            max_jump_increase = max_jump_increase.max(change);
            if change != 0.0 {
                jump_violations += 1;
            }
            continue;
        }
        let dt = b.t - a.t;
        if dt <= 0.0 {
            continue;
        }
        let excess = match mode {
            MonitorMode::Storage => {
                let tol = 1e-8 + 1e-6 * dt;
                (vb - va) - tol
            }
            MonitorMode::SupplyRate => {
                let rate = |s: &crate::solver::Sample| -> f64 {
                    (0..sys.network.n_buses())
                        .map(|j| {
                            s.state.omega[j] * (s.supply[j] - eq.s_star[j])
                                - s.state.omega[j] * s.demand[j]
                        })
                        .sum()
                };
                let supplied = 0.5 * dt * (rate(a) + rate(b));
                (vb - va) - supplied - 1e-6 * dt
            }
        };
        if excess > 0.0 {
            flow_violations += 1;
            max_flow_increase = max_flow_increase.max(excess);
        }
    }
    DissipationReport {
        mode,
        max_flow_increase,
        max_jump_increase,
        flow_violations,
        jump_violations,
    }
}

/// Per-bus transient performance summary.
#[derive(Debug, Clone, PartialEq)]
pub struct OvershootBus {
    pub bus: usize,
    pub peak_abs_omega: f64,
    /// first time after which |omega| stays within the band
    pub settling_time: Option<f64>,
    /// last time the bus's controllable demand returned to zero
    pub last_switch_off: Option<f64>,
}

pub fn overshoot_metrics(traj: &Trajectory, band: f64) -> Vec<OvershootBus> {
    let n = traj
        .samples
        .first()
        .map(|s| s.state.omega.len())
        .unwrap_or(0);
    (0..n)
        .map(|bus| {
            let peak = traj
                .samples
                .iter()
                .map(|s| s.state.omega[bus].abs())
                .fold(0.0f64, f64::max);
            // scan backward: settled suffix ends at the first out-of-band point
            let mut settling_time = None;
            for s in traj.samples.iter().rev() {
                if s.state.omega[bus].abs() <= band {
                    settling_time = Some(s.t);
                } else {
                    break;
                }
            }
            if traj
                .samples
                .first()
                .map_or(false, |s| s.state.omega[bus].abs() <= band)
                && settling_time == Some(traj.samples[0].t)
            {
                // never left the band
            }
            let mut last_switch_off = None;
            for w in traj.samples.windows(2) {
                if w[0].demand[bus].abs() > 1e-12 && w[1].demand[bus].abs() <= 1e-12 {
                    last_switch_off = Some(w[1].t);
                }
            }
            OvershootBus {
                bus,
                peak_abs_omega: peak,
                settling_time,
                last_switch_off,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loads::HystereticLoad;
    use crate::net::{build_network, Bus, NetworkSpec};
    use crate::solver::{simulate, Disturbance, HybridState, LoadPolicy, SolverConfig};
    use crate::storage::derive_storage;
    use crate::supply::SupplyModel;
    use approx::assert_relative_eq;

    fn pilag() -> SupplyModel {
        SupplyModel::PiLag {
            k: 1.5,
            k_tilde: 0.3,
            d: 0.5,
            tau_beta: 0.2,
        }
    }

    fn two_bus(p_l: [f64; 2], b: f64, supplies: Vec<SupplyModel>) -> System {
        System {
            network: build_network(&NetworkSpec {
                buses: vec![
                    Bus {
                        id: 1,
                        inertia: 2.0,
                        base_load: p_l[0],
                    },
                    Bus {
                        id: 2,
                        inertia: 1.0,
                        base_load: p_l[1],
                    },
                ],
                lines: vec![(1, 2, b)],
            })
            .unwrap(),
            supplies,
            loads: vec![LoadPolicy::None, LoadPolicy::None],
            disturbances: vec![],
        }
    }

    #[test]
    fn balanced_network_has_trivial_equilibrium() {
        let sys = two_bus(
            [0.0, 0.0],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        let eq = solve_equilibrium(&sys, &default_participation(&sys)).unwrap();
        assert_relative_eq!(eq.eta_star[0], 0.0, epsilon = 1e-12);
        assert!(eq.s_star.iter().all(|s| s.abs() < 1e-12));
        assert!(eq.residual <= 1e-10);
    }

    #[test]
    fn two_bus_transfer_matches_arcsine_oracle() {
        // zero net imbalance: integrator holds 0, the line carries 0.5 from
        // bus 2 to bus 1, so sin(eta) = -0.5/5
        let sys = two_bus(
            [0.5, -0.5],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        let eq = solve_equilibrium(&sys, &default_participation(&sys)).unwrap();
        assert_relative_eq!(eq.eta_star[0], (-0.1f64).asin(), epsilon = 1e-9);
        assert_relative_eq!(eq.p_star[0], -0.5, epsilon = 1e-9);
        assert_relative_eq!(eq.s_star[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nonzero_total_is_absorbed_by_the_integrator() {
        let sys = two_bus(
            [0.2, 0.3],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        let eq = solve_equilibrium(&sys, &default_participation(&sys)).unwrap();
        assert_relative_eq!(eq.s_star[0], 0.5, epsilon = 1e-12);
        // bus 1 exports s* - p_l = 0.3 over the line
        assert_relative_eq!(eq.eta_star[0], (0.3f64 / 5.0).asin(), epsilon = 1e-9);
        // internal states hold the supply value at rest
        assert_relative_eq!(eq.x_s_star[0][0], 0.5);
        assert_relative_eq!(eq.x_s_star[0][1], 0.5);
        assert!(eq.residual <= 1e-10);
    }

    #[test]
    fn equal_split_across_multiple_integrators() {
        let net = build_network(&NetworkSpec {
            buses: vec![
                Bus {
                    id: 1,
                    inertia: 1.0,
                    base_load: 0.1,
                },
                Bus {
                    id: 2,
                    inertia: 1.0,
                    base_load: 0.3,
                },
                Bus {
                    id: 3,
                    inertia: 1.0,
                    base_load: 0.0,
                },
            ],
            lines: vec![(1, 2, 5.0), (2, 3, 5.0)],
        })
        .unwrap();
        let sys = System {
            network: net,
            supplies: vec![
                pilag(),
                SupplyModel::StaticDamping { d: 0.5 },
                pilag(),
            ],
            loads: vec![LoadPolicy::None; 3],
            disturbances: vec![],
        };
        let eq = solve_equilibrium(&sys, &default_participation(&sys)).unwrap();
        assert_relative_eq!(eq.s_star[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(eq.s_star[2], 0.2, epsilon = 1e-12);
        assert_eq!(eq.s_star[1], 0.0);
        assert!(eq.residual <= 1e-10);
    }

    #[test]
    fn weak_line_has_no_equilibrium() {
        // would need sin(eta) = 0.5/0.4 > 1
        let sys = two_bus(
            [0.5, -0.5],
            0.4,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        assert!(matches!(
            solve_equilibrium(&sys, &default_participation(&sys)),
            Err(AnalysisError::NoEquilibriumFound)
        ));
    }

    #[test]
    fn all_damping_supplies_cannot_restore_frequency() {
        let sys = two_bus(
            [0.2, -0.1],
            5.0,
            vec![
                SupplyModel::StaticDamping { d: 0.5 },
                SupplyModel::StaticDamping { d: 0.5 },
            ],
        );
        assert!(matches!(
            solve_equilibrium(&sys, &default_participation(&sys)),
            Err(AnalysisError::NonzeroFrequencyRequired)
        ));
    }

    #[test]
    fn participation_weight_on_damping_bus_rejected() {
        let sys = two_bus(
            [0.2, 0.3],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        assert!(matches!(
            solve_equilibrium(&sys, &[0.5, 0.5]),
            Err(AnalysisError::BadParticipation(_))
        ));
    }

    fn dummy_eq(eta: Vec<f64>) -> EquilibriumPoint {
        let n = 2;
        EquilibriumPoint {
            p_star: vec![0.0; eta.len()],
            eta_star: eta,
            omega_star: vec![0.0; n],
            x_s_star: vec![vec![], vec![]],
            s_star: vec![0.0; n],
            residual: 0.0,
        }
    }

    #[test]
    fn security_is_strict_at_the_right_angle() {
        assert!(security_check(&dummy_eq(vec![0.3])).all_ok);
        assert!(!security_check(&dummy_eq(vec![1.6])).all_ok);
        assert!(!security_check(&dummy_eq(vec![std::f64::consts::FRAC_PI_2])).all_ok);
    }

    #[test]
    fn lyapunov_terms_match_hand_values() {
        let sys = two_bus(
            [0.0, 0.0],
            5.0,
            vec![
                SupplyModel::StaticDamping { d: 0.5 },
                SupplyModel::StaticDamping { d: 0.5 },
            ],
        );
        let eq = EquilibriumPoint {
            eta_star: vec![0.1],
            omega_star: vec![0.0, 0.0],
            x_s_star: vec![vec![], vec![]],
            s_star: vec![0.0, 0.0],
            p_star: vec![5.0 * 0.1f64.sin()],
            residual: 0.0,
        };
        // kinetic term only
        let st = ContinuousState {
            eta: vec![0.1],
            omega: vec![0.1, 0.0],
            x_s: vec![vec![], vec![]],
        };
        let v = lyapunov_value(&sys.network, &st, &eq, None);
        assert_relative_eq!(v.v_f, 0.01, epsilon = 1e-15);
        assert_relative_eq!(v.v_p, 0.0, epsilon = 1e-15);
        // potential term closed form vs quadrature oracle
        let st2 = ContinuousState {
            eta: vec![0.3],
            omega: vec![0.0, 0.0],
            x_s: vec![vec![], vec![]],
        };
        let v2 = lyapunov_value(&sys.network, &st2, &eq, None);
        let quad = {
            // Simpson's rule for 5 * int_{0.1}^{0.3} (sin p - sin 0.1) dp
            let (a, b, n) = (0.1f64, 0.3f64, 2000);
            let f = |p: f64| 5.0 * (p.sin() - 0.1f64.sin());
            let h = (b - a) / n as f64;
            let mut acc = f(a) + f(b);
            for i in 1..n {
                acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        assert_relative_eq!(v2.v_p, quad, epsilon = 1e-9);
        // 5[(cos 0.1 - cos 0.3) - sin(0.1) * 0.2] = 0.098505...
        assert_relative_eq!(v2.v_p, 0.098505, epsilon = 1e-6);
        // zero at the equilibrium itself
        let v3 = lyapunov_value(&sys.network, &eq.state(), &eq, None);
        assert_eq!(v3.total, 0.0);
    }

    /// Two-bus system with a hysteretic load and a step disturbance, tuned
    /// so the post-step frequency excursion engages and releases the load.
    fn monitored_run() -> (System, Trajectory, EquilibriumPoint) {
        let mut sys = two_bus(
            [0.0, 0.0],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        sys.loads[1] = LoadPolicy::Hysteretic(HystereticLoad {
            d_up: 0.25,
            omega1: 0.05,
            omega0: 0.0075,
        });
        sys.disturbances.push(Disturbance {
            t: 1.0,
            bus: 1,
            delta: 0.2,
        });
        let init = HybridState {
            t: 0.0,
            ell: 0,
            continuous: ContinuousState::zeros(&sys.network, &sys.supply_orders()),
            sigma: vec![0, 0],
        };
        let cfg = SolverConfig {
            t_end: 40.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &init, &cfg).unwrap();
        let eq = solve_equilibrium_anchored(
            &sys,
            &default_participation(&sys),
            &traj.samples[0].state.eta,
        )
        .unwrap();
        (sys, traj, eq)
    }

    #[test]
    fn energy_decreases_along_the_monitored_run() {
        let (sys, traj, eq) = monitored_run();
        // frequency is restored by the integrator
        let last = traj.samples.last().unwrap();
        assert!(last.state.omega.iter().all(|w| w.abs() < 1e-3));
        // storage mode: nonincreasing along flow, exactly constant at jumps
        let storages: Vec<_> = sys
            .supplies
            .iter()
            .map(|m| derive_storage(m, 1e-3).unwrap())
            .collect();
        let rep = verify_dissipation(&sys, &traj, &eq, Some(&storages));
        assert_eq!(rep.mode, MonitorMode::Storage);
        assert_eq!(rep.flow_violations, 0, "excess {}", rep.max_flow_increase);
        assert_eq!(rep.max_jump_increase, 0.0);
        // supply-rate fallback holds too
        let rep2 = verify_dissipation(&sys, &traj, &eq, None);
        assert_eq!(rep2.mode, MonitorMode::SupplyRate);
        assert_eq!(rep2.flow_violations, 0, "excess {}", rep2.max_flow_increase);
        assert_eq!(rep2.max_jump_increase, 0.0);
    }

    #[test]
    fn overshoot_metrics_on_the_monitored_run() {
        let (_sys, traj, _eq) = monitored_run();
        let m = overshoot_metrics(&traj, 1e-3);
        assert_eq!(m.len(), 2);
        // the disturbed bus sees the larger excursion
        assert!(m[1].peak_abs_omega > m[0].peak_abs_omega);
        assert!(m[1].peak_abs_omega > 0.05);
        let settle = m[1].settling_time.unwrap();
        assert!(settle > 1.0 && settle < 40.0);
        // the load released before the end of the run
        assert!(m[1].last_switch_off.is_some());
    }

    #[test]
    fn overshoot_metrics_trivial_trajectory() {
        let sys = two_bus(
            [0.0, 0.0],
            5.0,
            vec![pilag(), SupplyModel::StaticDamping { d: 0.5 }],
        );
        let init = HybridState {
            t: 0.0,
            ell: 0,
            continuous: ContinuousState::zeros(&sys.network, &sys.supply_orders()),
            sigma: vec![0, 0],
        };
        let cfg = SolverConfig {
            t_end: 1.0,
            ..SolverConfig::default()
        };
        let traj = simulate(&sys, &init, &cfg).unwrap();
        let m = overshoot_metrics(&traj, 1e-3);
        assert!(m.iter().all(|b| b.peak_abs_omega == 0.0));
        assert!(m.iter().all(|b| b.last_switch_off.is_none()));
        // equilibrium trajectory: dissipation report is all zeros
        let eq = solve_equilibrium(&sys, &default_participation(&sys)).unwrap();
        let rep = verify_dissipation(&sys, &traj, &eq, None);
        assert_eq!(rep.flow_violations + rep.jump_violations, 0);
        assert_eq!(rep.max_flow_increase, 0.0);
        assert_eq!(rep.max_jump_increase, 0.0);
    }
}
