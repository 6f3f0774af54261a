//! Power network topology and the continuous swing dynamics.
//!
//! The network is a connected graph of buses and susceptance-weighted lines.
//! The continuous state is kept in angle-difference coordinates: one angle
//! difference per line, one frequency deviation per bus, plus the internal
//! states of each bus's supply model. This removes the rotational null
//! direction of absolute phase angles.

use thiserror::Error;

/// A generator/load bus.
#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    /// External bus id as declared in the scenario file.
    pub id: u32,
    /// Inertia constant M_j (per-unit seconds), strictly positive.
    pub inertia: f64,
    /// Frequency-independent base load p^L_j (per-unit).
    pub base_load: f64,
}

/// A lossless transmission line with arbitrary but unique orientation:
/// if (i,j) is present then (j,i) is not.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// Internal index of the sending bus.
    pub from: usize,
    /// Internal index of the receiving bus.
    pub to: usize,
    /// Line susceptance B_ij > 0 (per-unit).
    pub susceptance: f64,
}

/// Validated network: connected graph, positive parameters, unique lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
}

/// Continuous state x = (eta, omega, x_s).
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousState {
    /// Angle difference per line (rad).
    pub eta: Vec<f64>,
    /// Frequency deviation per bus (rad/s).
    pub omega: Vec<f64>,
    /// Internal supply state per bus; dimension set by the bus's supply model.
    pub x_s: Vec<Vec<f64>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("network graph is not connected")]
    DisconnectedGraph,
    #[error("duplicate line between buses {0} and {1}")]
    DuplicateLine(u32, u32),
    #[error("non-positive parameter: {0}")]
    NonPositiveParameter(String),
    #[error("line references unknown bus id {0}")]
    DanglingReference(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Raw network section of a scenario, before validation.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub buses: Vec<Bus>,
    /// Lines referencing external bus ids.
    pub lines: Vec<(u32, u32, f64)>,
}

/// Validates the network section: positive parameters, unique orientation,
/// resolvable bus references, connectivity of the undirected graph.
pub fn build_network(spec: &NetworkSpec) -> Result<Network, NetError> {
    for b in &spec.buses {
        if b.inertia <= 0.0 {
            return Err(NetError::NonPositiveParameter(format!(
                "inertia of bus {} must be > 0, got {}",
                b.id, b.inertia
            )));
        }
    }
    let index_of = |id: u32| spec.buses.iter().position(|b| b.id == id);
    let mut lines = Vec::with_capacity(spec.lines.len());
    for &(from_id, to_id, b) in &spec.lines {
        if b <= 0.0 {
            return Err(NetError::NonPositiveParameter(format!(
                "susceptance of line ({from_id},{to_id}) must be > 0, got {b}"
            )));
        }
        let from = index_of(from_id).ok_or(NetError::DanglingReference(from_id))?;
        let to = index_of(to_id).ok_or(NetError::DanglingReference(to_id))?;
        if from == to {
            return Err(NetError::DuplicateLine(from_id, to_id));
        }
        if lines
            .iter()
            .any(|l: &Line| (l.from == from && l.to == to) || (l.from == to && l.to == from))
        {
            return Err(NetError::DuplicateLine(from_id, to_id));
        }
        lines.push(Line {
            from,
            to,
            susceptance: b,
        });
    }
    let net = Network {
        buses: spec.buses.clone(),
        lines,
    };
    if !net.is_connected() {
        return Err(NetError::DisconnectedGraph);
    }
    Ok(net)
}

impl Network {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Internal index of an external bus id.
    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    fn is_connected(&self) -> bool {
        let n = self.buses.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for l in &self.lines {
                let other = if l.from == j {
                    l.to
                } else if l.to == j {
                    l.from
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Line power flows p_ij = B_ij sin(eta_ij). Total on any input.
pub fn line_flows(network: &Network, eta: &[f64]) -> Vec<f64> {
    network
        .lines
        .iter()
        .zip(eta)
        .map(|(l, &e)| l.susceptance * e.sin())
        .collect()
}

/// Time derivatives of the swing dynamics.
///
/// `s` is the per-bus net supply and `d_c` the per-bus controllable demand.
/// Returns (eta_dot, omega_dot) with
/// eta_dot_ij = omega_i - omega_j and
/// M_j omega_dot_j = -p^L_j + s_j - d^c_j - sum(outgoing flows) + sum(incoming flows).
///
/// `p_l` is the effective frequency-independent load (base load plus any
/// active disturbance steps).
pub fn swing_rhs(
    network: &Network,
    eta: &[f64],
    omega: &[f64],
    p_l: &[f64],
    s: &[f64],
    d_c: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), NetError> {
    let n = network.n_buses();
    let m = network.n_lines();
    if eta.len() != m || omega.len() != n || p_l.len() != n || s.len() != n || d_c.len() != n {
        return Err(NetError::DimensionMismatch(format!(
            "expected {m} line angles and {n} bus entries, got eta={}, omega={}, p_l={}, s={}, d_c={}",
            eta.len(),
            omega.len(),
            p_l.len(),
            s.len(),
            d_c.len()
        )));
    }
    let flows = line_flows(network, eta);
    let mut eta_dot = Vec::with_capacity(m);
    let mut accel = vec![0.0; n];
    for (li, line) in network.lines.iter().enumerate() {
        eta_dot.push(omega[line.from] - omega[line.to]);
        accel[line.from] -= flows[li];
        accel[line.to] += flows[li];
    }
    let mut omega_dot = Vec::with_capacity(n);
    for j in 0..n {
        omega_dot.push((-p_l[j] + s[j] - d_c[j] + accel[j]) / network.buses[j].inertia);
    }
    Ok((eta_dot, omega_dot))
}

impl ContinuousState {
    /// All-zero state shaped for a network with the given supply orders.
    pub fn zeros(network: &Network, supply_orders: &[usize]) -> Self {
        ContinuousState {
            eta: vec![0.0; network.n_lines()],
            omega: vec![0.0; network.n_buses()],
            x_s: supply_orders.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// self += a * other, componentwise over all three blocks.
    pub fn axpy(&mut self, a: f64, other: &ContinuousState) {
        for (x, y) in self.eta.iter_mut().zip(&other.eta) {
            *x += a * y;
        }
        for (x, y) in self.omega.iter_mut().zip(&other.omega) {
            *x += a * y;
        }
        for (xs, ys) in self.x_s.iter_mut().zip(&other.x_s) {
            for (x, y) in xs.iter_mut().zip(ys) {
                *x += a * y;
            }
        }
    }

    /// Max-norm over all components.
    pub fn max_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for &x in self.eta.iter().chain(&self.omega) {
            m = m.max(x.abs());
        }
        for xs in &self.x_s {
            for &x in xs {
                m = m.max(x.abs());
            }
        }
        m
    }
}
