//! Continuous net-supply dynamics and their passivity certification.
//!
//! A supply model maps the (negated) frequency deviation at a bus to the net
//! power supply s_j, aggregating mechanical injection and uncontrollable
//! frequency-dependent demand. All shipped variants are linear; the general
//! state-space variant admits arbitrary order and is used to realize
//! transfer-function models such as the fifth-order turbine governor.

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum SupplyError {
    #[error("dimension mismatch: model order {expected}, state length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("transfer function is improper (numerator degree exceeds denominator degree)")]
    ImproperTransferFunction,
    #[error("degenerate leading denominator coefficient")]
    DegenerateLeadingCoefficient,
    #[error("frequency grid is empty or not strictly increasing and positive")]
    EmptyGrid,
    #[error("operation unsupported for this supply variant: {0}")]
    UnsupportedVariant(&'static str),
    #[error("transfer-function model must be realized to state space before simulation")]
    NotRealized,
    #[error("nonlinear models are not supported by the linear certificate machinery")]
    NonlinearModelUnsupported,
    #[error("storage-function search failed: {0}")]
    StorageSearchFailed(String),
    #[error("non-positive parameter: {0}")]
    NonPositiveParameter(String),
}

/// Linear state-space model driven by the input u = -omega with scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub dff: f64,
}

/// Rational transfer function S(s) as coefficient lists in ascending powers of s.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

/// Per-bus net-supply dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum SupplyModel {
    /// s = -D omega, stateless.
    StaticDamping { d: f64 },
    /// PI control with a first-order lag:
    /// alpha_dot = -K omega, tau_b beta_dot = -beta + alpha - K~ omega,
    /// s = beta - D omega. State layout [alpha, beta].
    PiLag {
        k: f64,
        k_tilde: f64,
        d: f64,
        tau_beta: f64,
    },
    /// Integrator in series with a second-order lag chain:
    /// alpha_dot = -K omega, tau_b beta_dot = -beta + alpha,
    /// tau_g gamma_dot = -gamma + beta, s = gamma - D omega.
    /// State layout [alpha, beta, gamma].
    PiSecondOrder {
        k: f64,
        d: f64,
        tau_beta: f64,
        tau_gamma: f64,
    },
    /// General linear dynamics of arbitrary order.
    StateSpace(LinearStateSpace),
    /// Analysis-only rational model; realize before simulation.
    TransferFunction(TransferFunction),
}

/// Frequency-sweep positive-realness certificate. The certificate is a
/// sampled necessary check, local in the sense of the passivity definition:
/// the validity neighborhoods carry no quantitative radius.
#[derive(Debug, Clone)]
pub struct PassivityCertificate {
    pub epsilon: f64,
    pub freq_grid: Vec<f64>,
    pub min_real_part: f64,
    pub verdict: bool,
    pub validity_note: &'static str,
}

pub const VALIDITY_NOTE: &str =
    "sampled frequency-sweep certificate; local validity neighborhoods unquantified";

/// Parameters of the fifth-order turbine-governor transfer function
/// S(s) = K (1+sT3)(1+sT4) / ((1+sTs)(1+sTc)(1+sT5)) + D.
#[derive(Debug, Clone, PartialEq)]
pub struct GovernorParams {
    pub t_s: f64,
    pub t_3: f64,
    pub t_c: f64,
    pub t_4: f64,
    pub t_5: f64,
    pub k: f64,
    pub d: f64,
}

impl Default for GovernorParams {
    /// Representative synthetic parameter set (not tied to any toolbox data);
    /// chosen so the passivity sweep passes with margin.
    fn default() -> Self {
        GovernorParams {
            t_s: 0.04,
            t_3: 0.25,
            t_c: 0.4,
            t_4: 0.3,
            t_5: 8.0,
            k: 25.0,
            d: 1.0,
        }
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_eval(coeffs: &[f64], s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * s + c;
    }
    acc
}

impl SupplyModel {
    /// Fifth-order turbine-governor model as a rational transfer function.
    pub fn governor(p: &GovernorParams) -> SupplyModel {
        let num_g = poly_mul(&[p.k, p.k * p.t_3], &[1.0, p.t_4]);
        let den = poly_mul(&poly_mul(&[1.0, p.t_s], &[1.0, p.t_c]), &[1.0, p.t_5]);
        let num = poly_add(&num_g, &poly_mul(&den, &[p.d]));
        SupplyModel::TransferFunction(TransferFunction { num, den })
    }

    /// Number of internal states.
    pub fn order(&self) -> usize {
        match self {
            SupplyModel::StaticDamping { .. } => 0,
            SupplyModel::PiLag { .. } => 2,
            SupplyModel::PiSecondOrder { .. } => 3,
            SupplyModel::StateSpace(ss) => ss.a.nrows(),
            SupplyModel::TransferFunction(tf) => {
                tf.den.len().saturating_sub(1)
            }
        }
    }

    /// Whether an equilibrium of the supply dynamics forces omega = 0
    /// (integral action): the model participates in secondary control.
    pub fn restores_frequency(&self) -> bool {
        match self {
            SupplyModel::StaticDamping { .. } => false,
            SupplyModel::PiLag { .. } | SupplyModel::PiSecondOrder { .. } => true,
            SupplyModel::StateSpace(ss) => state_space_restores(ss),
            SupplyModel::TransferFunction(tf) => {
                // pole at the origin
                tf.den.first().map(|&a0| a0.abs() < 1e-12).unwrap_or(false)
            }
        }
    }

    /// Parameter sanity per variant: gains and time constants strictly
    /// positive where required.
    pub fn validate(&self) -> Result<(), SupplyError> {
        let bad = |what: &str, v: f64| SupplyError::NonPositiveParameter(format!("{what} = {v}"));
        match self {
            SupplyModel::StaticDamping { d } => {
                if *d <= 0.0 {
                    return Err(bad("damping d", *d));
                }
            }
            SupplyModel::PiLag {
                k,
                k_tilde,
                d,
                tau_beta,
            } => {
                if *k <= 0.0 {
                    return Err(bad("gain k", *k));
                }
                if *k_tilde < 0.0 {
                    return Err(bad("gain k_tilde", *k_tilde));
                }
                if *d <= 0.0 {
                    return Err(bad("damping d", *d));
                }
                if *tau_beta <= 0.0 {
                    return Err(bad("time constant tau_beta", *tau_beta));
                }
            }
            SupplyModel::PiSecondOrder {
                k,
                d,
                tau_beta,
                tau_gamma,
            } => {
                if *k <= 0.0 {
                    return Err(bad("gain k", *k));
                }
                if *d <= 0.0 {
                    return Err(bad("damping d", *d));
                }
                if *tau_beta <= 0.0 {
                    return Err(bad("time constant tau_beta", *tau_beta));
                }
                if *tau_gamma <= 0.0 {
                    return Err(bad("time constant tau_gamma", *tau_gamma));
                }
            }
            SupplyModel::StateSpace(ss) => {
                let n = ss.a.nrows();
                if ss.a.ncols() != n || ss.b.len() != n || ss.c.len() != n {
                    return Err(SupplyError::DimensionMismatch {
                        expected: n,
                        got: ss.b.len().max(ss.c.len()).max(ss.a.ncols()),
                    });
                }
            }
            SupplyModel::TransferFunction(tf) => {
                realize_transfer_function(tf)?;
            }
        }
        Ok(())
    }

    /// Convert to a simulatable model: transfer functions are realized to
    /// state space, everything else passes through.
    pub fn realized(&self) -> Result<SupplyModel, SupplyError> {
        match self {
            SupplyModel::TransferFunction(tf) => {
                Ok(SupplyModel::StateSpace(realize_transfer_function(tf)?))
            }
            other => Ok(other.clone()),
        }
    }

    /// State-space form (A, B, C, Dff) with input u = -omega, for the
    /// certificate machinery.
    pub fn to_state_space(&self) -> Result<LinearStateSpace, SupplyError> {
        match self {
            SupplyModel::StaticDamping { d } => Ok(LinearStateSpace {
                a: DMatrix::zeros(0, 0),
                b: DVector::zeros(0),
                c: DVector::zeros(0),
                dff: *d,
            }),
            SupplyModel::PiLag {
                k,
                k_tilde,
                d,
                tau_beta,
            } => Ok(LinearStateSpace {
                a: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0 / tau_beta, -1.0 / tau_beta]),
                b: DVector::from_vec(vec![*k, k_tilde / tau_beta]),
                c: DVector::from_vec(vec![0.0, 1.0]),
                dff: *d,
            }),
            SupplyModel::PiSecondOrder {
                k,
                d,
                tau_beta,
                tau_gamma,
            } => Ok(LinearStateSpace {
                a: DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        0.0,
                        0.0,
                        0.0,
                        1.0 / tau_beta,
                        -1.0 / tau_beta,
                        0.0,
                        0.0,
                        1.0 / tau_gamma,
                        -1.0 / tau_gamma,
                    ],
                ),
                b: DVector::from_vec(vec![*k, 0.0, 0.0]),
                c: DVector::from_vec(vec![0.0, 0.0, 1.0]),
                dff: *d,
            }),
            SupplyModel::StateSpace(ss) => Ok(ss.clone()),
            SupplyModel::TransferFunction(tf) => realize_transfer_function(tf),
        }
    }

    /// Internal equilibrium state consistent with omega = 0 and the given
    /// equilibrium supply value.
    pub fn equilibrium_state(&self, s_star: f64) -> Result<Vec<f64>, SupplyError> {
        match self {
            SupplyModel::StaticDamping { .. } => {
                if s_star.abs() > 1e-9 {
                    return Err(SupplyError::UnsupportedVariant(
                        "static damping cannot supply nonzero power at omega = 0",
                    ));
                }
                Ok(vec![])
            }
            SupplyModel::PiLag { .. } => Ok(vec![s_star, s_star]),
            SupplyModel::PiSecondOrder { .. } => Ok(vec![s_star, s_star, s_star]),
            SupplyModel::StateSpace(ss) => {
                if state_space_restores(ss) {
                    let xi = kernel_vector(&ss.a)
                        .ok_or(SupplyError::UnsupportedVariant("kernel extraction failed"))?;
                    let c_xi = ss.c.dot(&xi);
                    if c_xi.abs() < 1e-12 {
                        return Err(SupplyError::UnsupportedVariant(
                            "integrator state unobservable at output",
                        ));
                    }
                    Ok((xi * (s_star / c_xi)).iter().copied().collect())
                } else {
                    if s_star.abs() > 1e-9 {
                        return Err(SupplyError::UnsupportedVariant(
                            "non-integrator supply cannot hold nonzero power at omega = 0",
                        ));
                    }
                    Ok(vec![0.0; ss.a.nrows()])
                }
            }
            SupplyModel::TransferFunction(_) => Err(SupplyError::NotRealized),
        }
    }

    /// Frequency response S(jw) from u = -omega to s.
    pub fn freq_response(&self, w: f64) -> Complex64 {
        let jw = Complex64::new(0.0, w);
        match self {
            SupplyModel::StaticDamping { d } => Complex64::new(*d, 0.0),
            SupplyModel::PiLag {
                k,
                k_tilde,
                d,
                tau_beta,
            } => (Complex64::new(*k, 0.0) / jw + k_tilde) / (jw * *tau_beta + 1.0) + d,
            SupplyModel::PiSecondOrder {
                k,
                d,
                tau_beta,
                tau_gamma,
            } => {
                Complex64::new(*k, 0.0) / (jw * (jw * *tau_beta + 1.0) * (jw * *tau_gamma + 1.0))
                    + d
            }
            SupplyModel::StateSpace(ss) => {
                let n = ss.a.nrows();
                if n == 0 {
                    return Complex64::new(ss.dff, 0.0);
                }
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = Complex64::new(-ss.a[(i, j)], 0.0);
                    }
                    m[(i, i)] += jw;
                }
                let b = DVector::from_iterator(n, ss.b.iter().map(|&v| Complex64::new(v, 0.0)));
                let lu = m.lu();
                match lu.solve(&b) {
                    Some(x) => {
                        let mut acc = Complex64::new(ss.dff, 0.0);
                        for i in 0..n {
                            acc += Complex64::new(ss.c[i], 0.0) * x[i];
                        }
                        acc
                    }
                    None => Complex64::new(f64::INFINITY, 0.0),
                }
            }
            SupplyModel::TransferFunction(tf) => poly_eval(&tf.num, jw) / poly_eval(&tf.den, jw),
        }
    }
}

fn state_space_restores(ss: &LinearStateSpace) -> bool {
    if ss.a.nrows() == 0 {
        return false;
    }
    match kernel_vector(&ss.a) {
        // the kernel direction must be blocked by the input: A x + B u = 0
        // then forces u = 0 when the left kernel couples to B
        Some(_) => {
            let svd = ss.a.clone().svd(true, false);
            let u = svd.u.as_ref().unwrap();
            let tol = 1e-10 * svd.singular_values.max().max(1.0);
            for (i, sv) in svd.singular_values.iter().enumerate() {
                if *sv < tol {
                    let left = u.column(i);
                    if left.dot(&ss.b).abs() > 1e-10 {
                        return true;
                    }
                }
            }
            false
        }
        None => false,
    }
}

/// Right kernel vector of a (near-)singular matrix, if any.
pub(crate) fn kernel_vector(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    if n == 0 {
        return None;
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.as_ref()?;
    let tol = 1e-10 * svd.singular_values.max().max(1.0);
    let mut smallest = (0usize, f64::INFINITY);
    for (i, sv) in svd.singular_values.iter().enumerate() {
        if *sv < smallest.1 {
            smallest = (i, *sv);
        }
    }
    if smallest.1 < tol {
        Some(vt.row(smallest.0).transpose())
    } else {
        None
    }
}

/// Evaluates the supply dynamics: returns (x_s_dot, s) for the given
/// frequency deviation.
pub fn supply_flow(
    model: &SupplyModel,
    x_s: &[f64],
    omega: f64,
) -> Result<(Vec<f64>, f64), SupplyError> {
    let expected = model.order();
    if x_s.len() != expected {
        return Err(SupplyError::DimensionMismatch {
            expected,
            got: x_s.len(),
        });
    }
    match model {
        SupplyModel::StaticDamping { d } => Ok((vec![], -d * omega)),
        SupplyModel::PiLag {
            k,
            k_tilde,
            d,
            tau_beta,
        } => {
            let (alpha, beta) = (x_s[0], x_s[1]);
            let alpha_dot = -k * omega;
            let beta_dot = (-beta + alpha - k_tilde * omega) / tau_beta;
            Ok((vec![alpha_dot, beta_dot], beta - d * omega))
        }
        SupplyModel::PiSecondOrder {
            k,
            d,
            tau_beta,
            tau_gamma,
        } => {
            let (alpha, beta, gamma) = (x_s[0], x_s[1], x_s[2]);
            let alpha_dot = -k * omega;
            let beta_dot = (-beta + alpha) / tau_beta;
            let gamma_dot = (-gamma + beta) / tau_gamma;
            Ok((vec![alpha_dot, beta_dot, gamma_dot], gamma - d * omega))
        }
        SupplyModel::StateSpace(ss) => {
            let u = -omega;
            let n = ss.a.nrows();
            let mut xdot = vec![0.0; n];
            let mut y = ss.dff * u;
            for i in 0..n {
                let mut acc = ss.b[i] * u;
                for j in 0..n {
                    acc += ss.a[(i, j)] * x_s[j];
                }
                xdot[i] = acc;
                y += ss.c[i] * x_s[i];
            }
            Ok((xdot, y))
        }
        SupplyModel::TransferFunction(_) => Err(SupplyError::NotRealized),
    }
}

/// Controllable-canonical realization of a proper rational transfer function.
/// No automatic pole-zero cancellation is performed.
pub fn realize_transfer_function(tf: &TransferFunction) -> Result<LinearStateSpace, SupplyError> {
    let trim = |v: &[f64]| {
        let mut end = v.len();
        while end > 1 && v[end - 1].abs() < 1e-300 {
            end -= 1;
        }
        v[..end].to_vec()
    };
    let num = trim(&tf.num);
    let den = trim(&tf.den);
    let n = den.len() - 1;
    let lead = den[n];
    if lead.abs() < 1e-12 || den.iter().all(|c| c.abs() < 1e-300) {
        return Err(SupplyError::DegenerateLeadingCoefficient);
    }
    if num.len() > den.len() {
        return Err(SupplyError::ImproperTransferFunction);
    }
    let a_norm: Vec<f64> = den[..n].iter().map(|c| c / lead).collect();
    let mut b_norm = vec![0.0; n + 1];
    for (i, &c) in num.iter().enumerate() {
        b_norm[i] = c / lead;
    }
    let dff = b_norm[n];
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = -a_norm[j];
    }
    let mut b = DVector::zeros(n);
    if n > 0 {
        b[n - 1] = 1.0;
    }
    let c = DVector::from_iterator(n, (0..n).map(|i| b_norm[i] - dff * a_norm[i]));
    Ok(LinearStateSpace { a, b, c, dff })
}

/// Default log-spaced sweep grid: 10^4 points over [1e-3, 1e3] rad/s.
pub fn default_freq_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 10_000)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Sampled positive-realness check: verdict pass iff
/// min over the grid of Re S(jw) is at least epsilon.
pub fn check_passivity(
    model: &SupplyModel,
    epsilon: f64,
    freq_grid: &[f64],
) -> Result<PassivityCertificate, SupplyError> {
    if freq_grid.is_empty()
        || freq_grid.windows(2).any(|w| w[1] <= w[0])
        || freq_grid[0] <= 0.0
    {
        return Err(SupplyError::EmptyGrid);
    }
    let mut min_re = f64::INFINITY;
    for &w in freq_grid {
        let re = model.freq_response(w).re;
        if re.is_finite() && re < min_re {
            min_re = re;
        }
    }
    Ok(PassivityCertificate {
        epsilon,
        freq_grid: freq_grid.to_vec(),
        min_real_part: min_re,
        verdict: min_re >= epsilon,
        validity_note: VALIDITY_NOTE,
    })
}

/// Closed-form passivity gain condition for the structured variants:
/// K tau_b < D + K~ for the PI-lag model and K (tau_b + tau_g) < D for
/// the second-order chain.
pub fn gain_condition(model: &SupplyModel) -> Result<bool, SupplyError> {
    match model {
        SupplyModel::PiLag {
            k,
            k_tilde,
            d,
            tau_beta,
        } => Ok(k * tau_beta < d + k_tilde),
        SupplyModel::PiSecondOrder {
            k,
            d,
            tau_beta,
            tau_gamma,
        } => Ok(k * (tau_beta + tau_gamma) < *d),
        _ => Err(SupplyError::UnsupportedVariant(
            "gain condition defined only for PiLag and PiSecondOrder",
        )),
    }
}
