//! Controllable demand policies: discontinuous on-off switching, its
//! Filippov relaxation, and the hysteretic automaton.
//!
//! The switching policy is a staircase in the local frequency deviation; its
//! set-valued relaxation fattens the two discontinuity surfaces into
//! intervals so that sliding solutions exist. The hysteretic policy carries a
//! discrete state sigma in {-1, 0, +1} with an inner (switch-off) and outer
//! (switch-on) threshold, giving a deliberate dead band that rules out
//! chattering at the price of a delayed response.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("({omega}, {sigma}) is not in the jump set")]
    NotInJumpSet { omega: f64, sigma: i8 },
    #[error("invalid load parameter: {0}")]
    InvalidParameter(String),
}

/// On-off demand with independent over- and under-frequency branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingLoad {
    /// demand drawn above the upper threshold, >= 0
    pub d_up: f64,
    /// demand drawn below the lower threshold, <= 0
    pub d_down: f64,
    /// upper frequency threshold, > 0 (rad/s)
    pub omega_up: f64,
    /// lower frequency threshold, < 0 (rad/s)
    pub omega_down: f64,
}

/// Symmetric hysteretic demand; the discrete state lives in `HybridState`,
/// not here, so the load description stays immutable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HystereticLoad {
    /// demand magnitude in either direction, >= 0
    pub d_up: f64,
    /// outer (switch-on) threshold, rad/s
    pub omega1: f64,
    /// inner (switch-off) threshold, rad/s; 0 < omega0 < omega1
    pub omega0: f64,
}

/// Set-valued demand of the relaxed switching policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilippovInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FilippovInterval {
    pub fn singleton(v: f64) -> FilippovInterval {
        FilippovInterval { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }
}

impl SwitchingLoad {
    pub fn validate(&self) -> Result<(), LoadError> {
        if !(self.d_down <= 0.0 && 0.0 <= self.d_up)
            || !self.d_down.is_finite()
            || !self.d_up.is_finite()
        {
            return Err(LoadError::InvalidParameter(format!(
                "demand values must satisfy d_down <= 0 <= d_up, got [{}, {}]",
                self.d_down, self.d_up
            )));
        }
        if !(self.omega_down < 0.0 && 0.0 < self.omega_up) {
            return Err(LoadError::InvalidParameter(format!(
                "thresholds must satisfy omega_down < 0 < omega_up, got [{}, {}]",
                self.omega_down, self.omega_up
            )));
        }
        Ok(())
    }
}

impl HystereticLoad {
    pub fn validate(&self) -> Result<(), LoadError> {
        if !(self.d_up >= 0.0) || !self.d_up.is_finite() {
            return Err(LoadError::InvalidParameter(format!(
                "demand magnitude must be nonnegative, got {}",
                self.d_up
            )));
        }
        if !(self.omega1 > self.omega0 && self.omega0 > 0.0) {
            return Err(LoadError::InvalidParameter(format!(
                "thresholds must satisfy omega1 > omega0 > 0, got omega1 = {}, omega0 = {}",
                self.omega1, self.omega0
            )));
        }
        Ok(())
    }
}

/// Staircase demand: the upper branch is strict (omega exactly at the upper
/// threshold belongs to the dead zone) while the lower branch is inclusive
/// (omega exactly at the lower threshold already draws the negative demand).
/// The asymmetry is immaterial for relaxed solutions; see
/// [`filippov_demand`].
pub fn switching_demand(load: &SwitchingLoad, omega: f64) -> f64 {
    if omega > load.omega_up {
        load.d_up
    } else if omega > load.omega_down {
        0.0
    } else {
        load.d_down
    }
}

/// Set-valued relaxation: intervals on the two threshold surfaces,
/// singletons elsewhere. Threshold equality is exact; the solver only
/// evaluates this at event-localized points.
pub fn filippov_demand(load: &SwitchingLoad, omega: f64) -> FilippovInterval {
    if omega == load.omega_up {
        FilippovInterval {
            lo: 0.0,
            hi: load.d_up,
        }
    } else if omega == load.omega_down {
        FilippovInterval {
            lo: load.d_down,
            hi: 0.0,
        }
    } else {
        FilippovInterval::singleton(switching_demand(load, omega))
    }
}

/// Discrete states compatible with flowing at the given frequency.
pub fn hysteresis_flow_set(load: &HystereticLoad, omega: f64) -> Vec<i8> {
    let mag = omega.abs();
    let sgn = if omega > 0.0 { 1 } else { -1 };
    if mag > load.omega1 {
        vec![sgn]
    } else if mag < load.omega0 {
        vec![0]
    } else {
        vec![0, sgn]
    }
}

/// True when a discrete transition is enabled: switch-on pending at the
/// outer threshold, switch-off pending at the inner one. Only meaningful at
/// solver-localized event points (threshold equality is measure zero).
pub fn hysteresis_jump_set(load: &HystereticLoad, omega: f64, sigma: i8) -> bool {
    let mag = omega.abs();
    let sgn = if omega > 0.0 { 1 } else { -1 };
    (mag == load.omega1 && sigma == 0) || (mag == load.omega0 && sigma == sgn)
}

/// Discrete update: engage toward the frequency sign at the outer threshold,
/// release at the inner one. The continuous state is untouched by jumps.
pub fn hysteresis_jump(load: &HystereticLoad, omega: f64, sigma: i8) -> Result<i8, LoadError> {
    if !hysteresis_jump_set(load, omega, sigma) {
        return Err(LoadError::NotInJumpSet { omega, sigma });
    }
    let mag = omega.abs();
    if mag == load.omega1 {
        Ok(if omega > 0.0 { 1 } else { -1 })
    } else {
        Ok(0)
    }
}

/// Demand drawn by a hysteretic load in discrete state sigma.
pub fn hysteretic_demand(load: &HystereticLoad, sigma: i8) -> f64 {
    load.d_up * f64::from(sigma)
}
