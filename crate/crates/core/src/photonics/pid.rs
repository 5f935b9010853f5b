use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gains and cadence of the monitor-line phase lock.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackConfig {
    pub enabled: bool,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// s
    pub period: f64,
    /// Target monitor error fraction.
    pub setpoint: f64,
    /// Bound on |∫e dt|.
    pub integral_limit: f64,
    /// Half-window phase dither used to read the sign of the error, rad.
    pub dither: f64,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            kp: 0.3,
            ki: 0.02,
            kd: 0.0,
            period: 0.47,
            setpoint: 0.0,
            integral_limit: 10.0,
            dither: 0.05,
        }
    }
}

impl FeedbackConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let field = |f: &str| format!("{prefix}.{f}");
        if !(self.period > 0.0) {
            return Err(Error::config(field("period"), "must be positive"));
        }
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !v.is_finite() {
                return Err(Error::config(field(name), "must be finite"));
            }
        }
        if !(self.integral_limit >= 0.0) {
            return Err(Error::config(field("integral_limit"), "must be ≥ 0"));
        }
        if !(self.dither >= 0.0 && self.dither < 1.0) {
            return Err(Error::config(field("dither"), "must lie in [0, 1) rad"));
        }
        Ok(())
    }
}

/// Discrete PID memory.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: Option<f64>,
}

/// `kp·e + ki·∫e dt + kd·de/dt`, integral clamped to `±integral_limit`.
/// The derivative term is zero on the first step.
pub fn pid_step(cfg: &FeedbackConfig, state: PidState, error: f64, dt: f64) -> (PidState, f64) {
    debug_assert!(dt > 0.0);
    let lim = cfg.integral_limit;
    let integral = (state.integral + error * dt).clamp(-lim, lim);
    let deriv = state.prev_error.map_or(0.0, |p| (error - p) / dt);
    let out = cfg.kp * error + cfg.ki * integral + cfg.kd * deriv;
    (
        PidState {
            integral,
            prev_error: Some(error),
        },
        out,
    )
}
