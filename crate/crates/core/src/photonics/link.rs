use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Loss and detector parameters of one fiber link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkBudget {
    pub channel_loss_db: f64,
    /// Receiver-side insertion loss not itemized elsewhere; a fit constant.
    pub system_excess_loss_db: f64,
    pub detector_efficiency: f64,
    pub dark_count_rate_per_ns: f64,
    pub gate_window_ns: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            channel_loss_db: 0.0,
            system_excess_loss_db: 0.0,
            detector_efficiency: 0.8,
            dark_count_rate_per_ns: 1e-7,
            gate_window_ns: 1.5,
        }
    }
}

impl LinkBudget {
    /// Lossless, unit-efficiency link without dark counts.
    pub fn ideal() -> Self {
        Self {
            channel_loss_db: 0.0,
            system_excess_loss_db: 0.0,
            detector_efficiency: 1.0,
            dark_count_rate_per_ns: 0.0,
            gate_window_ns: 1.5,
        }
    }

    pub fn with_channel_loss(mut self, db: f64) -> Self {
        self.channel_loss_db = db;
        self
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        let field = |f: &str| format!("{prefix}.{f}");
        if !(self.channel_loss_db >= 0.0) {
            return Err(Error::config(field("channel_loss_db"), "must be ≥ 0"));
        }
        if !(self.system_excess_loss_db >= 0.0) {
            return Err(Error::config(field("system_excess_loss_db"), "must be ≥ 0"));
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return Err(Error::config(field("detector_efficiency"), "must lie in [0, 1]"));
        }
        if !(self.dark_count_rate_per_ns >= 0.0) {
            return Err(Error::config(field("dark_count_rate_per_ns"), "must be ≥ 0"));
        }
        if !(self.gate_window_ns > 0.0) {
            return Err(Error::config(field("gate_window_ns"), "must be positive"));
        }
        Ok(())
    }

    pub fn total_loss_db(&self) -> f64 {
        self.channel_loss_db + self.system_excess_loss_db
    }

    /// Dark-click probability in one gate.
    pub fn dark_click_probability(&self) -> f64 {
        (self.dark_count_rate_per_ns * self.gate_window_ns).min(1.0)
    }

    /// Probability of at least one detected photon from a coherent pulse of
    /// mean photon number `mean` arriving at the link input, scaled by an
    /// extra routing `fraction` (beam-splitter arm, interferometer port).
    pub fn photon_click_probability(&self, mean: f64, fraction: f64) -> f64 {
        let m = mean * fraction * channel_transmission(self) * self.detector_efficiency;
        -(-m).exp_m1()
    }
}

/// `10^(−(channel + excess)/10)`.
pub fn channel_transmission(link: &LinkBudget) -> f64 {
    10f64.powf(-link.total_loss_db() / 10.0)
}

/// Click probability `1 − (1 − p_signal·η)(1 − p_dc)`.
pub fn click_probability(p_signal: f64, link: &LinkBudget) -> f64 {
    let (a, b) = (p_signal * link.detector_efficiency, link.dark_click_probability());
    a + b - a * b
}

/// One gated detection attempt; `p_signal` is the probability a photon
/// reaches the detector.
pub fn detect<R: Rng + ?Sized>(p_signal: f64, link: &LinkBudget, rng: &mut R) -> bool {
    let p = click_probability(p_signal, link);
    p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p)
}
