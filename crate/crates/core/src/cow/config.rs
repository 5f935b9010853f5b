use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::PulseTiming;

/// Sender and receiver settings of the COW link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    /// Mean photon number of a non-empty pulse.
    pub mu: f64,
    pub p_signal: f64,
    pub p_decoy: f64,
    pub p_empty: f64,
    /// Share of light routed to the data line; the rest goes to the monitor.
    pub bs_data_fraction: f64,
    pub timing: PulseTiming,
    /// Error-correction efficiency.
    pub f_ec: f64,
    /// Probability that a detected data-line photon lands in the wrong bin.
    pub optical_error: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            mu: 0.29,
            p_signal: 0.90,
            p_decoy: 0.07,
            p_empty: 0.03,
            bs_data_fraction: 0.9,
            timing: PulseTiming::default(),
            f_ec: 1.16,
            optical_error: 0.002,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let field = |f: &str| format!("{prefix}.{f}");
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::config(field("mu"), "must be positive"));
        }
        for (name, p) in [
            ("p_signal", self.p_signal),
            ("p_decoy", self.p_decoy),
            ("p_empty", self.p_empty),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(field(name), "must lie in [0, 1]"));
            }
        }
        let sum = self.p_signal + self.p_decoy + self.p_empty;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                field("p_signal"),
                format!("p_signal + p_decoy + p_empty = {sum}, must be 1"),
            ));
        }
        if !(self.bs_data_fraction > 0.0 && self.bs_data_fraction < 1.0) {
            return Err(Error::config(field("bs_data_fraction"), "must lie in (0, 1)"));
        }
        if !(self.f_ec >= 1.0) {
            return Err(Error::config(field("f_ec"), "must be ≥ 1"));
        }
        if !(0.0..=0.5).contains(&self.optical_error) {
            return Err(Error::config(field("optical_error"), "must lie in [0, 0.5]"));
        }
        self.timing.validate(&field("timing"))
    }

    /// Probability that a slot's late pulse and the next slot's early pulse
    /// are both non-empty.
    pub fn p_boundary_pair(&self) -> f64 {
        let edge = self.p_signal / 2.0 + self.p_decoy;
        edge * edge
    }
}
