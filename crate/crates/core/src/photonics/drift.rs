use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wiener-process drift of an interferometer phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseDriftModel {
    /// rad/√s
    pub sigma: f64,
    pub initial_phase: f64,
}

impl Default for PhaseDriftModel {
    fn default() -> Self {
        Self {
            sigma: 0.05,
            initial_phase: 0.0,
        }
    }
}

impl PhaseDriftModel {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(Error::config(format!("{prefix}.sigma"), "must be ≥ 0"));
        }
        if !self.initial_phase.is_finite() {
            return Err(Error::config(format!("{prefix}.initial_phase"), "must be finite"));
        }
        Ok(())
    }
}

/// Advances `phase` by one Gaussian increment of variance `sigma²·dt`.
pub fn evolve_phase<R: Rng + ?Sized>(drift: &PhaseDriftModel, phase: f64, dt: f64, rng: &mut R) -> f64 {
    debug_assert!(dt >= 0.0);
    if drift.sigma == 0.0 || dt <= 0.0 {
        return phase;
    }
    let z: f64 = StandardNormal.sample(rng);
    phase + drift.sigma * dt.sqrt() * z
}
