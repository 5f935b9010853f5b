use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pulse train geometry. Defaults: 1.5 ns pulses every 5 ns (200 MHz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseTiming {
    pub pulse_width_ns: f64,
    pub pulse_separation_ns: f64,
    pub pulse_rate_hz: f64,
}

impl Default for PulseTiming {
    fn default() -> Self {
        Self {
            pulse_width_ns: 1.5,
            pulse_separation_ns: 5.0,
            pulse_rate_hz: 2.0e8,
        }
    }
}

impl PulseTiming {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.pulse_width_ns > 0.0) {
            return Err(Error::config(format!("{prefix}.pulse_width_ns"), "must be positive"));
        }
        if !(self.pulse_width_ns < self.pulse_separation_ns) {
            return Err(Error::config(
                format!("{prefix}.pulse_width_ns"),
                "must be shorter than pulse_separation_ns",
            ));
        }
        let implied = 1e9 / self.pulse_separation_ns;
        if !((self.pulse_rate_hz - implied).abs() <= 0.01 * implied) {
            return Err(Error::config(
                format!("{prefix}.pulse_rate_hz"),
                format!("must equal 1/pulse_separation within 1% ({implied:.4e} Hz)"),
            ));
        }
        Ok(())
    }

    /// Two-pulse slots per second.
    pub fn slot_rate_hz(&self) -> f64 {
        self.pulse_rate_hz / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_consistent() {
        PulseTiming::default().validate("timing").unwrap();
    }

    #[test]
    fn rejects_inconsistent_rate() {
        let t = PulseTiming {
            pulse_rate_hz: 1.0e8,
            ..Default::default()
        };
        let err = t.validate("timing").unwrap_err().to_string();
        assert!(err.contains("timing.pulse_rate_hz"), "{err}");
        let w = PulseTiming {
            pulse_width_ns: 6.0,
            ..Default::default()
        };
        assert!(w.validate("timing").is_err());
    }
}
