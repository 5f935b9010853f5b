use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cow::ProtocolConfig;
use crate::error::{Error, Result};
use crate::photonics::{ChannelSpec, FeedbackConfig, LinkBudget, PhaseDriftModel};
use crate::tomography::MIN_MC_SAMPLES;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Qst,
    Qpt,
    Cow,
    SkrSweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Qst => "qst",
            Scenario::Qpt => "qpt",
            Scenario::Cow => "cow",
            Scenario::SkrSweep => "skr_sweep",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyConfig {
    pub shots_per_basis: u64,
    /// Use rounded expected counts instead of sampled ones.
    pub exact_counts: bool,
    pub mc_samples: usize,
    /// End-to-end channel seen by the output states.
    pub channel: ChannelSpec,
    /// Preparation and analysis without the fiber, for input-state
    /// process tomography.
    pub back_to_back: ChannelSpec,
    pub mesh_theta: usize,
    pub mesh_phi: usize,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            shots_per_basis: 1_000_000,
            exact_counts: false,
            mc_samples: 1000,
            channel: ChannelSpec::Identity,
            back_to_back: ChannelSpec::Identity,
            mesh_theta: 19,
            mesh_phi: 37,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldTrialSettings {
    pub duration_s: f64,
    /// Drift steps per half feedback window.
    pub substeps: usize,
}

impl Default for FieldTrialSettings {
    fn default() -> Self {
        Self {
            duration_s: 600.0,
            substeps: 4,
        }
    }
}

/// Rate anchor for the excess-loss fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateAnchor {
    pub channel_db: f64,
    pub bits_per_pulse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
    /// Extra points merged into the grid.
    pub include_db: Vec<f64>,
    /// Optical QBER fed to the key-rate model.
    pub qber: f64,
    pub visibility: f64,
    pub calibrate: Option<RateAnchor>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start_db: 0.0,
            stop_db: 60.0,
            step_db: 0.5,
            include_db: Vec::new(),
            qber: 0.002,
            visibility: 0.992,
            calibrate: None,
        }
    }
}

impl SweepConfig {
    /// Sorted, de-duplicated attenuation grid.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize;
        let mut g: Vec<f64> = (0..=n).map(|i| self.start_db + i as f64 * self.step_db).collect();
        g.extend(&self.include_db);
        g.sort_by(f64::total_cmp);
        g.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        g
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(default)]
    pub link: LinkBudget,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub drift: PhaseDriftModel,
    #[serde(default)]
    pub feedback: FeedbackConfig,
    #[serde(default)]
    pub tomography: TomographyConfig,
    #[serde(default)]
    pub field_trial: FieldTrialSettings,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            seed,
            link: LinkBudget::default(),
            protocol: ProtocolConfig::default(),
            drift: PhaseDriftModel::default(),
            feedback: FeedbackConfig::default(),
            tomography: TomographyConfig::default(),
            field_trial: FieldTrialSettings::default(),
            sweep: SweepConfig::default(),
        }
    }

    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    /// SHA-256 of the canonical TOML echo.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml_string()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate("link")?;
        self.protocol.validate("protocol")?;
        self.drift.validate("drift")?;
        self.feedback.validate("feedback")?;
        let t = &self.tomography;
        if t.shots_per_basis == 0 {
            return Err(Error::config("tomography.shots_per_basis", "must be positive"));
        }
        if t.mc_samples < MIN_MC_SAMPLES {
            return Err(Error::config(
                "tomography.mc_samples",
                format!("must be at least {MIN_MC_SAMPLES}"),
            ));
        }
        if t.mesh_theta < 2 || t.mesh_phi < 2 {
            return Err(Error::config("tomography.mesh_theta", "mesh needs at least 2×2 points"));
        }
        t.channel
            .process()
            .map_err(|e| Error::config("tomography.channel", e.to_string()))?;
        t.back_to_back
            .process()
            .map_err(|e| Error::config("tomography.back_to_back", e.to_string()))?;
        let f = &self.field_trial;
        if !(f.duration_s >= self.feedback.period) {
            return Err(Error::config(
                "field_trial.duration_s",
                "must cover at least one feedback period",
            ));
        }
        if f.substeps == 0 {
            return Err(Error::config("field_trial.substeps", "must be positive"));
        }
        let s = &self.sweep;
        if !(s.start_db >= 0.0 && s.stop_db >= s.start_db) {
            return Err(Error::config("sweep.stop_db", "need 0 ≤ start_db ≤ stop_db"));
        }
        if !(s.step_db > 0.0) {
            return Err(Error::config("sweep.step_db", "must be positive"));
        }
        if s.include_db.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::config("sweep.include_db", "entries must be ≥ 0"));
        }
        if !(0.0..=0.5).contains(&s.qber) {
            return Err(Error::config("sweep.qber", "must lie in [0, 0.5]"));
        }
        if !(-1.0..=1.0).contains(&s.visibility) {
            return Err(Error::config("sweep.visibility", "must lie in [-1, 1]"));
        }
        if let Some(a) = s.calibrate {
            if !(a.channel_db >= 0.0 && a.bits_per_pulse > 0.0) {
                return Err(Error::config(
                    "sweep.calibrate",
                    "channel_db must be ≥ 0 and bits_per_pulse positive",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QPT: &str = r#"
scenario = "qpt"
seed = 7

[tomography]
shots_per_basis = 1000

[tomography.channel]
kind = "depolarizing"
process_fidelity = 0.99
"#;

    #[test]
    fn parses_sparse_config() {
        let c = ExperimentConfig::from_toml_str(QPT).unwrap();
        assert_eq!(c.scenario, Scenario::Qpt);
        assert_eq!(c.tomography.shots_per_basis, 1000);
        assert_eq!(c.tomography.mc_samples, 1000);
        assert_eq!(c.protocol.mu, 0.29);
    }

    #[test]
    fn echo_round_trips() {
        let mut c = ExperimentConfig::from_toml_str(QPT).unwrap();
        c.sweep.calibrate = Some(RateAnchor {
            channel_db: 12.95,
            bits_per_pulse: 5.78e-4,
        });
        c.tomography.back_to_back = ChannelSpec::StateFidelities {
            fidelities: [0.99; 6],
        };
        let echo = c.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&echo).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn seed_is_mandatory() {
        let err = ExperimentConfig::from_toml_str("scenario = \"qst\"\n").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = ExperimentConfig::from_toml_str("scenario = \"qst\"\nseed = 1\n[link]\nbogus = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 4"), "{msg}");
        let err = ExperimentConfig::from_toml_str("scenario = \"cow\"\nseed = 1\n[protocol]\np_decoy = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("protocol.p_signal"), "{err}");
        let err = ExperimentConfig::from_toml_str("scenario = \"cow\"\nseed = 1\n[link]\ndetector_efficiency = 2.0\n").unwrap_err();
        assert!(err.to_string().contains("link.detector_efficiency"), "{err}");
    }

    #[test]
    fn sweep_grid_merges_points() {
        let s = SweepConfig {
            start_db: 0.0,
            stop_db: 1.0,
            step_db: 0.5,
            include_db: vec![0.5, 0.75],
            ..Default::default()
        };
        assert_eq!(s.grid(), vec![0.0, 0.5, 0.75, 1.0]);
    }
}
