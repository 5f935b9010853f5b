//! Long-duration field trial at window resolution.
//!
//! Per-slot simulation of 10⁸ slots/s is too slow for minutes of link time,
//! so each feedback window is drawn from the per-slot rates of
//! [`slot_rates`](super::sim::slot_rates) with Poisson counts. The window is
//! split into two dither halves; drift advances in `substeps` per half.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use super::sift::visibility;
use super::sim::slot_rates;
use crate::error::{Error, Result};
use crate::photonics::{evolve_phase, pid_step, FeedbackConfig, LinkBudget, PhaseDriftModel, PidState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTrialConfig {
    pub protocol: ProtocolConfig,
    pub link: LinkBudget,
    pub drift: PhaseDriftModel,
    pub feedback: FeedbackConfig,
    pub duration_s: f64,
    pub substeps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub window_start_s: f64,
    pub qber: Option<f64>,
    pub visibility: Option<f64>,
    pub n_sifted: u64,
    pub n_errors: u64,
    pub c_d1: u64,
    pub c_d2: u64,
    /// Interferometer mismatch at the end of the window, rad.
    pub phase_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTrialResult {
    pub windows: Vec<WindowStats>,
    pub mean_qber: f64,
    pub mean_visibility: f64,
    pub min_visibility: f64,
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Runs the trial. Drift draws come from `drift_rng` and detector counts
/// from `count_rng`, so toggling the feedback leaves the drift path intact.
pub fn run_field_trial<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    cfg: &FieldTrialConfig,
    drift_rng: &mut R1,
    count_rng: &mut R2,
) -> Result<FieldTrialResult> {
    let fb = &cfg.feedback;
    if !(cfg.duration_s >= fb.period) {
        return Err(Error::arg("duration must cover at least one feedback window"));
    }
    if cfg.substeps == 0 {
        return Err(Error::arg("substeps must be positive"));
    }
    let n_windows = (cfg.duration_s / fb.period + 1e-9).floor() as usize;
    let slots_per_s = cfg.protocol.timing.slot_rate_hz();
    let dt = fb.period / (2 * cfg.substeps) as f64;
    let slots_per_step = slots_per_s * dt;
    let dither = if fb.enabled { fb.dither } else { 0.0 };

    let mut phase = cfg.drift.initial_phase;
    let mut shifter = 0.0;
    let mut pid = PidState::default();
    let mut windows = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let mut half = [(0u64, 0u64); 2];
        let (mut sifted, mut errors) = (0u64, 0u64);
        for (h, sign) in [1.0, -1.0].into_iter().enumerate() {
            for _ in 0..cfg.substeps {
                phase = evolve_phase(&cfg.drift, phase, dt, drift_rng);
                let r = slot_rates(&cfg.protocol, &cfg.link, phase - shifter - sign * dither);
                let good = poisson(r.data_correct * slots_per_step, count_rng);
                let bad = poisson(r.data_wrong * slots_per_step, count_rng);
                sifted += good + bad;
                errors += bad;
                half[h].0 += poisson(r.monitor_d1 * slots_per_step, count_rng);
                half[h].1 += poisson(r.monitor_d2 * slots_per_step, count_rng);
            }
        }
        if fb.enabled {
            // Error fraction c₂/(c₁ + c₂) in each dither half; their
            // difference reads the sign of the mismatch.
            let frac = |(c1, c2): (u64, u64)| (c1 + c2 > 0).then(|| c2 as f64 / (c1 + c2) as f64);
            if let (Some(ep), Some(em)) = (frac(half[0]), frac(half[1])) {
                let err = (em - ep) / dither.sin().max(1e-6) - fb.setpoint;
                let (s, u) = pid_step(fb, pid, err, fb.period);
                pid = s;
                shifter += u;
            }
        }
        let (c_d1, c_d2) = (half[0].0 + half[1].0, half[0].1 + half[1].1);
        windows.push(WindowStats {
            window_start_s: w as f64 * fb.period,
            qber: (sifted > 0).then(|| errors as f64 / sifted as f64),
            visibility: visibility(c_d1, c_d2),
            n_sifted: sifted,
            n_errors: errors,
            c_d1,
            c_d2,
            phase_error: phase - shifter,
        });
    }
    let mean = |f: fn(&WindowStats) -> Option<f64>| {
        let xs: Vec<f64> = windows.iter().filter_map(f).collect();
        if xs.is_empty() {
            f64::NAN
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let mean_qber = mean(|w| w.qber);
    let mean_visibility = mean(|w| w.visibility);
    let min_visibility = windows
        .iter()
        .filter_map(|w| w.visibility)
        .fold(f64::INFINITY, f64::min);
    Ok(FieldTrialResult {
        windows,
        mean_qber,
        mean_visibility,
        min_visibility,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9e}")).unwrap_or_default()
}

/// `window_start_s,qber,visibility,n_sifted`; undefined values are empty.
pub fn write_sift_report<W: Write>(writer: W, windows: &[WindowStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["window_start_s", "qber", "visibility", "n_sifted"])?;
    for s in windows {
        w.write_record([
            format!("{:.2}", s.window_start_s),
            opt(s.qber),
            opt(s.visibility),
            s.n_sifted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
