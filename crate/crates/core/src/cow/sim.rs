//! Slot-by-slot transmission through the data and monitor lines.

use num_complex::Complex64;
use rand::Rng;

use super::config::ProtocolConfig;
use super::sequence::SlotSequence;
use crate::error::Result;
use crate::photonics::{
    channel_transmission, delay_line_overlap, exclusive_clicks, DetectionEvent, DetectionRecord, Detector,
    LinkBudget, TimeBin,
};

fn combine(a: f64, dark: f64) -> f64 {
    a + dark - a * dark
}

fn poisson_click(mean: f64) -> f64 {
    -(-mean).exp_m1()
}

/// Per-line mean-photon scale: `t·η` times the beam-splitter share.
fn line_gain(protocol: &ProtocolConfig, link: &LinkBudget, data: bool) -> f64 {
    let share = if data {
        protocol.bs_data_fraction
    } else {
        1.0 - protocol.bs_data_fraction
    };
    share * channel_transmission(link) * link.detector_efficiency
}

/// Simulates the whole sequence with a fixed interferometer mismatch
/// `mismatch` (rad) on the monitor line.
pub fn transmit<R: Rng + ?Sized>(
    seq: &SlotSequence,
    protocol: &ProtocolConfig,
    link: &LinkBudget,
    mismatch: f64,
    rng: &mut R,
) -> Result<DetectionRecord> {
    let mut rec = DetectionRecord::new(seq.len() as u64);
    let dark = link.dark_click_probability();
    let data_gain = line_gain(protocol, link, true);
    let mon_gain = line_gain(protocol, link, false);
    let e = protocol.optical_error;
    let mut prev_late = Complex64::new(0.0, 0.0);
    let hit = |p: f64, rng: &mut R| p > 0.0 && rng.random::<f64>() < p;
    for (k, slot) in seq.slots.iter().enumerate() {
        let k = k as u64;
        let pair = slot.pair;
        // Data line: a photon click goes to the wrong bin with probability e.
        let p_early = poisson_click(pair.mu_early * data_gain);
        let p_late = poisson_click(pair.mu_late * data_gain);
        let mut early = false;
        let mut late = false;
        if hit(p_early, rng) {
            if hit(e, rng) {
                late = true;
            } else {
                early = true;
            }
        }
        if hit(p_late, rng) {
            if hit(e, rng) {
                early = true;
            } else {
                late = true;
            }
        }
        early |= hit(dark, rng);
        late |= hit(dark, rng);
        for (clicked, bin) in [(early, TimeBin::Early), (late, TimeBin::Late)] {
            if clicked {
                rec.push(DetectionEvent {
                    slot: k,
                    detector: Detector::Ds,
                    bin,
                })?;
            }
        }
        // Monitor line: boundary overlap, then intra-slot overlap.
        let a_early = Complex64::from_polar(pair.mu_early.sqrt(), 0.0);
        let a_late = Complex64::from_polar(pair.mu_late.sqrt(), pair.phase);
        for (prev, cur, bin) in [
            (prev_late, a_early, TimeBin::Early),
            (a_early, a_late, TimeBin::Interference),
        ] {
            let (i1, i2) = delay_line_overlap(prev, cur, mismatch);
            for (intensity, detector) in [(i1, Detector::D1), (i2, Detector::D2)] {
                if hit(combine(poisson_click(intensity * mon_gain), dark), rng) {
                    rec.push(DetectionEvent { slot: k, detector, bin })?;
                }
            }
        }
        prev_late = a_late;
    }
    Ok(rec)
}

/// Expected per-slot click rates used by the windowed field-trial model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotRates {
    /// Signal slot yielding a single click in the right bin.
    pub data_correct: f64,
    /// Signal slot yielding a single click in the wrong bin.
    pub data_wrong: f64,
    /// Monitored-position clicks per slot at D1 and D2.
    pub monitor_d1: f64,
    pub monitor_d2: f64,
}

pub fn slot_rates(protocol: &ProtocolConfig, link: &LinkBudget, mismatch: f64) -> SlotRates {
    let dark = link.dark_click_probability();
    let p = poisson_click(protocol.mu * line_gain(protocol, link, true));
    let e = protocol.optical_error;
    let (correct, wrong) = exclusive_clicks(p * (1.0 - e), p * e, dark);
    // Both monitored position types overlap two lit pulses of equal amplitude.
    let mon = protocol.mu * line_gain(protocol, link, false);
    let positions = protocol.p_decoy + protocol.p_boundary_pair();
    let c = mismatch.cos();
    SlotRates {
        data_correct: protocol.p_signal * correct,
        data_wrong: protocol.p_signal * wrong,
        monitor_d1: positions * combine(poisson_click(mon * (1.0 + c) / 2.0), dark),
        monitor_d2: positions * combine(poisson_click(mon * (1.0 - c) / 2.0), dark),
    }
}
