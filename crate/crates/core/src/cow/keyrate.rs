//! Infinite-key secret key rate.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::photonics::{channel_transmission, LinkBudget};
use crate::qmath::binary_entropy;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkrParams {
    pub config: ProtocolConfig,
    pub link: LinkBudget,
    /// Optical QBER, before dark counts.
    pub qber: f64,
    pub visibility: f64,
}

/// Privacy term of a key-rate bound.
pub trait KeyRateModel: Sync {
    /// Fraction of sifted bits that survive error correction and privacy
    /// amplification at total QBER `q` and monitor visibility `v`.
    fn secret_fraction(&self, q: f64, v: f64, f_ec: f64) -> f64;
}

/// `1 − f·h(Q) − (1 − Q)·h((1 + ε)/2)` with `ε = clamp(2V − 1, 0, 1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CollectiveBound;

impl KeyRateModel for CollectiveBound {
    fn secret_fraction(&self, q: f64, v: f64, f_ec: f64) -> f64 {
        let q = q.clamp(0.0, 0.5);
        let eps = (2.0 * v - 1.0).clamp(0.0, 1.0);
        let h = |x: f64| binary_entropy(x.clamp(0.0, 1.0)).unwrap_or(1.0);
        let leak = (1.0 - q) * h((1.0 + eps) / 2.0);
        (1.0 - f_ec * h(q) - leak).max(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyRate {
    pub bits_per_pulse: f64,
    pub bits_per_s: f64,
    pub sifted_per_pulse: f64,
    pub total_qber: f64,
    pub secret_fraction: f64,
}

pub fn secret_key_rate(params: &SkrParams) -> KeyRate {
    secret_key_rate_with(&CollectiveBound, params)
}

pub fn secret_key_rate_with<M: KeyRateModel + ?Sized>(model: &M, params: &SkrParams) -> KeyRate {
    let cfg = &params.config;
    let link = &params.link;
    let x = cfg.mu * channel_transmission(link) * link.detector_efficiency;
    let p_opt = cfg.bs_data_fraction * -(-x).exp_m1();
    let p_dark = 2.0 * link.dark_click_probability();
    let p_click = p_opt + p_dark;
    // Two pulses per slot.
    let sifted = 0.5 * cfg.p_signal * p_click;
    let q = if p_click > 0.0 {
        (params.qber * p_opt + 0.5 * p_dark) / p_click
    } else {
        0.5
    };
    let r = model.secret_fraction(q, params.visibility, cfg.f_ec);
    let bits_per_pulse = sifted * r;
    KeyRate {
        bits_per_pulse,
        bits_per_s: bits_per_pulse * cfg.timing.pulse_rate_hz,
        sifted_per_pulse: sifted,
        total_qber: q,
        secret_fraction: r,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkrPoint {
    pub attenuation_db: f64,
    pub bits_per_pulse: f64,
    pub bits_per_s: f64,
}

/// Key rate at each channel loss, in input order.
pub fn skr_sweep(base: &SkrParams, attenuation_db: &[f64]) -> Result<Vec<SkrPoint>> {
    if attenuation_db.is_empty() {
        return Err(Error::arg("attenuation range is empty"));
    }
    if let Some(bad) = attenuation_db.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::arg(format!("attenuation {bad} dB must be ≥ 0")));
    }
    Ok(attenuation_db
        .par_iter()
        .map(|&db| {
            let mut p = *base;
            p.link.channel_loss_db = db;
            let r = secret_key_rate(&p);
            SkrPoint {
                attenuation_db: db,
                bits_per_pulse: r.bits_per_pulse,
                bits_per_s: r.bits_per_s,
            }
        })
        .collect())
}

fn rate_at(base: &SkrParams, channel_db: f64, excess_db: f64) -> f64 {
    let mut p = *base;
    p.link.channel_loss_db = channel_db;
    p.link.system_excess_loss_db = excess_db;
    secret_key_rate(&p).bits_per_pulse
}

/// Excess loss (dB) for which the rate at `channel_db` equals `target`
/// bits/pulse.
pub fn calibrate_excess_loss(base: &SkrParams, channel_db: f64, target: f64) -> Result<f64> {
    let at_zero = rate_at(base, channel_db, 0.0);
    if !(target > 0.0) || target > at_zero {
        return Err(Error::arg(format!(
            "target {target:e} bit/pulse is unreachable at {channel_db} dB (max {at_zero:e})"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while rate_at(base, channel_db, hi) > target {
        hi *= 2.0;
        if hi > 400.0 {
            return Err(Error::arg("excess-loss calibration did not bracket the target"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rate_at(base, channel_db, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest channel loss at which the key rate vanishes, if any below
/// `max_db`.
pub fn cutoff_attenuation(base: &SkrParams, max_db: f64) -> Option<f64> {
    let excess = base.link.system_excess_loss_db;
    if rate_at(base, max_db, excess) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, max_db);
    if rate_at(base, lo, excess) <= 0.0 {
        return Some(0.0);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if rate_at(base, mid, excess) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

pub fn write_skr_csv<W: Write>(writer: W, points: &[SkrPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["attenuation_db", "bits_per_pulse", "bits_per_s"])?;
    for p in points {
        w.write_record([
            format!("{}", p.attenuation_db),
            format!("{:.9e}", p.bits_per_pulse),
            format!("{:.9e}", p.bits_per_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}
