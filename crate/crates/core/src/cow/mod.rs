//! Coherent-one-way QKD: encoding, slot simulation, sifting, monitoring and
//! key rate.

mod config;
mod keyrate;
mod sequence;
mod sift;
mod sim;
mod trial;

pub use config::ProtocolConfig;
pub use keyrate::{
    calibrate_excess_loss, cutoff_attenuation, secret_key_rate, secret_key_rate_with, skr_sweep, write_skr_csv,
    CollectiveBound, KeyRate, KeyRateModel, SkrParams, SkrPoint,
};
pub use sequence::{encode, random_sequence, Slot, SlotKind, SlotSequence};
pub use sift::{decode_and_sift, visibility, SiftStats};
pub use sim::{slot_rates, transmit, SlotRates};
pub use trial::{run_field_trial, write_sift_report, FieldTrialConfig, FieldTrialResult, WindowStats};
