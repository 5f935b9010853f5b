//! Optical chain: pulse timing, fiber loss, gated detectors, the delay-line
//! interferometer, phase drift and the PID lock.

mod detection;
mod drift;
mod fmi;
mod link;
mod measure;
mod pid;
mod timing;

pub use detection::{DetectionEvent, DetectionRecord, Detector, TimeBin};
pub use drift::{evolve_phase, PhaseDriftModel};
pub use fmi::{delay_line_overlap, fmi_measure, fmi_qubit_central, FmiBasis, FmiOutput, PulsePair, TimingBins};
pub use link::{channel_transmission, click_probability, detect, LinkBudget};
pub use measure::{expected_in_basis, measure_in_basis, ChannelSpec};
pub(crate) use measure::exclusive_clicks;
pub use pid::{pid_step, FeedbackConfig, PidState};
pub use timing::PulseTiming;
